#include "floquet_dce/selfenergy.hpp"

#include <cmath>
#include <numbers>

namespace fdce {

std::string to_string(Sheet s) { return s == Sheet::I ? "I" : "II"; }

Sheet sheet_from_string(const std::string& s)
{
    if (s == "I" || s == "1") return Sheet::I;
    if (s == "II" || s == "2") return Sheet::II;
    throw std::invalid_argument("unknown sheet '" + s + "' (expected I or II)");
}

cplx branch_w(cplx zeta, bool lower)
{
    if (on_cut(zeta)) {
        const double x = zeta.real();
        const double r = std::sqrt((1.0 - x) * (1.0 + x));
        return {0.0, lower ? -r : r};
    }
    return std::sqrt(zeta - 1.0) * std::sqrt(zeta + 1.0);
}

namespace {
// zeta - w and zeta + w computed without cancellation: their product is 1.
void split(cplx zeta, cplx& minus, cplx& plus, bool lower)
{
    const cplx w = branch_w(zeta, lower);
    const cplx a = zeta + w, b = zeta - w;
    if (std::abs(a) >= std::abs(b)) {
        plus = a;
        minus = std::abs(a) > 0 ? 1.0 / a : b;
    }
    else {
        minus = b;
        plus = 1.0 / b;
    }
}
}  // namespace

cplx sigma(cplx zeta, double g, Sheet s, bool lower)
{
    cplx m, p;
    split(zeta, m, p, lower);
    return g * g * (s == Sheet::I ? m : p);
}

cplx sigma_derivative(cplx zeta, double g, Sheet s, bool lower)
{
    if (g == 0.0) return 0.0;
    if (zeta == cplx(1.0, 0.0) || zeta == cplx(-1.0, 0.0))
        throw BranchPointError("sigma derivative undefined at branch point zeta = +-1");
    const cplx w = branch_w(zeta, lower);
    // dsigma/dzeta = +-sigma/w
    return (s == Sheet::I ? -1.0 : 1.0) * sigma(zeta, g, s, lower) / w;
}

cplx uniformizer(cplx zeta, Sheet s, bool lower)
{
    cplx m, p;
    split(zeta, m, p, lower);
    return s == Sheet::I ? p : m;
}

Sheet sheet_of_u(cplx u)
{
    const double a = std::abs(u);
    if (a > 1.0) return Sheet::I;
    if (a < 1.0) return Sheet::II;
    return u.imag() >= 0.0 ? Sheet::I : Sheet::II;
}

DiscretizedBand make_band(int N, double g, double omegaBp)
{
    if (N < 1) throw std::invalid_argument("band discretisation needs N >= 1");
    DiscretizedBand b;
    b.N = N;
    b.omegaBp = omegaBp;
    b.g = g;
    b.k.resize(N);
    b.omegas.resize(N);
    b.gbar.resize(N);
    const double dk = std::numbers::pi / N;
    for (int j = 0; j < N; ++j) {
        const double k = dk * (j + 0.5);
        b.k[j] = k;
        b.omegas[j] = omegaBp - std::cos(k);
        b.gbar[j] = g * std::sin(k) / std::sqrt(std::numbers::pi) * std::sqrt(dk);
    }
    return b;
}

cplx discrete_sigma(cplx z, const DiscretizedBand& band)
{
    cplx s = 0.0;
    for (int j = 0; j < band.N; ++j) {
        const cplx d = z - band.omegas[j];
        if (std::abs(d) < 1e-14) throw PoleCollisionError("z coincides with a band grid frequency");
        s += band.gbar[j] * band.gbar[j] / d;
    }
    return s;
}

}  // namespace fdce
