#include "floquet_dce/phenom.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "floquet_dce/io.hpp"

namespace fdce {

std::pair<std::complex<double>, std::complex<double>> phenom_eigenvalues(const PhenomParams& p)
{
    if (!(p.gamma >= 0) || !std::isfinite(p.omega0p) || !std::isfinite(p.f0))
        throw std::invalid_argument("phenom: gamma must be >= 0 and parameters finite");
    const std::complex<double> i(0, 1);
    const double a = p.f0 + 0.5 * p.gamma;
    const std::complex<double> s = std::sqrt(std::complex<double>(a * a - p.omega0p * p.omega0p, 0.0));
    return {i * (0.5 * p.gamma) - i * s, i * (0.5 * p.gamma) + i * s};
}

std::optional<std::pair<double, double>> phenom_stationary(double f0, double gamma)
{
    if (f0 <= 0) return std::nullopt;
    const double w = std::sqrt(f0 * (f0 + gamma));
    return std::make_pair(-w, w);
}

std::optional<double> phenom_stationary_numeric(double f0, double gamma, double tol)
{
    auto im_minus = [&](double w) { return phenom_eigenvalues({w, f0, gamma}).first.imag(); };
    double lo = 0.0, hi = f0 + 0.5 * gamma;
    // Im z'_- rises from -f0 at omega0' = 0 to gamma/2 at the edge
    if (!(im_minus(lo) < 0.0 && im_minus(hi) >= 0.0)) return std::nullopt;  // = 0: lossless, at the edge
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (im_minus(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::string phenom_csv(const std::vector<double>& grid, double f0, double gamma)
{
    std::ostringstream o;
    o << "omega0_prime,branch,re_z,im_z\n";
    for (int b = 0; b < 2; ++b)
        for (double w : grid) {
            const auto z = phenom_eigenvalues({w, f0, gamma});
            const std::complex<double> v = b == 0 ? z.first : z.second;
            o << fmt17(w) << ',' << b << ',' << fmt17(v.real()) << ',' << fmt17(v.imag()) << '\n';
        }
    return o.str();
}

std::pair<double, double> phenom_bifurcation_edges(double f0, double gamma)
{
    const double e = f0 + 0.5 * gamma;
    return {-e, e};
}

}  // namespace fdce
