#include "floquet_dce/perturbation.hpp"

#include <algorithm>
#include <cmath>

#include "floquet_dce/selfenergy.hpp"

namespace fdce {

PerturbativeResult perturb_creation(const ReducedParams& rp)
{
    validate(rp);
    const double w0 = rp.omega0p, wB = rp.omegaBp, f2 = rp.f0 * rp.f0;
    const cplx sd = sigma(cplx(w0 - wB, 0.0), rp.g, Sheet::II);  // dissipative channel
    const cplx sm = sigma(cplx(w0 + wB, 0.0), rp.g, Sheet::II);  // multimode channel
    const cplx den = 2.0 * w0 + sd - sm;
    if (std::abs(den) <= 1e-10)
        throw NearDegenerateError("perturbative denominator vanishes; use the non-perturbative solver");
    PerturbativeResult r;
    r.zbar2 = w0 + sd - f2 / den;
    r.R2 = std::norm(den);
    r.R = std::sqrt(r.R2);
    r.im_dissipation = (1.0 + f2 / r.R2) * sd.imag();
    r.im_multimode = -(f2 / r.R2) * sm.imag();
    return r;
}

std::string to_string(WindowClass c)
{
    switch (c) {
    case WindowClass::both_resonant: return "both-resonant";
    case WindowClass::amplification_window: return "amplification-window";
    case WindowClass::off_resonant: return "off-resonant";
    }
    return "?";
}

WindowClass perturb_window_report(const ReducedParams& rp)
{
    const double w0 = rp.omega0p, wB = rp.omegaBp;
    const bool diss = std::abs(w0 - wB) < 1.0;
    const bool multi = std::abs(w0 + wB) < 1.0;
    if (diss && multi) return WindowClass::both_resonant;
    if (multi) return WindowClass::amplification_window;
    return WindowClass::off_resonant;
}

WindowIntervals window_intervals(double omegaBp)
{
    if (omegaBp > 0) throw std::invalid_argument("window report assumes Delta = -2 omegaB' >= 0");
    const double half = -omegaBp;  // Delta/2
    WindowIntervals w;
    w.both_lo = std::max(0.0, half - 1.0);
    w.both_hi = 1.0 - half;
    w.amp_lo = std::max({0.0, half - 1.0, 1.0 - half});
    w.amp_hi = half + 1.0;
    return w;
}

}  // namespace fdce
