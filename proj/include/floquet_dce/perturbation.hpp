#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include "floquet_dce/model.hpp"

namespace fdce {

struct PerturbativeResult {
    std::complex<double> zbar2;  // second-order creation eigenvalue
    double R = 0.0;              // |2w0' + sII(w0'-wB') - sII(w0'+wB')|
    double R2 = 0.0;             // the quantity actually divided by
    double im_dissipation = 0.0;
    double im_multimode = 0.0;
};

struct NearDegenerateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

PerturbativeResult perturb_creation(const ReducedParams& rp);

// Annihilation partner via z -> -z.
inline std::complex<double> perturb_annihilation(const ReducedParams& rp) { return -perturb_creation(rp).zbar2; }

enum class WindowClass { both_resonant, amplification_window, off_resonant };
std::string to_string(WindowClass c);

WindowClass perturb_window_report(const ReducedParams& rp);

// Intervals of omega0' >= 0 for the two resonant classes, from band membership.
struct WindowIntervals {
    double both_lo, both_hi;  // both sigma arguments in the band (empty if lo >= hi)
    double amp_lo, amp_hi;    // only sigma(w0'+wB') in the band
};
WindowIntervals window_intervals(double omegaBp);

}  // namespace fdce
