#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdce {

using cplx = std::complex<double>;

enum class Sheet { I, II };

inline Sheet conjugate(Sheet s) { return s == Sheet::I ? Sheet::II : Sheet::I; }
std::string to_string(Sheet s);
Sheet sheet_from_string(const std::string& s);

struct BranchPointError : std::domain_error {
    using std::domain_error::domain_error;
};
struct PoleCollisionError : std::domain_error {
    using std::domain_error::domain_error;
};

// w(zeta) = sqrt(zeta-1) sqrt(zeta+1), cut on [-1,1].  Points with Im zeta == 0
// (either sign of zero) and |Re zeta| < 1 take the upper-lip value i sqrt(1-x^2);
// lower = true selects the limit from below instead.
cplx branch_w(cplx zeta, bool lower = false);

inline bool on_cut(cplx zeta) { return zeta.imag() == 0.0 && std::abs(zeta.real()) < 1.0; }

// sigma_I = g^2 (zeta - w), sigma_II = g^2 (zeta + w)   (B = 1, centred argument)
cplx sigma(cplx zeta, double g, Sheet s, bool lower = false);
cplx sigma_derivative(cplx zeta, double g, Sheet s, bool lower = false);

// Uniformising variable: u = zeta + w on sheet I (|u| >= 1), zeta - w on sheet II.
// zeta = (u + 1/u)/2 and sigma = g^2/u on either sheet.
cplx uniformizer(cplx zeta, Sheet s, bool lower = false);
inline cplx zeta_of_u(cplx u) { return 0.5 * (u + 1.0 / u); }
// Sheet of a uniformiser value; on |u| = 1 the upper lip decides (Im u >= 0 -> I).
Sheet sheet_of_u(cplx u);

// Midpoint-rule discretisation of the band, reduced units (B = 1).
struct DiscretizedBand {
    int N = 0;
    double omegaBp = 0.0;
    double g = 0.0;
    std::vector<double> k;       // pi (j - 1/2)/N
    std::vector<double> omegas;  // omegaBp - cos k
    std::vector<double> gbar;    // g sin k / sqrt(pi) * sqrt(pi/N)
};

DiscretizedBand make_band(int N, double g, double omegaBp = 0.0);

// sum_j gbar_j^2 / (z - omega_j)
cplx discrete_sigma(cplx z, const DiscretizedBand& band);

}  // namespace fdce
