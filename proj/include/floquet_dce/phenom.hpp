#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fdce {

// Flat-band (Markovian) damped-Mathieu comparison model.
struct PhenomParams {
    double omega0p = 0.0;
    double f0 = 0.2;
    double gamma = 0.0;
};

// (z'_-, z'_+) = i gamma/2 -+ i sqrt((f0 + gamma/2)^2 - omega0'^2), principal root.
std::pair<std::complex<double>, std::complex<double>> phenom_eigenvalues(const PhenomParams& p);

// +-sqrt(f0 (f0 + gamma)); empty for f0 = 0.
std::optional<std::pair<double, double>> phenom_stationary(double f0, double gamma);

// Positive root of Im z'_- = 0 by bisection on (0, f0 + gamma/2), independent of
// the closed form above.
std::optional<double> phenom_stationary_numeric(double f0, double gamma, double tol = 1e-13);

// +-(f0 + gamma/2)
std::pair<double, double> phenom_bifurcation_edges(double f0, double gamma);

// omega0_prime,branch,re_z,im_z for both eigenvalues over the grid (branch 0 = z'_-).
std::string phenom_csv(const std::vector<double>& grid, double f0, double gamma);

}  // namespace fdce
