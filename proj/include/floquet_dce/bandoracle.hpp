#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "floquet_dce/dispersion.hpp"
#include "floquet_dce/model.hpp"
#include "floquet_dce/selfenergy.hpp"

namespace fdce {

using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

// J = [[0, I], [-I, 0]] of size 2m.
Eigen::MatrixXd symplectic_metric(int m);

// Index layout: 0 = a, 1..N = b_k, n = N+1 -> a*, n+1.. -> b_k*.
MatrixXc build_restricted_floquet_matrix(const ReducedParams& rp, const DiscretizedBand& band);

// ||J L J - L^T||_inf
double symplectic_residual(const MatrixXc& L);

struct EigensolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All eigenvalues, sorted by (Re, Im).
std::vector<cplx> diagonalize_restricted(const MatrixXc& L);

// Largest distance of an eigenvalue from the negative of its nearest partner.
double pm_pairing_error(const std::vector<cplx>& ev);

// Eigenvector for the eigenvalue nearest `z` by inverse iteration.
VectorXc eigenvector_near(const MatrixXc& L, cplx z, cplx* eigenvalue = nullptr);

// Normalisation product from the discrete eigenvectors at zbar and -zbar.
cplx discrete_norm_product(const MatrixXc& L, cplx zbar);

// --- full time-dependent propagation (lab frame) ---

struct PropagatorOptions {
    int steps_per_period = 200;  // step = (2 pi / Omega) / steps_per_period
    double drift_abort = 1e-6;   // on ||S^T J S - J|| / max(1, ||S||^2)
    int drift_check_every = 500;  // steps
};

struct DriftError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Propagation {
    double t_end = 0.0;
    int steps = 0;
    MatrixXc S;                    // S(t_end; 0)
    std::vector<double> t;         // sample times
    std::vector<cplx> cavity;      // S_aa at the sample times
    double drift = 0.0;            // ||S^T J S - J||_inf at t_end
    double relative_drift = 0.0;   // drift / max(1, ||S||_inf^2)
};

// -i dS/dt = L(t) S with the full lab-frame Liouvillian, f(t) = f0 sin(Omega t + theta).
// `band` must be discretised from reduce(p).  Samples (cavity element only) are
// recorded at `sample_times` (ascending, within [0, t_end]).
Propagation propagate_fundamental(const ModelParams& p, const DiscretizedBand& band, double t_end,
                                  const PropagatorOptions& opt = {}, const std::vector<double>& sample_times = {});

struct FloquetExponentSet {
    std::vector<cplx> multipliers;
    std::vector<cplx> exponents;  // -i ln(mu)/T, principal branch (defined modulo Omega)
    double period = 0.0;
    double pairing_error = 0.0;   // max_i min_j |mu_i mu_j - 1|
    double det_error = 0.0;       // |det S(T) - 1|
    double condition = 0.0;       // of the eigenvector matrix; large near exceptional points
    double drift = 0.0;
    bool defective = false;
};

FloquetExponentSet monodromy_exponents(const ModelParams& p, const DiscretizedBand& band,
                                       const PropagatorOptions& opt = {});

// Truncated Hill (harmonic-balance) eigenvalues, harmonics -K..K; an independent
// route to the Floquet exponents of the same time-periodic system.
std::vector<cplx> hill_exponents(const ModelParams& p, const DiscretizedBand& band, int K);

// Representative of z modulo `period` nearest to `target`.
cplx reduce_modulo(cplx z, double period, cplx target);

// --- decay fits ---

struct DecayFit {
    double rate = 0.0;  // -d ln|A|^2 / dt
    double r2 = 0.0;
    double t0 = 0.0, t1 = 0.0;
    bool accepted = false;  // r2 > 0.99
};

DecayFit fit_log_linear(const std::vector<double>& t, const std::vector<double>& log_y);

// Cavity survival |S_aa(t)|^2 fitted over [0.1, 0.5] t_rec, t_rec = N/(2B).
DecayFit fit_cavity_decay(const ModelParams& p, const DiscretizedBand& band, int samples = 400,
                          const PropagatorOptions& opt = {});

// --- comparison report ---

struct ComparisonEntry {
    Root root;
    cplx oracle;
    double distance = 0.0;
    std::string method;  // restricted-matrix | propagation-fit
    bool matched = true;
};

struct ComparisonReport {
    int N = 0;
    std::vector<ComparisonEntry> entries;
    std::vector<std::string> notes;
};

// Roots with f0 = 0 and Im z' != 0 are compared through the propagation fit
// (a finite band has a real spectrum); everything else against the nearest
// restricted-matrix eigenvalue.
ComparisonReport compare_with_effective(const ReducedParams& rp, const DiscretizedBand& band,
                                        const std::vector<Root>& roots);
nlohmann::json to_json(const ComparisonReport& r);

}  // namespace fdce
