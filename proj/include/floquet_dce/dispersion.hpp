#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "floquet_dce/model.hpp"
#include "floquet_dce/selfenergy.hpp"

namespace fdce {

// plus: sheet of sigma(z' + omegaB'), minus: sheet of sigma(z' - omegaB').
struct SheetPair {
    Sheet plus = Sheet::II;
    Sheet minus = Sheet::II;
    friend bool operator==(const SheetPair&, const SheetPair&) = default;
};

// Partner sheets of the z' -> -z' pairing: the arguments trade places,
// sigma_s(-zeta) = -sigma_s(zeta) off the cut, so no I <-> II exchange is involved.
inline SheetPair swap(SheetPair s) { return {s.minus, s.plus}; }
inline SheetPair conjugate(SheetPair s) { return {conjugate(s.plus), conjugate(s.minus)}; }
std::string to_string(SheetPair s);
SheetPair sheet_pair_from_string(const std::string& s);  // "II,II", "I,II", ...

inline const SheetPair kPhysicalSheets{Sheet::II, Sheet::II};
inline const SheetPair kFirstSheets{Sheet::I, Sheet::I};

enum class ModeKind { annihilation, creation };
enum class Stability { decaying, amplifying, stationary, stable_oscillatory };
std::string to_string(ModeKind k);
std::string to_string(Stability s);

struct Root {
    cplx z;
    SheetPair sheets;
    double residual = 0.0;
    ModeKind kind = ModeKind::annihilation;
    Stability stability = Stability::decaying;
};

struct SolverOptions {
    double newton_tol = 1e-12;
    double step_tol = 1e-10;
    int max_iter = 200;
    int max_halvings = 30;
    double dedup_tol = 1e-8;
    double stationary_tol = 1e-9;
    double chart_radius = 0.25;  // switch to the uniformiser this close to a branch point
};

Eigen::Matrix2cd build_leff(cplx z, const ReducedParams& rp, SheetPair sp);

// D(z') = (z'+w0'-sigma(z'+wB'))(z'-w0'-sigma(z'-wB')) + f0^2.
// lower = true evaluates on-cut arguments with the lower-lip limit.
cplx dispersion_value(cplx z, const ReducedParams& rp, SheetPair sp, bool lower = false);
cplx dispersion_derivative(cplx z, const ReducedParams& rp, SheetPair sp, bool lower = false);

// The two factors of D; F1 carries sigma(z'+wB'), F2 carries sigma(z'-wB').
cplx factor_plus(cplx z, const ReducedParams& rp, SheetPair sp);
cplx factor_minus(cplx z, const ReducedParams& rp, SheetPair sp);

Root classify(cplx z, SheetPair sp, const ReducedParams& rp, const SolverOptions& opt = {});
bool argument_in_band(double x, const ReducedParams& rp);  // either sigma argument inside (-1,1)

// A point on the four-sheeted surface.
struct SurfacePoint {
    cplx z;
    SheetPair sheets;
};

// Straight move from p.z to `to`; each argument whose cut is crossed changes sheet.
// Im z >= 0 counts as the upper side.
SurfacePoint move_on_surface(SurfacePoint p, cplx to, double omegaBp);

struct NewtonOutcome {
    bool converged = false;
    SurfacePoint point;
    double residual = 0.0;
    double last_step = 0.0;
    int iterations = 0;
    std::string reason;
};

// Damped Newton on D.  follow_surface = false keeps the sheets fixed (lip
// convention on the cut); true continues analytically across cuts.
NewtonOutcome surface_newton(const ReducedParams& rp, SurfacePoint start, const SolverOptions& opt,
                             bool follow_surface);

// Local charts of the surface: 0 -> z itself, 1 -> uniformiser of z+wB', 2 -> of z-wB'.
// Near a branch point D is smooth in the uniformiser but not in z.
struct ChartValue {
    SurfacePoint p;
    cplx D, Dq, zq;  // D, dD/dq, dz/dq
};
int pick_chart(cplx z, const ReducedParams& rp, double radius);
cplx chart_coordinate(const SurfacePoint& p, const ReducedParams& rp, int chart);
// `ref` supplies the sheets that the chart coordinate does not determine.
ChartValue chart_eval(const ReducedParams& rp, int chart, cplx q, const SurfacePoint& ref, bool follow_surface);

struct SeedFailure {
    cplx seed;
    std::string reason;
};
struct SolveResult {
    std::vector<Root> roots;
    std::vector<SeedFailure> failures;
};

std::vector<cplx> default_seeds(const ReducedParams& rp);
SolveResult solve_roots(const ReducedParams& rp, SheetPair sp, const std::vector<cplx>& seeds,
                        const SolverOptions& opt = {});
inline SolveResult solve_roots(const ReducedParams& rp, SheetPair sp, const SolverOptions& opt = {})
{
    return solve_roots(rp, sp, default_seeds(rp), opt);
}

struct Box {
    double re0, re1, im0, im1;
};

struct ContourError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument-principle count of zeros of D (fixed sheets) inside the box.  Boxes
// straddling the real axis are split there so no edge runs across a cut.
int count_roots_in_box(const ReducedParams& rp, SheetPair sp, const Box& box);

}  // namespace fdce
