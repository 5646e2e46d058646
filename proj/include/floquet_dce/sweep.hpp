#pragma once

#include <optional>
#include <string>
#include <vector>

#include "floquet_dce/dispersion.hpp"

namespace fdce {

struct BranchPoint {
    double omega0p = 0.0;
    Root root;
};

// A continuation-tracked eigenvalue curve.  Points carry their own sheets: a
// branch that crosses a cut of sigma continues on the adjacent sheet.
struct Branch {
    int id = 0;
    SheetPair sheets;  // sheets at the first point
    std::vector<BranchPoint> points;
    bool ends_in_gap = false;  // corrector gave up after all refinements
};

enum class CriticalKind { exceptional, stationary };
std::string to_string(CriticalKind k);

struct CriticalPoint {
    CriticalKind kind = CriticalKind::exceptional;
    double omega0p_star = 0.0;
    cplx zprime_star;
    SheetPair sheets;
    std::vector<int> branches;
    double residual = 0.0;             // |D|
    double derivative_residual = 0.0;  // |dD/dz'| (exceptional only)
};

struct SweepOptions {
    SolverOptions solver;
    std::vector<SheetPair> seed_sheets{kPhysicalSheets};
    double continuity_factor = 5.0;
    double continuity_floor = 1e-4;
    int max_refine = 6;
    int seed_max_iter = 40;               // Newton budget for fresh seeds
    int seed_max_halvings = 12;
    double ep_candidate_distance = 0.05;  // pair separation that triggers an EP search
    bool detect_critical = true;
};

struct SweepResult {
    std::vector<Branch> branches;
    std::vector<CriticalPoint> critical;
    std::vector<std::string> warnings;
};

std::vector<double> linspace(double a, double b, int n);

inline ReducedParams at_omega(ReducedParams rp, double omega0p)
{
    rp.omega0p = omega0p;
    return rp;
}

SweepResult sweep_branches(const ReducedParams& tmpl, const std::vector<double>& grid, const SweepOptions& opt = {});
inline SweepResult sweep_branches(const ReducedParams& tmpl, const std::vector<double>& grid, SheetPair sheets,
                                  SweepOptions opt = {})
{
    opt.seed_sheets = {sheets};
    return sweep_branches(tmpl, grid, opt);
}

// Solve D = 0, dD/dz' = 0 for (z', omega0') by damped Gauss-Newton near a
// collision candidate.  Returns a certified point or nothing.
std::optional<CriticalPoint> find_exceptional(const ReducedParams& tmpl, SheetPair sheets, double lo, double hi,
                                              cplx z_guess, double omega_guess, const SolverOptions& opt = {});
inline std::optional<CriticalPoint> find_exceptional(const ReducedParams& tmpl, SheetPair sheets, double lo,
                                                     double hi, cplx z_guess)
{
    return find_exceptional(tmpl, sheets, lo, hi, z_guess, 0.5 * (lo + hi));
}

struct StationarySearch {
    std::vector<CriticalPoint> found;
    std::vector<std::string> unresolved;
};
StationarySearch find_stationary(const ReducedParams& tmpl, const Branch& branch, const SolverOptions& opt = {});

// Follow a surface point from omega_from to omega_to by predictor-corrector with
// step refinement; used by the sweep and by bisection searches.
std::optional<SurfacePoint> continue_root(const ReducedParams& tmpl, SurfacePoint start, double omega_from,
                                          double omega_to, const SweepOptions& opt = {});

void emit_sweep_csv(const SweepResult& res, const std::string& branches_path, const std::string& critical_path);
std::string branches_csv(const SweepResult& res);
std::string critical_csv(const SweepResult& res);

// Parse of branches_csv output (for round trips and downstream tools).
struct BranchRow {
    double omega0p;
    int branch_id;
    double re, im;
    std::string sheet_plus, sheet_minus;
    double residual;
};
std::vector<BranchRow> parse_branches_csv(const std::string& text);

}  // namespace fdce
