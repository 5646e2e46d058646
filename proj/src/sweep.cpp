#include "floquet_dce/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "floquet_dce/io.hpp"

namespace fdce {

std::string to_string(CriticalKind k) { return k == CriticalKind::exceptional ? "exceptional" : "stationary"; }

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v;
    if (n <= 0) return v;
    if (n == 1) return {a};
    v.resize(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * (double(i) / (n - 1));
    v.back() = b;
    return v;
}

namespace {

struct State {
    double w;
    SurfacePoint p;
};

// One predictor-corrector pass from hist.back() to w_to in 2^level substeps.
std::optional<SurfacePoint> advance(const ReducedParams& tmpl, std::vector<State> hist, double w_to,
                                    const SweepOptions& opt)
{
    const double w_from = hist.back().w;
    for (int level = 0; level <= opt.max_refine; ++level) {
        std::vector<State> h = hist;
        const int m = 1 << level;
        bool ok = true;
        for (int s = 1; s <= m && ok; ++s) {
            const double w = w_from + (w_to - w_from) * (double(s) / m);
            const State& cur = h.back();
            cplx pred = cur.p.z;
            double bound;
            if (h.size() >= 2) {
                const State& prev = h[h.size() - 2];
                pred = cur.p.z + (cur.p.z - prev.p.z) * ((w - cur.w) / (cur.w - prev.w));
                bound = std::max(opt.continuity_factor * std::abs(pred - cur.p.z), opt.continuity_floor);
            }
            else {
                bound = std::max(opt.continuity_floor, 10.0 * std::abs(w - cur.w));
            }
            // without coupling there are no cuts and the sheet labels are inert
            const bool follow = tmpl.g != 0.0;
            const SurfacePoint start = follow ? move_on_surface(cur.p, pred, tmpl.omegaBp) : SurfacePoint{pred, cur.p.sheets};
            const NewtonOutcome n = surface_newton(at_omega(tmpl, w), start, opt.solver, follow);
            if (!n.converged || std::abs(n.point.z - cur.p.z) > bound) {
                ok = false;
                break;
            }
            h.push_back({w, n.point});
            if (h.size() > 2) h.erase(h.begin());
        }
        if (ok) return h.back().p;
    }
    return std::nullopt;
}

struct Candidate {
    SheetPair sp;
    cplx z;
    double w, lo, hi;
    std::vector<int> ids;
};

const BranchPoint* point_at(const Branch& b, int start, int j)
{
    const int k = j - start;
    if (k < 0 || k >= int(b.points.size())) return nullptr;
    return &b.points[k];
}

}  // namespace

std::optional<SurfacePoint> continue_root(const ReducedParams& tmpl, SurfacePoint start, double omega_from,
                                          double omega_to, const SweepOptions& opt)
{
    return advance(tmpl, {{omega_from, start}}, omega_to, opt);
}

std::optional<CriticalPoint> find_exceptional(const ReducedParams& tmpl, SheetPair sheets, double lo, double hi,
                                              cplx z_guess, double omega_guess, const SolverOptions& opt)
{
    const SurfacePoint ref{z_guess, sheets};
    const int chart = pick_chart(z_guess, at_omega(tmpl, omega_guess), opt.chart_radius);
    const cplx q0 = chart_coordinate(ref, at_omega(tmpl, omega_guess), chart);

    using Vec3 = Eigen::Vector3d;
    using Vec4 = Eigen::Vector4d;
    auto residual = [&](const Vec3& x, ChartValue* out = nullptr) {
        const ChartValue cv = chart_eval(at_omega(tmpl, x(2)), chart, {x(0), x(1)}, ref, true);
        if (out) *out = cv;
        return Vec4(cv.D.real(), cv.D.imag(), cv.Dq.real(), cv.Dq.imag());
    };

    Vec3 x(q0.real(), q0.imag(), omega_guess);
    double mu = 1e-3;
    try {
        Vec4 r = residual(x);
        for (int it = 0; it < 200 && r.norm() > 1e-15; ++it) {
            Eigen::Matrix<double, 4, 3> J;
            for (int k = 0; k < 3; ++k) {
                const double h = 1e-7 * std::max(1.0, std::abs(x(k)));
                Vec3 xp = x, xm = x;
                xp(k) += h;
                xm(k) -= h;
                J.col(k) = (residual(xp) - residual(xm)) / (2 * h);
            }
            const Eigen::Matrix3d JtJ = J.transpose() * J;
            const Vec3 Jtr = J.transpose() * r;
            bool accepted = false;
            for (int tries = 0; tries < 20; ++tries) {
                Eigen::Matrix3d A = JtJ;
                A.diagonal() *= (1.0 + mu);
                const Vec3 dx = A.ldlt().solve(-Jtr);
                const Vec3 xn = x + dx;
                const Vec4 rn = residual(xn);
                if (rn.allFinite() && rn.norm() < r.norm()) {
                    x = xn;
                    r = rn;
                    mu = std::max(mu / 3.0, 1e-12);
                    accepted = true;
                    break;
                }
                mu *= 4.0;
            }
            if (!accepted) break;
        }
    }
    catch (const std::domain_error&) {
        return std::nullopt;
    }
    ChartValue cv;
    residual(x, &cv);
    if (!(x(2) >= lo && x(2) <= hi)) return std::nullopt;
    const double dz = cv.zq == 0.0 ? std::numeric_limits<double>::infinity() : std::abs(cv.Dq / cv.zq);
    if (!(std::abs(cv.D) < 1e-10 && dz < 1e-8)) return std::nullopt;
    CriticalPoint cp;
    cp.kind = CriticalKind::exceptional;
    cp.omega0p_star = x(2);
    cp.zprime_star = cv.p.z;
    cp.sheets = cv.p.sheets;
    cp.residual = std::abs(cv.D);
    cp.derivative_residual = dz;
    return cp;
}

StationarySearch find_stationary(const ReducedParams& tmpl, const Branch& branch, const SolverOptions& opt)
{
    StationarySearch out;
    const auto& pts = branch.points;
    if (pts.size() < 2) return out;
    const double tol = opt.stationary_tol;
    auto sgn = [&](const BranchPoint& p) {
        const double im = p.root.z.imag();
        return std::abs(im) < tol ? 0 : (im > 0 ? 1 : -1);
    };
    SweepOptions sopt;
    sopt.solver = opt;
    int last = -1;  // index of last point with nonzero sign
    for (int i = 0; i < int(pts.size()); ++i) {
        const int s = sgn(pts[i]);
        if (s == 0) continue;
        if (last >= 0 && sgn(pts[last]) != s) {
            if (i - last == 2) {
                // a single point already inside the tolerance
                const BranchPoint& p = pts[last + 1];
                out.found.push_back({CriticalKind::stationary, p.omega0p, p.root.z, p.root.sheets, {branch.id},
                                     p.root.residual, 0.0});
            }
            else if (i - last == 1) {
                double wl = pts[last].omega0p, wh = pts[i].omega0p;
                SurfacePoint pl{pts[last].root.z, pts[last].root.sheets};
                const int sl = sgn(pts[last]);
                bool done = false;
                for (int it = 0; it < 200 && !done; ++it) {
                    const double wm = 0.5 * (wl + wh);
                    const auto pm = continue_root(tmpl, pl, wl, wm, sopt);
                    if (!pm) break;
                    const double im = pm->z.imag();
                    if (std::abs(im) < tol) {
                        const Root r = classify(pm->z, pm->sheets, at_omega(tmpl, wm), opt);
                        out.found.push_back(
                            {CriticalKind::stationary, wm, pm->z, pm->sheets, {branch.id}, r.residual, 0.0});
                        done = true;
                    }
                    else if ((im > 0 ? 1 : -1) == sl) {
                        wl = wm;
                        pl = *pm;
                    }
                    else {
                        wh = wm;
                    }
                }
                if (!done) {
                    std::ostringstream m;
                    m << "branch " << branch.id << ": stationary bisection unresolved in [" << pts[last].omega0p
                      << ", " << pts[i].omega0p << "]";
                    out.unresolved.push_back(m.str());
                }
            }
            else {
                // several points inside the tolerance: report the one closest to Im = 0
                int best = last + 1;
                for (int k = last + 1; k < i; ++k)
                    if (std::abs(pts[k].root.z.imag()) < std::abs(pts[best].root.z.imag())) best = k;
                const BranchPoint& p = pts[best];
                out.found.push_back({CriticalKind::stationary, p.omega0p, p.root.z, p.root.sheets, {branch.id},
                                     p.root.residual, 0.0});
            }
        }
        last = i;
    }
    return out;
}

SweepResult sweep_branches(const ReducedParams& tmpl, const std::vector<double>& grid, const SweepOptions& opt)
{
    if (grid.size() < 2) throw std::invalid_argument("sweep grid needs at least two points");
    for (size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("sweep grid must be strictly increasing");
    validate(tmpl);

    SweepResult res;
    std::vector<int> start_index;            // grid index of each branch's first point
    std::vector<std::vector<State>> hist;    // last <= 2 states per branch
    std::vector<int> active;
    std::vector<Candidate> cands;

    SolverOptions seed_opt = opt.solver;
    seed_opt.max_iter = opt.seed_max_iter;
    seed_opt.max_halvings = opt.seed_max_halvings;

    auto new_branch = [&](int j, const Root& r) {
        Branch b;
        b.id = int(res.branches.size());
        b.sheets = r.sheets;
        b.points.push_back({grid[j], r});
        res.branches.push_back(b);
        start_index.push_back(j);
        hist.push_back({{grid[j], {r.z, r.sheets}}});
        active.push_back(b.id);
    };

    auto seed_at = [&](int j, const std::vector<std::pair<SheetPair, cplx>>& extra) {
        const ReducedParams rp = at_omega(tmpl, grid[j]);
        for (const SheetPair& sp : opt.seed_sheets) {
            std::vector<cplx> seeds = default_seeds(rp);
            for (const auto& [s, z] : extra)
                if (s == sp) seeds.push_back(z);
            const SolveResult sr = solve_roots(rp, sp, seeds, seed_opt);
            for (const Root& r : sr.roots) {
                bool claimed = false;
                for (int id : active) {
                    const BranchPoint& p = res.branches[id].points.back();
                    if (p.omega0p == grid[j] && p.root.sheets == sp && std::abs(p.root.z - r.z) < 1e-6) {
                        claimed = true;
                        break;
                    }
                }
                if (!claimed) new_branch(j, r);
            }
        }
    };

    seed_at(0, {});
    for (size_t j = 1; j < grid.size(); ++j) {
        const double w = grid[j];
        const ReducedParams rp = at_omega(tmpl, w);
        std::vector<std::optional<SurfacePoint>> next(active.size());
        for (size_t a = 0; a < active.size(); ++a) next[a] = advance(tmpl, hist[active[a]], w, opt);

        // two branches landing on one root: stop both, an EP is nearby
        std::vector<bool> stop(active.size(), false);
        for (size_t a = 0; a < active.size(); ++a)
            for (size_t b = a + 1; b < active.size(); ++b) {
                if (!next[a] || !next[b] || !(next[a]->sheets == next[b]->sheets)) continue;
                if (std::abs(next[a]->z - next[b]->z) < 1e-7 * std::max(1.0, std::abs(next[a]->z))) {
                    stop[a] = stop[b] = true;
                    const auto& pa = res.branches[active[a]].points.back();
                    const auto& pb = res.branches[active[b]].points.back();
                    // the EP may sit exactly on grid[j]: bracket one step beyond
                    const double h = w - grid[j - 1];
                    cands.push_back({pa.root.sheets, 0.5 * (pa.root.z + pb.root.z), grid[j - 1], grid[j - 1] - h,
                                     w + h, {active[a], active[b]}});
                }
            }

        std::vector<int> still;
        std::vector<std::pair<SheetPair, cplx>> extra;
        for (size_t a = 0; a < active.size(); ++a) {
            const int id = active[a];
            Branch& br = res.branches[id];
            if (next[a] && !stop[a]) {
                br.points.push_back({w, classify(next[a]->z, next[a]->sheets, rp, opt.solver)});
                hist[id].push_back({w, *next[a]});
                if (hist[id].size() > 2) hist[id].erase(hist[id].begin());
                still.push_back(id);
            }
            else {
                const auto& h = hist[id];
                if (!next[a]) {
                    br.ends_in_gap = true;
                    // a lone branch failing at a square-root turn: its partner may never have been seeded
                    const double step = w - grid[j - 1];
                    cands.push_back({h.back().p.sheets, h.back().p.z, h.back().w, grid[j - 1] - step, w + step, {id}});
                }
                cplx pred = h.back().p.z;
                if (h.size() >= 2) pred += (h.back().p.z - h[0].p.z) * ((w - h.back().w) / (h.back().w - h[0].w));
                extra.push_back({h.back().p.sheets, pred});
            }
        }
        active = still;
        seed_at(int(j), extra);
    }

    auto gap_warnings = [&] {
        // a branch stopping next to a certified EP is the intended behaviour
        const double h = (grid.back() - grid.front()) / double(grid.size() - 1);
        for (const Branch& b : res.branches) {
            if (!b.ends_in_gap) continue;
            const double w_end = b.points.back().omega0p;
            const bool at_ep = std::any_of(res.critical.begin(), res.critical.end(), [&](const CriticalPoint& c) {
                return c.kind == CriticalKind::exceptional && std::abs(c.omega0p_star - w_end) < 4 * h;
            });
            if (at_ep) continue;
            std::ostringstream m;
            m << "branch " << b.id << " stopped at omega0'=" << fmt17(w_end) << " (corrector failed)";
            res.warnings.push_back(m.str());
        }
    };

    if (!opt.detect_critical) {
        gap_warnings();
        return res;
    }

    // pair separations: interior minima and ends of overlap are EP candidates
    const int nb = int(res.branches.size());
    for (int a = 0; a < nb; ++a)
        for (int b = a + 1; b < nb; ++b) {
            const Branch& A = res.branches[a];
            const Branch& Bb = res.branches[b];
            const int j0 = std::max(start_index[a], start_index[b]);
            const int j1 = std::min(start_index[a] + int(A.points.size()), start_index[b] + int(Bb.points.size())) - 1;
            if (j1 < j0) continue;
            auto dist = [&](int j) {
                const BranchPoint* pa = point_at(A, start_index[a], j);
                const BranchPoint* pb = point_at(Bb, start_index[b], j);
                if (!pa || !pb || !(pa->root.sheets == pb->root.sheets)) return std::numeric_limits<double>::infinity();
                return std::abs(pa->root.z - pb->root.z);
            };
            auto push = [&](int j) {
                const BranchPoint* pa = point_at(A, start_index[a], j);
                const BranchPoint* pb = point_at(Bb, start_index[b], j);
                const double step = grid[std::min(j + 1, int(grid.size()) - 1)] - grid[std::max(j - 1, 0)];
                cands.push_back({pa->root.sheets, 0.5 * (pa->root.z + pb->root.z), grid[j], grid[j] - 2 * step,
                                 grid[j] + 2 * step, {a, b}});
            };
            double dprev = std::numeric_limits<double>::infinity();
            for (int j = j0; j <= j1; ++j) {
                const double d = dist(j);
                if (!std::isfinite(d)) {
                    dprev = d;
                    continue;
                }
                const double dnext = j < j1 ? dist(j + 1) : std::numeric_limits<double>::infinity();
                const bool edge = (j == j0 && j0 > 0) || (j == j1 && j1 < int(grid.size()) - 1);
                const bool interior_min = std::isfinite(dprev) && std::isfinite(dnext) && d < dprev && d < dnext;
                if (d < opt.ep_candidate_distance && (interior_min || edge)) push(j);
                dprev = d;
            }
        }

    std::vector<Candidate> uniq;
    for (const Candidate& c : cands) {
        const bool dup = std::any_of(uniq.begin(), uniq.end(), [&](const Candidate& u) {
            return u.sp == c.sp && std::abs(u.w - c.w) < 1e-12 && std::abs(u.z - c.z) < 1e-3;
        });
        if (!dup) uniq.push_back(c);
    }
    for (const Candidate& c : uniq) {
        auto ep = find_exceptional(tmpl, c.sp, c.lo, c.hi, c.z, c.w, opt.solver);
        if (!ep) continue;
        ep->branches = c.ids;
        auto same = std::find_if(res.critical.begin(), res.critical.end(), [&](const CriticalPoint& q) {
            return q.kind == CriticalKind::exceptional && q.sheets == ep->sheets &&
                   std::abs(q.omega0p_star - ep->omega0p_star) < 1e-7 && std::abs(q.zprime_star - ep->zprime_star) < 1e-5;
        });
        if (same == res.critical.end())
            res.critical.push_back(*ep);
        else
            for (int id : c.ids)
                if (std::find(same->branches.begin(), same->branches.end(), id) == same->branches.end())
                    same->branches.push_back(id);
    }
    for (const Branch& b : res.branches) {
        StationarySearch s = find_stationary(tmpl, b, opt.solver);
        res.critical.insert(res.critical.end(), s.found.begin(), s.found.end());
        res.warnings.insert(res.warnings.end(), s.unresolved.begin(), s.unresolved.end());
    }
    std::stable_sort(res.critical.begin(), res.critical.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        if (a.omega0p_star != b.omega0p_star) return a.omega0p_star < b.omega0p_star;
        if (a.zprime_star.real() != b.zprime_star.real()) return a.zprime_star.real() < b.zprime_star.real();
        return a.zprime_star.imag() < b.zprime_star.imag();
    });
    for (auto& c : res.critical) std::sort(c.branches.begin(), c.branches.end());
    gap_warnings();
    return res;
}

std::string branches_csv(const SweepResult& res)
{
    std::ostringstream o;
    o << "omega0_prime,branch_id,re_z,im_z,sheet_plus,sheet_minus,residual\n";
    for (const Branch& b : res.branches)
        for (const BranchPoint& p : b.points)
            o << fmt17(p.omega0p) << ',' << b.id << ',' << fmt17(p.root.z.real()) << ',' << fmt17(p.root.z.imag())
              << ',' << to_string(p.root.sheets.plus) << ',' << to_string(p.root.sheets.minus) << ','
              << fmt17(p.root.residual) << '\n';
    return o.str();
}

std::string critical_csv(const SweepResult& res)
{
    std::ostringstream o;
    o << "kind,omega0_prime,re_z,im_z,branches\n";
    for (const CriticalPoint& c : res.critical) {
        o << to_string(c.kind) << ',' << fmt17(c.omega0p_star) << ',' << fmt17(c.zprime_star.real()) << ','
          << fmt17(c.zprime_star.imag()) << ',';
        for (size_t i = 0; i < c.branches.size(); ++i) o << (i ? ";" : "") << c.branches[i];
        o << '\n';
    }
    return o.str();
}

void emit_sweep_csv(const SweepResult& res, const std::string& branches_path, const std::string& critical_path)
{
    write_text_file(branches_path, branches_csv(res));
    write_text_file(critical_path, critical_csv(res));
}

namespace {
// strtod rather than stod: subnormal residuals are legitimate values
double number(const std::string& cell, const std::string& line)
{
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || *end != '\0') throw std::runtime_error("branches CSV: bad number in '" + line + "'");
    return v;
}
}  // namespace

std::vector<BranchRow> parse_branches_csv(const std::string& text)
{
    std::vector<BranchRow> rows;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("omega0_prime,", 0) != 0)
        throw std::runtime_error("branches CSV: missing or wrong header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() != 7) throw std::runtime_error("branches CSV: expected 7 fields in '" + line + "'");
        rows.push_back({number(f[0], line), std::stoi(f[1]), number(f[2], line), number(f[3], line), f[4], f[5],
                        number(f[6], line)});
    }
    return rows;
}

}  // namespace fdce
