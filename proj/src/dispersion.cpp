#include "floquet_dce/dispersion.hpp"

#include <algorithm>
#include <cmath>

#include "floquet_dce/perturbation.hpp"
#include "floquet_dce/phenom.hpp"

namespace fdce {

std::string to_string(SheetPair s) { return to_string(s.plus) + "," + to_string(s.minus); }

SheetPair sheet_pair_from_string(const std::string& s)
{
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("sheet pair must look like 'II,II'");
    return {sheet_from_string(s.substr(0, comma)), sheet_from_string(s.substr(comma + 1))};
}

std::string to_string(ModeKind k) { return k == ModeKind::creation ? "creation" : "annihilation"; }

std::string to_string(Stability s)
{
    switch (s) {
    case Stability::decaying: return "decaying";
    case Stability::amplifying: return "amplifying";
    case Stability::stationary: return "stationary";
    case Stability::stable_oscillatory: return "stable-oscillatory";
    }
    return "?";
}

Eigen::Matrix2cd build_leff(cplx z, const ReducedParams& rp, SheetPair sp)
{
    const cplx i(0, 1);
    Eigen::Matrix2cd L;
    L(0, 0) = -rp.omega0p + sigma(z + rp.omegaBp, rp.g, sp.plus);
    L(0, 1) = -i * rp.f0;
    L(1, 0) = -i * rp.f0;
    L(1, 1) = rp.omega0p + sigma(z - rp.omegaBp, rp.g, sp.minus);
    return L;
}

cplx factor_plus(cplx z, const ReducedParams& rp, SheetPair sp)
{
    return z + rp.omega0p - sigma(z + rp.omegaBp, rp.g, sp.plus);
}

cplx factor_minus(cplx z, const ReducedParams& rp, SheetPair sp)
{
    return z - rp.omega0p - sigma(z - rp.omegaBp, rp.g, sp.minus);
}

cplx dispersion_value(cplx z, const ReducedParams& rp, SheetPair sp, bool lower)
{
    const cplx F1 = z + rp.omega0p - sigma(z + rp.omegaBp, rp.g, sp.plus, lower);
    const cplx F2 = z - rp.omega0p - sigma(z - rp.omegaBp, rp.g, sp.minus, lower);
    return F1 * F2 + rp.f0 * rp.f0;
}

cplx dispersion_derivative(cplx z, const ReducedParams& rp, SheetPair sp, bool lower)
{
    const cplx F1 = z + rp.omega0p - sigma(z + rp.omegaBp, rp.g, sp.plus, lower);
    const cplx F2 = z - rp.omega0p - sigma(z - rp.omegaBp, rp.g, sp.minus, lower);
    const cplx dF1 = 1.0 - sigma_derivative(z + rp.omegaBp, rp.g, sp.plus, lower);
    const cplx dF2 = 1.0 - sigma_derivative(z - rp.omegaBp, rp.g, sp.minus, lower);
    return dF1 * F2 + F1 * dF2;
}

bool argument_in_band(double x, const ReducedParams& rp)
{
    return std::abs(x + rp.omegaBp) < 1.0 || std::abs(x - rp.omegaBp) < 1.0;
}

Root classify(cplx z, SheetPair sp, const ReducedParams& rp, const SolverOptions& opt)
{
    Root r;
    r.z = z;
    r.sheets = sp;
    r.residual = std::abs(dispersion_value(z, rp, sp));
    if (std::abs(z.imag()) < opt.stationary_tol)
        r.stability = argument_in_band(z.real(), rp) ? Stability::stationary : Stability::stable_oscillatory;
    else
        r.stability = z.imag() > 0 ? Stability::decaying : Stability::amplifying;
    if (z.real() > opt.dedup_tol)
        r.kind = ModeKind::creation;
    else if (z.real() < -opt.dedup_tol)
        r.kind = ModeKind::annihilation;
    else  // purely imaginary: the factor that nearly vanishes names the mode
        r.kind = std::abs(factor_minus(z, rp, sp)) < std::abs(factor_plus(z, rp, sp)) ? ModeKind::creation
                                                                                      : ModeKind::annihilation;
    return r;
}

SurfacePoint move_on_surface(SurfacePoint p, cplx to, double omegaBp)
{
    const cplx a = p.z;
    const bool up_a = a.imag() >= 0.0, up_b = to.imag() >= 0.0;
    if (up_a != up_b) {
        const double t = a.imag() / (a.imag() - to.imag());
        const double x = a.real() + t * (to.real() - a.real());
        if (std::abs(x + omegaBp) < 1.0) p.sheets.plus = conjugate(p.sheets.plus);
        if (std::abs(x - omegaBp) < 1.0) p.sheets.minus = conjugate(p.sheets.minus);
    }
    p.z = to;
    return p;
}

namespace {

struct Chart {
    int kind = 0;
    cplx q;
};

double branch_distance(cplx zeta) { return std::min(std::abs(zeta - 1.0), std::abs(zeta + 1.0)); }

Chart chart_at(const SurfacePoint& p, const ReducedParams& rp, int kind)
{
    if (kind == 1) return {1, uniformizer(p.z + rp.omegaBp, p.sheets.plus)};
    if (kind == 2) return {2, uniformizer(p.z - rp.omegaBp, p.sheets.minus)};
    return {0, p.z};
}

struct Local {
    SurfacePoint p;
    cplx D, Dq, zq;
};

// Evaluate D and dD/dq at chart coordinate q.  `ref` supplies the sheets of the
// non-chart argument (and of everything when sheets are fixed).
Local evaluate(const ReducedParams& rp, const Chart& c, const SurfacePoint& ref, bool follow)
{
    const double g2 = rp.g * rp.g, wB = rp.omegaBp;
    Local L;
    L.p = ref;
    cplx s1, s2, ds1, ds2;
    if (c.kind == 0) {
        L.p.z = c.q;
        if (follow) L.p = move_on_surface(ref, c.q, wB);
        L.zq = 1.0;
        const cplx z = L.p.z;
        s1 = sigma(z + wB, rp.g, L.p.sheets.plus);
        s2 = sigma(z - wB, rp.g, L.p.sheets.minus);
        ds1 = sigma_derivative(z + wB, rp.g, L.p.sheets.plus);
        ds2 = sigma_derivative(z - wB, rp.g, L.p.sheets.minus);
    }
    else {
        const cplx q = c.q;
        const cplx zeta = zeta_of_u(q);
        const cplx z = c.kind == 1 ? zeta - wB : zeta + wB;
        L.zq = 0.5 * (1.0 - 1.0 / (q * q));
        const cplx sc = g2 / q, dsc = -g2 / (q * q);
        Sheet& own = c.kind == 1 ? L.p.sheets.plus : L.p.sheets.minus;
        Sheet& other = c.kind == 1 ? L.p.sheets.minus : L.p.sheets.plus;
        const Sheet own_ref = own;
        L.p.z = z;
        cplx so, dso;
        if (wB == 0.0) {
            // both arguments coincide; the other one is q or 1/q
            const bool same = own_ref == other;
            if (follow) {
                own = sheet_of_u(q);
                other = sheet_of_u(same ? q : 1.0 / q);
            }
            so = same ? sc : g2 * q;
            dso = same ? dsc : cplx(g2);
            if (!follow) {
                // fixed sheets: evaluate the lip-convention function at z
                so = sigma(z, rp.g, other);
                dso = sigma_derivative(z, rp.g, other) * L.zq;
            }
        }
        else {
            if (follow) {
                const SurfacePoint moved = move_on_surface(ref, z, wB);
                own = sheet_of_u(q);
                other = c.kind == 1 ? moved.sheets.minus : moved.sheets.plus;
            }
            const cplx zo = c.kind == 1 ? z - wB : z + wB;
            so = sigma(zo, rp.g, other);
            dso = sigma_derivative(zo, rp.g, other) * L.zq;
        }
        cplx sown = sc, dsown = dsc;
        if (!follow && sheet_of_u(q) != own_ref) {
            // q left the fixed sheet: use the fixed-sheet function at this z
            const cplx zo = c.kind == 1 ? z + wB : z - wB;
            sown = sigma(zo, rp.g, own_ref);
            dsown = sigma_derivative(zo, rp.g, own_ref) * L.zq;
        }
        if (c.kind == 1) {
            s1 = sown, ds1 = dsown, s2 = so, ds2 = dso;
        }
        else {
            s2 = sown, ds2 = dsown, s1 = so, ds1 = dso;
        }
        // ds1, ds2 are already derivatives with respect to q here
        const cplx F1 = z + rp.omega0p - s1, F2 = z - rp.omega0p - s2;
        L.D = F1 * F2 + rp.f0 * rp.f0;
        L.Dq = (L.zq - ds1) * F2 + F1 * (L.zq - ds2);
        return L;
    }
    const cplx z = L.p.z;
    const cplx F1 = z + rp.omega0p - s1, F2 = z - rp.omega0p - s2;
    L.D = F1 * F2 + rp.f0 * rp.f0;
    L.Dq = (1.0 - ds1) * F2 + F1 * (1.0 - ds2);
    return L;
}

bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

}  // namespace

int pick_chart(cplx z, const ReducedParams& rp, double radius)
{
    if (rp.g == 0.0) return 0;  // sigma vanishes identically: no branch points
    const double d1 = branch_distance(z + rp.omegaBp), d2 = branch_distance(z - rp.omegaBp);
    if (std::min(d1, d2) >= radius) return 0;
    return d1 <= d2 ? 1 : 2;
}

cplx chart_coordinate(const SurfacePoint& p, const ReducedParams& rp, int chart)
{
    return chart_at(p, rp, chart).q;
}

ChartValue chart_eval(const ReducedParams& rp, int chart, cplx q, const SurfacePoint& ref, bool follow_surface)
{
    const Local l = evaluate(rp, {chart, q}, ref, follow_surface);
    return {l.p, l.D, l.Dq, l.zq};
}

NewtonOutcome surface_newton(const ReducedParams& rp, SurfacePoint start, const SolverOptions& opt,
                             bool follow_surface)
{
    NewtonOutcome out;
    SurfacePoint p = start;
    double last_step = std::numeric_limits<double>::infinity();
    try {
        for (int it = 0; it < opt.max_iter; ++it) {
            out.iterations = it;
            const Chart c = chart_at(p, rp, pick_chart(p.z, rp, opt.chart_radius));
            const Local here = evaluate(rp, c, p, follow_surface);
            const double r0 = std::abs(here.D);
            if (!std::isfinite(r0)) {
                out.reason = "non-finite residual";
                break;
            }
            if (r0 < opt.newton_tol && last_step < opt.step_tol) {
                out.converged = true;
                break;
            }
            if (here.Dq == 0.0 || !finite(here.Dq)) {
                out.reason = "vanishing derivative";
                break;
            }
            const cplx delta = here.D / here.Dq;
            double lambda = 1.0;
            bool improved = false;
            Local trial;
            for (int h = 0; h <= opt.max_halvings; ++h, lambda *= 0.5) {
                Chart tc = c;
                tc.q = c.q - lambda * delta;
                trial = evaluate(rp, tc, p, follow_surface);
                if (finite(trial.D) && std::abs(trial.D) < r0) {
                    improved = true;
                    break;
                }
            }
            if (!improved) {
                // no descent left: accept only if we already sit on the roundoff floor
                out.converged = r0 < opt.newton_tol;
                if (!out.converged) out.reason = "damping exhausted";
                break;
            }
            last_step = std::abs(trial.p.z - p.z);
            p = trial.p;
            if (it + 1 == opt.max_iter) out.reason = "iteration limit";
        }
        if (!out.converged && out.reason.empty()) out.reason = "iteration limit";
        // final state check
        if (!out.converged) {
            const Local fin = evaluate(rp, chart_at(p, rp, pick_chart(p.z, rp, opt.chart_radius)), p, follow_surface);
            if (std::abs(fin.D) < opt.newton_tol && last_step < opt.step_tol) out.converged = true;
        }
    }
    catch (const std::domain_error& e) {
        out.converged = false;
        out.reason = e.what();
    }
    out.point = p;
    out.last_step = last_step;
    out.residual = std::abs(dispersion_value(p.z, rp, p.sheets));
    return out;
}

std::vector<cplx> default_seeds(const ReducedParams& rp)
{
    std::vector<cplx> base;
    const double w0 = rp.omega0p, f0 = rp.f0;
    base.push_back(std::sqrt(cplx(w0 * w0 - f0 * f0)));
    base.push_back(cplx(w0, 0.0));
    const double x = w0 - rp.omegaBp;
    const double gamma = std::abs(x) < 1.0 ? 2.0 * sigma(cplx(x, 0.0), rp.g, Sheet::II).imag() : 0.0;
    const auto ph = phenom_eigenvalues({w0, f0, gamma});
    base.push_back(ph.first);
    base.push_back(ph.second);
    try {
        base.push_back(perturb_creation(rp).zbar2);
    }
    catch (const std::exception&) {
    }
    std::vector<cplx> seeds;
    for (cplx c : base) {
        if (!finite(c)) continue;
        for (cplx s : {c, -c, std::conj(c), -std::conj(c)}) seeds.push_back(s);
    }
    for (double re : {-1.6, -1.1, -0.6, -0.2, 0.2, 0.6, 1.1, 1.6})
        for (double im : {-0.3, -0.04, 0.04, 0.3}) seeds.push_back({re, im});
    for (double im : {-0.4, -0.12, 0.12, 0.4}) seeds.push_back({0.0, im});
    return seeds;
}

SolveResult solve_roots(const ReducedParams& rp, SheetPair sp, const std::vector<cplx>& seeds,
                        const SolverOptions& opt)
{
    if (seeds.empty()) throw std::invalid_argument("solve_roots needs at least one seed");
    validate(rp);
    SolveResult res;
    std::vector<Root> found;
    for (cplx s : seeds) {
        const NewtonOutcome n = surface_newton(rp, {s, sp}, opt, false);
        if (!n.converged) {
            res.failures.push_back({s, n.reason});
            continue;
        }
        Root r = classify(n.point.z, sp, rp, opt);
        if (r.residual >= opt.newton_tol) {
            // chart and lip evaluations can disagree right at the tolerance
            if (r.residual >= 10 * opt.newton_tol) {
                res.failures.push_back({s, "residual above tolerance"});
                continue;
            }
        }
        found.push_back(r);
    }
    std::sort(found.begin(), found.end(), [](const Root& a, const Root& b) {
        if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
        return a.z.imag() < b.z.imag();
    });
    for (const Root& r : found) {
        auto dup = std::find_if(res.roots.begin(), res.roots.end(),
                                [&](const Root& q) { return std::abs(q.z - r.z) < opt.dedup_tol; });
        if (dup == res.roots.end())
            res.roots.push_back(r);
        else if (r.residual < dup->residual)
            *dup = r;
    }
    return res;
}

namespace {

struct PhaseWalker {
    const ReducedParams& rp;
    SheetPair sp;
    bool lower;
    double total = 0.0;

    cplx eval(cplx z) const
    {
        const cplx d = dispersion_value(z, rp, sp, lower);
        if (std::abs(d) < 1e-10) throw ContourError("root on contour");
        return d;
    }

    void segment(cplx a, cplx b, cplx Da, cplx Db, int depth)
    {
        const cplx m = 0.5 * (a + b);
        const cplx Dm = eval(m);
        const double d1 = std::arg(Dm / Da), d2 = std::arg(Db / Dm);
        if (depth > 48 || (std::abs(d1) < 0.2 && std::abs(d2) < 0.2 && std::abs(d1 + d2 - std::arg(Db / Da)) < 1e-9)) {
            total += d1 + d2;
            return;
        }
        segment(a, m, Da, Dm, depth + 1);
        segment(m, b, Dm, Db, depth + 1);
    }

    void edge(cplx a, cplx b, int pieces = 64)
    {
        cplx prev = a, Dp = eval(a);
        for (int i = 1; i <= pieces; ++i) {
            const cplx next = a + (b - a) * (double(i) / pieces);
            const cplx Dn = eval(next);
            segment(prev, next, Dp, Dn, 0);
            prev = next, Dp = Dn;
        }
    }
};

int winding(const ReducedParams& rp, SheetPair sp, const std::vector<cplx>& poly, bool lower)
{
    PhaseWalker w{rp, sp, lower};
    for (size_t i = 0; i < poly.size(); ++i) {
        const cplx a = poly[i], b = poly[(i + 1) % poly.size()];
        w.edge(a, b, std::clamp(int(32 * std::abs(b - a)), 4, 64));
    }
    return static_cast<int>(std::lround(w.total / (2 * std::numbers::pi)));
}

bool inside_cut(double x, const ReducedParams& rp)
{
    return rp.g != 0.0 && (std::abs(x + rp.omegaBp) < 1.0 || std::abs(x - rp.omegaBp) < 1.0);
}

// Zeros of D on the real axis away from the cuts, where D is real-analytic and
// the split line can detour around them.
std::vector<double> split_zeros(const ReducedParams& rp, SheetPair sp, double a, double b)
{
    std::vector<double> out;
    const int n = 4096;
    auto D = [&](double x) { return dispersion_value({x, 0.0}, rp, sp).real(); };
    double xp = a, Dp = D(a);
    for (int i = 1; i <= n; ++i) {
        const double x = a + (b - a) * i / n, Dx = D(x);
        if (!inside_cut(xp, rp) && !inside_cut(x, rp) && (Dp == 0.0 || Dp * Dx < 0.0)) {
            double lo = xp, hi = x;
            for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
                const double m = 0.5 * (lo + hi);
                (D(lo) * D(m) <= 0.0 ? hi : lo) = m;
            }
            out.push_back(0.5 * (lo + hi));
        }
        xp = x, Dp = Dx;
    }
    return out;
}

// Split of a box straddling the real axis: along Im = 0, with small notches
// into the upper half plane around off-cut real zeros.
std::vector<cplx> split_line(const ReducedParams& rp, double a, double b, const std::vector<double>& zeros)
{
    std::vector<cplx> line{{a, 0.0}};
    for (size_t i = 0; i < zeros.size(); ++i) {
        const double x = zeros[i];
        double room = std::min(x - a, b - x);
        if (i > 0) room = std::min(room, x - zeros[i - 1]);
        if (i + 1 < zeros.size()) room = std::min(room, zeros[i + 1] - x);
        for (double e : {-1.0, 1.0})
            for (double c : {-rp.omegaBp, rp.omegaBp}) room = std::min(room, std::abs(x - (c + e)));
        const double d = std::min(1e-3, 0.25 * room);
        line.insert(line.end(), {{x - d, 0.0}, {x - d, d}, {x + d, d}, {x + d, 0.0}});
    }
    line.push_back({b, 0.0});
    return line;
}

}  // namespace

int count_roots_in_box(const ReducedParams& rp, SheetPair sp, const Box& box)
{
    if (!(box.re1 > box.re0 && box.im1 > box.im0)) throw std::invalid_argument("degenerate box");
    Box b = box;
    // nudge outward if an outer edge passes through a root
    for (int attempt = 0; attempt < 8; ++attempt) {
        try {
            const cplx c00(b.re0, b.im0), c10(b.re1, b.im0), c11(b.re1, b.im1), c01(b.re0, b.im1);
            if (!(b.im0 < 0.0 && b.im1 > 0.0) || rp.g == 0.0)
                return winding(rp, sp, {c00, c10, c11, c01}, b.im1 <= 0.0 && rp.g != 0.0);
            const std::vector<cplx> line = split_line(rp, b.re0, b.re1, split_zeros(rp, sp, b.re0, b.re1));
            std::vector<cplx> up(line.begin(), line.end());
            up.insert(up.end(), {c11, c01});
            std::vector<cplx> dn{c00, c10};
            dn.insert(dn.end(), line.rbegin(), line.rend());
            return winding(rp, sp, up, false) + winding(rp, sp, dn, true);
        }
        catch (const ContourError&) {
            const double e = 1e-7 * (1 + attempt) * std::max(1.0, b.re1 - b.re0);
            b.re0 -= e, b.re1 += e, b.im0 -= e, b.im1 += e;
        }
    }
    throw ContourError("contour keeps hitting roots (a zero may sit on a cut)");
}

}  // namespace fdce
