#include "floquet_dce/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "floquet_dce/io.hpp"
#include "floquet_dce/modes.hpp"
#include "floquet_dce/phenom.hpp"

namespace fdce {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string interval(double lo, double hi) { return "[" + num(lo) + ", " + num(hi) + "]"; }

Expectation in_window(std::string what, double lo, double hi, std::string source)
{
    return {std::move(what), interval(lo, hi), lo, hi, 0.5 * (hi - lo), std::move(source)};
}

Expectation pinned(std::string what, double value, double tol)
{
    return {std::move(what), num(value) + " +- " + num(tol), value - tol, value + tol, tol, "numerical"};
}

std::vector<Scenario> build_catalog()
{
    const double g = 1.0 / std::numbers::pi;
    std::vector<Scenario> c;

    Scenario f4;
    f4.name = "fig4";
    f4.description = "resonant band centre (omega_B' = 0, Omega = 2 omega_B): parametric and resonance bifurcations";
    f4.rp = {0.0, 0.0, 0.2, g, 1.0};
    f4.grid_start = 0.0;
    f4.grid_stop = 1.5;
    f4.grid_count = 1500;
    f4.seed_sheets = {kPhysicalSheets, kFirstSheets};
    f4.expectations = {
        in_window("exceptional: resonance bifurcation", 0.90, 1.10, "literature"),
        in_window("exceptional: parametric bifurcation", 0.15, 0.25, "literature"),
        {"stationary: |Im z'| < 1e-8 below the parametric bifurcation", "count >= 1", 0.0, 0.25, 1e-8, "literature"},
        pinned("exceptional: parametric bifurcation location", 0.2, 1e-6),
        pinned("exceptional: resonance bifurcation location", 0.915072474, 1e-6),
        pinned("stationary: location", 0.1724355471, 1e-6),
    };
    c.push_back(f4);

    Scenario f5;
    f5.name = "fig5";
    f5.description = "band centre detuned below the drive (omega_B' = -0.75): multimode bifurcation and nonlocal stationary mode";
    f5.rp = {0.0, -0.75, 0.2, g, 1.0};
    f5.grid_start = 0.0;
    f5.grid_stop = 2.2;
    f5.grid_count = 1500;
    f5.seed_sheets = {kPhysicalSheets, kFirstSheets};
    f5.expectations = {
        in_window("exceptional: multimode bifurcation", 1.65, 1.85, "literature"),
        in_window("stationary: nonlocal stationary point", 0.15, 0.35, "literature"),
        {"mode: band amplitude max / cavity amplitude at the nonlocal stationary root", "> 0.1", 0.1, kInf, 0.0,
         "literature"},
        pinned("exceptional: multimode bifurcation location", 1.7406547, 1e-6),
        pinned("stationary: nonlocal stationary location", 0.21736, 1e-5),
    };
    c.push_back(f5);

    Scenario f6;
    f6.name = "fig6";
    f6.description = "flat-band damped-Mathieu comparison model, f0 = 0.2, gamma = 1/pi";
    f6.rp = {0.0, 0.0, 0.2, g, 1.0};
    f6.grid_start = -1.0;
    f6.grid_stop = 1.0;
    f6.grid_count = 2001;
    const double ws = std::sqrt(0.2 * (0.2 + g));
    f6.expectations = {
        {"stationary: closed form sqrt(f0 (f0 + gamma))", "0.321966 +- 5e-7", 0.321966 - 5e-7,
         0.321966 + 5e-7, 5e-7, "literature"},
        {"stationary: bisection on Im z'_- = 0 vs closed form", num(ws) + " +- 1e-9", ws - 1e-9, ws + 1e-9, 1e-9,
         "closed-form"},
    };
    c.push_back(f6);

    Scenario fr;
    fr.name = "freq-reduction";
    fr.description = "omega0 = 3B, omega_B = 0: Omega = 2B amplifies through the band, Omega = 5B does not";
    // Omega = 2: omega0' = omega0 - 1, omega_B' = -1
    fr.rp = {0.0, -1.0, 0.2, g, 1.0};
    fr.Omega = 2.0;
    fr.grid_start = 1.9;  // lab omega0 in [2.9, 3.1]
    fr.grid_stop = 2.1;
    fr.grid_count = 201;
    fr.seed_sheets = {kPhysicalSheets, kFirstSheets};
    fr.expectations = {
        {"amplifying branch (Im z' < 0 on sheets I,I) at Omega = 2B", "count >= 1", -kInf, -1e-9, 1e-9,
         "literature"},
        {"no amplifying branch at Omega = 5B over the same omega0 window", "count = 0", -1e-9, kInf, 1e-9,
         "literature"},
    };
    c.push_back(fr);
    return c;
}

const CriticalPoint* best_in_window(const SweepResult& s, CriticalKind kind, double lo, double hi,
                                    const std::function<bool(const CriticalPoint&)>& extra = {})
{
    const double mid = 0.5 * (lo + hi);
    const CriticalPoint* best = nullptr;
    for (const auto& c : s.critical) {
        if (c.kind != kind || (extra && !extra(c))) continue;
        if (!best || std::abs(c.omega0p_star - mid) < std::abs(best->omega0p_star - mid)) best = &c;
    }
    return best;
}

nlohmann::json cp_json(const CriticalPoint* c)
{
    if (!c) return nullptr;
    return {{"omega0_prime", c->omega0p_star},
            {"zprime", to_json(c->zprime_star)},
            {"sheets", to_string(c->sheets)},
            {"residual", c->residual}};
}

CheckResult window_check(const Expectation& e, const SweepResult& s, CriticalKind kind,
                         const std::function<bool(const CriticalPoint&)>& extra = {})
{
    const CriticalPoint* c = best_in_window(s, kind, e.lo, e.hi, extra);
    return {e, cp_json(c), c && c->omega0p_star >= e.lo && c->omega0p_star <= e.hi};
}

SweepResult run_sweep(const ReducedParams& rp, const Scenario& sc)
{
    SweepOptions o;
    o.seed_sheets = sc.seed_sheets;
    return sweep_branches(rp, linspace(sc.grid_start, sc.grid_stop, sc.grid_count), o);
}

struct Amplifying {
    int points = 0;
    double min_im = kInf;
};

Amplifying amplifying(const SweepResult& s, double tol)
{
    Amplifying a;
    for (const auto& b : s.branches)
        for (const auto& p : b.points)
            if (p.root.sheets == kFirstSheets && p.root.z.imag() < -tol) {
                ++a.points;
                a.min_im = std::min(a.min_im, p.root.z.imag());
            }
    return a;
}

void write_sweep(const SweepResult& s, const std::string& dir, const std::string& stem)
{
    emit_sweep_csv(s, (std::filesystem::path(dir) / (stem + "_branches.csv")).string(),
                   (std::filesystem::path(dir) / (stem + "_critical.csv")).string());
}

}  // namespace

std::vector<Scenario> list_scenarios() { return build_catalog(); }

const Scenario& find_scenario(const std::string& name)
{
    static const std::vector<Scenario> cat = build_catalog();
    for (const auto& s : cat)
        if (s.name == name) return s;
    throw std::invalid_argument("unknown scenario '" + name + "' (fig4, fig5, fig6, freq-reduction)");
}

nlohmann::json to_json(const Scenario& s)
{
    nlohmann::json ex = nlohmann::json::array();
    for (const auto& e : s.expectations)
        ex.push_back({{"descriptor", e.descriptor},
                      {"expected", e.expected},
                      {"tolerance", e.tolerance},
                      {"source", e.source}});
    nlohmann::json sheets = nlohmann::json::array();
    for (auto sp : s.seed_sheets) sheets.push_back(to_string(sp));
    return {{"name", s.name},
            {"description", s.description},
            {"reduced", to_json(s.rp)},
            {"Omega", s.Omega},
            {"grid", {{"start", s.grid_start}, {"stop", s.grid_stop}, {"count", s.grid_count}}},
            {"seed_sheets", sheets},
            {"expectations", ex}};
}

bool ScenarioReport::pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

ScenarioReport run_scenario(const std::string& name, const std::string& out_dir)
{
    const Scenario& sc = find_scenario(name);
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioReport rep;
    rep.name = sc.name;
    const auto& ex = sc.expectations;
    const double stol = SolverOptions{}.stationary_tol;

    if (sc.name == "fig4") {
        rep.sweep = run_sweep(sc.rp, sc);
        const auto& s = rep.sweep;
        rep.checks.push_back(window_check(ex[0], s, CriticalKind::exceptional));
        CheckResult par = window_check(ex[1], s, CriticalKind::exceptional);
        rep.checks.push_back(par);
        const double upper = par.pass ? par.measured["omega0_prime"].get<double>() : ex[2].hi;
        int n = 0;
        const CriticalPoint* first = nullptr;
        for (const auto& c : s.critical)
            if (c.kind == CriticalKind::stationary && std::abs(c.zprime_star.imag()) < ex[2].tolerance &&
                c.omega0p_star > 0.0 && c.omega0p_star < upper) {
                ++n;
                if (!first) first = &c;
            }
        rep.checks.push_back({ex[2], {{"count", n}, {"first", cp_json(first)}}, n >= 1});
        rep.checks.push_back(window_check(ex[3], s, CriticalKind::exceptional));
        rep.checks.push_back(window_check(ex[4], s, CriticalKind::exceptional));
        rep.checks.push_back(window_check(ex[5], s, CriticalKind::stationary));
    }
    else if (sc.name == "fig5") {
        rep.sweep = run_sweep(sc.rp, sc);
        const auto& s = rep.sweep;
        rep.checks.push_back(window_check(ex[0], s, CriticalKind::exceptional));
        const CriticalPoint* st = best_in_window(s, CriticalKind::stationary, ex[1].lo, ex[1].hi);
        rep.checks.push_back({ex[1], cp_json(st), st && st->omega0p_star >= ex[1].lo && st->omega0p_star <= ex[1].hi});
        CheckResult mode{ex[2], nullptr, false};
        if (rep.checks.back().pass) {
            const ReducedParams rp = at_omega(sc.rp, st->omega0p_star);
            const Root r = classify(st->zprime_star, st->sheets, rp);
            const ModeCoefficients m = mode_coefficients(r, rp, midpoint_kgrid(400));
            const double ratio = band_to_cavity_ratio(m);
            mode.measured = {{"ratio", ratio}, {"zprime", to_json(r.z)}, {"sheets", to_string(r.sheets)}};
            mode.pass = ratio > ex[2].lo;
            if (!out_dir.empty())
                export_mode(m, (std::filesystem::path(out_dir) / (sc.name + "_mode.json")).string());
        }
        rep.checks.push_back(mode);
        rep.checks.push_back(window_check(ex[3], s, CriticalKind::exceptional));
        rep.checks.push_back(window_check(ex[4], s, CriticalKind::stationary));
    }
    else if (sc.name == "fig6") {
        const double gamma = 1.0 / std::numbers::pi;  // flat-band damping of the comparison model
        const auto cf = phenom_stationary(sc.rp.f0, gamma);
        const auto num = phenom_stationary_numeric(sc.rp.f0, gamma);
        rep.checks.push_back({ex[0], cf ? nlohmann::json(cf->second) : nlohmann::json(nullptr),
                              cf && cf->second >= ex[0].lo && cf->second <= ex[0].hi});
        rep.checks.push_back({ex[1], num ? nlohmann::json(*num) : nlohmann::json(nullptr),
                              num && cf && std::abs(*num - cf->second) <= ex[1].tolerance});
        if (!out_dir.empty())
            write_text_file((std::filesystem::path(out_dir) / "fig6_phenom.csv").string(),
                            phenom_csv(linspace(sc.grid_start, sc.grid_stop, sc.grid_count), sc.rp.f0, gamma));
    }
    else {  // freq-reduction
        rep.sweep = run_sweep(sc.rp, sc);
        const Amplifying a = amplifying(rep.sweep, stol);
        rep.checks.push_back({ex[0], {{"amplifying_points", a.points}, {"min_im", a.points ? a.min_im : 0.0}},
                              a.points > 0});
        // Omega = 5B: every reduced frequency moves by (Omega - Omega_c) / 2B
        const double Oc = 5.0, shift = (sc.Omega - Oc) / (2.0 * sc.rp.B);
        ReducedParams rc = sc.rp;
        rc.omegaBp += shift;
        Scenario control = sc;
        control.grid_start += shift;
        control.grid_stop += shift;
        const SweepResult sc5 = run_sweep(rc, control);
        const Amplifying b = amplifying(sc5, stol);
        rep.checks.push_back({ex[1],
                              {{"amplifying_points", b.points},
                               {"min_im", b.points ? b.min_im : 0.0},
                               {"omega_bp", rc.omegaBp},
                               {"grid", {control.grid_start, control.grid_stop}}},
                              b.points == 0});
        rep.warnings.insert(rep.warnings.end(), sc5.warnings.begin(), sc5.warnings.end());
        if (!out_dir.empty()) write_sweep(sc5, out_dir, sc.name + "_control");
    }
    rep.warnings.insert(rep.warnings.end(), rep.sweep.warnings.begin(), rep.sweep.warnings.end());
    if (!out_dir.empty() && !rep.sweep.branches.empty()) write_sweep(rep.sweep, out_dir, sc.name);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!out_dir.empty())
        write_text_file((std::filesystem::path(out_dir) / (sc.name + "_verdict.json")).string(),
                        verdict_json(rep).dump(2) + "\n");
    return rep;
}

nlohmann::json verdict_json(const ScenarioReport& r)
{
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"descriptor", c.expectation.descriptor},
                          {"expected", c.expectation.expected},
                          {"tolerance", c.expectation.tolerance},
                          {"source", c.expectation.source},
                          {"measured", c.measured},
                          {"pass", c.pass}});
    return {{"schema_version", kSchemaVersion},
            {"scenario", r.name},
            {"checks", checks},
            {"pass", r.pass()},
            {"warnings", r.warnings}};
}

int thread_cap()
{
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FLOQUET_DCE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) n = static_cast<int>(v);
    }
    return std::max(1, n);
}

std::vector<ScenarioReport> run_scenarios(const std::vector<std::string>& names, const std::string& out_dir)
{
    for (const auto& n : names) (void)find_scenario(n);  // fail before starting any work
    std::vector<ScenarioReport> out(names.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(names.size());
    auto worker = [&] {
        for (std::size_t i; (i = next++) < names.size();) {
            try {
                out[i] = run_scenario(names[i], out_dir);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int nt = std::min<int>(thread_cap(), static_cast<int>(names.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace fdce
