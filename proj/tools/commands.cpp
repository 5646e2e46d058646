#include "commands.hpp"

#include <filesystem>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "floquet_dce/bandoracle.hpp"
#include "floquet_dce/io.hpp"
#include "floquet_dce/modes.hpp"
#include "floquet_dce/perturbation.hpp"
#include "floquet_dce/phenom.hpp"
#include "floquet_dce/scenarios.hpp"
#include "floquet_dce/sweep.hpp"

namespace fdce::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Effective run configuration: config file first, then flags.
struct RunConfig {
    ModelParams params;
    double grid_start = 0.0, grid_stop = 1.5;
    int grid_count = 301;
    std::string sheets = "";  // empty: command default
    SolverOptions solver;
    int N = 400;
    double t_end = 0.0;
    std::string out_dir = ".";
};

struct Flags {
    std::string config;
    double omega0{}, Omega{}, f0{}, theta{}, omegaB{}, B{}, g{}, omega0p{}, omegaBp{};
    double grid_start{}, grid_stop{};
    int grid_count{};
    std::string sheets;
    double newton_tol{}, stationary_tol{}, dedup_tol{};
    int N{};
    double t_end{};
    std::string out_dir;
    std::vector<std::pair<std::string, CLI::Option*>> opts;
};

void add_common(CLI::App* sub, Flags& f)
{
    auto add = [&](const std::string& name, auto& var, const std::string& help) {
        f.opts.emplace_back(name, sub->add_option(name, var, help));
    };
    sub->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
    add("--omega0", f.omega0, "cavity frequency");
    add("--Omega", f.Omega, "drive frequency");
    add("--f0", f.f0, "drive amplitude");
    add("--theta", f.theta, "drive phase");
    add("--omega-b", f.omegaB, "band centre");
    add("--B", f.B, "half bandwidth");
    add("--g", f.g, "dimensionless coupling");
    add("--omega0p", f.omega0p, "reduced detuning (omega0 - Omega/2)/B; overrides --omega0");
    add("--omega-bp", f.omegaBp, "reduced band detuning (omegaB - Omega/2)/B; overrides --omega-b");
    add("--grid-start", f.grid_start, "sweep start (omega0')");
    add("--grid-stop", f.grid_stop, "sweep stop (omega0')");
    add("--grid-count", f.grid_count, "sweep point count (>= 2)");
    add("--sheets", f.sheets, "sheet pair, e.g. II,II (roots: 'all' for all four)");
    add("--newton-tol", f.newton_tol, "Newton residual tolerance");
    add("--stationary-tol", f.stationary_tol, "|Im z'| below which a root is stationary");
    add("--dedup-tol", f.dedup_tol, "root de-duplication distance");
    add("--n", f.N, "band discretisation for oracles");
    add("--t-end", f.t_end, "propagation end time (0: one drive period)");
    add("--out-dir", f.out_dir, "output directory");
}

bool given(const Flags& f, const std::string& name)
{
    // the same flag is registered on every subcommand
    for (const auto& [n, o] : f.opts)
        if (n == name && o->count() > 0) return true;
    return false;
}

RunConfig resolve(const Flags& f)
{
    RunConfig c;
    std::optional<double> w0p, wbp;
    if (!f.config.empty()) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_text_file(f.config));
        } catch (const nlohmann::json::exception& e) {
            throw UsageError("config '" + f.config + "': " + e.what());
        }
        c.params = model_params_from_json(j.value("params", nlohmann::json::object()));
        if (j.contains("omega0p")) w0p = j["omega0p"].get<double>();
        if (j.contains("omegaBp")) wbp = j["omegaBp"].get<double>();
        if (j.contains("grid")) {
            const auto& g = j["grid"];
            c.grid_start = g.value("start", c.grid_start);
            c.grid_stop = g.value("stop", c.grid_stop);
            c.grid_count = g.value("count", c.grid_count);
        }
        c.sheets = j.value("sheets", c.sheets);
        if (j.contains("tolerances")) {
            const auto& t = j["tolerances"];
            c.solver.newton_tol = t.value("newton", c.solver.newton_tol);
            c.solver.stationary_tol = t.value("stationary", c.solver.stationary_tol);
            c.solver.dedup_tol = t.value("dedup", c.solver.dedup_tol);
        }
        if (j.contains("oracle")) {
            c.N = j["oracle"].value("N", c.N);
            c.t_end = j["oracle"].value("t_end", c.t_end);
        }
        c.out_dir = j.value("out_dir", c.out_dir);
    }
    auto set = [&](const char* name, double& dst, double v) {
        if (given(f, name)) dst = v;
    };
    set("--omega0", c.params.omega0, f.omega0);
    set("--Omega", c.params.Omega, f.Omega);
    set("--f0", c.params.f0, f.f0);
    set("--theta", c.params.theta, f.theta);
    set("--omega-b", c.params.omegaB, f.omegaB);
    set("--B", c.params.B, f.B);
    set("--g", c.params.g, f.g);
    if (given(f, "--omega0p")) w0p = f.omega0p;
    if (given(f, "--omega-bp")) wbp = f.omegaBp;
    if (w0p) c.params.omega0 = 0.5 * c.params.Omega + c.params.B * *w0p;
    if (wbp) c.params.omegaB = 0.5 * c.params.Omega + c.params.B * *wbp;
    set("--grid-start", c.grid_start, f.grid_start);
    set("--grid-stop", c.grid_stop, f.grid_stop);
    if (given(f, "--grid-count")) c.grid_count = f.grid_count;
    if (given(f, "--sheets")) c.sheets = f.sheets;
    set("--newton-tol", c.solver.newton_tol, f.newton_tol);
    set("--stationary-tol", c.solver.stationary_tol, f.stationary_tol);
    set("--dedup-tol", c.solver.dedup_tol, f.dedup_tol);
    if (given(f, "--n")) c.N = f.N;
    set("--t-end", c.t_end, f.t_end);
    if (given(f, "--out-dir")) c.out_dir = f.out_dir;

    if (!(c.solver.newton_tol > 0 && c.solver.stationary_tol > 0 && c.solver.dedup_tol > 0))
        throw UsageError("tolerances must be > 0");
    if (c.N < 1) throw UsageError("--n must be >= 1");
    try {
        validate(c.params);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return c;
}

SheetPair parse_sheets(const std::string& s, SheetPair fallback)
{
    if (s.empty()) return fallback;
    try {
        return sheet_pair_from_string(s);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

std::string out_path(const RunConfig& c, const std::string& file)
{
    std::filesystem::create_directories(c.out_dir);
    return (std::filesystem::path(c.out_dir) / file).string();
}

nlohmann::json header(const RunConfig& c)
{
    const ReducedParams rp = reduce(c.params);
    const ValidityReport v = check_rotating_frame_validity(c.params);
    return {{"schema_version", kSchemaVersion},
            {"params", to_json(c.params)},
            {"reduced", to_json(rp)},
            {"rotating_frame", {{"ratio", std::isfinite(v.ratio) ? nlohmann::json(v.ratio) : nlohmann::json("inf")},
                                {"threshold", v.threshold},
                                {"pass", v.pass}}}};
}

int cmd_roots(const RunConfig& c, std::ostream& out)
{
    const ReducedParams rp = reduce(c.params);
    std::vector<SheetPair> pairs;
    if (c.sheets == "all")
        pairs = {{Sheet::I, Sheet::I}, {Sheet::I, Sheet::II}, {Sheet::II, Sheet::I}, {Sheet::II, Sheet::II}};
    else
        pairs = {parse_sheets(c.sheets, kPhysicalSheets)};
    nlohmann::json j = header(c), roots = nlohmann::json::array();
    std::size_t failures = 0;
    for (SheetPair sp : pairs) {
        const SolveResult r = solve_roots(rp, sp, c.solver);
        for (const Root& x : r.roots) roots.push_back(to_json(x));
        failures += r.failures.size();
    }
    j["roots"] = roots;
    j["seed_failures"] = failures;
    out << j.dump(2) << '\n';
    return roots.empty() ? 2 : 0;
}

int cmd_sweep(RunConfig c, const std::string& scenario, std::ostream& out, std::ostream& err)
{
    SweepOptions o;
    o.solver = c.solver;
    ReducedParams rp = reduce(c.params);
    if (!scenario.empty()) {
        const Scenario* sc;
        try {
            sc = &find_scenario(scenario);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        if (sc->name == "fig6") throw UsageError("fig6 has no sweep; use the phenom command");
        rp = sc->rp;
        c.grid_start = sc->grid_start;
        c.grid_stop = sc->grid_stop;
        c.grid_count = sc->grid_count;
        o.seed_sheets = sc->seed_sheets;
    }
    else if (!c.sheets.empty()) {
        o.seed_sheets = {parse_sheets(c.sheets, kPhysicalSheets)};
    }
    if (c.grid_count < 2) throw UsageError("sweep grid needs --grid-count >= 2");
    if (!(c.grid_stop > c.grid_start)) throw UsageError("sweep grid needs --grid-stop > --grid-start");
    const SweepResult res = sweep_branches(rp, linspace(c.grid_start, c.grid_stop, c.grid_count), o);
    const std::string stem = scenario.empty() ? "sweep" : scenario;
    const std::string bp = out_path(c, stem + "_branches.csv"), cp = out_path(c, stem + "_critical.csv");
    emit_sweep_csv(res, bp, cp);
    nlohmann::json j = {{"schema_version", kSchemaVersion},
                        {"reduced", to_json(rp)},
                        {"branches", res.branches.size()},
                        {"critical", res.critical.size()},
                        {"files", {bp, cp}},
                        {"warnings", res.warnings}};
    out << j.dump(2) << '\n';
    for (const auto& w : res.warnings) err << "warning: " << w << '\n';
    return res.warnings.empty() ? 0 : 2;
}

int cmd_phenom(RunConfig c, double gamma, bool grid_given, std::ostream& out)
{
    if (!grid_given) {
        c.grid_start = -1.0;
        c.grid_stop = 1.0;
        c.grid_count = 2001;
    }
    if (c.grid_count < 2) throw UsageError("phenom grid needs --grid-count >= 2");
    if (!(gamma >= 0)) throw UsageError("--gamma must be >= 0");
    const double f0 = c.params.f0 / c.params.B;
    const std::string path = out_path(c, "phenom.csv");
    write_text_file(path, phenom_csv(linspace(c.grid_start, c.grid_stop, c.grid_count), f0, gamma));
    const auto st = phenom_stationary(f0, gamma);
    const auto edges = phenom_bifurcation_edges(f0, gamma);
    nlohmann::json j = {{"schema_version", kSchemaVersion},
                        {"f0", f0},
                        {"gamma", gamma},
                        {"stationary", st ? nlohmann::json{st->first, st->second} : nlohmann::json::array()},
                        {"bifurcation", {edges.first, edges.second}},
                        {"file", path}};
    out << j.dump(2) << '\n';
    return 0;
}

int cmd_perturb(const RunConfig& c, std::ostream& out)
{
    const ReducedParams rp = reduce(c.params);
    const PerturbativeResult r = perturb_creation(rp);
    nlohmann::json j = header(c);
    j["zbar2"] = to_json(r.zbar2);
    j["annihilation"] = to_json(-r.zbar2);
    j["R"] = r.R;
    j["R2"] = r.R2;
    j["im_dissipation"] = r.im_dissipation;
    j["im_multimode"] = r.im_multimode;
    j["window"] = to_string(perturb_window_report(rp));
    out << j.dump(2) << '\n';
    return 0;
}

cplx parse_complex(const std::string& s)
{
    std::stringstream ss(s);
    double re, im = 0.0;
    char comma;
    if (!(ss >> re)) throw UsageError("cannot parse complex number '" + s + "' (expected re,im)");
    if (ss >> comma) {
        if (comma != ',' || !(ss >> im)) throw UsageError("cannot parse complex number '" + s + "' (expected re,im)");
    }
    return {re, im};
}

int cmd_modes(const RunConfig& c, const std::string& zguess, int nk, std::ostream& out, std::ostream& err)
{
    const ReducedParams rp = reduce(c.params);
    const SheetPair sp = parse_sheets(c.sheets, kPhysicalSheets);
    if (nk < 1) throw UsageError("--kgrid must be >= 1");
    const SolveResult r = solve_roots(rp, sp, {parse_complex(zguess)}, c.solver);
    if (r.roots.empty()) {
        err << "no root converged from the given guess";
        if (!r.failures.empty()) err << ": " << r.failures.front().reason;
        err << '\n';
        return 2;
    }
    const ModeCoefficients m = mode_coefficients(r.roots.front(), rp, midpoint_kgrid(nk));
    const std::string path = out_path(c, "mode.json");
    export_mode(m, path);
    nlohmann::json j = mode_to_json(m);
    j["band_to_cavity"] = band_to_cavity_ratio(m);
    j.erase("band");
    j["file"] = path;
    out << j.dump(2) << '\n';
    return 0;
}

int cmd_oracle(const RunConfig& c, bool monodromy, bool decay, int steps, std::ostream& out)
{
    const ReducedParams rp = reduce(c.params);
    const DiscretizedBand band = make_band(c.N, rp.g, rp.omegaBp);
    PropagatorOptions po;
    po.steps_per_period = steps;
    nlohmann::json j = header(c);
    int code = 0;
    if (monodromy) {
        const FloquetExponentSet fe = monodromy_exponents(c.params, band, po);
        nlohmann::json ex = nlohmann::json::array();
        for (cplx z : fe.exponents) ex.push_back(to_json(z));
        j["monodromy"] = {{"period", fe.period},
                          {"exponents", ex},
                          {"pairing_error", fe.pairing_error},
                          {"det_error", fe.det_error},
                          {"condition", fe.condition},
                          {"defective", fe.defective},
                          {"drift", fe.drift}};
        if (fe.defective) code = 2;
    }
    else if (decay) {
        const DecayFit f = fit_cavity_decay(c.params, band, 400, po);
        j["decay_fit"] = {{"rate", f.rate}, {"r2", f.r2}, {"window", {f.t0, f.t1}}, {"accepted", f.accepted}};
        if (!f.accepted) code = 2;
    }
    else {
        const SheetPair sp = parse_sheets(c.sheets, rp.f0 > 0 ? kFirstSheets : kPhysicalSheets);
        const SolveResult r = solve_roots(rp, sp, c.solver);
        const ComparisonReport rep = compare_with_effective(rp, band, r.roots);
        j["comparison"] = to_json(rep);
        for (const auto& e : rep.entries)
            if (!e.matched) code = 2;
        if (rep.entries.empty()) code = 2;
    }
    if (c.t_end > 0) {
        const Propagation p = propagate_fundamental(c.params, band, c.t_end, po);
        j["propagation"] = {{"t_end", p.t_end}, {"drift", p.drift}, {"relative_drift", p.relative_drift}};
    }
    out << j.dump(2) << '\n';
    return code;
}

int cmd_scenario(const std::string& name, bool list, RunConfig& c, std::ostream& out)
{
    if (list) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& s : list_scenarios()) j.push_back(to_json(s));
        out << nlohmann::json{{"schema_version", kSchemaVersion}, {"scenarios", j}}.dump(2) << '\n';
        return 0;
    }
    if (name.empty()) throw UsageError("scenario: give a name (fig4, fig5, fig6, freq-reduction, all) or --list");
    std::vector<std::string> names;
    if (name == "all")
        for (const auto& s : list_scenarios()) names.push_back(s.name);
    else
        names = {name};
    try {
        for (const auto& n : names) (void)find_scenario(n);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    std::filesystem::create_directories(c.out_dir);
    const auto reports = run_scenarios(names, c.out_dir);
    nlohmann::json j = nlohmann::json::array();
    bool ok = true;
    for (const auto& r : reports) {
        j.push_back(verdict_json(r));
        ok = ok && r.pass();
    }
    out << (j.size() == 1 ? j[0] : j).dump(2) << '\n';
    return ok ? 0 : 2;
}

int cmd_selfcheck(std::ostream& out)
{
    nlohmann::json checks = nlohmann::json::array();
    bool ok = true;
    auto check = [&](const std::string& name, double value, double tol) {
        const bool pass = std::isfinite(value) && value <= tol;
        ok = ok && pass;
        checks.push_back({{"name", name}, {"value", value}, {"tolerance", tol}, {"pass", pass}});
    };
    const double g = 1.0 / std::numbers::pi;
    double sum = 0, prod = 0;
    for (cplx z : {cplx(0.3, 0.2), cplx(-1.7, 0.01), cplx(2.5, -0.4), cplx(0.1, -1.3)}) {
        const cplx a = sigma(z, g, Sheet::I), b = sigma(z, g, Sheet::II);
        sum = std::max(sum, std::abs(a + b - 2.0 * g * g * z));
        prod = std::max(prod, std::abs(a * b - g * g * g * g));
    }
    check("sigma_I + sigma_II = 2 g^2 zeta", sum, 1e-12);
    check("sigma_I sigma_II = g^4", prod, 1e-12);

    ReducedParams rp{0.5, 0.0, 0.2, g, 1.0};
    const SolveResult r = solve_roots(rp, kPhysicalSheets);
    double pair = r.roots.empty() ? INFINITY : 0.0;
    for (const Root& x : r.roots) pair = std::max(pair, std::abs(dispersion_value(-x.z, rp, swap(x.sheets))));
    check("D(-z') = 0 on swapped sheets", pair, 1e-10);

    check("J L J - L^T", symplectic_residual(build_restricted_floquet_matrix(rp, make_band(24, g, 0.0))), 1e-14);

    const auto st = phenom_stationary(0.2, 1.0 / std::numbers::pi);
    const auto num = phenom_stationary_numeric(0.2, 1.0 / std::numbers::pi);
    check("stationary: closed form vs bisection", st && num ? std::abs(st->second - *num) : INFINITY, 1e-9);

    ReducedParams fr{0.0, 0.0, 0.0, g, 1.0};
    const SolveResult f = solve_roots(fr, kPhysicalSheets, {cplx(0.0, 0.1)});
    const double exact = g * g / std::sqrt(1.0 - 2.0 * g * g);
    check("decaying root vs i g^2/sqrt(1-2g^2)", f.roots.empty() ? INFINITY : std::abs(f.roots[0].z - cplx(0, exact)),
          1e-9);

    out << nlohmann::json{{"schema_version", kSchemaVersion}, {"checks", checks}, {"pass", ok}}.dump(2) << '\n';
    return ok ? 0 : 2;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Floquet spectra of a parametrically driven cavity coupled to a photonic band", "floquet-dce"};
    app.require_subcommand(1);
    Flags f;
    std::string scenario_flag, zguess, scenario_name;
    double gamma = 1.0 / std::numbers::pi;
    int nk = 400, steps = 200;
    bool list = false, monodromy = false, decay = false, compare = false;

    auto* roots = app.add_subcommand("roots", "solve the dispersion equation at one parameter point");
    auto* sweep = app.add_subcommand("sweep", "continuation sweep over omega0'; writes branch/critical CSV");
    sweep->add_option("--scenario", scenario_flag, "take parameters and grid from a scenario");
    auto* phenom = app.add_subcommand("phenom", "flat-band comparison model spectra");
    phenom->add_option("--gamma", gamma, "flat-band damping");
    auto* perturb = app.add_subcommand("perturb", "second-order creation eigenvalue and resonance class");
    auto* modes = app.add_subcommand("modes", "eigenmode amplitudes and normalisation for one root");
    modes->add_option("--zprime", zguess, "root guess re,im")->required();
    modes->add_option("--kgrid", nk, "band k points in the export");
    auto* oracle = app.add_subcommand("oracle", "discretised-band cross-checks");
    oracle->add_flag("--compare", compare, "compare solver roots with the restricted matrix (default)");
    oracle->add_flag("--monodromy", monodromy, "Floquet exponents of the full time-dependent system");
    oracle->add_flag("--decay", decay, "cavity decay-rate fit from propagation");
    oracle->add_option("--steps-per-period", steps, "propagator steps per drive period");
    auto* scenario = app.add_subcommand("scenario", "run canned scenarios and print verdicts");
    scenario->add_option("name", scenario_name, "fig4, fig5, fig6, freq-reduction or all");
    scenario->add_flag("--list", list, "print the scenario catalogue");
    auto* selfcheck = app.add_subcommand("selfcheck", "quick identity and oracle checks");
    for (auto* s : {roots, sweep, phenom, perturb, modes, oracle, scenario}) add_common(s, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return 1;
    }

    try {
        if (selfcheck->parsed()) return cmd_selfcheck(out);
        RunConfig c = resolve(f);
        if (roots->parsed()) return cmd_roots(c, out);
        if (sweep->parsed()) return cmd_sweep(c, scenario_flag, out, err);
        if (phenom->parsed())
            return cmd_phenom(c, gamma, given(f, "--grid-start") || given(f, "--grid-stop") || given(f, "--grid-count"),
                              out);
        if (perturb->parsed()) return cmd_perturb(c, out);
        if (modes->parsed()) return cmd_modes(c, zguess, nk, out, err);
        if (oracle->parsed()) {
            if (int(monodromy) + int(decay) + int(compare) > 1)
                throw UsageError("choose one of --compare, --monodromy, --decay");
            return cmd_oracle(c, monodromy, decay, steps, out);
        }
        if (scenario->parsed()) return cmd_scenario(scenario_name, list, c, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace fdce::cli
