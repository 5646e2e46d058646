#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "floquet_dce/sweep.hpp"

namespace fdce {

// One expected feature of a scenario run.  `source` records where the
// expectation comes from: "literature" (quoted approximate location),
// "closed-form" (formula evaluation) or "numerical" (pinned solver output).
struct Expectation {
    std::string descriptor;
    std::string expected;  // human-readable target, e.g. "[0.90, 1.10]"
    double lo = 0.0, hi = 0.0;
    double tolerance = 0.0;
    std::string source;
};

struct Scenario {
    std::string name;
    std::string description;
    ReducedParams rp;          // omega0p is swept
    double Omega = 2.0;        // lab drive frequency in units of B
    double grid_start = 0.0, grid_stop = 1.0;
    int grid_count = 2;
    std::vector<SheetPair> seed_sheets;
    std::vector<Expectation> expectations;
};

std::vector<Scenario> list_scenarios();
const Scenario& find_scenario(const std::string& name);  // throws std::invalid_argument
nlohmann::json to_json(const Scenario& s);

struct CheckResult {
    Expectation expectation;
    nlohmann::json measured;
    bool pass = false;
};

struct ScenarioReport {
    std::string name;
    std::vector<CheckResult> checks;
    std::vector<std::string> warnings;
    SweepResult sweep;  // empty for fig6
    double seconds = 0.0;
    bool pass() const;
};

// Runs the pipeline and evaluates every expectation.  With a non-empty
// out_dir, writes <name>_branches.csv, <name>_critical.csv (or <name>_phenom.csv),
// <name>_verdict.json and, for fig5, <name>_mode.json.
ScenarioReport run_scenario(const std::string& name, const std::string& out_dir = "");
nlohmann::json verdict_json(const ScenarioReport& r);

// Thread cap from FLOQUET_DCE_THREADS (default: hardware concurrency, >= 1).
int thread_cap();
std::vector<ScenarioReport> run_scenarios(const std::vector<std::string>& names, const std::string& out_dir = "");

}  // namespace fdce
