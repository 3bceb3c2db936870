#pragma once

#include "ebocp/config.hpp"
#include "ebocp/metrics.hpp"
#include "ebocp/ocp.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ebocp {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitIntegration = 3,
    kExitNonConvergence = 4,
};

/// Everything one scenario produced. No file I/O happens while building it.
struct RunResult {
    ScenarioConfig config;
    int exit_code = kExitOk;
    std::string error;

    Trajectory trajectory;
    std::optional<OcpSolution> solution;     // sweep solution (strategies 1-3)
    std::optional<OcpSolution> cross_check;  // direct solution when requested
    std::optional<SolverAgreement> agreement;
    RunSummary summary;
    double elapsed_seconds = 0.0;

    [[nodiscard]] bool ok() const { return exit_code == kExitOk; }
    /// A result with files to write: success or non-convergence.
    [[nodiscard]] bool has_data() const { return exit_code == kExitOk || exit_code == kExitNonConvergence; }
};

/// Runs one scenario: uncontrolled simulation for strategy none, sweep
/// (plus optional direct cross-check) otherwise. Errors map to exit codes.
RunResult run_scenario(const ScenarioConfig& cfg);

/// `t,S,I,R,u1,u2,lam_S,lam_I,lam_R`, one row per grid node, 9 significant
/// digits, empty fields for absent channels.
std::string timeseries_csv(const RunResult& run);

/// Summary, convergence report, cross-check, resolved configuration, and
/// run metadata under `run`.
std::string summary_json(const RunResult& run);

/// Per-figure CSV bundles: fig_S_compare.csv, fig_I_compare.csv,
/// fig_R_compare.csv and fig_controls.csv. Runs must share one grid.
void write_plot_data(const std::vector<RunResult>& runs, const std::filesystem::path& dir);

/// Writes <label>_timeseries.csv and <label>_summary.json.
void write_run_files(const RunResult& run, const std::filesystem::path& dir);

int cmd_simulate(const ScenarioConfig& cfg, std::ostream& log);
int cmd_optimize(const ScenarioConfig& cfg, std::ostream& log);

/// Runs the scenarios concurrently, then writes per-scenario files plus
/// comparison.csv and comparison.json into `out_dir`.
int cmd_compare(const std::vector<ScenarioConfig>& configs, const std::filesystem::path& out_dir,
                bool emit_plot_data, std::ostream& log);

/// The uncontrolled run and Strategies 1-3, all at reference parameters.
std::vector<ScenarioConfig> default_scenarios();

} // namespace ebocp
