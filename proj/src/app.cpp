#include "ebocp/app.hpp"

#include "ebocp/format.hpp"

#include <json.hpp>

#include <chrono>
#include <fstream>
#include <future>
#include <sstream>

namespace ebocp {

namespace {

using json = nlohmann::json;

constexpr const char* kToolName = "ebocp";
constexpr const char* kToolVersion = "1.0.0";

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
}

json summary_to_json(const RunSummary& s)
{
    json j;
    j["peak_infected"] = s.peak_infected;
    j["t_peak"] = s.t_peak;
    j["infection_period"] = s.infection_period;
    j["s_end"] = s.s_end;
    j["i_end"] = s.i_end;
    j["r_end"] = s.r_end;
    j["objective"] = s.objective ? json(*s.objective) : json(nullptr);
    return j;
}

json solution_report(const OcpSolution& sol)
{
    json j;
    j["solver"] = sol.solver;
    j["converged"] = sol.converged;
    j["iterations"] = sol.iterations;
    j["objective"] = sol.objective;
    j["message"] = sol.message;
    j["warnings"] = sol.warnings;
    return j;
}

std::string file_stem(const RunResult& run) { return run.config.resolved_label(); }

} // namespace

std::vector<ScenarioConfig> default_scenarios()
{
    std::vector<ScenarioConfig> out(4);
    out[1].strategy = StrategyKind::Strategy1;
    out[2].strategy = StrategyKind::Strategy2;
    out[3].strategy = StrategyKind::Strategy3;
    return out;
}

RunResult run_scenario(const ScenarioConfig& cfg)
{
    RunResult run;
    run.config = cfg;
    const auto start = std::chrono::steady_clock::now();
    try {
        cfg.validate();
        if (!cfg.strategy) {
            run.trajectory = integrate_uncontrolled(cfg.params, cfg.x0, cfg.grid());
            run.summary = summarize(run.trajectory, std::nullopt, cfg.threshold);
        } else {
            const StrategySpec spec = cfg.spec();
            OcpSolution sol = solve_fbsm(spec, cfg.sweep);
            if (cfg.cross_check) {
                OcpSolution direct = solve_direct(spec, cfg.direct);
                run.agreement = compare_solutions(sol, direct, spec.u_max);
                run.cross_check = std::move(direct);
            }
            run.trajectory = sol.trajectory;
            run.summary = summarize(sol.trajectory, sol.objective, cfg.threshold);
            if (!sol.converged) {
                run.exit_code = kExitNonConvergence;
                run.error = sol.message;
            }
            run.solution = std::move(sol);
        }
    } catch (const ConfigError& e) {
        run.exit_code = kExitConfig;
        run.error = e.what();
    } catch (const ValidationError& e) {
        run.exit_code = kExitConfig;
        run.error = e.what();
    } catch (const IntegrationError& e) {
        run.exit_code = kExitIntegration;
        run.error = e.what();
    }
    run.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return run;
}

std::string timeseries_csv(const RunResult& run)
{
    std::ostringstream os;
    os << "t,S,I,R,u1,u2,lam_S,lam_I,lam_R\n";
    const Trajectory& traj = run.trajectory;
    const OcpSolution* sol = run.solution ? &*run.solution : nullptr;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const EpidemicState& x = traj[k];
        os << format_number(traj.grid.time(k)) << ',' << format_number(x.s) << ',' << format_number(x.i) << ','
           << format_number(x.r) << ',';
        for (std::size_t c = 0; c < 2; ++c) {
            if (sol && c < sol->control.channels())
                os << format_number(sol->control.channel(c)[k]);
            os << ',';
        }
        if (sol) {
            const AdjointState& lam = sol->adjoints[k];
            os << format_number(lam.lam_s) << ',' << format_number(lam.lam_i) << ',' << format_number(lam.lam_r);
        } else {
            os << ",,";
        }
        os << '\n';
    }
    return os.str();
}

std::string summary_json(const RunResult& run)
{
    json j;
    j["label"] = run.config.resolved_label();
    j["strategy"] = strategy_name(run.config.strategy);
    j["exit_code"] = run.exit_code;
    if (!run.error.empty())
        j["error"] = run.error;
    if (run.has_data())
        j["summary"] = summary_to_json(run.summary);
    if (run.solution)
        j["convergence"] = solution_report(*run.solution);
    if (run.cross_check && run.agreement) {
        json cc;
        cc["fbsm_objective"] = run.agreement->objective_a;
        cc["direct_objective"] = run.agreement->objective_b;
        cc["relative_objective_gap"] = run.agreement->relative_objective_gap;
        cc["interior_control_gap"] = run.agreement->interior_control_gap;
        cc["interior_nodes"] = run.agreement->interior_nodes;
        cc["direct"] = solution_report(*run.cross_check);
        j["cross_check"] = cc;
    }
    json config;
    for (const auto& [key, value] : run.config.resolved())
        config[key] = value;
    j["config"] = config;
    j["run"] = {{"tool", kToolName}, {"version", kToolVersion}, {"elapsed_seconds", run.elapsed_seconds}};
    return j.dump(2) + "\n";
}

void write_run_files(const RunResult& run, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    const std::string stem = file_stem(run);
    if (run.has_data())
        write_text(dir / (stem + "_timeseries.csv"), timeseries_csv(run));
    write_text(dir / (stem + "_summary.json"), summary_json(run));
}

void write_plot_data(const std::vector<RunResult>& runs, const std::filesystem::path& dir)
{
    std::vector<const RunResult*> usable;
    for (const auto& run : runs) {
        if (run.has_data())
            usable.push_back(&run);
    }
    if (usable.empty())
        return;
    const TimeGrid& grid = usable.front()->trajectory.grid;
    for (const RunResult* run : usable) {
        if (!(run->trajectory.grid == grid))
            throw std::runtime_error("plot data needs every run on the same grid");
    }
    std::filesystem::create_directories(dir);

    auto compartment = [&](const char* name, auto pick) {
        std::ostringstream os;
        os << 't';
        for (const RunResult* run : usable)
            os << ',' << file_stem(*run);
        os << '\n';
        for (std::size_t k = 0; k < grid.nodes(); ++k) {
            os << format_number(grid.time(k));
            for (const RunResult* run : usable)
                os << ',' << format_number(pick(run->trajectory[k]));
            os << '\n';
        }
        write_text(dir / (std::string("fig_") + name + "_compare.csv"), os.str());
    };
    compartment("S", [](const EpidemicState& x) { return x.s; });
    compartment("I", [](const EpidemicState& x) { return x.i; });
    compartment("R", [](const EpidemicState& x) { return x.r; });

    std::ostringstream os;
    os << 't';
    for (const RunResult* run : usable) {
        if (!run->solution)
            continue;
        for (std::size_t c = 0; c < run->solution->control.channels(); ++c)
            os << ',' << file_stem(*run) << "_u" << (c + 1);
    }
    os << '\n';
    for (std::size_t k = 0; k < grid.nodes(); ++k) {
        os << format_number(grid.time(k));
        for (const RunResult* run : usable) {
            if (!run->solution)
                continue;
            for (std::size_t c = 0; c < run->solution->control.channels(); ++c)
                os << ',' << format_number(run->solution->control.channel(c)[k]);
        }
        os << '\n';
    }
    write_text(dir / "fig_controls.csv", os.str());
}

int cmd_simulate(const ScenarioConfig& cfg, std::ostream& log)
{
    if (cfg.strategy) {
        log << "error: simulate runs the uncontrolled model; use 'optimize' for strategy "
            << strategy_name(cfg.strategy) << "\n";
        return kExitConfig;
    }
    const RunResult run = run_scenario(cfg);
    if (!run.has_data()) {
        log << "error: " << run.error << "\n";
        return run.exit_code;
    }
    write_run_files(run, cfg.out_dir);
    if (cfg.emit_plot_data)
        write_plot_data({run}, cfg.out_dir);
    log << run.config.resolved_label() << ": peak I = " << format_number(run.summary.peak_infected)
        << " at t = " << format_number(run.summary.t_peak) << ", R(t_end) = " << format_number(run.summary.r_end)
        << "\n";
    return run.exit_code;
}

int cmd_optimize(const ScenarioConfig& cfg, std::ostream& log)
{
    if (!cfg.strategy) {
        log << "error: optimize needs strategy 1, 2 or 3\n";
        return kExitConfig;
    }
    const RunResult run = run_scenario(cfg);
    if (!run.has_data()) {
        log << "error: " << run.error << "\n";
        return run.exit_code;
    }
    write_run_files(run, cfg.out_dir);
    if (cfg.emit_plot_data)
        write_plot_data({run}, cfg.out_dir);
    log << run.config.resolved_label() << ": " << run.solution->message << "; J = "
        << format_number(run.solution->objective) << ", peak I = " << format_number(run.summary.peak_infected)
        << ", R(t_end) = " << format_number(run.summary.r_end) << "\n";
    if (run.agreement) {
        log << "cross-check: J_direct = " << format_number(run.agreement->objective_b)
            << ", relative gap = " << format_number(run.agreement->relative_objective_gap)
            << ", interior control gap = " << format_number(run.agreement->interior_control_gap) << "\n";
    }
    if (!run.ok())
        log << "warning: " << run.error << "\n";
    return run.exit_code;
}

int cmd_compare(const std::vector<ScenarioConfig>& configs, const std::filesystem::path& out_dir,
                bool emit_plot_data, std::ostream& log)
{
    if (configs.empty()) {
        log << "error: compare needs at least one scenario\n";
        return kExitConfig;
    }
    std::vector<std::future<RunResult>> pending;
    pending.reserve(configs.size());
    for (const auto& cfg : configs)
        pending.push_back(std::async(std::launch::async, [cfg] { return run_scenario(cfg); }));
    std::vector<RunResult> runs;
    runs.reserve(configs.size());
    for (auto& f : pending)
        runs.push_back(f.get());

    int hard_failure = kExitOk;
    int status = kExitOk;
    for (const auto& run : runs) {
        if (!run.has_data() && hard_failure == kExitOk) {
            hard_failure = run.exit_code;
            log << "error: " << run.config.resolved_label() << ": " << run.error << "\n";
        }
        if (run.exit_code == kExitNonConvergence && status == kExitOk)
            status = kExitNonConvergence;
    }

    for (const auto& run : runs) {
        if (run.has_data())
            write_run_files(run, out_dir);
    }

    if (hard_failure != kExitOk) {
        std::size_t done = 0;
        for (const auto& run : runs)
            done += run.has_data() ? 1 : 0;
        log << "partial results: " << done << " of " << runs.size()
            << " scenarios completed; comparison files not written\n";
        return hard_failure;
    }

    std::vector<RunSummary> summaries;
    std::vector<std::string> labels;
    for (const auto& run : runs) {
        summaries.push_back(run.summary);
        labels.push_back(run.config.resolved_label());
    }
    const ComparisonTable table = compare_strategies(summaries, labels);
    std::filesystem::create_directories(out_dir);
    write_text(out_dir / "comparison.csv", table.to_csv());

    json j;
    j["rows"] = json::array();
    for (const auto& row : table.rows()) {
        json r = summary_to_json(row.summary);
        r["label"] = row.label;
        j["rows"].push_back(r);
    }
    j["run"] = {{"tool", kToolName}, {"version", kToolVersion}};
    write_text(out_dir / "comparison.json", j.dump(2) + "\n");

    if (emit_plot_data)
        write_plot_data(runs, out_dir);

    for (const auto& row : table.rows()) {
        log << row.label << ": peak I = " << format_number(row.summary.peak_infected)
            << ", R(t_end) = " << format_number(row.summary.r_end)
            << ", infection period = " << format_number(row.summary.infection_period) << " d\n";
    }
    return status;
}

} // namespace ebocp
