#include "ebocp/app.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct Overrides {
    std::optional<std::string> strategy;
    std::optional<std::string> out;
    std::optional<double> threshold;
    std::optional<std::size_t> steps;
    bool cross_check = false;
    bool emit_plot_data = false;

    void apply(ebocp::ScenarioConfig& cfg) const
    {
        if (strategy)
            cfg.strategy = ebocp::parse_strategy(*strategy);
        if (out)
            cfg.out_dir = *out;
        if (threshold)
            cfg.threshold = *threshold;
        if (steps)
            cfg.steps = *steps;
        if (cross_check)
            cfg.cross_check = true;
        if (emit_plot_data)
            cfg.emit_plot_data = true;
        cfg.validate();
    }
};

void add_common(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--threshold", o.threshold, "Infection-period threshold (population fraction)");
    cmd->add_option("--steps", o.steps, "Number of integration intervals");
    cmd->add_flag("--emit-plot-data", o.emit_plot_data, "Write per-figure CSV bundles");
}

ebocp::ScenarioConfig load(const std::optional<std::string>& path, const Overrides& o)
{
    ebocp::ScenarioConfig cfg = path ? ebocp::load_config(*path) : ebocp::ScenarioConfig{};
    o.apply(cfg);
    return cfg;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Optimal vaccination, treatment and education strategies for an SIR epidemic"};
    app.require_subcommand(1);

    Overrides sim_opts;
    std::optional<std::string> sim_config;
    auto* simulate = app.add_subcommand("simulate", "Integrate the uncontrolled model");
    simulate->add_option("--config", sim_config, "Scenario file (key = value)");
    simulate->add_option("--strategy", sim_opts.strategy, "Must be 'none'");
    add_common(simulate, sim_opts);

    Overrides opt_opts;
    std::optional<std::string> opt_config;
    auto* optimize = app.add_subcommand("optimize", "Solve an optimal control strategy");
    optimize->add_option("--config", opt_config, "Scenario file (key = value)");
    optimize->add_option("--strategy", opt_opts.strategy, "1, 2 or 3");
    optimize->add_flag("--cross-check", opt_opts.cross_check, "Also solve with the direct method and compare");
    add_common(optimize, opt_opts);

    Overrides cmp_opts;
    std::vector<std::string> cmp_configs;
    std::vector<std::string> cmp_strategies;
    auto* compare = app.add_subcommand("compare", "Run several scenarios and tabulate them");
    compare->add_option("--config", cmp_configs, "Scenario files; default: uncontrolled and strategies 1-3");
    compare->add_option("--strategy", cmp_strategies, "Restrict the default scenarios (none, 1, 2, 3)");
    compare->add_flag("--cross-check", cmp_opts.cross_check, "Cross-check every optimization");
    add_common(compare, cmp_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate)
            return ebocp::cmd_simulate(load(sim_config, sim_opts), std::cerr);
        if (*optimize)
            return ebocp::cmd_optimize(load(opt_config, opt_opts), std::cerr);

        std::vector<ebocp::ScenarioConfig> configs;
        if (cmp_configs.empty()) {
            for (auto& cfg : ebocp::default_scenarios()) {
                if (!cmp_strategies.empty()) {
                    const std::string name = ebocp::strategy_name(cfg.strategy);
                    bool wanted = false;
                    for (const auto& s : cmp_strategies)
                        wanted = wanted || ebocp::strategy_name(ebocp::parse_strategy(s)) == name;
                    if (!wanted)
                        continue;
                }
                configs.push_back(cfg);
            }
        } else {
            for (const auto& path : cmp_configs)
                configs.push_back(ebocp::load_config(path));
        }
        std::filesystem::path out = cmp_opts.out.value_or(".");
        for (auto& cfg : configs) {
            cmp_opts.apply(cfg);
            cfg.out_dir = out;
        }
        return ebocp::cmd_compare(configs, out, cmp_opts.emit_plot_data, std::cerr);
    } catch (const ebocp::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ebocp::kExitConfig;
    }
}
