#pragma once

#include "ebocp/metrics.hpp"
#include "ebocp/ocp.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace ebocp {

/// Unreadable, malformed or invalid scenario configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One simulation or optimization scenario. Every field defaults to the
/// reference parameter set.
struct ScenarioConfig {
    std::optional<StrategyKind> strategy; // nullopt: uncontrolled
    std::string label;                    // empty: derived from strategy

    ModelParams params;
    EpidemicState x0{0.95, 0.05, 0.0};
    double t0 = 0.0;
    double t_end = 100.0;
    std::size_t steps = 1000;
    double u_max = 0.9;
    Weights weights;

    SweepSettings sweep;
    DirectSettings direct;
    double threshold = kDefaultInfectionThreshold;

    std::filesystem::path out_dir = ".";
    bool cross_check = false;
    bool emit_plot_data = false;

    [[nodiscard]] std::string resolved_label() const;
    [[nodiscard]] TimeGrid grid() const;
    /// Throws ConfigError if strategy is none.
    [[nodiscard]] StrategySpec spec() const;

    /// Re-checks every invariant. Throws ConfigError naming the field.
    void validate() const;

    /// Every key with its resolved value, as it would be written to a file.
    [[nodiscard]] std::map<std::string, std::string> resolved() const;
};

/// Parses "none", "0", "1", "2", "3" (also "strategy1".."strategy3").
std::optional<StrategyKind> parse_strategy(const std::string& text);
std::string strategy_name(const std::optional<StrategyKind>& s);

/// Applies one `key = value` setting. Throws ConfigError for unknown keys
/// or malformed values.
void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value);

/// Flat `key = value` text, one setting per line, `#` starts a comment.
/// Duplicate and unknown keys are rejected. The result is validated.
ScenarioConfig parse_config(const std::string& text, ScenarioConfig base = {});
ScenarioConfig load_config(const std::filesystem::path& path, ScenarioConfig base = {});

} // namespace ebocp
