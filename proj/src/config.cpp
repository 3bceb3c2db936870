#include "ebocp/config.hpp"

#include "ebocp/format.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace ebocp {

namespace {

std::string trim(const std::string& s)
{
    const auto begin = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
    const auto end = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); }).base();
    return begin < end ? std::string(begin, end) : std::string();
}

double parse_double(const std::string& key, const std::string& value)
{
    double out = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last)
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    return out;
}

std::size_t parse_count(const std::string& key, const std::string& value)
{
    long long out = 0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || out < 0)
        throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
    return static_cast<std::size_t>(out);
}

bool parse_bool(const std::string& key, const std::string& value)
{
    if (value == "true" || value == "1" || value == "yes" || value == "on")
        return true;
    if (value == "false" || value == "0" || value == "no" || value == "off")
        return false;
    throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

void require(bool ok, const std::string& key, const std::string& what)
{
    if (!ok)
        throw ConfigError(key + ": " + what);
}

} // namespace

std::optional<StrategyKind> parse_strategy(const std::string& text)
{
    if (text == "none" || text == "0" || text == "uncontrolled")
        return std::nullopt;
    if (text == "1" || text == "strategy1")
        return StrategyKind::Strategy1;
    if (text == "2" || text == "strategy2")
        return StrategyKind::Strategy2;
    if (text == "3" || text == "strategy3")
        return StrategyKind::Strategy3;
    throw ConfigError("strategy: expected none, 1, 2 or 3, got '" + text + "'");
}

std::string strategy_name(const std::optional<StrategyKind>& s)
{
    if (!s)
        return "none";
    switch (*s) {
    case StrategyKind::Strategy1: return "1";
    case StrategyKind::Strategy2: return "2";
    case StrategyKind::Strategy3: return "3";
    }
    return "none";
}

std::string ScenarioConfig::resolved_label() const
{
    if (!label.empty())
        return label;
    return strategy ? to_string(*strategy) : "uncontrolled";
}

TimeGrid ScenarioConfig::grid() const
{
    try {
        return TimeGrid(t0, t_end, steps);
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
}

StrategySpec ScenarioConfig::spec() const
{
    if (!strategy)
        throw ConfigError("strategy: an optimization needs strategy 1, 2 or 3");
    StrategySpec s;
    s.kind = *strategy;
    s.weights = weights;
    s.u_max = u_max;
    s.grid = grid();
    s.params = params;
    s.x0 = x0;
    return s;
}

void ScenarioConfig::validate() const
{
    require(params.beta > 0.0, "beta", "must be positive");
    require(params.mu > 0.0, "mu", "must be positive");
    require(params.n > 0.0, "n", "must be positive");
    require(x0.s >= 0.0, "s0", "must be non-negative");
    require(x0.i >= 0.0, "i0", "must be non-negative");
    require(x0.r >= 0.0, "r0", "must be non-negative");
    require(std::abs(x0.total() - params.n) <= 1e-9, "s0", "s0 + i0 + r0 must equal n");
    require(t_end > t0, "t_end", "must exceed t0");
    require(steps >= 1, "steps", "must be at least 1");
    require(u_max > 0.0, "u_max", "must be positive");
    require(weights.nu > 0.0, "nu", "must be positive");
    require(weights.tau > 0.0, "tau", "must be positive");
    require(weights.b1 > 0.0, "b1", "must be positive");
    require(weights.b2 > 0.0, "b2", "must be positive");
    require(weights.a1 >= 0.0, "a1", "must be non-negative");
    require(weights.a2 >= 0.0, "a2", "must be non-negative");
    require(weights.a3 >= 0.0, "a3", "must be non-negative");
    require(weights.kappa >= 0.0, "kappa", "must be non-negative");
    require(sweep.tol > 0.0, "tol", "must be positive");
    require(sweep.relaxation > 0.0 && sweep.relaxation <= 1.0, "relaxation", "must lie in (0, 1]");
    require(sweep.max_iterations >= 1, "max_iterations", "must be at least 1");
    require(threshold > 0.0, "threshold", "must be positive");
}

std::map<std::string, std::string> ScenarioConfig::resolved() const
{
    return {
        {"strategy", strategy_name(strategy)},
        {"label", resolved_label()},
        {"beta", format_number(params.beta)},
        {"mu", format_number(params.mu)},
        {"n", format_number(params.n)},
        {"s0", format_number(x0.s)},
        {"i0", format_number(x0.i)},
        {"r0", format_number(x0.r)},
        {"t0", format_number(t0)},
        {"t_end", format_number(t_end)},
        {"steps", std::to_string(steps)},
        {"u_max", format_number(u_max)},
        {"nu", format_number(weights.nu)},
        {"a1", format_number(weights.a1)},
        {"a2", format_number(weights.a2)},
        {"a3", format_number(weights.a3)},
        {"tau", format_number(weights.tau)},
        {"kappa", format_number(weights.kappa)},
        {"b1", format_number(weights.b1)},
        {"b2", format_number(weights.b2)},
        {"tol", format_number(sweep.tol)},
        {"relaxation", format_number(sweep.relaxation)},
        {"adaptive_relaxation", sweep.adaptive_relaxation ? "true" : "false"},
        {"max_iterations", std::to_string(sweep.max_iterations)},
        {"threshold", format_number(threshold)},
        {"out_dir", out_dir.string()},
        {"cross_check", cross_check ? "true" : "false"},
        {"emit_plot_data", emit_plot_data ? "true" : "false"},
    };
}

void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value)
{
    if (key == "strategy")
        cfg.strategy = parse_strategy(value);
    else if (key == "label")
        cfg.label = value;
    else if (key == "beta")
        cfg.params.beta = parse_double(key, value);
    else if (key == "mu")
        cfg.params.mu = parse_double(key, value);
    else if (key == "n")
        cfg.params.n = parse_double(key, value);
    else if (key == "s0")
        cfg.x0.s = parse_double(key, value);
    else if (key == "i0")
        cfg.x0.i = parse_double(key, value);
    else if (key == "r0")
        cfg.x0.r = parse_double(key, value);
    else if (key == "t0")
        cfg.t0 = parse_double(key, value);
    else if (key == "t_end")
        cfg.t_end = parse_double(key, value);
    else if (key == "steps")
        cfg.steps = parse_count(key, value);
    else if (key == "u_max")
        cfg.u_max = parse_double(key, value);
    else if (key == "nu")
        cfg.weights.nu = parse_double(key, value);
    else if (key == "a1")
        cfg.weights.a1 = parse_double(key, value);
    else if (key == "a2")
        cfg.weights.a2 = parse_double(key, value);
    else if (key == "a3")
        cfg.weights.a3 = parse_double(key, value);
    else if (key == "tau")
        cfg.weights.tau = parse_double(key, value);
    else if (key == "kappa")
        cfg.weights.kappa = parse_double(key, value);
    else if (key == "b1")
        cfg.weights.b1 = parse_double(key, value);
    else if (key == "b2")
        cfg.weights.b2 = parse_double(key, value);
    else if (key == "tol")
        cfg.sweep.tol = parse_double(key, value);
    else if (key == "relaxation")
        cfg.sweep.relaxation = parse_double(key, value);
    else if (key == "adaptive_relaxation")
        cfg.sweep.adaptive_relaxation = parse_bool(key, value);
    else if (key == "max_iterations") {
        cfg.sweep.max_iterations = parse_count(key, value);
        cfg.direct.max_iterations = cfg.sweep.max_iterations;
    } else if (key == "threshold")
        cfg.threshold = parse_double(key, value);
    else if (key == "out_dir")
        cfg.out_dir = value;
    else if (key == "cross_check")
        cfg.cross_check = parse_bool(key, value);
    else if (key == "emit_plot_data")
        cfg.emit_plot_data = parse_bool(key, value);
    else
        throw ConfigError("unknown key '" + key + "'");
}

ScenarioConfig parse_config(const std::string& text, ScenarioConfig base)
{
    std::istringstream in(text);
    std::string line;
    std::set<std::string> seen;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (!seen.insert(key).second)
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        try {
            apply_setting(base, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    base.validate();
    return base;
}

ScenarioConfig load_config(const std::filesystem::path& path, ScenarioConfig base)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_config(text.str(), std::move(base));
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

} // namespace ebocp
