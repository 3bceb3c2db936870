#pragma once

#include "ebocp/integrate.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ebocp {

/// Fraction of the population used as the default "epidemic is over" level.
inline constexpr double kDefaultInfectionThreshold = 0.005;

struct PeakInfected {
    double t_peak = 0.0;
    double i_peak = 0.0;
};

struct TerminalValues {
    double s_end = 0.0;
    double i_end = 0.0;
    double r_end = 0.0;
};

struct RunSummary {
    double peak_infected = 0.0;
    double t_peak = 0.0;
    double infection_period = 0.0;
    double s_end = 0.0;
    double i_end = 0.0;
    double r_end = 0.0;
    std::optional<double> objective; // absent for uncontrolled runs

    friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

/// Grid-node argmax of I, earliest node on ties. Throws ValidationError on
/// an empty trajectory.
PeakInfected peak_infected(const Trajectory& traj);

/// Earliest node time t* at or after the peak such that I < threshold at
/// every node from t* on, measured from t0. Returns the horizon length
/// when I is still at or above the threshold at t_end.
double infection_period(const Trajectory& traj, double threshold = kDefaultInfectionThreshold);

TerminalValues terminal_values(const Trajectory& traj);

RunSummary summarize(const Trajectory& traj, std::optional<double> objective = std::nullopt,
                     double threshold = kDefaultInfectionThreshold);

struct ComparisonRow {
    std::string label;
    RunSummary summary;
};

class ComparisonTable {
public:
    static const std::vector<std::string>& columns();

    explicit ComparisonTable(std::vector<ComparisonRow> rows) : rows_(std::move(rows)) {}

    [[nodiscard]] const std::vector<ComparisonRow>& rows() const { return rows_; }
    [[nodiscard]] std::vector<RunSummary> summaries() const;
    /// Values of one column in row order; `objective` yields NaN where absent.
    [[nodiscard]] std::vector<double> column(const std::string& name) const;

    /// Header `label,peak_infected,...`, 9 significant digits, empty field
    /// for a missing objective.
    [[nodiscard]] std::string to_csv() const;

private:
    std::vector<ComparisonRow> rows_;
};

/// Throws ValidationError when lengths differ or the input is empty.
ComparisonTable compare_strategies(const std::vector<RunSummary>& summaries, const std::vector<std::string>& labels);

} // namespace ebocp
