#include "ebocp/metrics.hpp"

#include "ebocp/format.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ebocp {

namespace {

void require_non_empty(const Trajectory& traj)
{
    if (traj.empty())
        throw ValidationError("trajectory is empty");
}

} // namespace

PeakInfected peak_infected(const Trajectory& traj)
{
    require_non_empty(traj);
    std::size_t best = 0;
    for (std::size_t k = 1; k < traj.size(); ++k) {
        if (traj[k].i > traj[best].i)
            best = k;
    }
    return {traj.grid.time(best), traj[best].i};
}

double infection_period(const Trajectory& traj, double threshold)
{
    if (!(threshold > 0.0) || !std::isfinite(threshold))
        throw ValidationError("infection threshold must be positive");
    require_non_empty(traj);

    const TimeGrid& grid = traj.grid;
    std::size_t peak = 0;
    for (std::size_t k = 1; k < traj.size(); ++k) {
        if (traj[k].i > traj[peak].i)
            peak = k;
    }
    if (traj.back().i >= threshold)
        return grid.t_end() - grid.t0();

    // Walk back from the end while I stays below the threshold.
    std::size_t first_below = traj.size() - 1;
    while (first_below > peak && traj[first_below - 1].i < threshold)
        --first_below;
    return grid.time(first_below) - grid.t0();
}

TerminalValues terminal_values(const Trajectory& traj)
{
    require_non_empty(traj);
    const EpidemicState& x = traj.back();
    return {x.s, x.i, x.r};
}

RunSummary summarize(const Trajectory& traj, std::optional<double> objective, double threshold)
{
    const PeakInfected peak = peak_infected(traj);
    const TerminalValues end = terminal_values(traj);
    RunSummary s;
    s.peak_infected = peak.i_peak;
    s.t_peak = peak.t_peak;
    s.infection_period = infection_period(traj, threshold);
    s.s_end = end.s_end;
    s.i_end = end.i_end;
    s.r_end = end.r_end;
    s.objective = objective;
    return s;
}

const std::vector<std::string>& ComparisonTable::columns()
{
    static const std::vector<std::string> cols{"label", "peak_infected", "t_peak", "infection_period",
                                               "s_end", "i_end",         "r_end",  "objective"};
    return cols;
}

std::vector<RunSummary> ComparisonTable::summaries() const
{
    std::vector<RunSummary> out;
    out.reserve(rows_.size());
    for (const auto& row : rows_)
        out.push_back(row.summary);
    return out;
}

std::vector<double> ComparisonTable::column(const std::string& name) const
{
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& row : rows_) {
        const RunSummary& s = row.summary;
        if (name == "peak_infected")
            out.push_back(s.peak_infected);
        else if (name == "t_peak")
            out.push_back(s.t_peak);
        else if (name == "infection_period")
            out.push_back(s.infection_period);
        else if (name == "s_end")
            out.push_back(s.s_end);
        else if (name == "i_end")
            out.push_back(s.i_end);
        else if (name == "r_end")
            out.push_back(s.r_end);
        else if (name == "objective")
            out.push_back(s.objective.value_or(std::numeric_limits<double>::quiet_NaN()));
        else
            throw ValidationError("unknown comparison column: " + name);
    }
    return out;
}

std::string ComparisonTable::to_csv() const
{
    std::ostringstream os;
    const auto& cols = columns();
    for (std::size_t c = 0; c < cols.size(); ++c)
        os << (c ? "," : "") << cols[c];
    os << '\n';
    for (const auto& row : rows_) {
        const RunSummary& s = row.summary;
        os << row.label << ',' << format_number(s.peak_infected) << ',' << format_number(s.t_peak) << ','
           << format_number(s.infection_period) << ',' << format_number(s.s_end) << ',' << format_number(s.i_end)
           << ',' << format_number(s.r_end) << ',';
        if (s.objective)
            os << format_number(*s.objective);
        os << '\n';
    }
    return os.str();
}

ComparisonTable compare_strategies(const std::vector<RunSummary>& summaries, const std::vector<std::string>& labels)
{
    if (summaries.empty())
        throw ValidationError("comparison needs at least one run");
    if (summaries.size() != labels.size())
        throw ValidationError("comparison needs one label per run");
    std::vector<ComparisonRow> rows;
    rows.reserve(summaries.size());
    for (std::size_t k = 0; k < summaries.size(); ++k)
        rows.push_back({labels[k], summaries[k]});
    return ComparisonTable(std::move(rows));
}

} // namespace ebocp
