// Acceptance suite: one line per criterion, exit status 1 if any fails.

#include "ebocp/metrics.hpp"
#include "ebocp/ocp.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ebocp;

namespace {

struct Check {
    std::string what;
    bool ok;
};

class Criterion {
public:
    explicit Criterion(std::string name) : name_(std::move(name)) {}

    void within(const std::string& what, double value, double target, double tol)
    {
        std::ostringstream os;
        os << what << " = " << value << " (want " << target << " +/- " << tol << ")";
        add(os.str(), std::abs(value - target) <= tol);
    }
    void at_most(const std::string& what, double value, double limit)
    {
        std::ostringstream os;
        os << what << " = " << value << " (want <= " << limit << ")";
        add(os.str(), value <= limit);
    }
    void in_range(const std::string& what, double value, double lo, double hi)
    {
        std::ostringstream os;
        os << what << " = " << value << " (want in [" << lo << ", " << hi << "])";
        add(os.str(), value >= lo && value <= hi);
    }
    void add(const std::string& what, bool ok) { checks_.push_back({what, ok}); }

    [[nodiscard]] bool passed() const
    {
        for (const auto& c : checks_)
            if (!c.ok)
                return false;
        return !checks_.empty();
    }

    void report() const
    {
        std::printf("[%s] %s\n", passed() ? "PASS" : "FAIL", name_.c_str());
        for (const auto& c : checks_)
            std::printf("         %s %s\n", c.ok ? "ok  " : "MISS", c.what.c_str());
    }

private:
    std::string name_;
    std::vector<Check> checks_;
};

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double max_conservation_error(const Trajectory& traj, double n)
{
    double worst = 0.0;
    for (const auto& x : traj.values)
        worst = std::max(worst, std::abs(x.total() - n));
    return worst;
}

} // namespace

int main()
{
    const ModelParams params{0.2, 0.1, 1.0};
    const EpidemicState x0{0.95, 0.05, 0.0};
    const TimeGrid grid(0.0, 100.0, 1000);
    const double threshold = kDefaultInfectionThreshold;

    std::vector<Criterion> results;

    // 1. Uncontrolled peak.
    auto start = std::chrono::steady_clock::now();
    const Trajectory free_run = integrate_uncontrolled(params, x0, grid);
    const PeakInfected free_peak = peak_infected(free_run);
    const double free_seconds = seconds_since(start);
    {
        Criterion c("1 uncontrolled peak infected");
        const double analytic = oracle::sir_peak_infected(x0.s, x0.i, params.beta, params.mu);
        c.within("peak I", free_peak.i_peak, 0.179, 0.002);
        c.within("peak I vs first-integral oracle", free_peak.i_peak, analytic, 0.002);
        c.at_most("runtime [s]", free_seconds, 0.1);
        results.push_back(c);
    }

    // 2. Uncontrolled terminal state.
    {
        Criterion c("2 uncontrolled terminal state");
        const TerminalValues end = terminal_values(free_run);
        const double s_inf = oracle::final_size_susceptible(x0.s, params.n, params.beta, params.mu);
        c.within("S(100)", end.s_end, 0.19, 0.01);
        c.within("R(100)", end.r_end, 0.805, 0.01);
        c.within("S(100) vs final-size relation", end.s_end, s_inf, 0.01);
        results.push_back(c);
    }

    // 3-5. The three strategies.
    std::vector<OcpSolution> sweeps;
    std::vector<double> sweep_seconds;
    for (StrategyKind kind : {StrategyKind::Strategy1, StrategyKind::Strategy2, StrategyKind::Strategy3}) {
        start = std::chrono::steady_clock::now();
        sweeps.push_back(solve_fbsm(StrategySpec::defaults(kind)));
        sweep_seconds.push_back(seconds_since(start));
    }
    const RunSummary s1 = summarize(sweeps[0].trajectory, sweeps[0].objective, threshold);
    const RunSummary s2 = summarize(sweeps[1].trajectory, sweeps[1].objective, threshold);
    const RunSummary s3 = summarize(sweeps[2].trajectory, sweeps[2].objective, threshold);
    const RunSummary s0 = summarize(free_run, std::nullopt, threshold);
    {
        Criterion c("3 strategy 1 (vaccination)");
        c.add("sweep converged: " + sweeps[0].message, sweeps[0].converged);
        c.within("peak I", s1.peak_infected, 0.056, 0.01);
        c.within("R(100)", s1.r_end, 0.887, 0.02);
        c.within("S(100)", s1.s_end, 0.11, 0.02);
        c.at_most("runtime [s]", sweep_seconds[0], 5.0);
        results.push_back(c);
    }
    {
        Criterion c("4 strategy 2 (weighted vaccination)");
        c.add("sweep converged: " + sweeps[1].message, sweeps[1].converged);
        c.within("peak I", s2.peak_infected, 0.052, 0.01);
        c.within("S(100)", s2.s_end, 0.04, 0.02);
        c.within("R(100)", s2.r_end, 0.995, 0.01);
        results.push_back(c);
    }
    {
        Criterion c("5 strategy 3 (treatment and education)");
        c.add("sweep converged: " + sweeps[2].message, sweeps[2].converged);
        c.within("S(100)", s3.s_end, 0.05, 0.02);
        c.within("R(100)", s3.r_end, 0.944, 0.02);
        c.at_most("max I - I(0)", s3.peak_infected - x0.i, 0.01);
        results.push_back(c);
    }

    // 6. Infection periods.
    {
        Criterion c("6 infection periods at threshold 0.005");
        c.within("uncontrolled [d]", s0.infection_period, 100.0, 0.0);
        c.within("strategy 1 [d]", s1.infection_period, 64.0, 10.0);
        c.within("strategy 2 [d]", s2.infection_period, 48.0, 10.0);
        c.within("strategy 3 [d]", s3.infection_period, 22.0, 8.0);
        results.push_back(c);
    }

    // 7. Conservation.
    {
        Criterion c("7 conservation |S+I+R-1| at every node");
        c.at_most("uncontrolled", max_conservation_error(free_run, 1.0), 1e-9);
        for (std::size_t k = 0; k < sweeps.size(); ++k)
            c.at_most("strategy " + std::to_string(k + 1), max_conservation_error(sweeps[k].trajectory, 1.0), 1e-9);
        results.push_back(c);
    }

    // 8. Sweep vs direct transcription.
    {
        Criterion c("8 sweep vs direct solver");
        const StrategyKind kinds[] = {StrategyKind::Strategy1, StrategyKind::Strategy2, StrategyKind::Strategy3};
        for (std::size_t k = 0; k < 3; ++k) {
            const StrategySpec spec = StrategySpec::defaults(kinds[k]);
            const OcpSolution direct = solve_direct(spec);
            const SolverAgreement agree = compare_solutions(sweeps[k], direct, spec.u_max);
            const std::string tag = "strategy " + std::to_string(k + 1);
            c.add(tag + " direct converged: " + direct.message, direct.converged);
            c.at_most(tag + " |J_fbsm - J_direct| / |J_direct|", agree.relative_objective_gap, 0.01);
            c.at_most(tag + " interior L-inf control gap (" + std::to_string(agree.interior_nodes) + " nodes)",
                      agree.interior_control_gap, 0.05);
        }
        results.push_back(c);
    }

    // 9. Adjoint gradient vs finite differences on a coarse grid.
    {
        Criterion c("9 adjoint gradient vs finite differences (steps=100, 10 nodes)");
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> level(0.05, 0.85);
        for (StrategyKind kind : {StrategyKind::Strategy1, StrategyKind::Strategy2, StrategyKind::Strategy3}) {
            StrategySpec spec = StrategySpec::defaults(kind);
            spec.grid = TimeGrid(0.0, 100.0, 100);
            ControlSignal u(spec.grid, spec.channels());
            for (std::size_t ch = 0; ch < u.channels(); ++ch)
                for (auto& v : u.channel(ch))
                    v = level(rng);
            const ControlSignal g = objective_gradient(spec, u);
            std::uniform_int_distribution<std::size_t> pick_node(0, spec.grid.steps());
            std::uniform_int_distribution<std::size_t> pick_channel(0, spec.channels() - 1);
            double worst = 0.0;
            for (int n = 0; n < 10; ++n) {
                const std::size_t ch = pick_channel(rng);
                const std::size_t node = pick_node(rng);
                const double fd = finite_difference_gradient(spec, u, ch, {node}, 1e-6)[0];
                const double adj = g.channel(ch)[node];
                worst = std::max(worst, std::abs(adj - fd) / std::max(std::abs(fd), 1e-12));
            }
            c.at_most(to_string(kind) + " max relative gradient error", worst, 1e-4);
        }
        results.push_back(c);
    }

    // 10. RK4 order on the uncontrolled run.
    {
        Criterion c("10 RK4 order (dt 0.2 -> 0.1 against dt=1e-3)");
        const EpidemicState ref = integrate_uncontrolled(params, x0, TimeGrid(0.0, 100.0, 100000)).back();
        auto error = [&](std::size_t steps) {
            const EpidemicState x = integrate_uncontrolled(params, x0, TimeGrid(0.0, 100.0, steps)).back();
            return std::max({std::abs(x.s - ref.s), std::abs(x.i - ref.i), std::abs(x.r - ref.r)});
        };
        c.in_range("error ratio", error(500) / error(1000), 12.0, 20.0);
        results.push_back(c);
    }

    // 11. Orderings.
    {
        Criterion c("11 strategy orderings");
        std::ostringstream peaks;
        peaks << "peak S3 " << s3.peak_infected << " <= S2 " << s2.peak_infected << " <= S1 " << s1.peak_infected
              << " <= none " << s0.peak_infected;
        c.add(peaks.str(), s3.peak_infected <= s2.peak_infected && s2.peak_infected <= s1.peak_infected &&
                               s1.peak_infected <= s0.peak_infected);
        std::ostringstream ends;
        ends << "r_end none " << s0.r_end << " < S1 " << s1.r_end << " < S3 " << s3.r_end << " < S2 " << s2.r_end;
        c.add(ends.str(), s0.r_end < s1.r_end && s1.r_end < s3.r_end && s3.r_end < s2.r_end);
        results.push_back(c);
    }

    int failed = 0;
    for (const auto& r : results) {
        r.report();
        failed += r.passed() ? 0 : 1;
    }
    std::printf("\n%zu criteria, %d passed, %d failed\n", results.size(), static_cast<int>(results.size()) - failed,
                failed);
    return failed == 0 ? 0 : 1;
}
