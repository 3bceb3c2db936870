#include "ebocp/integrate.hpp"

#include <cmath>
#include <sstream>

namespace ebocp {

namespace {

bool finite(const EpidemicState& x) { return std::isfinite(x.s) && std::isfinite(x.i) && std::isfinite(x.r); }
bool finite(const AdjointState& a)
{
    return std::isfinite(a.lam_s) && std::isfinite(a.lam_i) && std::isfinite(a.lam_r);
}

EpidemicState lerp(const EpidemicState& a, const EpidemicState& b, double frac)
{
    return (1.0 - frac) * a + frac * b;
}

void require_grid(const ControlSignal& controls, const TimeGrid& grid)
{
    if (!(controls.grid() == grid))
        throw ValidationError("control signal is sampled on a different grid");
}

} // namespace

TimeGrid::TimeGrid(double t0, double t_end, std::size_t steps) : t0_(t0), t_end_(t_end), steps_(steps)
{
    if (!std::isfinite(t0) || !std::isfinite(t_end) || !(t_end > t0)) {
        std::ostringstream os;
        os << "time grid requires t_end > t0 (got t0=" << t0 << ", t_end=" << t_end << ")";
        throw ValidationError(os.str());
    }
    if (steps < 1)
        throw ValidationError("time grid requires steps >= 1");
}

double TimeGrid::time(std::size_t k) const
{
    if (k >= steps_)
        return k == steps_ ? t_end_ : t0_ + dt() * static_cast<double>(k);
    return t0_ + dt() * static_cast<double>(k);
}

ControlSignal::ControlSignal(const TimeGrid& grid, std::size_t channels, double fill)
    : grid_(grid), values_(channels, std::vector<double>(grid.nodes(), fill))
{
    if (channels > 2)
        throw ArityError("control signals carry at most two channels");
}

ControlSignal::ControlSignal(const TimeGrid& grid, std::vector<std::vector<double>> values)
    : grid_(grid), values_(std::move(values))
{
    if (values_.size() > 2)
        throw ArityError("control signals carry at most two channels");
    for (const auto& ch : values_) {
        if (ch.size() != grid_.nodes())
            throw ValidationError("control channel length must equal steps+1");
    }
}

ControlValue ControlSignal::at(std::size_t k) const
{
    switch (values_.size()) {
    case 1: return ControlValue::single(values_[0][k]);
    case 2: return ControlValue::pair(values_[0][k], values_[1][k]);
    default: return ControlValue::none();
    }
}

ControlValue ControlSignal::between(std::size_t k, double frac) const
{
    if (frac == 0.0)
        return at(k);
    if (frac == 1.0)
        return at(k + 1);
    auto mix = [&](std::size_t c) { return (1.0 - frac) * values_[c][k] + frac * values_[c][k + 1]; };
    switch (values_.size()) {
    case 1: return ControlValue::single(mix(0));
    case 2: return ControlValue::pair(mix(0), mix(1));
    default: return ControlValue::none();
    }
}

void ControlSignal::validate(double u_max) const
{
    for (std::size_t k = 0; k < nodes(); ++k)
        at(k).validate(u_max);
}

double ControlSignal::l1(std::size_t c) const
{
    double sum = 0.0;
    for (double v : values_[c])
        sum += std::abs(v);
    return sum;
}

Trajectory integrate_forward(const StateDynamics& dynamics, const EpidemicState& x0, const TimeGrid& grid,
                             const ControlSignal& controls)
{
    require_grid(controls, grid);
    const double h = grid.dt();
    Trajectory traj{grid, {}};
    traj.values.reserve(grid.nodes());
    traj.values.push_back(x0);
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        // Local time within the interval keeps stage fractions exactly 0, 1/2, 1.
        auto f = [&](double tau, const EpidemicState& x) { return dynamics(x, controls.between(k, tau / h)); };
        EpidemicState next = rk4_step(f, 0.0, traj.values.back(), h);
        if (!finite(next)) {
            std::ostringstream os;
            os << "state became non-finite at t=" << grid.time(k + 1);
            throw IntegrationError(os.str());
        }
        traj.values.push_back(next);
    }
    return traj;
}

Trajectory integrate_forward(Dynamics d, const ModelParams& params, const EpidemicState& x0, const TimeGrid& grid,
                             const ControlSignal& controls)
{
    if (controls.channels() != control_arity(d))
        throw ArityError("control signal arity does not match " + to_string(d) + " dynamics");
    return integrate_forward([&](const EpidemicState& x, const ControlValue& u) { return rhs(d, x, params, u); },
                             x0, grid, controls);
}

Trajectory integrate_uncontrolled(const ModelParams& params, const EpidemicState& x0, const TimeGrid& grid)
{
    return integrate_forward(Dynamics::Uncontrolled, params, x0, grid, ControlSignal::none(grid));
}

AdjointTrajectory integrate_backward(const AdjointDynamics& adjoint, const AdjointState& lambda_end,
                                     const Trajectory& states, const ControlSignal& controls)
{
    const TimeGrid& grid = states.grid;
    require_grid(controls, grid);
    if (states.size() != grid.nodes())
        throw ValidationError("state trajectory length does not match its grid");

    const double h = grid.dt();
    AdjointTrajectory out{grid, std::vector<AdjointState>(grid.nodes())};
    out.values.back() = lambda_end;
    for (std::size_t k = grid.steps(); k-- > 0;) {
        auto f = [&](double tau, const AdjointState& lam) {
            const double frac = tau / h;
            const EpidemicState x = frac >= 1.0   ? states[k + 1]
                                    : frac <= 0.0 ? states[k]
                                                  : lerp(states[k], states[k + 1], frac);
            return adjoint(x, lam, controls.between(k, frac));
        };
        AdjointState prev = rk4_step(f, h, out.values[k + 1], -h);
        if (!finite(prev)) {
            std::ostringstream os;
            os << "adjoint became non-finite at t=" << grid.time(k);
            throw IntegrationError(os.str());
        }
        out.values[k] = prev;
    }
    return out;
}

} // namespace ebocp
