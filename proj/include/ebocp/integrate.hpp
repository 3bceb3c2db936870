#pragma once

#include "ebocp/model.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace ebocp {

/// Raised when an integration produces a non-finite value.
class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Uniform grid of `steps` intervals over [t0, t_end].
class TimeGrid {
public:
    /// Throws ValidationError unless t_end > t0 and steps >= 1.
    TimeGrid(double t0, double t_end, std::size_t steps);
    TimeGrid() : TimeGrid(0.0, 100.0, 1000) {}

    [[nodiscard]] double t0() const { return t0_; }
    [[nodiscard]] double t_end() const { return t_end_; }
    [[nodiscard]] std::size_t steps() const { return steps_; }
    [[nodiscard]] std::size_t nodes() const { return steps_ + 1; }
    [[nodiscard]] double dt() const { return (t_end_ - t0_) / static_cast<double>(steps_); }
    /// Node time; the last node is exactly t_end.
    [[nodiscard]] double time(std::size_t k) const;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    double t0_;
    double t_end_;
    std::size_t steps_;
};

/// Costates (lambda_S, lambda_I, lambda_R).
struct AdjointState {
    double lam_s = 0.0;
    double lam_i = 0.0;
    double lam_r = 0.0;

    AdjointState& operator+=(const AdjointState& o)
    {
        lam_s += o.lam_s;
        lam_i += o.lam_i;
        lam_r += o.lam_r;
        return *this;
    }
    AdjointState& operator*=(double k)
    {
        lam_s *= k;
        lam_i *= k;
        lam_r *= k;
        return *this;
    }
    friend AdjointState operator+(AdjointState a, const AdjointState& b) { return a += b; }
    friend AdjointState operator*(AdjointState a, double k) { return a *= k; }
    friend AdjointState operator*(double k, AdjointState a) { return a *= k; }
    friend bool operator==(const AdjointState&, const AdjointState&) = default;
};

/// Samples of a quantity at every node of a grid.
template <class T>
struct Series {
    TimeGrid grid;
    std::vector<T> values;

    [[nodiscard]] std::size_t size() const { return values.size(); }
    [[nodiscard]] bool empty() const { return values.empty(); }
    const T& operator[](std::size_t k) const { return values[k]; }
    const T& back() const { return values.back(); }
};

using Trajectory = Series<EpidemicState>;
using AdjointTrajectory = Series<AdjointState>;

/// Piecewise-linear control on the nodes of a grid, 0 to 2 channels.
/// Values are stored per channel: values[c][k].
class ControlSignal {
public:
    ControlSignal() = default;
    /// All channels set to `fill`.
    ControlSignal(const TimeGrid& grid, std::size_t channels, double fill = 0.0);
    ControlSignal(const TimeGrid& grid, std::vector<std::vector<double>> values);

    static ControlSignal none(const TimeGrid& grid) { return ControlSignal(grid, 0); }

    [[nodiscard]] const TimeGrid& grid() const { return grid_; }
    [[nodiscard]] std::size_t channels() const { return values_.size(); }
    [[nodiscard]] std::size_t nodes() const { return grid_.nodes(); }

    [[nodiscard]] const std::vector<double>& channel(std::size_t c) const { return values_[c]; }
    std::vector<double>& channel(std::size_t c) { return values_[c]; }

    /// Control at node k.
    [[nodiscard]] ControlValue at(std::size_t k) const;
    /// Linear interpolation between node k and k+1; `frac` in [0, 1].
    [[nodiscard]] ControlValue between(std::size_t k, double frac) const;

    /// Throws ValidationError if any value leaves [0, u_max].
    void validate(double u_max) const;

    /// L1 norm of one channel (sum of absolute node values).
    [[nodiscard]] double l1(std::size_t c) const;

private:
    TimeGrid grid_;
    std::vector<std::vector<double>> values_;
};

/// One classical Runge-Kutta step. `f(t, x)` returns dx/dt. `dt` may be
/// negative for backward integration.
template <class State, class F>
State rk4_step(F&& f, double t, const State& x, double dt)
{
    const double half = 0.5 * dt;
    const State k1 = f(t, x);
    const State k2 = f(t + half, x + half * k1);
    const State k3 = f(t + half, x + half * k2);
    const State k4 = f(t + dt, x + dt * k3);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Right-hand side of the state equation for a given control value.
using StateDynamics = std::function<EpidemicState(const EpidemicState&, const ControlValue&)>;
/// Right-hand side of the adjoint equation along a state sample.
using AdjointDynamics =
    std::function<AdjointState(const EpidemicState&, const AdjointState&, const ControlValue&)>;

/// Integrates states forward over `grid`. Controls at RK4 half stages are
/// linearly interpolated between nodes. Throws IntegrationError on a
/// non-finite state.
Trajectory integrate_forward(const StateDynamics& dynamics, const EpidemicState& x0, const TimeGrid& grid,
                             const ControlSignal& controls);

/// Convenience overload for SIR dynamics.
Trajectory integrate_forward(Dynamics d, const ModelParams& params, const EpidemicState& x0, const TimeGrid& grid,
                             const ControlSignal& controls);
Trajectory integrate_uncontrolled(const ModelParams& params, const EpidemicState& x0, const TimeGrid& grid);

/// Integrates adjoints from `lambda_end` at t_end down to t0 with negative
/// steps. States and controls at half stages use the same linear
/// interpolation rule as integrate_forward.
AdjointTrajectory integrate_backward(const AdjointDynamics& adjoint, const AdjointState& lambda_end,
                                     const Trajectory& states, const ControlSignal& controls);

} // namespace ebocp
