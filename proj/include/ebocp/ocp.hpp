#pragma once

#include "ebocp/integrate.hpp"
#include "ebocp/model.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace ebocp {

/// The three control problems.
///
///  Strategy1: vaccination,  J = int I + (nu/2) u^2
///  Strategy2: vaccination,  J = int A1 S + A2 I - A3 R + (tau/2) u^2
///  Strategy3: treatment u1 and education u2,
///                           J = int kappa I + (B1/2) u1^2 + (B2/2) u2^2
///
/// All three have free terminal state and no terminal cost, so the
/// costates vanish at t_end. See docs/derivation.md for the adjoint systems.
enum class StrategyKind { Strategy1, Strategy2, Strategy3 };

std::string to_string(StrategyKind kind);

struct Weights {
    double nu = 0.5;

    double a1 = 0.1;
    double a2 = 0.5;
    double a3 = 0.002;
    double tau = 1.0;

    double kappa = 1.0;
    double b1 = 0.2;
    double b2 = 0.04;
};

struct StrategySpec {
    StrategyKind kind = StrategyKind::Strategy1;
    Weights weights;
    double u_max = 0.9;
    TimeGrid grid;
    ModelParams params;
    EpidemicState x0{0.95, 0.05, 0.0};

    /// Defaults: beta=0.2, mu=0.1, x0=(0.95,0.05,0), [0,100] days in 1000 steps, u_max=0.9.
    static StrategySpec defaults(StrategyKind kind);

    [[nodiscard]] Dynamics dynamics() const;
    [[nodiscard]] std::size_t channels() const { return control_arity(dynamics()); }

    /// Control-cost weights must be positive (they divide the control law);
    /// state weights must be non-negative. Throws ValidationError.
    void validate() const;
};

/// Integrand of the objective.
double running_cost(const StrategySpec& spec, const EpidemicState& x, const ControlValue& u);

struct CostGradient {
    EpidemicState d_state;          // dL/d(S,I,R)
    std::array<double, 2> d_control; // dL/du per channel
};
CostGradient running_cost_gradient(const StrategySpec& spec, const EpidemicState& x, const ControlValue& u);

/// Composite trapezoid quadrature of running_cost on the trajectory grid.
double objective(const StrategySpec& spec, const Trajectory& traj, const ControlSignal& controls);

/// H = L + lambda . f
double hamiltonian(const StrategySpec& spec, const EpidemicState& x, const AdjointState& lam, const ControlValue& u);

/// dH/du per channel.
std::array<double, 2> hamiltonian_control_gradient(const StrategySpec& spec, const EpidemicState& x,
                                                   const AdjointState& lam, const ControlValue& u);

/// Costate right-hand side, -dH/d(S,I,R).
AdjointState adjoint_rhs(const StrategySpec& spec, const EpidemicState& x, const AdjointState& lam,
                         const ControlValue& u);

/// Minimizer of H over [0, u_max] per channel.
ControlValue optimal_control_characterization(const StrategySpec& spec, const EpidemicState& x,
                                              const AdjointState& lam);

Trajectory simulate(const StrategySpec& spec, const ControlSignal& controls);
AdjointTrajectory solve_adjoints(const StrategySpec& spec, const Trajectory& traj, const ControlSignal& controls);

struct OcpSolution {
    Trajectory trajectory;
    ControlSignal control;
    AdjointTrajectory adjoints;
    double objective = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::string solver;
    std::string message;
    std::vector<double> objective_history;
    std::vector<std::string> warnings;
};

struct SweepSettings {
    double tol = 1e-3;
    double relaxation = 0.5; // weight on the characterized control
    std::size_t max_iterations = 500;
    /// Halve the relaxation weight whenever the L1 distance between the
    /// characterized and the current control grows. Plain fixed-weight
    /// sweeps fall into a two-cycle on Strategies 2 and 3.
    bool adaptive_relaxation = true;
    double min_relaxation = 1.0 / 64.0;
};

/// Forward-backward sweep. Throws IntegrationError on blow-up. On
/// non-convergence returns the lowest-objective iterate with converged=false.
OcpSolution solve_fbsm(const StrategySpec& spec, const SweepSettings& settings = {});

struct DirectSettings {
    std::size_t max_iterations = 500;
    /// Stop when the projected scaled gradient drops below this (inf-norm).
    double gradient_tol = 1e-7;
    /// Intervals of the piecewise-linear control grid; 0 uses the
    /// integration grid. Must divide grid.steps().
    std::size_t control_steps = 0;
    /// Debug mode: central finite differences instead of the discrete adjoint.
    bool finite_difference_gradient = false;
    double fd_step = 1e-6;
};

/// Exact gradient of the discretized objective (RK4 + trapezoid + linear
/// control interpolation) with respect to every control node, obtained by
/// reverse propagation through the RK4 stages.
ControlSignal objective_gradient(const StrategySpec& spec, const ControlSignal& controls);

/// Central-difference gradient at the listed nodes of one channel.
std::vector<double> finite_difference_gradient(const StrategySpec& spec, const ControlSignal& controls,
                                               std::size_t channel, const std::vector<std::size_t>& nodes,
                                               double step = 1e-6);

/// Projected spectral gradient descent on the control node values, with
/// Armijo backtracking. Independent of the sweep's control law.
OcpSolution solve_direct(const StrategySpec& spec, const DirectSettings& settings = {});

struct SolverAgreement {
    double objective_a = 0.0;
    double objective_b = 0.0;
    double relative_objective_gap = 0.0; // |J_a - J_b| / |J_b|
    /// Max |u_a - u_b| over nodes where both values sit at least `margin`
    /// inside (0, u_max); 0 when no such node exists.
    double interior_control_gap = 0.0;
    std::size_t interior_nodes = 0;
};

SolverAgreement compare_solutions(const OcpSolution& a, const OcpSolution& b, double u_max, double margin = 0.01);

} // namespace ebocp
