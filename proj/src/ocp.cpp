#include "ebocp/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ebocp {

namespace {

using Vec3 = std::array<double, 3>;


void require_arity(const StrategySpec& spec, const ControlValue& u)
{
    if (u.channels() != spec.channels()) {
        std::ostringstream os;
        os << to_string(spec.kind) << " expects " << spec.channels() << " control channel(s), got "
           << u.channels();
        throw ArityError(os.str());
    }
}

double clamp_control(double v, double u_max) { return std::clamp(v, 0.0, u_max); }

void require_positive(double v, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw ValidationError(std::string(name) + " must be positive and finite");
}

void require_non_negative(double v, const char* name)
{
    if (!(v >= 0.0) || !std::isfinite(v))
        throw ValidationError(std::string(name) + " must be non-negative and finite");
}

ControlSignal characterize(const StrategySpec& spec, const Trajectory& traj, const AdjointTrajectory& lam)
{
    ControlSignal out(spec.grid, spec.channels());
    for (std::size_t k = 0; k < spec.grid.nodes(); ++k) {
        const ControlValue u = optimal_control_characterization(spec, traj[k], lam[k]);
        for (std::size_t c = 0; c < out.channels(); ++c)
            out.channel(c)[k] = u[c];
    }
    return out;
}

} // namespace

std::string to_string(StrategyKind kind)
{
    switch (kind) {
    case StrategyKind::Strategy1: return "strategy1";
    case StrategyKind::Strategy2: return "strategy2";
    case StrategyKind::Strategy3: return "strategy3";
    }
    return "unknown";
}

StrategySpec StrategySpec::defaults(StrategyKind kind)
{
    StrategySpec spec;
    spec.kind = kind;
    return spec;
}

Dynamics StrategySpec::dynamics() const
{
    return kind == StrategyKind::Strategy3 ? Dynamics::TreatmentEducation : Dynamics::Vaccination;
}

void StrategySpec::validate() const
{
    params.validate();
    validate_state(x0, params);
    if (!(u_max > 0.0) || !std::isfinite(u_max))
        throw ValidationError("u_max must be positive and finite");
    switch (kind) {
    case StrategyKind::Strategy1:
        require_positive(weights.nu, "nu");
        break;
    case StrategyKind::Strategy2:
        require_non_negative(weights.a1, "a1");
        require_non_negative(weights.a2, "a2");
        require_non_negative(weights.a3, "a3");
        require_positive(weights.tau, "tau");
        break;
    case StrategyKind::Strategy3:
        require_non_negative(weights.kappa, "kappa");
        require_positive(weights.b1, "b1");
        require_positive(weights.b2, "b2");
        break;
    }
}

double running_cost(const StrategySpec& spec, const EpidemicState& x, const ControlValue& u)
{
    require_arity(spec, u);
    const Weights& w = spec.weights;
    switch (spec.kind) {
    case StrategyKind::Strategy1: return x.i + 0.5 * w.nu * u.u1() * u.u1();
    case StrategyKind::Strategy2: return w.a1 * x.s + w.a2 * x.i - w.a3 * x.r + 0.5 * w.tau * u.u1() * u.u1();
    case StrategyKind::Strategy3:
        return w.kappa * x.i + 0.5 * w.b1 * u.u1() * u.u1() + 0.5 * w.b2 * u.u2() * u.u2();
    }
    return 0.0;
}

CostGradient running_cost_gradient(const StrategySpec& spec, const EpidemicState&, const ControlValue& u)
{
    require_arity(spec, u);
    const Weights& w = spec.weights;
    switch (spec.kind) {
    case StrategyKind::Strategy1: return {{0.0, 1.0, 0.0}, {w.nu * u.u1(), 0.0}};
    case StrategyKind::Strategy2: return {{w.a1, w.a2, -w.a3}, {w.tau * u.u1(), 0.0}};
    case StrategyKind::Strategy3: return {{0.0, w.kappa, 0.0}, {w.b1 * u.u1(), w.b2 * u.u2()}};
    }
    return {};
}

double objective(const StrategySpec& spec, const Trajectory& traj, const ControlSignal& controls)
{
    if (!(traj.grid == spec.grid) || !(controls.grid() == spec.grid) || traj.size() != spec.grid.nodes())
        throw ValidationError("objective: trajectory and controls must live on the strategy grid");
    const std::size_t last = spec.grid.steps();
    double sum = 0.0;
    for (std::size_t k = 0; k <= last; ++k) {
        const double weight = (k == 0 || k == last) ? 0.5 : 1.0;
        sum += weight * running_cost(spec, traj[k], controls.at(k));
    }
    return spec.grid.dt() * sum;
}

double hamiltonian(const StrategySpec& spec, const EpidemicState& x, const AdjointState& lam, const ControlValue& u)
{
    const EpidemicState f = rhs(spec.dynamics(), x, spec.params, u);
    return running_cost(spec, x, u) + lam.lam_s * f.s + lam.lam_i * f.i + lam.lam_r * f.r;
}

std::array<double, 2> hamiltonian_control_gradient(const StrategySpec& spec, const EpidemicState& x,
                                                   const AdjointState& lam, const ControlValue& u)
{
    const CostGradient g = running_cost_gradient(spec, x, u);
    const ControlJacobian ju = control_jacobian(spec.dynamics(), x, spec.params);
    std::array<double, 2> out{};
    for (std::size_t c = 0; c < spec.channels(); ++c)
        out[c] = g.d_control[c] + lam.lam_s * ju[0][c] + lam.lam_i * ju[1][c] + lam.lam_r * ju[2][c];
    return out;
}

AdjointState adjoint_rhs(const StrategySpec& spec, const EpidemicState& x, const AdjointState& lam,
                         const ControlValue& u)
{
    require_arity(spec, u);
    const double beta = spec.params.beta;
    const double mu = spec.params.mu;
    const double ds_di = lam.lam_s - lam.lam_i; // infection moves S -> I
    const Weights& w = spec.weights;
    switch (spec.kind) {
    case StrategyKind::Strategy1:
        return {ds_di * beta * x.i + (lam.lam_s - lam.lam_r) * u.u1(),
                -1.0 + ds_di * beta * x.s + (lam.lam_i - lam.lam_r) * mu, 0.0};
    case StrategyKind::Strategy2:
        return {-w.a1 + ds_di * beta * x.i + (lam.lam_s - lam.lam_r) * u.u1(),
                -w.a2 + ds_di * beta * x.s + (lam.lam_i - lam.lam_r) * mu, w.a3};
    case StrategyKind::Strategy3:
        return {ds_di * beta * x.i + (lam.lam_s - lam.lam_r) * u.u2(),
                -w.kappa + ds_di * beta * x.s + (lam.lam_i - lam.lam_r) * (mu + u.u1()), 0.0};
    }
    return {};
}

ControlValue optimal_control_characterization(const StrategySpec& spec, const EpidemicState& x,
                                              const AdjointState& lam)
{
    const Weights& w = spec.weights;
    switch (spec.kind) {
    case StrategyKind::Strategy1:
        return ControlValue::single(clamp_control((lam.lam_s - lam.lam_r) * x.s / w.nu, spec.u_max));
    case StrategyKind::Strategy2:
        return ControlValue::single(clamp_control((lam.lam_s - lam.lam_r) * x.s / w.tau, spec.u_max));
    case StrategyKind::Strategy3:
        return ControlValue::pair(clamp_control((lam.lam_i - lam.lam_r) * x.i / w.b1, spec.u_max),
                                  clamp_control((lam.lam_s - lam.lam_r) * x.s / w.b2, spec.u_max));
    }
    return {};
}

Trajectory simulate(const StrategySpec& spec, const ControlSignal& controls)
{
    return integrate_forward(spec.dynamics(), spec.params, spec.x0, spec.grid, controls);
}

AdjointTrajectory solve_adjoints(const StrategySpec& spec, const Trajectory& traj, const ControlSignal& controls)
{
    return integrate_backward(
        [&](const EpidemicState& x, const AdjointState& lam, const ControlValue& u) {
            return adjoint_rhs(spec, x, lam, u);
        },
        AdjointState{}, traj, controls);
}

OcpSolution solve_fbsm(const StrategySpec& spec, const SweepSettings& settings)
{
    spec.validate();
    if (!(settings.tol > 0.0) || !(settings.relaxation > 0.0 && settings.relaxation <= 1.0))
        throw ValidationError("sweep settings require tol > 0 and relaxation in (0, 1]");

    const std::size_t channels = spec.channels();
    ControlSignal u_old(spec.grid, channels, 0.0);
    double weight = settings.relaxation;
    double prev_gap = std::numeric_limits<double>::infinity();

    OcpSolution sol;
    sol.solver = "fbsm";
    double best_objective = std::numeric_limits<double>::infinity();
    ControlSignal best = u_old;

    for (std::size_t it = 1; it <= settings.max_iterations; ++it) {
        const Trajectory traj = simulate(spec, u_old);
        const double j = objective(spec, traj, u_old);
        sol.objective_history.push_back(j);
        if (j < best_objective) {
            best_objective = j;
            best = u_old;
        }
        const std::size_t n = sol.objective_history.size();
        if (n > 6 && j > sol.objective_history[n - 2] + 1e-6) {
            std::ostringstream os;
            os << "objective increased at iteration " << it << " (" << sol.objective_history[n - 2] << " -> " << j
               << ")";
            sol.warnings.push_back(os.str());
        }

        const AdjointTrajectory lam = solve_adjoints(spec, traj, u_old);
        const ControlSignal u_char = characterize(spec, traj, lam);

        double gap = 0.0;
        for (std::size_t c = 0; c < channels; ++c)
            for (std::size_t k = 0; k < spec.grid.nodes(); ++k)
                gap += std::abs(u_char.channel(c)[k] - u_old.channel(c)[k]);
        if (settings.adaptive_relaxation && gap > prev_gap)
            weight = std::max(0.5 * weight, settings.min_relaxation);
        prev_gap = gap;

        ControlSignal u_new = u_old;
        bool converged = true;
        for (std::size_t c = 0; c < channels; ++c) {
            double diff = 0.0;
            for (std::size_t k = 0; k < spec.grid.nodes(); ++k) {
                double& v = u_new.channel(c)[k];
                v = (1.0 - weight) * u_old.channel(c)[k] + weight * u_char.channel(c)[k];
                diff += std::abs(v - u_old.channel(c)[k]);
            }
            if (settings.tol * u_new.l1(c) - diff < 0.0)
                converged = false;
        }
        u_old = std::move(u_new);
        sol.iterations = it;
        if (converged) {
            sol.converged = true;
            break;
        }
    }

    std::ostringstream msg;
    if (sol.converged) {
        msg << "converged after " << sol.iterations << " iterations (relaxation weight " << weight << ")";
    } else {
        msg << "no convergence after " << sol.iterations << " iterations; returning best iterate";
        u_old = best;
    }
    sol.message = msg.str();
    sol.trajectory = simulate(spec, u_old);
    sol.adjoints = solve_adjoints(spec, sol.trajectory, u_old);
    sol.objective = objective(spec, sol.trajectory, u_old);
    sol.control = std::move(u_old);
    return sol;
}

ControlSignal objective_gradient(const StrategySpec& spec, const ControlSignal& controls)
{
    const TimeGrid& grid = spec.grid;
    const Dynamics dyn = spec.dynamics();
    const std::size_t channels = spec.channels();
    const Trajectory traj = simulate(spec, controls);
    const double h = grid.dt();
    const std::size_t last = grid.steps();

    ControlSignal grad(grid, channels, 0.0);

    auto add_control = [&](std::size_t k, const std::array<double, 2>& g, double scale) {
        for (std::size_t c = 0; c < channels; ++c)
            grad.channel(c)[k] += scale * g[c];
    };
    // J^T v for the state Jacobian; Ju^T v for the control Jacobian.
    auto state_vjp = [&](const EpidemicState& y, const ControlValue& u, const Vec3& v) {
        const Jacobian3 jx = state_jacobian(dyn, y, spec.params, u);
        Vec3 out{};
        for (std::size_t c = 0; c < 3; ++c)
            out[c] = jx[0][c] * v[0] + jx[1][c] * v[1] + jx[2][c] * v[2];
        return out;
    };
    auto control_vjp = [&](const EpidemicState& y, const Vec3& v) {
        const ControlJacobian ju = control_jacobian(dyn, y, spec.params);
        std::array<double, 2> out{};
        for (std::size_t c = 0; c < 2; ++c)
            out[c] = ju[0][c] * v[0] + ju[1][c] * v[1] + ju[2][c] * v[2];
        return out;
    };

    auto add_running = [&](std::size_t k, Vec3& p) {
        const double weight = h * ((k == 0 || k == last) ? 0.5 : 1.0);
        const CostGradient g = running_cost_gradient(spec, traj[k], controls.at(k));
        p[0] += weight * g.d_state.s;
        p[1] += weight * g.d_state.i;
        p[2] += weight * g.d_state.r;
        add_control(k, g.d_control, weight);
    };

    Vec3 p{}; // dJ/dx_k, accumulated backwards
    add_running(last, p);
    for (std::size_t k = last; k-- > 0;) {
        const ControlValue ua = controls.at(k);
        const ControlValue um = controls.between(k, 0.5);
        const ControlValue ub = controls.at(k + 1);
        const EpidemicState& x = traj[k];
        const EpidemicState k1 = rhs(dyn, x, spec.params, ua);
        const EpidemicState y2 = x + (0.5 * h) * k1;
        const EpidemicState k2 = rhs(dyn, y2, spec.params, um);
        const EpidemicState y3 = x + (0.5 * h) * k2;
        const EpidemicState k3 = rhs(dyn, y3, spec.params, um);
        const EpidemicState y4 = x + h * k3;

        Vec3 gx = p;
        Vec3 gk1{}, gk2{}, gk3{}, gk4{};
        for (std::size_t c = 0; c < 3; ++c) {
            gk1[c] = h / 6.0 * p[c];
            gk2[c] = h / 3.0 * p[c];
            gk3[c] = h / 3.0 * p[c];
            gk4[c] = h / 6.0 * p[c];
        }
        std::array<double, 2> g_ua{}, g_um{}, g_ub{};

        const Vec3 gy4 = state_vjp(y4, ub, gk4);
        const auto gu4 = control_vjp(y4, gk4);
        for (std::size_t c = 0; c < 3; ++c) {
            gx[c] += gy4[c];
            gk3[c] += h * gy4[c];
        }
        const Vec3 gy3 = state_vjp(y3, um, gk3);
        const auto gu3 = control_vjp(y3, gk3);
        for (std::size_t c = 0; c < 3; ++c) {
            gx[c] += gy3[c];
            gk2[c] += 0.5 * h * gy3[c];
        }
        const Vec3 gy2 = state_vjp(y2, um, gk2);
        const auto gu2 = control_vjp(y2, gk2);
        for (std::size_t c = 0; c < 3; ++c) {
            gx[c] += gy2[c];
            gk1[c] += 0.5 * h * gy2[c];
        }
        const Vec3 gy1 = state_vjp(x, ua, gk1);
        const auto gu1 = control_vjp(x, gk1);
        for (std::size_t c = 0; c < 3; ++c)
            gx[c] += gy1[c];

        for (std::size_t c = 0; c < 2; ++c) {
            g_ua[c] = gu1[c];
            g_um[c] = gu2[c] + gu3[c];
            g_ub[c] = gu4[c];
        }
        add_control(k, g_ua, 1.0);
        add_control(k, g_um, 0.5);
        add_control(k + 1, g_um, 0.5);
        add_control(k + 1, g_ub, 1.0);

        p = gx;
        add_running(k, p);
    }
    return grad;
}

std::vector<double> finite_difference_gradient(const StrategySpec& spec, const ControlSignal& controls,
                                               std::size_t channel, const std::vector<std::size_t>& nodes,
                                               double step)
{
    std::vector<double> out;
    out.reserve(nodes.size());
    for (std::size_t k : nodes) {
        ControlSignal plus = controls;
        ControlSignal minus = controls;
        plus.channel(channel)[k] += step;
        minus.channel(channel)[k] -= step;
        const double jp = objective(spec, simulate(spec, plus), plus);
        const double jm = objective(spec, simulate(spec, minus), minus);
        out.push_back((jp - jm) / (2.0 * step));
    }
    return out;
}

namespace {

/// Control parameters on a (possibly coarser) grid, expanded to the
/// integration grid by linear interpolation.
class ControlParameterization {
public:
    ControlParameterization(const StrategySpec& spec, std::size_t control_steps)
        : spec_(spec), channels_(spec.channels()),
          coarse_(control_steps == 0 ? spec.grid.steps() : control_steps)
    {
        if (spec.grid.steps() % coarse_ != 0)
            throw ValidationError("control_steps must divide the integration grid steps");
        ratio_ = spec.grid.steps() / coarse_;
    }

    [[nodiscard]] std::size_t size() const { return channels_ * (coarse_ + 1); }
    [[nodiscard]] double spacing() const { return spec_.grid.dt() * static_cast<double>(ratio_); }

    [[nodiscard]] ControlSignal expand(const std::vector<double>& z) const
    {
        ControlSignal u(spec_.grid, channels_, 0.0);
        for (std::size_t c = 0; c < channels_; ++c) {
            const double* zc = z.data() + c * (coarse_ + 1);
            for (std::size_t k = 0; k < spec_.grid.nodes(); ++k) {
                const std::size_t m = std::min(k / ratio_, coarse_ - 1);
                const double frac = static_cast<double>(k - m * ratio_) / static_cast<double>(ratio_);
                u.channel(c)[k] = frac == 0.0 ? zc[m] : (1.0 - frac) * zc[m] + frac * zc[m + 1];
            }
        }
        return u;
    }

    /// Transpose of expand applied to a fine-grid gradient.
    [[nodiscard]] std::vector<double> pull_back(const ControlSignal& g) const
    {
        std::vector<double> out(size(), 0.0);
        for (std::size_t c = 0; c < channels_; ++c) {
            double* oc = out.data() + c * (coarse_ + 1);
            for (std::size_t k = 0; k < spec_.grid.nodes(); ++k) {
                const std::size_t m = std::min(k / ratio_, coarse_ - 1);
                const double frac = static_cast<double>(k - m * ratio_) / static_cast<double>(ratio_);
                oc[m] += (1.0 - frac) * g.channel(c)[k];
                if (frac != 0.0)
                    oc[m + 1] += frac * g.channel(c)[k];
            }
        }
        return out;
    }

private:
    const StrategySpec& spec_;
    std::size_t channels_;
    std::size_t coarse_;
    std::size_t ratio_ = 1;
};

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

} // namespace

OcpSolution solve_direct(const StrategySpec& spec, const DirectSettings& settings)
{
    spec.validate();
    const ControlParameterization param(spec, settings.control_steps);
    const double u_max = spec.u_max;
    const double scale = 1.0 / param.spacing();

    auto evaluate = [&](const std::vector<double>& z) {
        const ControlSignal u = param.expand(z);
        return objective(spec, simulate(spec, u), u);
    };
    auto gradient = [&](const std::vector<double>& z) {
        std::vector<double> g;
        if (settings.finite_difference_gradient) {
            g.resize(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) {
                std::vector<double> zp = z, zm = z;
                zp[i] += settings.fd_step;
                zm[i] -= settings.fd_step;
                g[i] = (evaluate(zp) - evaluate(zm)) / (2.0 * settings.fd_step);
            }
        } else {
            g = param.pull_back(objective_gradient(spec, param.expand(z)));
        }
        for (double& v : g)
            v *= scale;
        return g;
    };
    auto project = [&](std::vector<double> z) {
        for (double& v : z)
            v = std::clamp(v, 0.0, u_max);
        return z;
    };
    auto projected_gradient_norm = [&](const std::vector<double>& z, const std::vector<double>& g) {
        double worst = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i)
            worst = std::max(worst, std::abs(std::clamp(z[i] - g[i], 0.0, u_max) - z[i]));
        return worst;
    };

    OcpSolution sol;
    sol.solver = "direct";
    std::vector<double> z(param.size(), 0.0);
    double j = evaluate(z);
    std::vector<double> g = gradient(z);
    double step_length = 1.0;
    bool line_search_failed = false;

    for (std::size_t it = 0; it < settings.max_iterations; ++it) {
        sol.objective_history.push_back(j);
        const double pg = projected_gradient_norm(z, g);
        if (pg <= settings.gradient_tol) {
            sol.converged = true;
            break;
        }
        std::vector<double> trial(z.size());
        for (std::size_t i = 0; i < z.size(); ++i)
            trial[i] = z[i] - step_length * g[i];
        trial = project(std::move(trial));
        std::vector<double> d(z.size());
        for (std::size_t i = 0; i < z.size(); ++i)
            d[i] = trial[i] - z[i];
        const double slope = dot(g, d);

        double t = 1.0;
        std::vector<double> z_new(z.size());
        double j_new = j;
        bool accepted = false;
        while (t > 1e-12) {
            for (std::size_t i = 0; i < z.size(); ++i)
                z_new[i] = z[i] + t * d[i];
            j_new = evaluate(z_new);
            if (j_new <= j + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        sol.iterations = it + 1;
        if (!accepted) {
            // Near the optimum the Armijo decrease falls below rounding.
            if (pg <= 1e3 * settings.gradient_tol) {
                sol.converged = true;
            } else {
                line_search_failed = true;
            }
            break;
        }

        std::vector<double> g_new = gradient(z_new);
        double ss = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double s = z_new[i] - z[i];
            const double y = g_new[i] - g[i];
            ss += s * s;
            sy += s * y;
        }
        step_length = sy > 0.0 ? std::clamp(ss / sy, 1e-6, 1e6) : 1e3;
        z = std::move(z_new);
        g = std::move(g_new);
        j = j_new;
    }

    std::ostringstream msg;
    if (sol.converged)
        msg << "converged after " << sol.iterations << " iterations";
    else if (line_search_failed)
        msg << "line search failed at iteration " << sol.iterations;
    else
        msg << "no convergence after " << sol.iterations << " iterations";
    sol.message = msg.str();
    sol.control = param.expand(z);
    sol.trajectory = simulate(spec, sol.control);
    sol.adjoints = solve_adjoints(spec, sol.trajectory, sol.control);
    sol.objective = objective(spec, sol.trajectory, sol.control);
    return sol;
}

SolverAgreement compare_solutions(const OcpSolution& a, const OcpSolution& b, double u_max, double margin)
{
    if (a.control.channels() != b.control.channels() || !(a.control.grid() == b.control.grid()))
        throw ValidationError("solutions use different control layouts");
    SolverAgreement out;
    out.objective_a = a.objective;
    out.objective_b = b.objective;
    out.relative_objective_gap = std::abs(a.objective - b.objective) / std::abs(b.objective);
    auto interior = [&](double v) { return v >= margin && v <= u_max - margin; };
    for (std::size_t c = 0; c < a.control.channels(); ++c) {
        for (std::size_t k = 0; k < a.control.nodes(); ++k) {
            const double ua = a.control.channel(c)[k];
            const double ub = b.control.channel(c)[k];
            if (!interior(ua) || !interior(ub))
                continue;
            ++out.interior_nodes;
            out.interior_control_gap = std::max(out.interior_control_gap, std::abs(ua - ub));
        }
    }
    return out;
}

} // namespace ebocp
