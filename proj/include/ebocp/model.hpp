#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace ebocp {

/// Raised when a control with the wrong number of channels reaches a
/// function that expects a specific strategy's arity.
class ArityError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a parameter or state violates its invariants.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Compartment fractions (S, I, R) at one instant. Also used as the value
/// type for time derivatives of the state.
struct EpidemicState {
    double s = 0.0;
    double i = 0.0;
    double r = 0.0;

    [[nodiscard]] double total() const { return s + i + r; }

    EpidemicState& operator+=(const EpidemicState& o)
    {
        s += o.s;
        i += o.i;
        r += o.r;
        return *this;
    }
    EpidemicState& operator*=(double k)
    {
        s *= k;
        i *= k;
        r *= k;
        return *this;
    }
    friend EpidemicState operator+(EpidemicState a, const EpidemicState& b) { return a += b; }
    friend EpidemicState operator-(EpidemicState a, const EpidemicState& b) { return a += (b * -1.0); }
    friend EpidemicState operator*(EpidemicState a, double k) { return a *= k; }
    friend EpidemicState operator*(double k, EpidemicState a) { return a *= k; }
    friend bool operator==(const EpidemicState&, const EpidemicState&) = default;
};

struct ModelParams {
    double beta = 0.2; // infection rate, 1/day
    double mu = 0.1;   // recovery rate, 1/day
    double n = 1.0;    // total population (normalized)

    /// Throws ValidationError naming the offending field.
    void validate() const;
};

/// Checks non-negativity and s+i+r == n, both up to `tol`.
void validate_state(const EpidemicState& x, const ModelParams& params, double tol = 1e-9);

/// A control value with one channel (vaccination) or two channels
/// (u1 treatment, u2 education). An uncontrolled evaluation uses zero channels.
class ControlValue {
public:
    ControlValue() = default;
    static ControlValue none() { return {}; }
    static ControlValue single(double u) { return ControlValue(1, u, 0.0); }
    static ControlValue pair(double u1, double u2) { return ControlValue(2, u1, u2); }

    [[nodiscard]] std::size_t channels() const { return channels_; }
    [[nodiscard]] double u1() const { return values_[0]; }
    [[nodiscard]] double u2() const { return values_[1]; }
    [[nodiscard]] double operator[](std::size_t c) const { return values_[c]; }

    /// Throws ValidationError when any channel leaves [0, u_max].
    void validate(double u_max) const;

private:
    ControlValue(std::size_t channels, double u1, double u2) : channels_(channels), values_{u1, u2} {}

    std::size_t channels_ = 0;
    std::array<double, 2> values_{0.0, 0.0};
};

/// Which right-hand side governs the state.
enum class Dynamics {
    Uncontrolled,       // plain SIR
    Vaccination,        // one channel, S -> R at rate u
    TreatmentEducation, // u1: I -> R, u2: S -> R
};

[[nodiscard]] std::size_t control_arity(Dynamics d);

EpidemicState rhs_uncontrolled(const EpidemicState& x, const ModelParams& p);

/// Throws ArityError unless `u` has exactly one channel.
EpidemicState rhs_vaccination(const EpidemicState& x, const ModelParams& p, const ControlValue& u);

/// Throws ArityError unless `u` has exactly two channels.
EpidemicState rhs_treatment_education(const EpidemicState& x, const ModelParams& p, const ControlValue& u);

/// Dispatches on `d`. Uncontrolled ignores `u`.
EpidemicState rhs(Dynamics d, const EpidemicState& x, const ModelParams& p, const ControlValue& u);

/// d(rhs)/d(state), row-major: jac[row][col] = d f_row / d x_col.
using Jacobian3 = std::array<std::array<double, 3>, 3>;
/// d(rhs)/d(control): jac[row][channel].
using ControlJacobian = std::array<std::array<double, 2>, 3>;

Jacobian3 state_jacobian(Dynamics d, const EpidemicState& x, const ModelParams& p, const ControlValue& u);
ControlJacobian control_jacobian(Dynamics d, const EpidemicState& x, const ModelParams& p);

std::string to_string(Dynamics d);

} // namespace ebocp
