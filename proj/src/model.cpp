#include "ebocp/model.hpp"

#include <cmath>
#include <sstream>

namespace ebocp {

namespace {

void require_positive(double v, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << name << " must be positive and finite (got " << v << ")";
        throw ValidationError(os.str());
    }
}

void require_arity(const ControlValue& u, std::size_t expected, const char* what)
{
    if (u.channels() != expected) {
        std::ostringstream os;
        os << what << " expects " << expected << " control channel(s), got " << u.channels();
        throw ArityError(os.str());
    }
}

} // namespace

void ModelParams::validate() const
{
    require_positive(beta, "beta");
    require_positive(mu, "mu");
    require_positive(n, "n");
}

void validate_state(const EpidemicState& x, const ModelParams& params, double tol)
{
    if (!std::isfinite(x.s) || !std::isfinite(x.i) || !std::isfinite(x.r))
        throw ValidationError("state has non-finite components");
    if (x.s < -tol || x.i < -tol || x.r < -tol)
        throw ValidationError("state components must be non-negative");
    if (std::abs(x.total() - params.n) > tol) {
        std::ostringstream os;
        os << "state must sum to n=" << params.n << " (got " << x.total() << ")";
        throw ValidationError(os.str());
    }
}

void ControlValue::validate(double u_max) const
{
    for (std::size_t c = 0; c < channels_; ++c) {
        if (!(values_[c] >= 0.0 && values_[c] <= u_max)) {
            std::ostringstream os;
            os << "control channel u" << (c + 1) << "=" << values_[c] << " outside [0, " << u_max << "]";
            throw ValidationError(os.str());
        }
    }
}

std::size_t control_arity(Dynamics d)
{
    switch (d) {
    case Dynamics::Uncontrolled: return 0;
    case Dynamics::Vaccination: return 1;
    case Dynamics::TreatmentEducation: return 2;
    }
    return 0;
}

EpidemicState rhs_uncontrolled(const EpidemicState& x, const ModelParams& p)
{
    const double infection = p.beta * x.s * x.i;
    const double recovery = p.mu * x.i;
    return {-infection, infection - recovery, recovery};
}

EpidemicState rhs_vaccination(const EpidemicState& x, const ModelParams& p, const ControlValue& u)
{
    require_arity(u, 1, "vaccination dynamics");
    const double infection = p.beta * x.s * x.i;
    const double recovery = p.mu * x.i;
    const double vaccinated = u.u1() * x.s;
    return {-infection - vaccinated, infection - recovery, recovery + vaccinated};
}

EpidemicState rhs_treatment_education(const EpidemicState& x, const ModelParams& p, const ControlValue& u)
{
    require_arity(u, 2, "treatment/education dynamics");
    const double infection = p.beta * x.s * x.i;
    const double recovery = p.mu * x.i;
    const double treated = u.u1() * x.i;
    const double educated = u.u2() * x.s;
    return {-infection - educated, infection - recovery - treated, recovery + treated + educated};
}

EpidemicState rhs(Dynamics d, const EpidemicState& x, const ModelParams& p, const ControlValue& u)
{
    switch (d) {
    case Dynamics::Uncontrolled: return rhs_uncontrolled(x, p);
    case Dynamics::Vaccination: return rhs_vaccination(x, p, u);
    case Dynamics::TreatmentEducation: return rhs_treatment_education(x, p, u);
    }
    return {};
}

Jacobian3 state_jacobian(Dynamics d, const EpidemicState& x, const ModelParams& p, const ControlValue& u)
{
    const double bi = p.beta * x.i;
    const double bs = p.beta * x.s;
    double s_out = 0.0; // extra S -> R rate
    double i_out = 0.0; // extra I -> R rate
    if (d == Dynamics::Vaccination) {
        require_arity(u, 1, "vaccination dynamics");
        s_out = u.u1();
    } else if (d == Dynamics::TreatmentEducation) {
        require_arity(u, 2, "treatment/education dynamics");
        i_out = u.u1();
        s_out = u.u2();
    }
    Jacobian3 j{};
    j[0] = {-bi - s_out, -bs, 0.0};
    j[1] = {bi, bs - p.mu - i_out, 0.0};
    j[2] = {s_out, p.mu + i_out, 0.0};
    return j;
}

ControlJacobian control_jacobian(Dynamics d, const EpidemicState& x, const ModelParams&)
{
    ControlJacobian j{};
    if (d == Dynamics::Vaccination) {
        j[0][0] = -x.s;
        j[2][0] = x.s;
    } else if (d == Dynamics::TreatmentEducation) {
        j[1][0] = -x.i;
        j[2][0] = x.i;
        j[0][1] = -x.s;
        j[2][1] = x.s;
    }
    return j;
}

std::string to_string(Dynamics d)
{
    switch (d) {
    case Dynamics::Uncontrolled: return "uncontrolled";
    case Dynamics::Vaccination: return "vaccination";
    case Dynamics::TreatmentEducation: return "treatment-education";
    }
    return "unknown";
}

} // namespace ebocp
