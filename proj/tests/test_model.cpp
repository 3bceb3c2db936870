#include "ebocp/model.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace ebocp;

namespace {

const ModelParams kParams{0.2, 0.1, 1.0};

void check_close(const EpidemicState& a, const EpidemicState& b, double tol = 1e-15)
{
    CHECK(a.s == doctest::Approx(b.s).epsilon(tol));
    CHECK(a.i == doctest::Approx(b.i).epsilon(tol));
    CHECK(a.r == doctest::Approx(b.r).epsilon(tol));
}

} // namespace

TEST_CASE("uncontrolled right-hand side")
{
    const EpidemicState d = rhs_uncontrolled({0.95, 0.05, 0.0}, kParams);
    CHECK(d.s == doctest::Approx(-0.0095));
    CHECK(d.i == doctest::Approx(0.0045));
    CHECK(d.r == doctest::Approx(0.005));

    CHECK(rhs_uncontrolled({1.0, 0.0, 0.0}, kParams) == EpidemicState{-0.0, 0.0, 0.0});

    const EpidemicState no_transmission = rhs_uncontrolled({0.5, 0.5, 0.0}, {0.0, 0.1, 1.0});
    CHECK(no_transmission.s == 0.0);
    CHECK(no_transmission.i == doctest::Approx(-0.05));
    CHECK(no_transmission.r == doctest::Approx(0.05));
}

TEST_CASE("vaccination right-hand side")
{
    const EpidemicState x{0.95, 0.05, 0.0};
    check_close(rhs_vaccination(x, kParams, ControlValue::single(0.0)), rhs_uncontrolled(x, kParams));

    const EpidemicState d = rhs_vaccination(x, kParams, ControlValue::single(0.9));
    CHECK(d.s == doctest::Approx(-0.8645));
    CHECK(d.i == doctest::Approx(0.0045));
    CHECK(d.r == doctest::Approx(0.86));

    const EpidemicState no_s = rhs_vaccination({0.0, 0.4, 0.6}, kParams, ControlValue::single(0.7));
    check_close(no_s, rhs_uncontrolled({0.0, 0.4, 0.6}, kParams));

    CHECK_THROWS_AS(rhs_vaccination(x, kParams, ControlValue::pair(0.1, 0.2)), ArityError);
    CHECK_THROWS_AS(rhs_vaccination(x, kParams, ControlValue::none()), ArityError);
}

TEST_CASE("treatment and education right-hand side")
{
    const EpidemicState x{0.95, 0.05, 0.0};
    check_close(rhs_treatment_education(x, kParams, ControlValue::pair(0.0, 0.0)), rhs_uncontrolled(x, kParams));

    const EpidemicState d = rhs_treatment_education(x, kParams, ControlValue::pair(0.9, 0.0));
    CHECK(d.s == doctest::Approx(-0.0095));
    CHECK(d.i == doctest::Approx(-0.0405));
    CHECK(d.r == doctest::Approx(0.05));

    const EpidemicState no_i = rhs_treatment_education({0.7, 0.0, 0.3}, kParams, ControlValue::pair(0.5, 0.4));
    CHECK(no_i.s == doctest::Approx(-0.28));
    CHECK(no_i.i == 0.0);
    CHECK(no_i.r == doctest::Approx(0.28));

    CHECK_THROWS_AS(rhs_treatment_education(x, kParams, ControlValue::single(0.1)), ArityError);
}

TEST_CASE("right-hand sides conserve population and never drain R")
{
    oracle::StateGenerator gen(7);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto p = gen.state();
        const EpidemicState x{p.s, p.i, p.r};
        const ModelParams params{gen.uniform(0.01, 2.0), gen.uniform(0.01, 1.0), 1.0};
        const double u1 = gen.uniform(0.0, 0.9);
        const double u2 = gen.uniform(0.0, 0.9);

        const EpidemicState d0 = rhs_uncontrolled(x, params);
        const EpidemicState d1 = rhs_vaccination(x, params, ControlValue::single(u1));
        const EpidemicState d3 = rhs_treatment_education(x, params, ControlValue::pair(u1, u2));
        for (const EpidemicState& d : {d0, d1, d3}) {
            CHECK(std::abs(d.s + d.i + d.r) <= 1e-15);
            CHECK(d.r >= 0.0);
        }
        CHECK(rhs_vaccination(x, params, ControlValue::single(0.0)) == d0);
        CHECK(rhs_treatment_education(x, params, ControlValue::pair(0.0, 0.0)) == d0);
    }
}

TEST_CASE("jacobians match central differences")
{
    oracle::StateGenerator gen(11);
    const double h = 1e-6;
    for (Dynamics d : {Dynamics::Uncontrolled, Dynamics::Vaccination, Dynamics::TreatmentEducation}) {
        for (int trial = 0; trial < 50; ++trial) {
            const auto p = gen.state();
            const EpidemicState x{p.s, p.i, p.r};
            const double u1 = gen.uniform(0.0, 0.9), u2 = gen.uniform(0.0, 0.9);
            const ControlValue u = d == Dynamics::Uncontrolled ? ControlValue::none()
                                   : d == Dynamics::Vaccination ? ControlValue::single(u1)
                                                                : ControlValue::pair(u1, u2);
            const Jacobian3 jx = state_jacobian(d, x, kParams, u);
            for (int col = 0; col < 3; ++col) {
                EpidemicState xp = x, xm = x;
                double* cp = col == 0 ? &xp.s : col == 1 ? &xp.i : &xp.r;
                double* cm = col == 0 ? &xm.s : col == 1 ? &xm.i : &xm.r;
                *cp += h;
                *cm -= h;
                const EpidemicState fd = (rhs(d, xp, kParams, u) - rhs(d, xm, kParams, u)) * (0.5 / h);
                CHECK(jx[0][col] == doctest::Approx(fd.s).epsilon(1e-6));
                CHECK(jx[1][col] == doctest::Approx(fd.i).epsilon(1e-6));
                CHECK(jx[2][col] == doctest::Approx(fd.r).epsilon(1e-6));
            }
            const ControlJacobian ju = control_jacobian(d, x, kParams);
            for (std::size_t c = 0; c < control_arity(d); ++c) {
                const ControlValue up = c == 0 ? (d == Dynamics::Vaccination ? ControlValue::single(u1 + h)
                                                                             : ControlValue::pair(u1 + h, u2))
                                               : ControlValue::pair(u1, u2 + h);
                const ControlValue um = c == 0 ? (d == Dynamics::Vaccination ? ControlValue::single(u1 - h)
                                                                             : ControlValue::pair(u1 - h, u2))
                                               : ControlValue::pair(u1, u2 - h);
                const EpidemicState fd = (rhs(d, x, kParams, up) - rhs(d, x, kParams, um)) * (0.5 / h);
                CHECK(ju[0][c] == doctest::Approx(fd.s).epsilon(1e-6));
                CHECK(ju[1][c] == doctest::Approx(fd.i).epsilon(1e-6));
                CHECK(ju[2][c] == doctest::Approx(fd.r).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("parameter and state validation")
{
    CHECK_NOTHROW(kParams.validate());
    CHECK_THROWS_WITH_AS(ModelParams({-1.0, 0.1, 1.0}).validate(), doctest::Contains("beta"), ValidationError);
    CHECK_THROWS_WITH_AS(ModelParams({0.2, 0.0, 1.0}).validate(), doctest::Contains("mu"), ValidationError);
    CHECK_THROWS_AS(validate_state({0.5, 0.6, 0.0}, kParams), ValidationError);
    CHECK_THROWS_AS(validate_state({-0.1, 0.6, 0.5}, kParams), ValidationError);
    CHECK_NOTHROW(validate_state({0.95, 0.05, 0.0}, kParams));
    CHECK_THROWS_AS(ControlValue::single(1.0).validate(0.9), ValidationError);
    CHECK_THROWS_AS(ControlValue::pair(0.1, -0.1).validate(0.9), ValidationError);
    CHECK_NOTHROW(ControlValue::pair(0.0, 0.9).validate(0.9));
}
