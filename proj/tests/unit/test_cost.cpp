#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "stefan/cost.hpp"

using namespace stefan;

TEST_SUITE("cost") {

TEST_CASE("perfect fit costs nothing") {
    const auto sc = verify::make_synthetic_case({.n_y = 32, .n_t = 64, .n_x = 32});
    const auto c = cost_of_control(sc.truth, sc.data, sc.grid);
    CHECK(c.total <= 1e-20);
}

TEST_CASE("boundary position term alone") {
    ProblemData d;
    d.phi = Curve(1.0);
    d.beta0 = 0.0;
    d.beta1 = 0.0;
    d.beta2 = 1.0;
    d.s_star = 1.0;
    const Grid grid(16, 16, 1.0);
    const auto v = sample_control(d, 16, 16, exprs::parse("0"), exprs::parse("0"), exprs::parse("1 + 0.2*t^2"));
    const auto c = cost_of_control(v, d, grid);
    CHECK(c.j1 == 0.0);
    CHECK(c.j2 == 0.0);
    CHECK(c.total == doctest::Approx(0.04).epsilon(1e-12));
}

TEST_CASE("final-moment term integrates over [0, s(T)]") {
    ProblemData d;
    d.phi = Curve(0.0);
    d.w = Curve(-1.0);
    d.beta1 = 0.0;
    d.beta2 = 0.0;
    const Grid grid(16, 16, 1.0);
    const auto v = sample_control(d, 16, 16, exprs::parse("0"), exprs::parse("0"), exprs::parse("1 + t^2"));
    const auto c = cost_of_control(v, d, grid);
    CHECK(c.j1 == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(c.total == c.j1);
}

TEST_CASE("total is the exact sum of nonnegative parts") {
    oracle::Rng rng(5);
    auto m = fixture::mismatch(16, 32, 16);
    for (int trial = 0; trial < 20; ++trial) {
        m.sc.data.beta0 = rng.uniform(0, 3);
        m.sc.data.beta1 = rng.uniform(0, 3);
        m.sc.data.beta2 = rng.uniform(0, 3);
        m.sc.data.s_star = rng.uniform(0.5, 2);
        const auto c = cost_of_control(m.v, m.sc.data, m.sc.grid);
        CHECK(c.j1 >= 0.0);
        CHECK(c.j2 >= 0.0);
        CHECK(c.j3 >= 0.0);
        CHECK(c.total == c.j1 + c.j2 + c.j3);
    }
}

TEST_CASE("quadrature refinement changes the total by less than 0.5%") {
    auto mc = verify::builtin_case("moving_boundary");
    mc.data.w = Curve::parse("x", Curve::Var::X);
    mc.data.mu = Curve::parse("1 + t", Curve::Var::T);
    mc.data.s_star = 1.4;
    auto total = [&](int n_y, int n_t) {
        const Grid grid(n_y, n_t, 1.0);
        return cost_of_control(mc.control(grid, n_y), mc.data, grid).total;
    };
    const double c1 = total(32, 64);
    const double c2 = total(64, 128);
    CHECK(std::abs(c1 - c2) < 0.005 * std::abs(c2));
}

TEST_CASE("evaluate_cost needs a state with traces on the same grid") {
    const auto m = fixture::mismatch(16, 32, 16);
    auto st = solve_forward(m.v, m.sc.data, m.sc.grid);
    st.traces_filled = false;
    CHECK_THROWS_AS(evaluate_cost(m.v, st, m.sc.data, m.sc.grid), InvalidInput);
}

}
