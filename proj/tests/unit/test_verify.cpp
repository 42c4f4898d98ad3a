#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "stefan/series.hpp"
#include "stefan/verify.hpp"

using namespace stefan;

TEST_SUITE("verify") {

TEST_CASE("finite differences of a zero increment vanish") {
    const auto m = fixture::mismatch(16, 32, 16);
    CHECK(verify::fd_directional_derivative(m.sc.data, m.sc.grid, m.v, ControlIncrement::zero_like(m.v), 1e-4) == 0.0);
}

TEST_CASE("central differences are exact for the quadratic position term") {
    ProblemData d;
    d.phi = Curve(1.0);
    d.beta0 = 0.0;
    d.beta1 = 0.0;
    d.beta2 = 1.7;
    d.s_star = 1.05;
    const Grid grid(16, 32, 1.0);
    const auto v = sample_control(d, 16, 32, exprs::parse("0"), exprs::parse("0"), exprs::parse("1 + 0.3*t^2"));
    const auto ds = fixture::increment(v, "0", "0", "t^2");
    const double fd = verify::fd_directional_derivative(d, grid, v, ds, 1e-3);
    CHECK(std::abs(fd - 2.0 * 1.7 * (1.3 - 1.05)) <= 1e-12);
}

TEST_CASE("finite-difference oracle converges until the noise floor") {
    const auto m = fixture::mismatch(32, 64, 32);
    const auto ds = fixture::increment(m.v, "0", "0", "t^2");
    double prev_gap = INFINITY;
    double prev = verify::fd_directional_derivative(m.sc.data, m.sc.grid, m.v, ds, 1e-2);
    for (double h : {5e-3, 2.5e-3, 1.25e-3}) {
        const double cur = verify::fd_directional_derivative(m.sc.data, m.sc.grid, m.v, ds, h);
        const double gap = std::abs(cur - prev);
        if (gap > 1e-9 * std::abs(cur)) CHECK(gap < prev_gap);
        prev_gap = gap;
        prev = cur;
    }
}

TEST_CASE("infeasible perturbations name the constraint") {
    ProblemData d;
    d.phi = Curve(1.0);
    const Grid grid(16, 32, 1.0);
    const auto v = sample_control(d, 16, 32, exprs::parse("0"), exprs::parse("0"), exprs::parse("1 - 0.5*t^2"));
    const auto ds = fixture::increment(v, "0", "0", "t^2");
    try {
        verify::fd_directional_derivative(d, grid, v, ds, 1e-3);
        FAIL("expected InvalidInput");
    } catch (const InvalidInput& e) {
        CHECK(std::string(e.what()).find("box_lower") != std::string::npos);
    }
    const auto dg = fixture::increment(v, "0", "1", "0");
    CHECK_THROWS_WITH_AS(verify::fd_directional_derivative(d, grid, v, dg, 1e-3),
                         doctest::Contains("anchor_g0"), InvalidInput);
}

TEST_CASE("built-in manufactured cases are compatible and admissible") {
    const auto cases = verify::builtin_cases();
    CHECK(cases.size() >= 3);
    for (const auto& c : cases) {
        CHECK(compatibility_residual(c.data) <= 1e-10);
        CHECK(validate_control(c.control(Grid(16, 16, c.data.T), 16), c.data).is_member());
    }
    CHECK_THROWS_AS(verify::builtin_case("nope"), InvalidInput);
}

TEST_CASE("noiseless synthetic data fits the truth") {
    const auto sc = verify::make_synthetic_case({.n_y = 32, .n_t = 64, .n_x = 32});
    CHECK(cost_of_control(sc.truth, sc.data, sc.grid).total <= 1e-10);
    const auto st = solve_forward(sc.truth, sc.data, sc.grid);
    CHECK(max_abs(solve_adjoint(sc.truth, st, sc.data, sc.grid).psi_tilde) <= 1e-8);
    CHECK(validate_control(sc.truth, sc.data).is_member());
    CHECK(compatibility_residual(sc.data) <= 1e-10);
}

TEST_CASE("measurements from a refined grid expose a small discretisation bias") {
    const auto sc = verify::make_synthetic_case({.n_y = 32, .n_t = 64, .n_x = 32, .generation_refinement = 2});
    const double j = cost_of_control(sc.truth, sc.data, sc.grid).total;
    CHECK(j > 0.0);
    CHECK(j < 1e-6);
}

TEST_CASE("noisy measurements are seeded deterministically") {
    verify::SyntheticOptions o{.n_y = 16, .n_t = 32, .n_x = 16, .noise_level = 0.01, .seed = 9};
    const auto a = verify::make_synthetic_case(o);
    const auto b = verify::make_synthetic_case(o);
    CHECK(a.data.w.samples() == b.data.w.samples());
    CHECK(a.data.mu.samples() == b.data.mu.samples());
    o.seed = 10;
    const auto c = verify::make_synthetic_case(o);
    CHECK(a.data.mu.samples() != c.data.mu.samples());
    const auto clean = verify::make_synthetic_case({.n_y = 16, .n_t = 32, .n_x = 16});
    const double amp = 0.01 * max_abs(clean.data.mu.samples());
    for (std::size_t n = 0; n < clean.data.mu.samples().size(); ++n)
        CHECK(std::abs(a.data.mu.samples()[n] - clean.data.mu.samples()[n]) <= amp);
    CHECK(a.data.s_star == clean.data.s_star);
}

TEST_CASE("random candidates lie in the control set and are reproducible") {
    const auto m = fixture::mismatch(16, 32, 16);
    verify::CandidateOptions o;
    o.seed = 4;
    const auto a = verify::random_feasible_candidates(m.v, m.sc.data, o);
    const auto b = verify::random_feasible_candidates(m.v, m.sc.data, o);
    REQUIRE(a.size() == 10);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(validate_control(a[i], m.sc.data).is_member());
        CHECK(a[i].s() == b[i].s());
    }
    o.vary_f = o.vary_s = false;
    for (const auto& c : verify::random_feasible_candidates(m.v, m.sc.data, o)) {
        CHECK(c.s() == m.v.s());
        CHECK(c.f().values == m.v.f().values);
    }
}

}
