#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stefan/forward.hpp"
#include "stefan/verify.hpp"

using namespace stefan;

namespace {

double run_case(const verify::ManufacturedCase& mc, int n_y, int n_t,
                TimeScheme scheme = TimeScheme::CrankNicolson) {
    const Grid grid(n_y, n_t, mc.data.T);
    const auto v = mc.control(grid, 2 * n_y);
    return mc.max_error(solve_forward(v, mc.data, grid, {scheme}), grid);
}

// Spatially constant u* = 1 + sin(2t): isolates the time discretisation.
verify::ManufacturedCase time_only_case() {
    verify::ManufacturedCase mc;
    mc.name = "time_only";
    mc.data.a = Field(1.0);
    mc.data.phi = Curve(1.0);
    mc.f = exprs::parse("-2*cos(2*t)");
    mc.g = exprs::parse("0");
    mc.s = exprs::parse("1");
    mc.exact_u = exprs::parse("1 + sin(2*t)");
    return mc;
}

ProblemData zero_flux_data(double c) {
    ProblemData d;
    d.a = Field::parse("1 + 0.5*x");
    d.b = Field(0.3);
    d.c = Field(c);
    d.phi = Curve::parse("cos(pi*x)", Curve::Var::X);
    return d;
}

}  // namespace

TEST_SUITE("forward") {

TEST_CASE("constant steady state is reproduced exactly") {
    CHECK(run_case(verify::builtin_case("constant"), 16, 16) <= 1e-13);
    CHECK(run_case(verify::builtin_case("constant"), 16, 16, TimeScheme::BackwardEuler) <= 1e-13);
}

TEST_CASE("fixed-domain manufactured solution converges at second order in space") {
    const auto& mc = verify::builtin_case("fixed_domain");
    const double e32 = run_case(mc, 32, 128);
    const double e64 = run_case(mc, 64, 256);
    MESSAGE("errors " << e32 << " " << e64 << " order " << std::log2(e32 / e64));
    CHECK(std::log2(e32 / e64) >= 1.9);
}

TEST_CASE("moving-boundary manufactured solution") {
    const double err = run_case(verify::builtin_case("moving_boundary"), 128, 256);
    MESSAGE("moving boundary error " << err);
    CHECK(err <= 1e-3);
}

TEST_CASE("observed time orders of both schemes") {
    const auto mc = time_only_case();
    const double be1 = run_case(mc, 8, 32, TimeScheme::BackwardEuler);
    const double be2 = run_case(mc, 8, 64, TimeScheme::BackwardEuler);
    const double cn1 = run_case(mc, 8, 32);
    const double cn2 = run_case(mc, 8, 64);
    MESSAGE("BE order " << std::log2(be1 / be2) << ", CN order " << std::log2(cn1 / cn2));
    CHECK(std::log2(be1 / be2) >= 0.9);
    CHECK(std::log2(cn1 / cn2) >= 1.9);
}

TEST_CASE("discrete maximum principle with zero flux and no source") {
    for (double c : {0.0, -0.5}) {
        const auto d = zero_flux_data(c);
        for (auto scheme : {TimeScheme::BackwardEuler, TimeScheme::CrankNicolson}) {
            const int n_t = scheme == TimeScheme::BackwardEuler ? 32 : 1024;
            const Grid grid(32, n_t, 1.0);
            const auto v = sample_control(d, 32, n_t, exprs::parse("0"), exprs::parse("0"),
                                          exprs::parse("1 + 0.2*t^2"));
            const auto st = solve_forward(v, d, grid, {scheme});
            const auto [lo, hi] = std::minmax_element(st.u_tilde.begin(), st.u_tilde.end());
            CHECK(*lo >= -1.0 - 1e-8);
            CHECK(*hi <= 1.0 + 1e-8);
        }
    }
}

TEST_CASE("solutions are affine in (f, g, chi)") {
    ProblemData d = zero_flux_data(-0.3);
    d.gamma = Field(0.5);
    const Grid grid(24, 48, 1.0);
    auto solve = [&](const char* f, const char* g, const char* chi) {
        ProblemData dd = d;
        dd.chi = Field::parse(chi);
        const auto v = sample_control(dd, 32, 48, exprs::parse(f), exprs::parse(g),
                                      exprs::parse("1 + 0.3*t^2"));
        return solve_forward(v, dd, grid).u_tilde;
    };
    const auto u0 = solve("0", "0", "0");
    const auto u1 = solve("sin(x)*t", "t", "0.5*t");
    const auto u2 = solve("x^2", "t^2", "x + t");
    const auto u12 = solve("sin(x)*t + x^2", "t + t^2", "0.5*t + x + t");
    double worst = 0.0;
    for (std::size_t k = 0; k < u0.size(); ++k)
        worst = std::max(worst, std::abs(u1[k] + u2[k] - u0[k] - u12[k]));
    CHECK(worst <= 1e-10);
}

TEST_CASE("trace extraction on exact fields") {
    const Grid grid(32, 8, 1.0);
    const auto& mc = verify::builtin_case("moving_boundary");
    const auto v = mc.control(grid, 16);

    StateField st;
    st.n_y = 32;
    st.n_t = 8;
    st.u_tilde.assign(33 * 9, 0.0);
    for (int n = 0; n <= 8; ++n)
        for (int j = 0; j <= 32; ++j) st.u(j, n) = std::pow(grid.y(j) * v.s()[n], 2);
    st = extract_traces(std::move(st), v, mc.data, grid);
    REQUIRE(st.traces_filled);
    const auto ux = free_boundary_ux(st, v);
    for (int n = 0; n <= 8; ++n) {
        CHECK(ux[n] == doctest::Approx(2.0 * v.s()[n]).epsilon(1e-10));
        CHECK(st.trace_aux_free[n] == doctest::Approx(2.0).epsilon(1e-8));
        CHECK(st.trace_free[n] == doctest::Approx(v.s()[n] * v.s()[n]));
        CHECK(st.trace_fixed[n] == 0.0);
    }

    std::fill(st.u_tilde.begin(), st.u_tilde.end(), 3.0);
    st = extract_traces(std::move(st), v, mc.data, grid);
    for (int n = 0; n <= 8; ++n) {
        CHECK(st.trace_uy_free[n] == 0.0);
        CHECK(st.trace_aux_free[n] == 0.0);
    }
}

TEST_CASE("trace extraction for exp(-t) cos(pi x)") {
    const Grid grid(256, 4, 1.0);
    const auto& mc = verify::builtin_case("fixed_domain");
    const auto v = mc.control(grid, 16);
    StateField st;
    st.n_y = 256;
    st.n_t = 4;
    st.u_tilde.assign(257 * 5, 0.0);
    for (int n = 0; n <= 4; ++n)
        for (int j = 0; j <= 256; ++j)
            st.u(j, n) = std::exp(-grid.t(n)) * std::cos(std::numbers::pi * grid.y(j));
    st = extract_traces(std::move(st), v, mc.data, grid);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    for (int n = 0; n <= 4; ++n) {
        CHECK(std::abs(st.trace_uy_free[n]) <= 1e-3);
        CHECK(st.trace_aux_free[n] == doctest::Approx(pi2 * std::exp(-grid.t(n))).epsilon(1e-3));
    }
}

TEST_CASE("per-node residual of the theta-scheme") {
    const auto c = verify::make_synthetic_case({.n_y = 32, .n_t = 64, .n_x = 32});
    for (auto scheme : {TimeScheme::CrankNicolson, TimeScheme::BackwardEuler}) {
        const SolverOptions opts{scheme};
        const auto st = solve_forward(c.truth, c.data, c.grid, opts);
        const double theta = opts.theta();
        const double dt = c.grid.dt();
        double worst = 0.0;
        for (int n = 0; n < c.grid.n_t(); ++n) {
            const auto cur = assemble_forward_level(c.truth, c.data, c.grid, n);
            const auto next = assemble_forward_level(c.truth, c.data, c.grid, n + 1);
            std::vector<double> un(33), un1(33);
            for (int j = 0; j <= 32; ++j) {
                un[j] = st.u(j, n);
                un1[j] = st.u(j, n + 1);
            }
            const auto Aun = cur.A.apply(un);
            const auto Aun1 = next.A.apply(un1);
            for (int j = 0; j <= 32; ++j) {
                const double r = (un1[j] - un[j]) / dt - theta * (Aun1[j] + next.rhs[j]) -
                                 (1.0 - theta) * (Aun[j] + cur.rhs[j]);
                worst = std::max(worst, std::abs(r) * dt);
            }
        }
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("initial profile is phi(y s0)") {
    const auto c = verify::make_synthetic_case({.n_y = 16, .n_t = 16, .n_x = 16});
    const auto st = solve_forward(c.truth, c.data, c.grid);
    for (int j = 0; j <= 16; ++j) CHECK(st.u(j, 0) == c.data.phi(c.grid.y(j) * c.data.s0));
}

TEST_CASE("degenerate or non-finite coefficients are reported") {
    ProblemData d;
    d.phi = Curve(1.0);
    const Grid grid(8, 8, 1.0);
    const auto v = sample_control(d, 8, 8, exprs::parse("0"), exprs::parse("0"), exprs::parse("1"));
    d.a = Field::parse("1 - x");
    CHECK_THROWS_AS(solve_forward(v, d, grid), SolverError);
    d.a = Field(1.0);
    d.chi = Field::parse("sqrt(-1 - t)");
    CHECK_THROWS_AS(solve_forward(v, d, grid), SolverError);
    CHECK_THROWS_AS(solve_forward(v, d, Grid(8, 16, 1.0)), InvalidInput);
}

}
