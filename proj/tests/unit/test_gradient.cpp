#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "stefan/gradient.hpp"

using namespace stefan;

namespace {

struct Solved {
    StateField state;
    AdjointField adj;
    GradientVector grad;
};

Solved solve_all(const ControlVector& v, const ProblemData& d, const Grid& grid) {
    Solved s{solve_forward(v, d, grid), {}, {}};
    s.adj = solve_adjoint(v, s.state, d, grid);
    s.grad = assemble_gradient(v, s.state, s.adj, d, grid);
    return s;
}

double relative_fd_error(const fixture::Mismatch& m, const ControlIncrement& dv) {
    const auto s = solve_all(m.v, m.sc.data, m.sc.grid);
    const double adj = directional_derivative(s.grad, dv, m.sc.grid);
    const double fd = verify::fd_directional_derivative(m.sc.data, m.sc.grid, m.v, dv, 1e-4);
    return std::abs(adj - fd) / std::max(std::abs(fd), 1e-300);
}

}  // namespace

TEST_SUITE("gradient") {

TEST_CASE("gradient vanishes at a perfect fit") {
    const auto sc = verify::make_synthetic_case({.n_y = 32, .n_t = 64, .n_x = 32});
    const auto s = solve_all(sc.truth, sc.data, sc.grid);
    CHECK(gradient_max_abs(s.grad) <= 1e-10);
}

TEST_CASE("g_sprime is -gamma psi at the free boundary") {
    const auto m = fixture::mismatch(16, 32, 16);
    ProblemData d = m.sc.data;
    d.gamma = Field(1.0);
    const auto st = solve_forward(m.v, d, m.sc.grid);
    AdjointField adj;
    adj.n_y = 16;
    adj.n_t = 32;
    adj.psi_tilde.assign(17 * 33, 2.0);
    adj.trace_fixed.assign(33, 2.0);
    adj.trace_free.assign(33, 2.0);
    const auto g = assemble_gradient(m.v, st, adj, d, m.sc.grid);
    for (double x : g.g_sprime) CHECK(x == -2.0);
    for (double x : g.g_g) CHECK(x == -2.0);
}

TEST_CASE("directional derivative examples") {
    const auto m = fixture::mismatch(16, 32, 16);
    auto grad = fixture::zero_gradient(m.v);
    grad.g_sT = 0.5;
    auto ds = fixture::increment(m.v, "0", "0", "0.1*t^2");
    CHECK(directional_derivative(grad, ds, m.sc.grid) == doctest::Approx(0.05).epsilon(1e-14));

    const auto full = solve_all(m.v, m.sc.data, m.sc.grid).grad;
    CHECK(directional_derivative(full, ControlIncrement::zero_like(m.v), m.sc.grid) == 0.0);

    auto gg = fixture::zero_gradient(m.v);
    gg.g_g.assign(gg.g_g.size(), -1.0);
    CHECK(directional_derivative(gg, fixture::increment(m.v, "0", "2", "0"), m.sc.grid) ==
          doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("f integral covers exactly [0, s(t)]") {
    const auto m = fixture::mismatch(16, 32, 16);
    auto grad = fixture::zero_gradient(m.v);
    for (int n = 0; n <= 32; ++n) {
        grad.g_f_edge[n] = 1.0;
        for (int i = 0; i <= grad.g_f.nx; ++i) grad.g_f.at(i, n) = grad.g_f.x(i) <= m.v.s()[n] ? 1.0 : 0.0;
    }
    // int_0^1 s(t) dt with s = 1 + 0.1 t^2
    const double expected = 1.0 + 0.1 / 3.0;
    const double got = directional_derivative(grad, fixture::increment(m.v, "1", "0", "0"), m.sc.grid);
    CHECK(got == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("optimality gap examples") {
    const auto m = fixture::mismatch(16, 32, 16);
    const auto full = solve_all(m.v, m.sc.data, m.sc.grid).grad;
    const auto gap = optimality_gap(full, m.v, {m.v}, m.sc.grid);
    REQUIRE(gap.size() == 1);
    CHECK(gap[0] == 0.0);

    verify::CandidateOptions copt;
    copt.count = 5;
    const auto cands = verify::random_feasible_candidates(m.v, m.sc.data, copt);
    for (double x : optimality_gap(fixture::zero_gradient(m.v), m.v, cands, m.sc.grid)) CHECK(x == 0.0);
}

TEST_CASE("directional derivative is linear in the increment") {
    oracle::Rng rng(23);
    const auto m = fixture::mismatch(16, 32, 16);
    const auto grad = solve_all(m.v, m.sc.data, m.sc.grid).grad;
    for (int trial = 0; trial < 20; ++trial) {
        auto d1 = ControlIncrement::zero_like(m.v), d2 = d1, sum = d1;
        const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
        for (std::size_t k = 0; k < d1.df.values.size(); ++k) {
            d1.df.values[k] = rng.uniform(-1, 1);
            d2.df.values[k] = rng.uniform(-1, 1);
            sum.df.values[k] = a * d1.df.values[k] + b * d2.df.values[k];
        }
        for (std::size_t n = 1; n < d1.dg.size(); ++n) {
            d1.dg[n] = rng.uniform(-1, 1);
            d2.dg[n] = rng.uniform(-1, 1);
            d1.ds[n] = rng.uniform(-1, 1);
            d2.ds[n] = rng.uniform(-1, 1);
            sum.dg[n] = a * d1.dg[n] + b * d2.dg[n];
            sum.ds[n] = a * d1.ds[n] + b * d2.ds[n];
        }
        const double lhs = directional_derivative(grad, sum, m.sc.grid);
        const double rhs = a * directional_derivative(grad, d1, m.sc.grid) +
                           b * directional_derivative(grad, d2, m.sc.grid);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("g_f is masked to x <= s(t)") {
    const auto m = fixture::mismatch(16, 32, 64);
    const auto grad = solve_all(m.v, m.sc.data, m.sc.grid).grad;
    int masked = 0;
    for (int n = 0; n <= 32; ++n)
        for (int i = 0; i <= grad.g_f.nx; ++i)
            if (grad.g_f.x(i) > m.v.s()[n]) {
                CHECK(grad.g_f.at(i, n) == 0.0);
                ++masked;
            }
    CHECK(masked > 0);
}

TEST_CASE("adjoint gradient agrees with finite differences and improves under refinement") {
    const std::string names[] = {"f", "g", "s"};
    const char* dirs[3][3] = {{"cos(x)*(1 + t)", "0", "0"}, {"0", "t", "0"}, {"0", "0", "t^2"}};
    for (int c = 0; c < 3; ++c) {
        const auto coarse = fixture::mismatch(32, 64, 32);
        const auto fine = fixture::mismatch(64, 128, 64);
        const double e1 = relative_fd_error(coarse, fixture::increment(coarse.v, dirs[c][0], dirs[c][1], dirs[c][2]));
        const double e2 = relative_fd_error(fine, fixture::increment(fine.v, dirs[c][0], dirs[c][1], dirs[c][2]));
        MESSAGE("component " << names[c] << ": " << e1 << " -> " << e2);
        CHECK(e2 <= 1e-2);
        CHECK(e2 < e1);
    }
}

TEST_CASE("missing traces are rejected") {
    const auto m = fixture::mismatch(16, 32, 16);
    auto st = solve_forward(m.v, m.sc.data, m.sc.grid);
    const auto adj = solve_adjoint(m.v, st, m.sc.data, m.sc.grid);
    st.traces_filled = false;
    CHECK_THROWS_AS(assemble_gradient(m.v, st, adj, m.sc.data, m.sc.grid), InvalidInput);
    CHECK_THROWS_AS(assemble_gradient(m.v, solve_forward(m.v, m.sc.data, m.sc.grid), AdjointField{},
                                      m.sc.data, m.sc.grid),
                    InvalidInput);
}

}
