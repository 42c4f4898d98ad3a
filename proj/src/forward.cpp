#include "stefan/forward.hpp"

#include <cmath>
#include <string>

namespace stefan {

namespace {

void check_coefficient(double v, const char* name, int n) {
    if (!std::isfinite(v))
        throw SolverError(std::string("non-finite coefficient ") + name + " at time level " +
                          std::to_string(n));
}

}  // namespace

LevelOperator assemble_forward_level(const ControlVector& v, const ProblemData& data,
                                     const Grid& grid, int n) {
    const int N = grid.n_y();
    const double h = grid.dy();
    const double t = grid.t(n);
    const double s = v.s()[n];
    const double sp = v.s_prime()[n];
    const double K = 1.0 / (s * s * h * h);

    std::vector<double> a(N + 1), B(N + 1), c(N + 1);
    LevelOperator op{Tridiagonal(static_cast<std::size_t>(N) + 1),
                     std::vector<double>(static_cast<std::size_t>(N) + 1, 0.0)};
    for (int j = 0; j <= N; ++j) {
        const double y = grid.y(j);
        const double x = y * s;
        a[j] = data.a(x, t);
        const double b = data.b(x, t);
        c[j] = data.c(x, t);
        const double f = v.f().interpolate(x, t);
        check_coefficient(a[j], "a", n);
        check_coefficient(b, "b", n);
        check_coefficient(c[j], "c", n);
        check_coefficient(f, "f", n);
        if (!(a[j] > 0.0))
            throw SolverError("coefficient a is not positive at time level " + std::to_string(n));
        B[j] = (b + y * sp) / s;
        op.rhs[j] = -f;
    }

    auto& A = op.A;
    for (int j = 1; j < N; ++j) {
        const double am = 0.5 * (a[j - 1] + a[j]);
        const double ap = 0.5 * (a[j] + a[j + 1]);
        A.lower[j] = K * am - B[j] / (2.0 * h);
        A.upper[j] = K * ap + B[j] / (2.0 * h);
        A.diag[j] = -K * (am + ap) + c[j];
    }
    const double a0 = 0.5 * (a[0] + a[1]);
    A.upper[0] = 2.0 * K * a0 + B[0] / h;
    A.diag[0] = -2.0 * K * a0 - B[0] / h + c[0];
    const double aN = 0.5 * (a[N - 1] + a[N]);
    A.lower[N] = 2.0 * K * aN - B[N] / h;
    A.diag[N] = -2.0 * K * aN + B[N] / h + c[N];

    // Boundary fluxes (1/s^2) a~ u~_y: g/s at y=0 and (chi~ - gamma~ s')/s at y=1.
    const double g = v.g()[n];
    const double chi = data.chi(s, t);
    const double gam = data.gamma(s, t);
    check_coefficient(chi, "chi", n);
    check_coefficient(gam, "gamma", n);
    op.rhs[0] += -2.0 * (g / s) / h;
    op.rhs[N] += 2.0 * ((chi - gam * sp) / s) / h;
    return op;
}

StateField solve_forward(const ControlVector& v, const ProblemData& data, const Grid& grid,
                         SolverOptions opts) {
    v.check_compatible(grid, data);
    const int N = grid.n_y();
    const int M = grid.n_t();
    const double dt = grid.dt();
    const double theta = opts.theta();

    StateField st;
    st.n_y = N;
    st.n_t = M;
    st.u_tilde.assign(static_cast<std::size_t>(N + 1) * (M + 1), 0.0);
    for (int j = 0; j <= N; ++j) {
        st.u(j, 0) = data.phi(grid.y(j) * data.s0);
        if (!std::isfinite(st.u(j, 0))) throw SolverError("non-finite initial temperature");
    }

    LevelOperator cur = assemble_forward_level(v, data, grid, 0);
    std::vector<double> un(static_cast<std::size_t>(N) + 1), rhs(un.size());
    for (int n = 0; n < M; ++n) {
        LevelOperator next = assemble_forward_level(v, data, grid, n + 1);
        for (int j = 0; j <= N; ++j) un[j] = st.u(j, n);
        const auto Au = cur.A.apply(un);
        for (int j = 0; j <= N; ++j)
            rhs[j] = un[j] + (1.0 - theta) * dt * (Au[j] + cur.rhs[j]) + theta * dt * next.rhs[j];
        Tridiagonal lhs(static_cast<std::size_t>(N) + 1);
        for (int j = 0; j <= N; ++j) {
            lhs.lower[j] = -theta * dt * next.A.lower[j];
            lhs.diag[j] = 1.0 - theta * dt * next.A.diag[j];
            lhs.upper[j] = -theta * dt * next.A.upper[j];
        }
        std::vector<double> sol;
        try {
            sol = solve_tridiagonal(lhs, rhs);
        } catch (const SolverError& e) {
            throw SolverError(std::string(e.what()) + " (forward, time level " +
                              std::to_string(n + 1) + ")");
        }
        for (int j = 0; j <= N; ++j) {
            if (!std::isfinite(sol[j]))
                throw SolverError("non-finite state at time level " + std::to_string(n + 1));
            st.u(j, n + 1) = sol[j];
        }
        cur = std::move(next);
    }
    return extract_traces(std::move(st), v, data, grid);
}

StateField extract_traces(StateField st, const ControlVector& v, const ProblemData& data,
                          const Grid& grid) {
    const int N = st.n_y;
    const int M = st.n_t;
    const double h = grid.dy();
    const auto sz = static_cast<std::size_t>(M) + 1;
    st.trace_free.assign(sz, 0.0);
    st.trace_fixed.assign(sz, 0.0);
    st.trace_uy_free.assign(sz, 0.0);
    st.trace_aux_free.assign(sz, 0.0);
    st.final_profile.assign(static_cast<std::size_t>(N) + 1, 0.0);
    for (int j = 0; j <= N; ++j) st.final_profile[j] = st.u(j, M);

    for (int n = 0; n <= M; ++n) {
        const double s = v.s()[n];
        const double t = grid.t(n);
        st.trace_free[n] = st.u(N, n);
        st.trace_fixed[n] = st.u(0, n);
        const double uyN = (3.0 * st.u(N, n) - 4.0 * st.u(N - 1, n) + st.u(N - 2, n)) / (2.0 * h);
        const double uyN1 = (st.u(N, n) - st.u(N - 2, n)) / (2.0 * h);
        const double uyN2 = (st.u(N - 1, n) - st.u(N - 3, n)) / (2.0 * h);
        const double FN = data.a(s, t) * uyN;
        const double FN1 = data.a(grid.y(N - 1) * s, t) * uyN1;
        const double FN2 = data.a(grid.y(N - 2) * s, t) * uyN2;
        st.trace_uy_free[n] = uyN;
        st.trace_aux_free[n] = (3.0 * FN - 4.0 * FN1 + FN2) / (2.0 * h) / (s * s);
    }
    st.traces_filled = true;
    return st;
}

std::vector<double> free_boundary_ux(const StateField& state, const ControlVector& v) {
    std::vector<double> ux(state.trace_uy_free.size());
    for (std::size_t n = 0; n < ux.size(); ++n) ux[n] = state.trace_uy_free[n] / v.s()[n];
    return ux;
}

}  // namespace stefan
