#include "stefan/adjoint.hpp"

#include <cmath>
#include <string>

namespace stefan {

LevelOperator assemble_adjoint_level(const ControlVector& v, const StateField& state,
                                     const ProblemData& data, const Grid& grid, int n) {
    const int N = grid.n_y();
    const double h = grid.dy();
    const double t = grid.t(n);
    const double s = v.s()[n];
    const double sp = v.s_prime()[n];
    const double K = 1.0 / (s * s * h * h);

    std::vector<double> a(N + 1), B(N + 1), c(N + 1);
    for (int j = 0; j <= N; ++j) {
        const double y = grid.y(j);
        const double x = y * s;
        a[j] = data.a(x, t);
        const double b = data.b(x, t);
        c[j] = data.c(x, t) + sp / s;
        if (!std::isfinite(a[j]) || !std::isfinite(b) || !std::isfinite(c[j]))
            throw SolverError("non-finite adjoint coefficient at time level " + std::to_string(n));
        if (!(a[j] > 0.0))
            throw SolverError("coefficient a is not positive at time level " + std::to_string(n));
        B[j] = (b + y * sp) / s;
    }

    LevelOperator op{Tridiagonal(static_cast<std::size_t>(N) + 1),
                     std::vector<double>(static_cast<std::size_t>(N) + 1, 0.0)};
    auto& A = op.A;
    for (int j = 1; j < N; ++j) {
        const double am = 0.5 * (a[j - 1] + a[j]);
        const double ap = 0.5 * (a[j] + a[j + 1]);
        A.lower[j] = K * am + B[j - 1] / (2.0 * h);
        A.upper[j] = K * ap - B[j + 1] / (2.0 * h);
        A.diag[j] = -K * (am + ap) + c[j];
    }
    const double a0 = 0.5 * (a[0] + a[1]);
    A.upper[0] = 2.0 * K * a0 - B[1] / h;
    A.diag[0] = -2.0 * K * a0 - B[0] / h + c[0];
    const double aN = 0.5 * (a[N - 1] + a[N]);
    A.lower[N] = 2.0 * K * aN + B[N - 1] / h;
    A.diag[N] = -2.0 * K * aN + B[N] / h + c[N];

    const double flux = 2.0 * data.beta1 * (state.u(N, n) - data.mu(t)) / s;
    if (!std::isfinite(flux)) throw SolverError("non-finite adjoint boundary data at time level " +
                                                std::to_string(n));
    op.rhs[N] = 2.0 * flux / h;
    return op;
}

AdjointField solve_adjoint(const ControlVector& v, const StateField& state,
                           const ProblemData& data, const Grid& grid, SolverOptions opts) {
    v.check_compatible(grid, data);
    if (state.n_y != grid.n_y() || state.n_t != grid.n_t())
        throw InvalidInput("solve_adjoint: state was solved on a different grid");
    const int N = grid.n_y();
    const int M = grid.n_t();
    const double dt = grid.dt();
    const double theta = opts.theta();

    AdjointField adj;
    adj.n_y = N;
    adj.n_t = M;
    adj.psi_tilde.assign(static_cast<std::size_t>(N + 1) * (M + 1), 0.0);
    const double sT = v.s()[M];
    for (int j = 0; j <= N; ++j) {
        adj.psi(j, M) = 2.0 * data.beta0 * (state.u(j, M) - data.w(grid.y(j) * sT));
        if (!std::isfinite(adj.psi(j, M))) throw SolverError("non-finite adjoint terminal data");
    }

    // In tau = T - t: psi_tau = A psi + rhs.
    LevelOperator cur = assemble_adjoint_level(v, state, data, grid, M);
    std::vector<double> pn(static_cast<std::size_t>(N) + 1), rhs(pn.size());
    for (int n = M; n > 0; --n) {
        LevelOperator next = assemble_adjoint_level(v, state, data, grid, n - 1);
        for (int j = 0; j <= N; ++j) pn[j] = adj.psi(j, n);
        const auto Ap = cur.A.apply(pn);
        for (int j = 0; j <= N; ++j)
            rhs[j] = pn[j] + (1.0 - theta) * dt * (Ap[j] + cur.rhs[j]) + theta * dt * next.rhs[j];
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
            throw SolverError(std::string(e.what()) + " (adjoint, time level " +
                              std::to_string(n - 1) + ")");
        }
        for (int j = 0; j <= N; ++j) {
            if (!std::isfinite(sol[j]))
                throw SolverError("non-finite adjoint at time level " + std::to_string(n - 1));
            adj.psi(j, n - 1) = sol[j];
        }
        cur = std::move(next);
    }

    adj.trace_fixed.resize(static_cast<std::size_t>(M) + 1);
    adj.trace_free.resize(adj.trace_fixed.size());
    for (int n = 0; n <= M; ++n) {
        adj.trace_fixed[n] = adj.psi(0, n);
        adj.trace_free[n] = adj.psi(N, n);
    }
    return adj;
}

}  // namespace stefan
