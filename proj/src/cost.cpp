#include "stefan/cost.hpp"

#include <vector>

#include "stefan/series.hpp"

namespace stefan {

CostBreakdown evaluate_cost(const ControlVector& v, const StateField& state,
                            const ProblemData& data, const Grid& grid) {
    if (!state.traces_filled || state.n_y != grid.n_y() || state.n_t != grid.n_t())
        throw InvalidInput("evaluate_cost: state does not belong to this grid");
    const int N = grid.n_y();
    const int M = grid.n_t();
    const double sT = v.s()[M];

    std::vector<double> r(static_cast<std::size_t>(N) + 1);
    for (int j = 0; j <= N; ++j) {
        const double d = state.final_profile[j] - data.w(grid.y(j) * sT);
        r[j] = d * d;
    }
    std::vector<double> q(static_cast<std::size_t>(M) + 1);
    for (int n = 0; n <= M; ++n) {
        const double d = state.trace_free[n] - data.mu(grid.t(n));
        q[n] = d * d;
    }
    CostBreakdown c;
    c.j1 = data.beta0 * sT * trapezoid(r, grid.dy());
    c.j2 = data.beta1 * trapezoid(q, grid.dt());
    const double e = sT - data.s_star;
    c.j3 = data.beta2 * e * e;
    c.total = c.j1 + c.j2 + c.j3;
    return c;
}

CostBreakdown cost_of_control(const ControlVector& v, const ProblemData& data, const Grid& grid,
                              SolverOptions opts) {
    return evaluate_cost(v, solve_forward(v, data, grid, opts), data, grid);
}

}  // namespace stefan
