#pragma once

#include "stefan/forward.hpp"

namespace stefan {

struct CostBreakdown {
    double j1 = 0.0;  // final-moment misfit
    double j2 = 0.0;  // free-boundary temperature misfit
    double j3 = 0.0;  // final boundary position misfit
    double total = 0.0;
};

/// j1 = beta0 s(T) int_0^1 |u~(y,T) - w(y s(T))|^2 dy,
/// j2 = beta1 int_0^T |u~(1,t) - mu(t)|^2 dt,
/// j3 = beta2 |s(T) - s*|^2, all integrals by the trapezoid rule.
CostBreakdown evaluate_cost(const ControlVector& v, const StateField& state,
                            const ProblemData& data, const Grid& grid);

/// Forward solve followed by evaluate_cost.
CostBreakdown cost_of_control(const ControlVector& v, const ProblemData& data, const Grid& grid,
                              SolverOptions opts = {});

}  // namespace stefan
