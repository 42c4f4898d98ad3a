#pragma once

#include <vector>

#include "stefan/forward.hpp"

namespace stefan {

/// Transformed adjoint psi~(y,t) = psi(y s(t), t) on the unit rectangle.
struct AdjointField {
    int n_y = 0;
    int n_t = 0;
    std::vector<double> psi_tilde;  // time-major, (n_t+1) x (n_y+1)

    std::vector<double> trace_fixed;  // psi(0, t)
    std::vector<double> trace_free;   // psi(s(t), t)

    double psi(int j, int n) const { return psi_tilde[static_cast<std::size_t>(n) * (n_y + 1) + j]; }
    double& psi(int j, int n) { return psi_tilde[static_cast<std::size_t>(n) * (n_y + 1) + j]; }
};

/// Spatial operator of the transformed adjoint equation at time level n.
///
/// Substituting psi(x,t) = psi~(x/s, t) into
///   (a psi_x)_x - (b psi)_x + c psi + psi_t = 0
/// and using -(y s'/s) psi~_y = -(s'/s)(y psi~)_y + (s'/s) psi~ gives
///   G_y + (c~ + s'/s) psi~ + psi~_t = 0,   G = a~ psi~_y / s^2 - B psi~,
/// with B = (b~ + y s')/s, the same advection speed as the forward equation.
/// The Robin conditions become G = 0 at y = 0 and
/// G = 2 beta1 (u(s,t) - mu(t)) / s at y = 1.
///
/// The returned operator satisfies psi~_t = -(A psi~ + rhs). G is taken at
/// half nodes with averaged a and averaged B psi, and the end rows integrate
/// over half cells, so A = W^-1 A_fwd^T W + diag(s'/s) with W the trapezoid
/// weights.
LevelOperator assemble_adjoint_level(const ControlVector& v, const StateField& state,
                                     const ProblemData& data, const Grid& grid, int n);

/// Integrates the adjoint backward from psi~(y,T) = 2 beta0 (u~(y,T) - w(y s(T)))
/// with the theta-scheme in reversed time tau = T - t.
AdjointField solve_adjoint(const ControlVector& v, const StateField& state,
                           const ProblemData& data, const Grid& grid, SolverOptions opts = {});

}  // namespace stefan
