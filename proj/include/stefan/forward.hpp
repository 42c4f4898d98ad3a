#pragma once

#include <vector>

#include "stefan/problem.hpp"
#include "stefan/tridiag.hpp"

namespace stefan {

enum class TimeScheme { CrankNicolson, BackwardEuler };

struct SolverOptions {
    TimeScheme scheme = TimeScheme::CrankNicolson;
    double theta() const noexcept { return scheme == TimeScheme::CrankNicolson ? 0.5 : 1.0; }
};

/// Semi-discrete operator at one time level: d/dt u = A u + rhs.
///
/// A carries the homogeneous part (diffusion, advection, reaction with zero
/// boundary data); rhs carries the boundary fluxes and the source.
struct LevelOperator {
    Tridiagonal A;
    std::vector<double> rhs;
};

/// Transformed state u~(y,t) = u(y s(t), t) on the unit rectangle and its traces.
struct StateField {
    int n_y = 0;
    int n_t = 0;
    std::vector<double> u_tilde;  // time-major, (n_t+1) x (n_y+1)

    std::vector<double> trace_free;      // u(s(t), t)
    std::vector<double> trace_fixed;     // u(0, t)
    std::vector<double> final_profile;   // u~(y, T)
    std::vector<double> trace_uy_free;   // u~_y(1, t)
    std::vector<double> trace_aux_free;  // (a u_x)_x at x = s(t)
    bool traces_filled = false;

    double u(int j, int n) const { return u_tilde[static_cast<std::size_t>(n) * (n_y + 1) + j]; }
    double& u(int j, int n) { return u_tilde[static_cast<std::size_t>(n) * (n_y + 1) + j]; }
};

/// Finite-volume discretisation of
///   (1/s^2)(a~ u_y)_y + (1/s)(b~ + y s') u_y + c~ u - u_t = f~
/// on the vertex-centred grid with half cells at y = 0 and y = 1:
///   - interior fluxes use half-node averages a_{j+1/2} = (a_j + a_{j+1}) / 2,
///   - advection is centred inside and taken over the half cell at the ends,
///   - the flux data a~ u_y = g s (y=0) and a~ u_y = s (chi~ - gamma~ s') (y=1)
///     enter the boundary cells.
/// With trapezoid weights W this makes W A symmetric in its diffusion part,
/// which the adjoint operator relies on.
LevelOperator assemble_forward_level(const ControlVector& v, const ProblemData& data,
                                     const Grid& grid, int n);

/// Marches the theta-scheme from u~(y,0) = phi(y s0) to T and fills the traces.
StateField solve_forward(const ControlVector& v, const ProblemData& data, const Grid& grid,
                         SolverOptions opts = {});

/// Fills the trace series of a solved state. u~_y(1,t) uses a one-sided
/// second-order difference; (a u_x)_x at the free boundary is
/// (a~ u~_y)_y (1,t) / s^2 with nested one-sided second-order stencils.
StateField extract_traces(StateField state, const ControlVector& v, const ProblemData& data,
                          const Grid& grid);

/// u_x(s(t), t) = u~_y(1, t) / s(t).
std::vector<double> free_boundary_ux(const StateField& state, const ControlVector& v);

}  // namespace stefan
