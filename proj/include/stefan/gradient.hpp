#pragma once

#include <vector>

#include "stefan/adjoint.hpp"

namespace stefan {

/// Frechet differential of J split by control component.
struct GradientVector {
    SampledField g_f;               // -psi on the D grid, zero where x > s(t)
    std::vector<double> g_f_edge;   // -psi(s(t), t), closes the last partial cell
    std::vector<double> g_g;        // -psi(0, t)
    std::vector<double> g_s;        // [2 beta1 (u - mu) u_x + psi (chi_x - gamma_x s' - (a u_x)_x)] at s(t)
    std::vector<double> g_sprime;   // -gamma psi at s(t)
    double g_sT = 0.0;              // beta0 |u(s(T),T) - w(s(T))|^2 + 2 beta2 (s(T) - s*)
    std::vector<double> s;          // boundary the gradient was assembled for
};

GradientVector assemble_gradient(const ControlVector& v, const StateField& state,
                                 const AdjointField& adj, const ProblemData& data,
                                 const Grid& grid);

/// An increment of the control: same sampling as ControlVector, but without
/// the derived s' (taken from derivative() of ds on demand).
struct ControlIncrement {
    SampledField df;
    std::vector<double> dg;
    std::vector<double> ds;

    static ControlIncrement zero_like(const ControlVector& v);
    static ControlIncrement between(const ControlVector& to, const ControlVector& from);
};

/// v + scale * d.
ControlVector add_scaled(const ControlVector& v, const ControlIncrement& d, double scale);

/// dJ(dv) = int_Omega g_f df + int g_g dg + int g_s ds + int g_sprime ds' + g_sT ds(T).
///
/// The Omega integral runs over [0, s(t_n)] at each time node (trapezoid on
/// the D nodes plus a partial cell ending at s), then trapezoid in t.
double directional_derivative(const GradientVector& grad, const ControlIncrement& dv,
                              const Grid& grid);

/// directional_derivative(grad, w - v) for each candidate w.
std::vector<double> optimality_gap(const GradientVector& grad, const ControlVector& v,
                                   const std::vector<ControlVector>& candidates, const Grid& grid);

/// Per-component L2 norms {f over Omega, g, s, s', |g_sT|}.
struct GradientNorms {
    double f = 0.0;
    double g = 0.0;
    double s = 0.0;
    double sprime = 0.0;
    double sT = 0.0;
};

GradientNorms gradient_norms(const GradientVector& grad, const Grid& grid);

/// Largest absolute entry over all five components.
double gradient_max_abs(const GradientVector& grad);

}  // namespace stefan
