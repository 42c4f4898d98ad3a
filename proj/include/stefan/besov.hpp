#pragma once

#include <span>
#include <vector>

#include "stefan/problem.hpp"

namespace stefan::besov {

/// Pieces of a discrete Sobolev or Besov norm.
///
/// One-variable norms: total = sqrt(l2_part^2 + sum derivative_parts^2) + fractional_seminorm.
/// The anisotropic norm of f additionally fills x_part and t_part with
/// total = x_part + t_part, where x_part = sqrt(l2_part^2 + derivative_parts[0]^2).
struct NormBreakdown {
    double l2_part = 0.0;
    std::vector<double> derivative_parts;
    double fractional_seminorm = 0.0;
    double x_part = 0.0;
    double t_part = 0.0;
    double total = 0.0;
};

/// W_2^order norm of a uniformly sampled series (order 0, 1 or 2) using
/// trapezoid L2 norms of difference-quotient derivatives.
NormBreakdown sobolev_w2_norm(std::span<const double> series, int order, double dt);

/// Discrete Slobodeckij seminorm
///   ( int int |u(t) - u(tau)|^2 / |t - tau|^(1 + 2 lambda) dt dtau )^(1/2),  0 < lambda < 1.
///
/// The series is split into panels. On each pair of panels the numerator is
/// replaced by q^2 |t - tau|^2, q being the secant slope between panel
/// midpoints (the panel's own difference quotient on the diagonal), and the
/// remaining kernel |t - tau|^(1 - 2 lambda) is integrated exactly. Far from
/// the diagonal this reduces to the midpoint rule; on and near it the weak
/// singularity is captured analytically. Exact for linear series.
double fractional_seminorm(std::span<const double> series, double lambda, double dt);

/// B_2^order norm: W_2^[order] norm plus the fractional seminorm of the
/// [order]-th difference derivative. Integer orders reduce to Sobolev norms.
NormBreakdown besov_norm(std::span<const double> series, double order, double dt);

/// Norm of f in B_{2,x,t}^{1, 1/4 + alpha}(D):
///   (int_0^T ||f(.,t)||^2_{W_2^1} dt)^(1/2) + (int_0^ell ||f(x,.)||^2_{B_2^{1/4+alpha}} dx)^(1/2).
NormBreakdown anisotropic_norm_f(const SampledField& f, double alpha);

struct ControlNorms {
    double f = 0.0;
    double g = 0.0;
    double s = 0.0;
    double total() const;
};

ControlNorms control_norms(const ControlVector& v, double alpha);

/// ||v||_H = max(||f||, ||g||_{B_2^{1/2+alpha}}, ||s||_{W_2^2}).
double control_norm_H(const ControlVector& v, double alpha);

}  // namespace stefan::besov
