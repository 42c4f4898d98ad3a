#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stefan/cost.hpp"
#include "stefan/gradient.hpp"
#include "stefan/optimizer.hpp"

namespace stefan::verify {

/// A problem with a known solution u*(x,t). The control is kept as closed
/// forms so it can be sampled on any grid.
struct ManufacturedCase {
    std::string name;
    ProblemData data;
    exprs::Expr f;
    exprs::Expr g;  // function of t
    exprs::Expr s;  // function of t
    exprs::Expr exact_u;

    /// Samples (f, g, s) on the time nodes of `grid`, with f on n_x intervals of [0, ell].
    ControlVector control(const Grid& grid, int n_x) const;

    /// Largest |u~(y_j, t_n) - u*(y_j s(t_n), t_n)| over all nodes.
    double max_error(const StateField& state, const Grid& grid) const;
};

/// (i) constant steady state, (ii) fixed domain u* = exp(-t) cos(pi x),
/// (iii) moving boundary u* = x^2 with s = 1 + t^2/2.
std::vector<ManufacturedCase> builtin_cases();

const ManufacturedCase& builtin_case(const std::string& name);

/// Central difference [J(v + h dv) - J(v - h dv)] / (2h). Throws InvalidInput
/// naming the constraint when a perturbed control leaves the box or breaks an
/// anchor.
double fd_directional_derivative(const ProblemData& data, const Grid& grid, const ControlVector& v,
                                 const ControlIncrement& dv, double h, SolverOptions opts = {});

struct Measurements {
    Curve w;
    Curve mu;
    double s_star = 0.0;
};

/// Solves forward with v_true on `grid` and records w(x) = u(x,T) on
/// [0, s(T)], mu(t) = u(s(t),t) and s* = s(T) as tables. With noise_level > 0
/// adds i.i.d. uniform noise of amplitude noise_level * max|signal| to w and mu.
Measurements synthesize_measurements(const ControlVector& v_true, const ProblemData& data,
                                     const Grid& grid, double noise_level = 0.0,
                                     std::uint64_t seed = 0);

/// Inverse problem with known truth: smooth variable coefficients, a
/// nontrivial boundary motion, and measurements generated from the truth.
struct SyntheticCase {
    ProblemData data;  // measurements filled in
    Grid grid;
    int n_x = 0;
    exprs::Expr f_true;
    exprs::Expr g_true;
    exprs::Expr s_true;
    ControlVector truth;  // sampled on grid

    ControlVector sample(const exprs::Expr& f, const exprs::Expr& g, const exprs::Expr& s) const;
};

struct SyntheticOptions {
    int n_y = 64;
    int n_t = 128;
    int n_x = 64;
    /// 1: measurements from the inversion grid; 2: from a grid refined twice.
    int generation_refinement = 1;
    double noise_level = 0.0;
    std::uint64_t seed = 0;
};

/// The default synthetic inverse problem used by the tests and the CLI.
ProblemData synthetic_problem_data();
SyntheticCase make_synthetic_case(const SyntheticOptions& opts = {});
SyntheticCase make_synthetic_case(ProblemData base, const exprs::Expr& f_true,
                                  const exprs::Expr& g_true, const exprs::Expr& s_true,
                                  const SyntheticOptions& opts);

struct CandidateOptions {
    int count = 10;
    double amplitude = 0.1;
    std::uint64_t seed = 0;
    bool vary_f = true;
    bool vary_g = true;
    bool vary_s = true;
};

/// Controls project(v + d) for random smooth increments d that keep
/// d_g(0) = d_s(0) = d_s'(0) = 0; every candidate lies in the control set.
std::vector<ControlVector> random_feasible_candidates(const ControlVector& v,
                                                      const ProblemData& data,
                                                      const CandidateOptions& opts);

}  // namespace stefan::verify
