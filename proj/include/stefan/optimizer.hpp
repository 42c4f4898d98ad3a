#pragma once

#include <functional>
#include <string>
#include <vector>

#include "stefan/besov.hpp"
#include "stefan/cost.hpp"
#include "stefan/gradient.hpp"

namespace stefan {

enum class SUpdateMode { RieszH1, PaperSequential };

SUpdateMode parse_s_update_mode(const std::string& name);
std::string to_string(SUpdateMode mode);

struct OptimizerConfig {
    int max_iters = 200;
    double epsilon = 1e-8;
    double alpha0 = 1.0;
    double armijo_c = 1e-4;
    double armijo_shrink = 0.5;
    int max_backtracks = 40;
    /// A gradient whose largest entry is at most this is treated as zero.
    double gradient_tolerance = 1e-12;
    SUpdateMode s_update_mode = SUpdateMode::RieszH1;
    bool optimize_f = true;
    bool optimize_g = true;
    bool optimize_s = true;
    SolverOptions solver;

    /// Throws InvalidInput on out-of-range settings.
    void check() const;
};

struct IterationRecord {
    int k = 0;
    CostBreakdown cost;
    double step = 0.0;  // stepsize that produced this iterate, 0 for the start
    GradientNorms grad_norms;
    double control_norm = 0.0;
};

enum class StopReason { Converged, MaxIterations, ZeroGradient, LineSearchFailed };

std::string to_string(StopReason r);

struct OptimizationResult {
    ControlVector control;
    std::vector<IterationRecord> history;
    StopReason reason = StopReason::MaxIterations;
    GradientVector gradient;  // at the returned control
};

/// Thrown when a solve fails mid-run; carries the iterations completed so far.
class OptimizationAborted : public SolverError {
public:
    OptimizationAborted(const std::string& what, std::vector<IterationRecord> history)
        : SolverError(what), history_(std::move(history)) {}
    const std::vector<IterationRecord>& history() const noexcept { return history_; }

private:
    std::vector<IterationRecord> history_;
};

/// Approximate projection onto the control set, applied in sequence:
///   1. s is clipped to [delta, ell]; clipped nodes and their neighbours get
///      one pass of (1/4, 1/2, 1/4) smoothing,
///   2. s(0) = s0 by subtracting the offset times a blend that is 1 at t = 0
///      and vanishes after max(0.1 T, 3 dt); s'(0) = 0 by subtracting a
///      multiple of t (1 - t/L)^2,
///   3. g(0) by an additive offset times the same blend,
///   4. the norm ball by bisection on lambda in v_a + lambda (v - v_a), v_a
///      being the anchor control (f = 0, g = g(0), s = s0).
/// A control that already passes validate_control is returned unchanged.
ControlVector project(const ControlVector& v_raw, const ProblemData& data);

/// Descent direction for s.
///
/// RieszH1: eta minimises over the span of hat functions with eta(0) = 0 and
/// a vanishing discrete s'(0) the quadratic  |eta|^2_{H1}/2 + dJ_s(eta), where
/// |.|_{H1} uses lumped mass plus stiffness. Then dJ_s(eta) = -|eta|^2_{H1}.
///
/// PaperSequential: averages the update of s and the integrated update of s',
/// then adds a (t/T)^2 blend so that eta(T) = -g_sT.
std::vector<double> descent_direction_s(const GradientVector& grad, const Grid& grid,
                                        SUpdateMode mode = SUpdateMode::RieszH1);

/// Search direction (-g_f, -g_g, eta) with components switched off by the mask.
ControlIncrement descent_direction(const GradientVector& grad, const Grid& grid,
                                   const OptimizerConfig& cfg);

/// project(v + alpha * direction).
ControlVector step(const ControlVector& v, const ControlIncrement& direction, double alpha,
                   const ProblemData& data);

/// Convenience overload building the direction from a gradient.
ControlVector step(const ControlVector& v, const GradientVector& grad, double alpha,
                   const ProblemData& data, const Grid& grid, const OptimizerConfig& cfg = {});

/// Called once per recorded iterate with the control and its record.
using IterateObserver = std::function<void(const ControlVector&, const IterationRecord&)>;

/// Projected gradient descent with Armijo backtracking. Stops when both
/// |J_{k+1} - J_k| and ||v_{k+1} - v_k||_H drop below epsilon, on a zero
/// gradient, when no backtracking step decreases J enough, or at max_iters.
OptimizationResult run(const ControlVector& v0, const ProblemData& data, const Grid& grid,
                       const OptimizerConfig& cfg = {}, const IterateObserver& observer = {});

/// ||v - w||_H.
double control_distance_H(const ControlVector& v, const ControlVector& w, double alpha);

}  // namespace stefan
