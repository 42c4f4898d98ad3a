#include "stefan/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "stefan/series.hpp"

namespace stefan {

SUpdateMode parse_s_update_mode(const std::string& name) {
    if (name == "riesz_h1") return SUpdateMode::RieszH1;
    if (name == "paper_sequential") return SUpdateMode::PaperSequential;
    throw InvalidInput("unknown s_update_mode: " + name);
}

std::string to_string(SUpdateMode mode) {
    return mode == SUpdateMode::RieszH1 ? "riesz_h1" : "paper_sequential";
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::Converged: return "converged";
        case StopReason::MaxIterations: return "max_iters";
        case StopReason::ZeroGradient: return "zero_gradient";
        case StopReason::LineSearchFailed: return "line_search_failed";
    }
    return "unknown";
}

void OptimizerConfig::check() const {
    if (max_iters < 0) throw InvalidInput("optimizer: max_iters must be nonnegative");
    if (!(epsilon > 0.0)) throw InvalidInput("optimizer: epsilon must be positive");
    if (!(alpha0 > 0.0)) throw InvalidInput("optimizer: alpha0 must be positive");
    if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw InvalidInput("optimizer: need 0 < armijo_c < 1");
    if (!(armijo_shrink > 0.0 && armijo_shrink < 1.0))
        throw InvalidInput("optimizer: need 0 < armijo_shrink < 1");
    if (max_backtracks < 1) throw InvalidInput("optimizer: max_backtracks must be positive");
}

namespace {

// 1 at t = 0, decreasing smoothly to 0 at t = L.
double blend(double t, double L) {
    if (t >= L) return 0.0;
    const double r = 1.0 - t / L;
    return r * r * (1.0 + 2.0 * t / L);
}

// Vanishes at t = 0 and beyond L, nonzero slope at 0.
double slope_bump(double t, double L) {
    if (t >= L) return 0.0;
    const double r = 1.0 - t / L;
    return t * r * r;
}

double blend_length(double T, double dt) { return std::max(0.1 * T, 3.0 * dt); }

void enforce_box(std::vector<double>& s, double lo, double hi) {
    const std::size_t n = s.size();
    std::vector<bool> touched(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (s[i] < lo || s[i] > hi) {
            s[i] = std::clamp(s[i], lo, hi);
            touched[i] = true;
            if (i > 0) touched[i - 1] = true;
            if (i + 1 < n) touched[i + 1] = true;
        }
    }
    const std::vector<double> c = s;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (touched[i]) s[i] = 0.25 * c[i - 1] + 0.5 * c[i] + 0.25 * c[i + 1];
}

void enforce_anchors(std::vector<double>& g, std::vector<double>& s, const ProblemData& data,
                     double dt) {
    const double L = blend_length(dt * static_cast<double>(s.size() - 1), dt);
    const double ds0 = s[0] - data.s0;
    const double dg0 = g[0] - data.g_anchor();
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double r = blend(static_cast<double>(i) * dt, L);
        s[i] -= ds0 * r;
        g[i] -= dg0 * r;
    }
    s[0] = data.s0;
    g[0] = data.g_anchor();

    std::vector<double> bump(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) bump[i] = slope_bump(static_cast<double>(i) * dt, L);
    const double slope0 = derivative(s, dt)[0];
    const double bump0 = derivative(bump, dt)[0];
    for (std::size_t i = 0; i < s.size(); ++i) s[i] -= slope0 / bump0 * bump[i];
}

bool box_and_anchors_hold(const ControlVector& v, const ProblemData& data) {
    const auto rep = validate_control(v, data);
    return std::all_of(rep.violations.begin(), rep.violations.end(),
                       [](const Violation& x) { return x.constraint == "norm_ball"; });
}

ControlVector anchor_control(const ControlVector& like, const ProblemData& data) {
    SampledField f(like.f().x_max, like.f().t_max, like.f().nx, like.f().nt);
    std::vector<double> g(like.g().size(), data.g_anchor());
    std::vector<double> s(like.s().size(), data.s0);
    return ControlVector(std::move(f), std::move(g), std::move(s));
}

}  // namespace

double control_distance_H(const ControlVector& v, const ControlVector& w, double alpha) {
    return besov::control_norm_H(v.axpby(1.0, w, -1.0), alpha);
}

ControlVector project(const ControlVector& v_raw, const ProblemData& data) {
    if (data.delta > data.ell) throw InvalidInput("project: infeasible geometry, delta > ell");
    if (validate_control(v_raw, data).is_member()) return v_raw;

    const double dt = v_raw.dt();
    std::vector<double> g = v_raw.g();
    std::vector<double> s = v_raw.s();
    ControlVector v = v_raw;
    for (int pass = 0; pass < 5; ++pass) {
        enforce_box(s, data.delta, data.ell);
        enforce_anchors(g, s, data, dt);
        v = ControlVector(v_raw.f(), g, s);
        if (box_and_anchors_hold(v, data)) break;
    }
    if (!box_and_anchors_hold(v, data))
        throw SolverError("project: could not satisfy the box and anchor constraints");

    const double R = data.R;
    if (besov::control_norm_H(v, data.alpha) <= R) return v;
    const ControlVector va = anchor_control(v, data);
    if (besov::control_norm_H(va, data.alpha) > R)
        throw InvalidInput("project: the anchor control lies outside the norm ball");
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (besov::control_norm_H(va.axpby(1.0 - mid, v, mid), data.alpha) <= R)
            lo = mid;
        else
            hi = mid;
    }
    return va.axpby(1.0 - lo, v, lo);
}

std::vector<double> descent_direction_s(const GradientVector& grad, const Grid& grid,
                                        SUpdateMode mode) {
    const int M = grid.n_t();
    const double dt = grid.dt();
    const auto nodes = static_cast<std::size_t>(M) + 1;
    if (grad.g_s.size() != nodes || grad.g_sprime.size() != nodes)
        throw InvalidInput("descent_direction_s: gradient does not match the grid");

    if (mode == SUpdateMode::PaperSequential) {
        std::vector<double> eta(nodes, 0.0);
        CompensatedSum integral;
        for (std::size_t n = 0; n < nodes; ++n) {
            if (n > 0) integral.add(0.5 * dt * (grad.g_sprime[n - 1] + grad.g_sprime[n]));
            eta[n] = 0.5 * (-grad.g_s[n] - integral.value());
        }
        const double fix = -grad.g_sT - eta.back();
        for (std::size_t n = 0; n < nodes; ++n) {
            const double r = grid.t(static_cast<int>(n)) / grid.T();
            eta[n] += fix * r * r;
        }
        return eta;
    }

    // Basis: e_2 = hat_2 + hat_1 / 4 (so the one-sided s'(0) stencil vanishes)
    // and e_k = hat_k for k = 3..M. Unknown c_k, k = 2..M, stored at index k-2.
    const int m = M - 1;
    if (m < 2) throw InvalidInput("descent_direction_s: need at least 3 time intervals");
    const auto w = trapezoid_weights(nodes, dt);
    auto basis = [&](int k) {
        std::vector<double> e(nodes, 0.0);
        e[k] = 1.0;
        if (k == 2) e[1] = 0.25;
        return e;
    };
    auto inner = [&](const std::vector<double>& u, const std::vector<double>& v) {
        double r = 0.0;
        for (std::size_t i = 0; i < nodes; ++i) r += w[i] * u[i] * v[i];
        for (std::size_t i = 0; i + 1 < nodes; ++i) r += (u[i + 1] - u[i]) * (v[i + 1] - v[i]) / dt;
        return r;
    };
    auto load = [&](const std::vector<double>& e) {
        const auto de = derivative(e, dt);
        double r = 0.0;
        for (std::size_t i = 0; i < nodes; ++i) r += w[i] * (grad.g_s[i] * e[i] + grad.g_sprime[i] * de[i]);
        return r + grad.g_sT * e.back();
    };

    Tridiagonal G(static_cast<std::size_t>(m));
    std::vector<double> rhs(static_cast<std::size_t>(m));
    std::vector<std::vector<double>> e(static_cast<std::size_t>(m));
    for (int k = 2; k <= M; ++k) e[k - 2] = basis(k);
    for (int i = 0; i < m; ++i) {
        G.diag[i] = inner(e[i], e[i]);
        if (i > 0) G.lower[i] = inner(e[i], e[i - 1]);
        if (i + 1 < m) G.upper[i] = inner(e[i], e[i + 1]);
        rhs[i] = -load(e[i]);
    }
    const auto c = solve_tridiagonal(G, rhs);
    std::vector<double> eta(nodes, 0.0);
    for (int i = 0; i < m; ++i)
        for (std::size_t n = 0; n < nodes; ++n) eta[n] += c[i] * e[i][n];
    return eta;
}

ControlIncrement descent_direction(const GradientVector& grad, const Grid& grid,
                                   const OptimizerConfig& cfg) {
    ControlIncrement d;
    d.df = SampledField(grad.g_f.x_max, grad.g_f.t_max, grad.g_f.nx, grad.g_f.nt);
    d.dg.assign(grad.g_g.size(), 0.0);
    d.ds.assign(grad.g_s.size(), 0.0);
    if (cfg.optimize_f)
        for (std::size_t i = 0; i < d.df.values.size(); ++i) d.df.values[i] = -grad.g_f.values[i];
    if (cfg.optimize_g)
        for (std::size_t n = 0; n < d.dg.size(); ++n) d.dg[n] = -grad.g_g[n];
    if (cfg.optimize_s) d.ds = descent_direction_s(grad, grid, cfg.s_update_mode);
    return d;
}

ControlVector step(const ControlVector& v, const ControlIncrement& direction, double alpha,
                   const ProblemData& data) {
    if (alpha < 0.0) throw InvalidInput("step: alpha must be nonnegative");
    if (alpha == 0.0) return v;
    return project(add_scaled(v, direction, alpha), data);
}

ControlVector step(const ControlVector& v, const GradientVector& grad, double alpha,
                   const ProblemData& data, const Grid& grid, const OptimizerConfig& cfg) {
    return step(v, descent_direction(grad, grid, cfg), alpha, data);
}

namespace {

struct Evaluated {
    StateField state;
    CostBreakdown cost;
};

Evaluated evaluate(const ControlVector& v, const ProblemData& data, const Grid& grid,
                   const OptimizerConfig& cfg) {
    StateField st = solve_forward(v, data, grid, cfg.solver);
    const CostBreakdown c = evaluate_cost(v, st, data, grid);
    return {std::move(st), c};
}

GradientVector gradient_at(const ControlVector& v, const Evaluated& ev, const ProblemData& data,
                           const Grid& grid, const OptimizerConfig& cfg) {
    const AdjointField adj = solve_adjoint(v, ev.state, data, grid, cfg.solver);
    return assemble_gradient(v, ev.state, adj, data, grid);
}

}  // namespace

OptimizationResult run(const ControlVector& v0, const ProblemData& data, const Grid& grid,
                       const OptimizerConfig& cfg, const IterateObserver& observer) {
    cfg.check();
    data.check();
    OptimizationResult res;
    res.control = v0;
    try {
        Evaluated cur = evaluate(v0, data, grid, cfg);
        double step_taken = 0.0;
        for (int k = 0;; ++k) {
            res.gradient = gradient_at(res.control, cur, data, grid, cfg);
            res.history.push_back({k, cur.cost, step_taken, gradient_norms(res.gradient, grid),
                                   besov::control_norm_H(res.control, data.alpha)});
            if (observer) observer(res.control, res.history.back());
            if (gradient_max_abs(res.gradient) <= cfg.gradient_tolerance) {
                res.reason = StopReason::ZeroGradient;
                break;
            }
            if (k >= cfg.max_iters) {
                res.reason = StopReason::MaxIterations;
                break;
            }

            const ControlIncrement dir = descent_direction(res.gradient, grid, cfg);
            const double decrease = -directional_derivative(res.gradient, dir, grid);
            if (!(decrease > 0.0)) {
                res.reason = StopReason::ZeroGradient;
                break;
            }
            double alpha = cfg.alpha0;
            bool accepted = false;
            ControlVector trial;
            Evaluated trial_ev;
            for (int bt = 0; bt < cfg.max_backtracks; ++bt, alpha *= cfg.armijo_shrink) {
                try {
                    trial = step(res.control, dir, alpha, data);
                    trial_ev = evaluate(trial, data, grid, cfg);
                } catch (const SolverError&) {
                    continue;
                }
                if (trial_ev.cost.total <= cur.cost.total - cfg.armijo_c * alpha * decrease) {
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                res.reason = StopReason::LineSearchFailed;
                break;
            }
            const double dJ = std::abs(trial_ev.cost.total - cur.cost.total);
            const double dv = control_distance_H(trial, res.control, data.alpha);
            res.control = std::move(trial);
            cur = std::move(trial_ev);
            step_taken = alpha;
            if (dJ < cfg.epsilon && dv < cfg.epsilon) {
                res.gradient = gradient_at(res.control, cur, data, grid, cfg);
                res.history.push_back({k + 1, cur.cost, step_taken,
                                       gradient_norms(res.gradient, grid),
                                       besov::control_norm_H(res.control, data.alpha)});
                if (observer) observer(res.control, res.history.back());
                res.reason = StopReason::Converged;
                break;
            }
        }
    } catch (const SolverError& e) {
        throw OptimizationAborted(e.what(), res.history);
    }
    return res;
}

}  // namespace stefan
