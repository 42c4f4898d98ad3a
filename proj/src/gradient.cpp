#include "stefan/gradient.hpp"

#include <algorithm>
#include <cmath>

#include "stefan/series.hpp"

namespace stefan {

namespace {

double lerp_y(const AdjointField& adj, int n, double y) {
    const int N = adj.n_y;
    const double r = std::clamp(y, 0.0, 1.0) * N;
    int j = static_cast<int>(std::floor(r));
    if (j >= N) j = N - 1;
    const double fr = r - j;
    return (1.0 - fr) * adj.psi(j, n) + fr * adj.psi(j + 1, n);
}

// int_0^{s} F(x) dx on the nodes of a D grid row, where node values are given
// by node(i) for x_i <= s and the value at x = s by edge.
template <class NodeFn>
double row_integral(const SampledField& grid, double s, NodeFn node, double edge) {
    const double dx = grid.dx();
    int k = static_cast<int>(std::floor(s / dx + 1e-12));
    k = std::clamp(k, 0, grid.nx);
    CompensatedSum sum;
    for (int i = 0; i < k; ++i) sum.add(0.5 * dx * (node(i) + node(i + 1)));
    const double rest = s - k * dx;
    if (rest > 1e-14 * dx) sum.add(0.5 * rest * (node(k) + edge));
    return sum.value();
}

void check_shape(const GradientVector& grad, const ControlIncrement& dv, const Grid& grid) {
    const auto nt = static_cast<std::size_t>(grid.n_t()) + 1;
    if (grad.g_g.size() != nt || dv.dg.size() != nt || dv.ds.size() != nt || grad.s.size() != nt)
        throw InvalidInput("directional_derivative: time sampling mismatch");
    if (dv.df.nx != grad.g_f.nx || dv.df.nt != grad.g_f.nt)
        throw InvalidInput("directional_derivative: f sampling mismatch");
}

}  // namespace

GradientVector assemble_gradient(const ControlVector& v, const StateField& state,
                                 const AdjointField& adj, const ProblemData& data,
                                 const Grid& grid) {
    if (!state.traces_filled)
        throw InvalidInput("assemble_gradient: state traces have not been extracted");
    if (adj.trace_free.empty() || adj.n_y != grid.n_y() || adj.n_t != grid.n_t() ||
        state.n_y != grid.n_y() || state.n_t != grid.n_t())
        throw InvalidInput("assemble_gradient: state or adjoint missing for this grid");
    const int M = grid.n_t();
    const auto nt = static_cast<std::size_t>(M) + 1;

    GradientVector g;
    g.s = v.s();
    g.g_f = SampledField(v.f().x_max, v.f().t_max, v.f().nx, v.f().nt);
    g.g_f_edge.resize(nt);
    g.g_g.resize(nt);
    g.g_s.resize(nt);
    g.g_sprime.resize(nt);

    const auto ux = free_boundary_ux(state, v);
    for (int n = 0; n <= M; ++n) {
        const double t = grid.t(n);
        const double s = v.s()[n];
        const double sp = v.s_prime()[n];
        const double psi_s = adj.trace_free[n];
        for (int i = 0; i <= g.g_f.nx; ++i) {
            const double x = g.g_f.x(i);
            g.g_f.at(i, n) = x <= s ? -lerp_y(adj, n, x / s) : 0.0;
        }
        g.g_f_edge[n] = -psi_s;
        g.g_g[n] = -adj.trace_fixed[n];
        const double misfit = state.trace_free[n] - data.mu(t);
        g.g_s[n] = 2.0 * data.beta1 * misfit * ux[n] +
                   psi_s * (data.chi.dx(s, t) - data.gamma.dx(s, t) * sp - state.trace_aux_free[n]);
        g.g_sprime[n] = -data.gamma(s, t) * psi_s;
    }
    const double sT = v.s()[M];
    const double end_misfit = state.trace_free[M] - data.w(sT);
    g.g_sT = data.beta0 * end_misfit * end_misfit + 2.0 * data.beta2 * (sT - data.s_star);
    return g;
}

ControlIncrement ControlIncrement::zero_like(const ControlVector& v) {
    ControlIncrement d;
    d.df = SampledField(v.f().x_max, v.f().t_max, v.f().nx, v.f().nt);
    d.dg.assign(v.g().size(), 0.0);
    d.ds.assign(v.s().size(), 0.0);
    return d;
}

ControlIncrement ControlIncrement::between(const ControlVector& to, const ControlVector& from) {
    if (to.s().size() != from.s().size() || to.f().values.size() != from.f().values.size())
        throw InvalidInput("ControlIncrement: sampling mismatch");
    ControlIncrement d = zero_like(from);
    for (std::size_t i = 0; i < d.df.values.size(); ++i)
        d.df.values[i] = to.f().values[i] - from.f().values[i];
    for (std::size_t n = 0; n < d.dg.size(); ++n) {
        d.dg[n] = to.g()[n] - from.g()[n];
        d.ds[n] = to.s()[n] - from.s()[n];
    }
    return d;
}

ControlVector add_scaled(const ControlVector& v, const ControlIncrement& d, double scale) {
    if (d.ds.size() != v.s().size() || d.df.values.size() != v.f().values.size())
        throw InvalidInput("add_scaled: sampling mismatch");
    SampledField f = v.f();
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] += scale * d.df.values[i];
    std::vector<double> g = v.g(), s = v.s();
    for (std::size_t n = 0; n < s.size(); ++n) {
        g[n] += scale * d.dg[n];
        s[n] += scale * d.ds[n];
    }
    return ControlVector(std::move(f), std::move(g), std::move(s));
}

double directional_derivative(const GradientVector& grad, const ControlIncrement& dv,
                              const Grid& grid) {
    check_shape(grad, dv, grid);
    const int M = grid.n_t();
    const double dt = grid.dt();

    std::vector<double> fi(static_cast<std::size_t>(M) + 1);
    for (int n = 0; n <= M; ++n) {
        const double s = grad.s[n];
        const double t = dv.df.t(n);
        fi[n] = row_integral(
            grad.g_f, s, [&](int i) { return grad.g_f.at(i, n) * dv.df.at(i, n); },
            grad.g_f_edge[n] * dv.df.interpolate(s, t));
    }
    const auto dsp = derivative(dv.ds, dt);
    std::vector<double> rest(fi.size());
    for (std::size_t n = 0; n < rest.size(); ++n)
        rest[n] = grad.g_g[n] * dv.dg[n] + grad.g_s[n] * dv.ds[n] + grad.g_sprime[n] * dsp[n];
    return trapezoid(fi, dt) + trapezoid(rest, dt) + grad.g_sT * dv.ds.back();
}

std::vector<double> optimality_gap(const GradientVector& grad, const ControlVector& v,
                                   const std::vector<ControlVector>& candidates, const Grid& grid) {
    std::vector<double> out;
    out.reserve(candidates.size());
    for (const auto& w : candidates)
        out.push_back(directional_derivative(grad, ControlIncrement::between(w, v), grid));
    return out;
}

GradientNorms gradient_norms(const GradientVector& grad, const Grid& grid) {
    const int M = grid.n_t();
    const double dt = grid.dt();
    std::vector<double> fi(static_cast<std::size_t>(M) + 1), gg(fi.size()), gs(fi.size()),
        gp(fi.size());
    for (int n = 0; n <= M; ++n) {
        fi[n] = row_integral(
            grad.g_f, grad.s[n], [&](int i) { return grad.g_f.at(i, n) * grad.g_f.at(i, n); },
            grad.g_f_edge[n] * grad.g_f_edge[n]);
        gg[n] = grad.g_g[n] * grad.g_g[n];
        gs[n] = grad.g_s[n] * grad.g_s[n];
        gp[n] = grad.g_sprime[n] * grad.g_sprime[n];
    }
    return {std::sqrt(trapezoid(fi, dt)), std::sqrt(trapezoid(gg, dt)), std::sqrt(trapezoid(gs, dt)),
            std::sqrt(trapezoid(gp, dt)), std::abs(grad.g_sT)};
}

double gradient_max_abs(const GradientVector& grad) {
    double m = std::max({max_abs(grad.g_f.values), max_abs(grad.g_f_edge), max_abs(grad.g_g),
                         max_abs(grad.g_s), max_abs(grad.g_sprime)});
    return std::max(m, std::abs(grad.g_sT));
}

}  // namespace stefan
