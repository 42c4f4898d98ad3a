#include "stefan/besov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stefan/series.hpp"

namespace stefan::besov {

namespace {

void require_finite(std::span<const double> s, const char* what) {
    for (double v : s)
        if (!std::isfinite(v)) throw InvalidInput(std::string(what) + ": non-finite sample");
}

double l2(std::span<const double> f, double h) {
    std::vector<double> sq(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) sq[i] = f[i] * f[i];
    return std::sqrt(trapezoid(sq, h));
}

// Integral of |d + z|^p against the hat (1 - |z|) on [-1, 1], times (p+1)(p+2)
// already divided out: the second difference of |x|^(p+2) / ((p+1)(p+2)) at d.
double kernel_weight(int d, double p) {
    const double q = p + 2.0;
    const double norm = (p + 1.0) * (p + 2.0);
    if (d < 8) {
        const double dd = d;
        return (std::pow(dd + 1.0, q) - 2.0 * std::pow(dd, q) + std::pow(std::abs(dd - 1.0), q)) /
               norm;
    }
    // Even-order binomial series of the second difference; avoids cancellation.
    const double inv2 = 1.0 / (static_cast<double>(d) * d);
    double coef = 1.0;  // running binomial C(q, k)
    double term_pow = 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 10; ++k) {
        coef *= (q - (k - 1)) / k;
        if (k % 2 == 0) {
            term_pow *= inv2;
            sum += 2.0 * coef * term_pow;
        }
    }
    return std::pow(static_cast<double>(d), q) * sum / norm;
}

}  // namespace

NormBreakdown sobolev_w2_norm(std::span<const double> series, int order, double dt) {
    if (order < 0 || order > 2) throw InvalidInput("sobolev_w2_norm: order must be 0, 1 or 2");
    if (series.size() < static_cast<std::size_t>(order + 2))
        throw InvalidInput("sobolev_w2_norm: series too short for the requested order");
    if (!(dt > 0.0)) throw InvalidInput("sobolev_w2_norm: dt must be positive");
    require_finite(series, "sobolev_w2_norm");

    NormBreakdown out;
    out.l2_part = l2(series, dt);
    double sq = out.l2_part * out.l2_part;
    if (order >= 1) {
        const auto d1 = derivative(series, dt);
        out.derivative_parts.push_back(l2(d1, dt));
    }
    if (order >= 2) {
        const auto d2 = second_derivative(series, dt);
        out.derivative_parts.push_back(l2(d2, dt));
    }
    for (double d : out.derivative_parts) sq += d * d;
    out.total = std::sqrt(sq);
    return out;
}

double fractional_seminorm(std::span<const double> series, double lambda, double dt) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw InvalidInput("fractional_seminorm: lambda must lie in (0, 1)");
    if (series.size() < 2) throw InvalidInput("fractional_seminorm: need at least two samples");
    if (!(dt > 0.0)) throw InvalidInput("fractional_seminorm: dt must be positive");
    require_finite(series, "fractional_seminorm");

    const int panels = static_cast<int>(series.size()) - 1;
    const double p = 1.0 - 2.0 * lambda;
    std::vector<double> mid(static_cast<std::size_t>(panels));
    std::vector<double> slope(static_cast<std::size_t>(panels));
    for (int i = 0; i < panels; ++i) {
        mid[i] = 0.5 * (series[i] + series[i + 1]);
        slope[i] = (series[i + 1] - series[i]) / dt;
    }
    std::vector<double> weight(static_cast<std::size_t>(panels));
    for (int d = 0; d < panels; ++d) weight[d] = kernel_weight(d, p);

    CompensatedSum acc;
    for (int i = 0; i < panels; ++i) acc.add(weight[0] * slope[i] * slope[i]);
    // Symmetric in (i, k): sum i < k once and double.
    for (int d = 1; d < panels; ++d) {
        CompensatedSum row;
        const double inv = 1.0 / (d * dt);
        for (int i = 0; i + d < panels; ++i) {
            const double q = (mid[i + d] - mid[i]) * inv;
            row.add(q * q);
        }
        acc.add(2.0 * weight[d] * row.value());
    }
    const double scale = std::pow(dt, p + 2.0);
    return std::sqrt(std::max(0.0, acc.value() * scale));
}

NormBreakdown besov_norm(std::span<const double> series, double order, double dt) {
    if (!(order >= 0.0)) throw InvalidInput("besov_norm: negative order");
    const double whole = std::floor(order);
    const double frac = order - whole;
    const int k = static_cast<int>(whole);
    if (k > 2) throw InvalidInput("besov_norm: orders above 2 are not supported");
    NormBreakdown out = sobolev_w2_norm(series, k, dt);
    if (frac > 1e-12) {
        std::vector<double> dk(series.begin(), series.end());
        if (k == 1) dk = derivative(series, dt);
        if (k == 2) dk = second_derivative(series, dt);
        out.fractional_seminorm = fractional_seminorm(dk, frac, dt);
        out.total += out.fractional_seminorm;
    }
    return out;
}

NormBreakdown anisotropic_norm_f(const SampledField& f, double alpha) {
    require_finite(f.values, "anisotropic_norm_f");
    if (f.nx < 2 || f.nt < 2) throw InvalidInput("anisotropic_norm_f: grid too coarse");
    const double tord = 0.25 + alpha;

    std::vector<double> fsq_t(static_cast<std::size_t>(f.nt) + 1);
    std::vector<double> fxsq_t(static_cast<std::size_t>(f.nt) + 1);
    std::vector<double> row(static_cast<std::size_t>(f.nx) + 1);
    for (int n = 0; n <= f.nt; ++n) {
        for (int i = 0; i <= f.nx; ++i) row[i] = f.at(i, n);
        const auto nb = sobolev_w2_norm(row, 1, f.dx());
        fsq_t[n] = nb.l2_part * nb.l2_part;
        fxsq_t[n] = nb.derivative_parts[0] * nb.derivative_parts[0];
    }

    std::vector<double> tnorm_sq(static_cast<std::size_t>(f.nx) + 1);
    std::vector<double> col(static_cast<std::size_t>(f.nt) + 1);
    for (int i = 0; i <= f.nx; ++i) {
        for (int n = 0; n <= f.nt; ++n) col[n] = f.at(i, n);
        const double nrm = besov_norm(col, tord, f.dt()).total;
        tnorm_sq[i] = nrm * nrm;
    }

    NormBreakdown out;
    out.l2_part = std::sqrt(trapezoid(fsq_t, f.dt()));
    out.derivative_parts.push_back(std::sqrt(trapezoid(fxsq_t, f.dt())));
    out.x_part = std::hypot(out.l2_part, out.derivative_parts[0]);
    out.t_part = std::sqrt(trapezoid(tnorm_sq, f.dx()));
    out.fractional_seminorm = 0.0;
    out.total = out.x_part + out.t_part;
    return out;
}

double ControlNorms::total() const { return std::max({f, g, s}); }

ControlNorms control_norms(const ControlVector& v, double alpha) {
    ControlNorms n;
    n.f = anisotropic_norm_f(v.f(), alpha).total;
    n.g = besov_norm(v.g(), 0.5 + alpha, v.dt()).total;
    n.s = sobolev_w2_norm(v.s(), 2, v.dt()).total;
    return n;
}

double control_norm_H(const ControlVector& v, double alpha) {
    return control_norms(v, alpha).total();
}

}  // namespace stefan::besov
