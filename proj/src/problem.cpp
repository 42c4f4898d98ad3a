#include "stefan/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "stefan/besov.hpp"
#include "stefan/series.hpp"

namespace stefan {

Grid::Grid(int n_y, int n_t, double T) : n_y_(n_y), n_t_(n_t), T_(T) {
    if (n_y < 4) throw InvalidInput("Grid: n_y must be at least 4");
    if (n_t < 4) throw InvalidInput("Grid: n_t must be at least 4");
    if (!(T > 0.0) || !std::isfinite(T)) throw InvalidInput("Grid: T must be positive");
}

SampledField::SampledField(double x_max_, double t_max_, int nx_, int nt_, double fill)
    : x_max(x_max_), t_max(t_max_), nx(nx_), nt(nt_),
      values(static_cast<std::size_t>(nx_ + 1) * static_cast<std::size_t>(nt_ + 1), fill) {
    if (nx < 1 || nt < 1) throw InvalidInput("SampledField: need at least one interval per axis");
    if (!(x_max > 0.0) || !(t_max > 0.0)) throw InvalidInput("SampledField: extents must be positive");
}

namespace {

// Cell index and fractional offset of coordinate v on [0, n*h], clamped.
std::pair<int, double> locate(double v, double h, int n) {
    double r = v / h;
    r = std::clamp(r, 0.0, static_cast<double>(n));
    int i = static_cast<int>(std::floor(r));
    if (i >= n) i = n - 1;
    return {i, r - i};
}

}  // namespace

double SampledField::interpolate(double x, double t) const {
    const auto [i, fx] = locate(x, dx(), nx);
    const auto [n, ft] = locate(t, dt(), nt);
    const double v00 = at(i, n), v10 = at(i + 1, n);
    const double v01 = at(i, n + 1), v11 = at(i + 1, n + 1);
    return (1.0 - ft) * ((1.0 - fx) * v00 + fx * v10) + ft * ((1.0 - fx) * v01 + fx * v11);
}

double SampledField::interpolate_dx(double x, double t) const {
    const double h = dx();
    const double lo = std::max(0.0, x - h);
    const double hi = std::min(x_max, x + h);
    return (interpolate(hi, t) - interpolate(lo, t)) / (hi - lo);
}

Field::Field(double constant) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", std::abs(constant));
    expr_ = exprs::parse(constant < 0 ? "-" + std::string(buf) : std::string(buf));
}

Field::Field(exprs::Expr e) : expr_(std::move(e)) {}

Field::Field(SampledField table) : table_(std::move(table)) {}

double Field::operator()(double x, double t) const {
    return table_ ? table_->interpolate(x, t) : expr_.eval(x, t);
}

double Field::dx(double x, double t) const {
    return table_ ? table_->interpolate_dx(x, t) : expr_.eval_dx(x, t).d;
}

Curve::Curve(double constant, Var var) : var_(var) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", std::abs(constant));
    expr_ = exprs::parse(constant < 0 ? "-" + std::string(buf) : std::string(buf));
}

Curve::Curve(exprs::Expr e, Var var) : expr_(std::move(e)), var_(var) {}

Curve::Curve(std::vector<double> samples, double spacing)
    : samples_(std::move(samples)), spacing_(spacing) {
    if (samples_.size() < 2) throw InvalidInput("Curve: a table needs at least two samples");
    if (!(spacing_ > 0.0)) throw InvalidInput("Curve: table spacing must be positive");
}

double Curve::operator()(double s) const {
    if (!samples_.empty()) return interpolate_uniform(samples_, spacing_, s);
    return var_ == Var::X ? expr_.eval(s, 0.0) : expr_.eval(0.0, s);
}

double Curve::derivative(double s) const {
    if (!samples_.empty()) {
        const double h = spacing_;
        const double top = h * static_cast<double>(samples_.size() - 1);
        const double lo = std::clamp(s - h, 0.0, top - h);
        const double hi = std::clamp(s + h, h, top);
        return (interpolate_uniform(samples_, h, hi) - interpolate_uniform(samples_, h, lo)) /
               (hi - lo);
    }
    return var_ == Var::X ? expr_.eval_dx(s, 0.0).d : expr_.eval_dt(0.0, s).d;
}

void ProblemData::check() const {
    auto finite_pos = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!finite_pos(T)) throw InvalidInput("ProblemData: T must be positive");
    if (!finite_pos(delta)) throw InvalidInput("ProblemData: delta must be positive");
    if (!(delta <= s0 && s0 <= ell)) throw InvalidInput("ProblemData: need 0 < delta <= s0 <= ell");
    if (!finite_pos(R)) throw InvalidInput("ProblemData: R must be positive");
    if (!finite_pos(alpha)) throw InvalidInput("ProblemData: alpha must be positive");
    if (!(beta0 >= 0.0 && beta1 >= 0.0 && beta2 >= 0.0))
        throw InvalidInput("ProblemData: cost weights must be nonnegative");
    if (!std::isfinite(s_star)) throw InvalidInput("ProblemData: s_star must be finite");
}

double ProblemData::g_anchor() const { return a(0.0, 0.0) * phi.derivative(0.0); }

ControlVector::ControlVector(SampledField f, std::vector<double> g, std::vector<double> s)
    : f_(std::move(f)), g_(std::move(g)), s_(std::move(s)) {
    if (s_.size() < 5 || g_.size() != s_.size())
        throw InvalidInput("ControlVector: g and s need the same length, at least 5 samples");
    if (f_.nt + 1 != static_cast<int>(s_.size()))
        throw InvalidInput("ControlVector: f must share the time nodes of g and s");
    auto finite = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    if (!finite(g_) || !finite(s_) || !finite(f_.values))
        throw InvalidInput("ControlVector: non-finite samples");
    s_prime_ = derivative(s_, dt());
}

void ControlVector::check_compatible(const Grid& grid, const ProblemData& data) const {
    if (n_t() != grid.n_t())
        throw InvalidInput("ControlVector: time sampling does not match the grid");
    if (std::abs(T() - grid.T()) > 1e-12 * grid.T())
        throw InvalidInput("ControlVector: final time does not match the grid");
    if (std::abs(f_.x_max - data.ell) > 1e-12 * data.ell)
        throw InvalidInput("ControlVector: f must be sampled on [0, ell]");
}

ControlVector ControlVector::axpby(double a, const ControlVector& other, double b) const {
    if (other.s_.size() != s_.size() || other.f_.values.size() != f_.values.size())
        throw InvalidInput("ControlVector::axpby: sampling mismatch");
    SampledField f = f_;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        f.values[i] = a * f_.values[i] + b * other.f_.values[i];
    std::vector<double> g(g_.size()), s(s_.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        g[i] = a * g_[i] + b * other.g_[i];
        s[i] = a * s_[i] + b * other.s_[i];
    }
    return ControlVector(std::move(f), std::move(g), std::move(s));
}

ControlVector sample_control(const ProblemData& data, int n_x, int n_t, const exprs::Expr& f,
                             const exprs::Expr& g, const exprs::Expr& s) {
    SampledField fs(data.ell, data.T, n_x, n_t);
    for (int n = 0; n <= n_t; ++n)
        for (int i = 0; i <= n_x; ++i) fs.at(i, n) = f.eval(fs.x(i), fs.t(n));
    std::vector<double> gs(static_cast<std::size_t>(n_t) + 1), ss(gs.size());
    for (int n = 0; n <= n_t; ++n) {
        const double t = fs.t(n);
        gs[n] = g.eval(0.0, t);
        ss[n] = s.eval(0.0, t);
    }
    return ControlVector(std::move(fs), std::move(gs), std::move(ss));
}

const Violation* MembershipReport::find(const std::string& name) const {
    for (const auto& v : violations)
        if (v.constraint == name) return &v;
    return nullptr;
}

MembershipReport validate_control(const ControlVector& v, const ProblemData& data,
                                  ControlTolerance tol) {
    MembershipReport rep;
    if (v.s().empty()) throw InvalidInput("validate_control: empty control");

    const double ds0 = std::abs(v.s().front() - data.s0);
    if (ds0 > tol.anchor) rep.violations.push_back({"anchor_s0", ds0});
    const double dsp0 = std::abs(v.s_prime().front());
    if (dsp0 > tol.anchor) rep.violations.push_back({"anchor_sprime0", dsp0});
    const double dg0 = std::abs(v.g().front() - data.g_anchor());
    if (dg0 > tol.anchor) rep.violations.push_back({"anchor_g0", dg0});

    double low = 0.0, high = 0.0;
    for (double s : v.s()) {
        low = std::max(low, data.delta - s);
        high = std::max(high, s - data.ell);
    }
    if (low > tol.anchor) rep.violations.push_back({"box_lower", low});
    if (high > tol.anchor) rep.violations.push_back({"box_upper", high});

    const double norm = besov::control_norm_H(v, data.alpha);
    if (norm > data.R * (1.0 + tol.norm_rel)) rep.violations.push_back({"norm_ball", norm - data.R});
    return rep;
}

double compatibility_residual(const ProblemData& data, double dy) {
    const double h = dy * data.s0;
    const double dphi = (data.phi(data.s0 + h) - data.phi(data.s0 - h)) / (2.0 * h);
    return std::abs(data.chi(data.s0, 0.0) - dphi * data.a(data.s0, 0.0));
}

}  // namespace stefan
