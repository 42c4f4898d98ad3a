#pragma once

#include "stefan/gradient.hpp"
#include "stefan/series.hpp"
#include "stefan/verify.hpp"

namespace fixture {

using namespace stefan;

/// The synthetic problem together with a control away from the truth.
struct Mismatch {
    verify::SyntheticCase sc;
    ControlVector v;
};

inline Mismatch mismatch(int n_y, int n_t, int n_x) {
    Mismatch m{verify::make_synthetic_case({.n_y = n_y, .n_t = n_t, .n_x = n_x}), {}};
    m.v = m.sc.sample(exprs::parse("0.5*sin(x)*cos(t) + 0.3*x*t"), exprs::parse("0.5 + 0.5*t"),
                      exprs::parse("1 + 0.1*t^2"));
    return m;
}

/// Increment sampled from closed forms, matching v's sampling.
inline ControlIncrement increment(const ControlVector& v, const char* df, const char* dg,
                                  const char* ds) {
    ControlIncrement d = ControlIncrement::zero_like(v);
    const auto ef = exprs::parse(df), eg = exprs::parse(dg), es = exprs::parse(ds);
    for (int n = 0; n <= v.n_t(); ++n) {
        const double t = d.df.t(n);
        for (int i = 0; i <= d.df.nx; ++i) d.df.at(i, n) = ef.eval(d.df.x(i), t);
        d.dg[n] = eg.eval(0.0, t);
        d.ds[n] = es.eval(0.0, t);
    }
    return d;
}

inline GradientVector zero_gradient(const ControlVector& v) {
    GradientVector g;
    g.s = v.s();
    g.g_f = SampledField(v.f().x_max, v.f().t_max, v.f().nx, v.f().nt);
    const auto n = v.s().size();
    g.g_f_edge.assign(n, 0.0);
    g.g_g.assign(n, 0.0);
    g.g_s.assign(n, 0.0);
    g.g_sprime.assign(n, 0.0);
    return g;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace fixture
