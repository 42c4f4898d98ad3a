#include "stefan/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "stefan/series.hpp"

namespace stefan::verify {

ControlVector ManufacturedCase::control(const Grid& grid, int n_x) const {
    return sample_control(data, n_x, grid.n_t(), f, g, s);
}

double ManufacturedCase::max_error(const StateField& state, const Grid& grid) const {
    double err = 0.0;
    for (int n = 0; n <= grid.n_t(); ++n) {
        const double t = grid.t(n);
        const double sn = s.eval(0.0, t);
        for (int j = 0; j <= grid.n_y(); ++j)
            err = std::max(err, std::abs(state.u(j, n) - exact_u.eval(grid.y(j) * sn, t)));
    }
    return err;
}

std::vector<ManufacturedCase> builtin_cases() {
    using exprs::parse;
    std::vector<ManufacturedCase> cases;

    ManufacturedCase steady;
    steady.name = "constant";
    steady.data.a = Field(1.0);
    steady.data.phi = Curve(1.0, Curve::Var::X);
    steady.data.ell = 2.0;
    steady.f = parse("0");
    steady.g = parse("0");
    steady.s = parse("1");
    steady.exact_u = parse("1");
    cases.push_back(steady);

    // u* = exp(-t) cos(pi x): u_xx - u_t = (1 - pi^2) u*, zero flux at x = 0 and x = 1.
    ManufacturedCase fixed;
    fixed.name = "fixed_domain";
    fixed.data.a = Field(1.0);
    fixed.data.phi = Curve::parse("cos(pi*x)", Curve::Var::X);
    fixed.data.ell = 2.0;
    fixed.data.R = 100.0;
    fixed.f = parse("(1 - pi^2)*exp(-t)*cos(pi*x)");
    fixed.g = parse("0");
    fixed.s = parse("1");
    fixed.exact_u = parse("exp(-t)*cos(pi*x)");
    cases.push_back(fixed);

    // u* = x^2, s = 1 + t^2/2: f = u_xx - u_t = 2, a u_x(0) = 0 and at x = s
    // a u_x + gamma s' = 2 s + t = chi(s, t).
    ManufacturedCase moving;
    moving.name = "moving_boundary";
    moving.data.a = Field(1.0);
    moving.data.gamma = Field(1.0);
    moving.data.chi = Field::parse("2*x + t");
    moving.data.phi = Curve::parse("x^2", Curve::Var::X);
    moving.data.ell = 2.0;
    moving.f = parse("2");
    moving.g = parse("0");
    moving.s = parse("1 + t^2/2");
    moving.exact_u = parse("x^2");
    cases.push_back(moving);
    return cases;
}

const ManufacturedCase& builtin_case(const std::string& name) {
    static const std::vector<ManufacturedCase> cases = builtin_cases();
    for (const auto& c : cases)
        if (c.name == name) return c;
    throw InvalidInput("unknown manufactured case: " + name);
}

namespace {

void require_admissible(const ControlVector& v, const ProblemData& data, const char* which) {
    const auto rep = validate_control(v, data);
    for (const auto& viol : rep.violations) {
        if (viol.constraint == "norm_ball") continue;
        throw InvalidInput(std::string("fd_directional_derivative: ") + which +
                           " perturbation violates " + viol.constraint + " (by " +
                           std::to_string(viol.magnitude) + ")");
    }
}

}  // namespace

double fd_directional_derivative(const ProblemData& data, const Grid& grid, const ControlVector& v,
                                 const ControlIncrement& dv, double h, SolverOptions opts) {
    if (!(h > 0.0)) throw InvalidInput("fd_directional_derivative: h must be positive");
    const ControlVector plus = add_scaled(v, dv, h);
    const ControlVector minus = add_scaled(v, dv, -h);
    require_admissible(plus, data, "positive");
    require_admissible(minus, data, "negative");
    const double jp = cost_of_control(plus, data, grid, opts).total;
    const double jm = cost_of_control(minus, data, grid, opts).total;
    return (jp - jm) / (2.0 * h);
}

Measurements synthesize_measurements(const ControlVector& v_true, const ProblemData& data,
                                     const Grid& grid, double noise_level, std::uint64_t seed) {
    if (noise_level < 0.0) throw InvalidInput("synthesize_measurements: negative noise level");
    const StateField st = solve_forward(v_true, data, grid);
    std::vector<double> w = st.final_profile;
    std::vector<double> mu = st.trace_free;
    if (noise_level > 0.0) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        const double aw = noise_level * max_abs(w);
        for (double& x : w) x += aw * unit(rng);
        const double am = noise_level * max_abs(mu);
        for (double& x : mu) x += am * unit(rng);
    }
    const double sT = v_true.s().back();
    Measurements m;
    m.w = Curve(std::move(w), sT * grid.dy());
    m.mu = Curve(std::move(mu), grid.dt());
    m.s_star = sT;
    return m;
}

ControlVector SyntheticCase::sample(const exprs::Expr& f, const exprs::Expr& g,
                                    const exprs::Expr& s) const {
    return sample_control(data, n_x, grid.n_t(), f, g, s);
}

ProblemData synthetic_problem_data() {
    ProblemData d;
    d.a = Field::parse("1 + 0.1*x");
    d.b = Field(0.2);
    d.c = Field(-0.5);
    d.gamma = Field::parse("1 + 0.1*x");
    // chi(s0, 0) = phi'(s0) a(s0, 0) = 0.
    d.chi = Field::parse("0.5*(1 - x) + 0.3*t");
    d.phi = Curve::parse("1 + 0.5*x - 0.25*x^2", Curve::Var::X);
    d.beta0 = 1.0;
    d.beta1 = 1.0;
    d.beta2 = 1.0;
    d.s0 = 1.0;
    d.delta = 0.5;
    d.ell = 2.0;
    d.R = 100.0;
    d.alpha = 0.25;
    d.T = 1.0;
    return d;
}

SyntheticCase make_synthetic_case(const SyntheticOptions& opts) {
    return make_synthetic_case(synthetic_problem_data(), exprs::parse("0.5*sin(x)*cos(t)"),
                               exprs::parse("0.5 + t"), exprs::parse("1 + 0.2*t^2"), opts);
}

SyntheticCase make_synthetic_case(ProblemData base, const exprs::Expr& f_true,
                                  const exprs::Expr& g_true, const exprs::Expr& s_true,
                                  const SyntheticOptions& opts) {
    if (opts.generation_refinement != 1 && opts.generation_refinement != 2)
        throw InvalidInput("make_synthetic_case: generation_refinement must be 1 or 2");
    base.check();
    const Grid grid(opts.n_y, opts.n_t, base.T);
    const int r = opts.generation_refinement;
    const Grid gen_grid = grid.refined(r);
    const ControlVector gen_truth =
        sample_control(base, opts.n_x * r, gen_grid.n_t(), f_true, g_true, s_true);
    const Measurements m =
        synthesize_measurements(gen_truth, base, gen_grid, opts.noise_level, opts.seed);
    base.w = m.w;
    base.mu = m.mu;
    base.s_star = m.s_star;

    SyntheticCase sc{base, grid, opts.n_x, f_true, g_true, s_true, {}};
    sc.truth = sc.sample(f_true, g_true, s_true);
    return sc;
}

std::vector<ControlVector> random_feasible_candidates(const ControlVector& v,
                                                      const ProblemData& data,
                                                      const CandidateOptions& opts) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double pi = std::acos(-1.0);
    const double T = v.T();
    const double ell = v.f().x_max;
    std::vector<ControlVector> out;
    out.reserve(static_cast<std::size_t>(opts.count));
    for (int c = 0; c < opts.count; ++c) {
        ControlIncrement d = ControlIncrement::zero_like(v);
        double cf[3][3], cg[3], cs[3];
        for (auto& row : cf)
            for (double& x : row) x = unit(rng);
        for (double& x : cg) x = unit(rng);
        for (double& x : cs) x = unit(rng);
        for (int n = 0; n <= v.n_t(); ++n) {
            const double t = d.df.t(n);
            if (opts.vary_f)
                for (int i = 0; i <= d.df.nx; ++i) {
                    const double x = d.df.x(i);
                    double sum = 0.0;
                    for (int p = 0; p < 3; ++p)
                        for (int q = 0; q < 3; ++q)
                            sum += cf[p][q] * std::cos(p * pi * x / ell) * std::cos(q * pi * t / T);
                    d.df.at(i, n) = opts.amplitude * sum / 3.0;
                }
            if (opts.vary_g) {
                double sum = 0.0;
                for (int k = 0; k < 3; ++k) sum += cg[k] * std::sin((k + 1) * pi * t / (2.0 * T));
                d.dg[n] = opts.amplitude * sum / 3.0;
            }
            if (opts.vary_s) {
                const double r = t / T;
                d.ds[n] = opts.amplitude * r * r * (cs[0] + cs[1] * r + cs[2] * r * r) / 3.0;
            }
        }
        out.push_back(project(add_scaled(v, d, 1.0), data));
    }
    return out;
}

}  // namespace stefan::verify
