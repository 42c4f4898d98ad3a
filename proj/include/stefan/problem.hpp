#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stefan/exprs.hpp"

namespace stefan {

class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure inside a solver (singular system, non-finite coefficients).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Uniform discretisation of the unit rectangle (0,1) x (0,T] on which both
/// the state and the adjoint are computed. y-node 0 is x = 0, y-node n_y is
/// the free boundary x = s(t).
class Grid {
public:
    Grid(int n_y, int n_t, double T);

    int n_y() const noexcept { return n_y_; }
    int n_t() const noexcept { return n_t_; }
    double T() const noexcept { return T_; }
    double dy() const noexcept { return 1.0 / n_y_; }
    double dt() const noexcept { return T_ / n_t_; }
    double y(int j) const noexcept { return j * dy(); }
    double t(int n) const noexcept { return n == n_t_ ? T_ : n * dt(); }

    /// Same T, both counts multiplied by factor.
    Grid refined(int factor) const { return Grid(n_y_ * factor, n_t_ * factor, T_); }

private:
    int n_y_;
    int n_t_;
    double T_;
};

/// Samples on a uniform grid over [0, x_max] x [0, t_max], stored time-major.
/// Evaluated off-grid by bilinear interpolation; clamped outside the box.
struct SampledField {
    double x_max = 1.0;
    double t_max = 1.0;
    int nx = 1;  // intervals in x
    int nt = 1;  // intervals in t
    std::vector<double> values;

    SampledField() = default;
    SampledField(double x_max, double t_max, int nx, int nt, double fill = 0.0);

    double dx() const noexcept { return x_max / nx; }
    double dt() const noexcept { return t_max / nt; }
    double x(int i) const noexcept { return i * dx(); }
    double t(int n) const noexcept { return n == nt ? t_max : n * dt(); }

    double& at(int i, int n) { return values[static_cast<std::size_t>(n) * (nx + 1) + i]; }
    double at(int i, int n) const { return values[static_cast<std::size_t>(n) * (nx + 1) + i]; }

    double interpolate(double x, double t) const;
    /// Central difference in x of the bilinear interpolant (one-sided at the edges).
    double interpolate_dx(double x, double t) const;
};

/// A scalar coefficient a(x,t): either a closed-form expression or a table.
class Field {
public:
    Field() : Field(0.0) {}
    explicit Field(double constant);
    explicit Field(exprs::Expr e);
    explicit Field(SampledField table);

    static Field parse(const std::string& src) { return Field(exprs::parse(src)); }

    double operator()(double x, double t) const;
    /// Exact x-derivative for expressions, central differences for tables.
    double dx(double x, double t) const;

    bool is_expression() const noexcept { return !table_.has_value(); }
    const exprs::Expr& expr() const { return expr_; }

private:
    exprs::Expr expr_;
    std::optional<SampledField> table_;
};

/// A function of one variable (x for phi and w, t for mu): an expression or
/// a table with linear interpolation and linear extrapolation.
class Curve {
public:
    enum class Var { X, T };

    Curve() : Curve(0.0) {}
    explicit Curve(double constant, Var var = Var::X);
    Curve(exprs::Expr e, Var var);
    /// Uniformly spaced samples: node i sits at i * spacing.
    Curve(std::vector<double> samples, double spacing);

    static Curve parse(const std::string& src, Var var) { return Curve(exprs::parse(src), var); }

    double operator()(double s) const;
    double derivative(double s) const;

    bool is_table() const noexcept { return !samples_.empty(); }
    const std::vector<double>& samples() const noexcept { return samples_; }
    double spacing() const noexcept { return spacing_; }

private:
    exprs::Expr expr_;
    Var var_ = Var::X;
    std::vector<double> samples_;
    double spacing_ = 0.0;
};

/// Coefficients, data and control-set constants of the free boundary problem.
struct ProblemData {
    Field a{1.0};
    Field b{0.0};
    Field c{0.0};
    Field gamma{0.0};
    Field chi{0.0};
    Curve phi{0.0, Curve::Var::X};  // initial temperature on [0, s0]
    Curve w{0.0, Curve::Var::X};    // final-moment temperature on [0, s(T)]
    Curve mu{0.0, Curve::Var::T};   // phase transition temperature on [0, T]

    double beta0 = 1.0;
    double beta1 = 1.0;
    double beta2 = 1.0;

    double s0 = 1.0;
    double s_star = 1.0;
    double delta = 0.5;
    double ell = 2.0;
    double R = 10.0;
    double alpha = 0.25;
    double T = 1.0;

    /// Throws InvalidInput when the scalar constants are inconsistent.
    void check() const;

    /// Required value of g(0): a(0,0) phi'(0).
    double g_anchor() const;
};

/// The control v = (f, g, s). f lives on the rectangle D = [0, ell] x [0, T];
/// g and s are sampled on the time nodes; s' is derived from s.
class ControlVector {
public:
    ControlVector() = default;
    ControlVector(SampledField f, std::vector<double> g, std::vector<double> s);

    const SampledField& f() const noexcept { return f_; }
    const std::vector<double>& g() const noexcept { return g_; }
    const std::vector<double>& s() const noexcept { return s_; }
    const std::vector<double>& s_prime() const noexcept { return s_prime_; }

    int n_t() const noexcept { return static_cast<int>(s_.size()) - 1; }
    double T() const noexcept { return f_.t_max; }
    double dt() const noexcept { return T() / n_t(); }

    /// Throws InvalidInput unless the sampling matches the grid and the data geometry.
    void check_compatible(const Grid& grid, const ProblemData& data) const;

    /// Componentwise a*this + b*other (same sampling required).
    ControlVector axpby(double a, const ControlVector& other, double b) const;

private:
    SampledField f_;
    std::vector<double> g_;
    std::vector<double> s_;
    std::vector<double> s_prime_;
};

/// Builds a control by sampling closed forms: f(x,t), g(t), s(t).
ControlVector sample_control(const ProblemData& data, int n_x, int n_t, const exprs::Expr& f,
                             const exprs::Expr& g, const exprs::Expr& s);

struct Violation {
    std::string constraint;
    double magnitude = 0.0;
};

struct MembershipReport {
    std::vector<Violation> violations;
    bool is_member() const noexcept { return violations.empty(); }
    const Violation* find(const std::string& name) const;
};

struct ControlTolerance {
    double anchor = 1e-9;     // absolute, for s(0), s'(0), g(0) and the box
    double norm_rel = 1e-12;  // relative, for the norm ball
};

/// Checks v against the control set: anchors, box on s, and the norm ball.
/// Constraints are checked at grid nodes only.
MembershipReport validate_control(const ControlVector& v, const ProblemData& data,
                                  ControlTolerance tol = {});

/// |chi(s0,0) - phi'(s0) a(s0,0)|, with phi' from a central difference of step dy*s0.
double compatibility_residual(const ProblemData& data, double dy = 1.0 / 128);

}  // namespace stefan
