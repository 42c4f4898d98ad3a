#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stefan {

/// Neumaier-compensated accumulator. Summation order is fixed by the caller,
/// so results do not depend on how a loop is partitioned.
class CompensatedSum {
public:
    void add(double v) noexcept;
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Composite trapezoid rule on a uniform grid with spacing h.
double trapezoid(std::span<const double> f, double h);

/// Trapezoid weights (h/2, h, ..., h, h/2) for n+1 nodes.
std::vector<double> trapezoid_weights(std::size_t nodes, double h);

/// First derivative: second-order central differences inside, second-order
/// one-sided three-point stencils at both ends. Requires at least 3 samples.
std::vector<double> derivative(std::span<const double> f, double h);

/// Second derivative: three-point central differences inside, second-order
/// one-sided four-point stencils at both ends. Requires at least 4 samples.
std::vector<double> second_derivative(std::span<const double> f, double h);

/// Piecewise-linear interpolation of samples on [0, (n-1)h]; linear
/// extrapolation from the end segments outside that range.
double interpolate_uniform(std::span<const double> f, double h, double x);

double max_abs(std::span<const double> f);

}  // namespace stefan
