#include "stefan/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stefan/problem.hpp"

namespace stefan {

void CompensatedSum::add(double v) noexcept {
    const double s = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
        comp_ += (sum_ - s) + v;
    } else {
        comp_ += (v - s) + sum_;
    }
    sum_ = s;
}

double trapezoid(std::span<const double> f, double h) {
    if (f.size() < 2) return 0.0;
    CompensatedSum acc;
    acc.add(0.5 * f.front());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) acc.add(f[i]);
    acc.add(0.5 * f.back());
    return h * acc.value();
}

std::vector<double> trapezoid_weights(std::size_t nodes, double h) {
    std::vector<double> w(nodes, h);
    if (nodes > 0) {
        w.front() = 0.5 * h;
        w.back() = 0.5 * h;
    }
    if (nodes == 1) w.front() = 0.0;
    return w;
}

std::vector<double> derivative(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n < 3) throw InvalidInput("derivative: need at least 3 samples");
    std::vector<double> d(n);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

std::vector<double> second_derivative(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n < 4) throw InvalidInput("second_derivative: need at least 4 samples");
    const double h2 = h * h;
    std::vector<double> d(n);
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    return d;
}

double interpolate_uniform(std::span<const double> f, double h, double x) {
    const std::size_t n = f.size();
    if (n == 0) return 0.0;
    if (n == 1) return f[0];
    const double r = x / h;
    auto i = static_cast<std::ptrdiff_t>(std::floor(r));
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 2);
    const double frac = r - static_cast<double>(i);
    const auto k = static_cast<std::size_t>(i);
    return f[k] + frac * (f[k + 1] - f[k]);
}

double max_abs(std::span<const double> f) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace stefan
