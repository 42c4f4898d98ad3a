#include "stefan/tridiag.hpp"

#include <cmath>
#include <utility>

#include "stefan/problem.hpp"

namespace stefan {

std::vector<double> Tridiagonal::apply(std::span<const double> x) const {
    const std::size_t n = size();
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double v = diag[i] * x[i];
        if (i > 0) v += lower[i] * x[i - 1];
        if (i + 1 < n) v += upper[i] * x[i + 1];
        y[i] = v;
    }
    return y;
}

bool Tridiagonal::diagonally_dominant() const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        double off = 0.0;
        if (i > 0) off += std::abs(lower[i]);
        if (i + 1 < n) off += std::abs(upper[i]);
        if (std::abs(diag[i]) < off) return false;
    }
    return true;
}

std::vector<double> solve_tridiagonal(const Tridiagonal& A, std::span<const double> rhs) {
    if (!A.diagonally_dominant()) return solve_tridiagonal_pivoting(A, rhs);

    const std::size_t n = A.size();
    std::vector<double> c(n, 0.0), d(n, 0.0), x(n, 0.0);
    double m = A.diag[0];
    if (m == 0.0) throw SolverError("tridiagonal solve: zero pivot in row 0");
    c[0] = n > 1 ? A.upper[0] / m : 0.0;
    d[0] = rhs[0] / m;
    for (std::size_t i = 1; i < n; ++i) {
        m = A.diag[i] - A.lower[i] * c[i - 1];
        if (m == 0.0 || !std::isfinite(m))
            throw SolverError("tridiagonal solve: zero pivot in row " + std::to_string(i));
        c[i] = i + 1 < n ? A.upper[i] / m : 0.0;
        d[i] = (rhs[i] - A.lower[i] * d[i - 1]) / m;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

std::vector<double> solve_tridiagonal_pivoting(const Tridiagonal& A, std::span<const double> rhs) {
    // Row i of U holds (u0, u1, u2) at columns (i, i+1, i+2) after elimination.
    const std::size_t n = A.size();
    std::vector<double> u0(n, 0.0), u1(n, 0.0), u2(n, 0.0), b(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i < n; ++i) {
        u0[i] = A.diag[i];
        u1[i] = i + 1 < n ? A.upper[i] : 0.0;
    }
    std::vector<double> low(A.lower);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        // Candidate rows: i (u0,u1,u2) and i+1 (low[i+1], u0[i+1], u1[i+1]).
        if (std::abs(low[i + 1]) > std::abs(u0[i])) {
            std::swap(u0[i], low[i + 1]);
            std::swap(u1[i], u0[i + 1]);
            std::swap(u2[i], u1[i + 1]);
            std::swap(b[i], b[i + 1]);
        }
        if (u0[i] == 0.0) throw SolverError("tridiagonal solve: singular at row " + std::to_string(i));
        const double f = low[i + 1] / u0[i];
        u0[i + 1] -= f * u1[i];
        u1[i + 1] -= f * u2[i];
        b[i + 1] -= f * b[i];
    }
    if (u0[n - 1] == 0.0 || !std::isfinite(u0[n - 1]))
        throw SolverError("tridiagonal solve: singular at row " + std::to_string(n - 1));
    std::vector<double> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double v = b[i];
        if (i + 1 < n) v -= u1[i] * x[i + 1];
        if (i + 2 < n) v -= u2[i] * x[i + 2];
        x[i] = v / u0[i];
    }
    return x;
}

}  // namespace stefan
