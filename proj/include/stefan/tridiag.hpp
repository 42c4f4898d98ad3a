#pragma once

#include <span>
#include <vector>

namespace stefan {

/// Tridiagonal matrix in three-vector storage. lower[0] and upper[n-1] are unused.
struct Tridiagonal {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;

    Tridiagonal() = default;
    explicit Tridiagonal(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}

    std::size_t size() const noexcept { return diag.size(); }

    std::vector<double> apply(std::span<const double> x) const;

    /// Weakly diagonally dominant by rows.
    bool diagonally_dominant() const;
};

/// Solves A x = rhs. Uses the Thomas algorithm when A is diagonally dominant
/// and banded LU with partial pivoting otherwise. Throws SolverError on a
/// zero pivot.
std::vector<double> solve_tridiagonal(const Tridiagonal& A, std::span<const double> rhs);

/// Banded LU with partial pivoting; always pivots.
std::vector<double> solve_tridiagonal_pivoting(const Tridiagonal& A, std::span<const double> rhs);

}  // namespace stefan
