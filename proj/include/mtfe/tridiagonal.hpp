#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mtfe {

/// Tridiagonal matrix stored by diagonals. lower[0] and upper[n-1] are unused.
struct Tridiagonal {
  std::vector<double> lower, diag, upper;

  Tridiagonal() = default;
  explicit Tridiagonal(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}

  std::size_t size() const { return diag.size(); }

  /// y = A x
  std::vector<double> apply(std::span<const double> x) const;

  /// Two-sided Thomas elimination meeting in the middle, so a system that is symmetric under
  /// reversal of the unknowns yields a bitwise mirrored solution. No pivoting: intended for
  /// diagonally dominant or SPD systems. Returns false if a zero pivot is met.
  bool solve(std::span<const double> rhs, std::vector<double>& out) const;
};

/// Linear combination alpha*A + beta*B of two matrices with equal size.
Tridiagonal combine(double alpha, const Tridiagonal& a, double beta, const Tridiagonal& b);

}  // namespace mtfe
