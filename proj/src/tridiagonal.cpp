#include "mtfe/tridiagonal.hpp"

#include <cassert>

namespace mtfe {

std::vector<double> Tridiagonal::apply(std::span<const double> x) const {
  const std::size_t n = size();
  assert(x.size() == n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Neighbours are added as a pair so a mirrored matrix gives a bitwise mirrored product.
    double off = 0.0;
    if (i > 0) off += lower[i] * x[i - 1];
    if (i + 1 < n) off += upper[i] * x[i + 1];
    y[i] = diag[i] * x[i] + off;
  }
  return y;
}

bool Tridiagonal::solve(std::span<const double> rhs, std::vector<double>& out) const {
  const std::size_t n = size();
  assert(rhs.size() == n);
  out.assign(n, 0.0);
  if (n == 0) return true;

  // Eliminate from both ends towards the middle. Top rows give x_i = d_i - c_i x_{i+1}, bottom
  // rows give x_i = f_i - e_i x_{i-1}; the two sweeps are mirror images of each other.
  const bool odd = n % 2 == 1;
  const std::size_t top = odd ? (n - 1) / 2 : n / 2 - 1;  // first row not eliminated from above
  const std::size_t bottom = odd ? top : top + 1;          // last row not eliminated from below
  std::vector<double> c(n, 0.0), d(n, 0.0), e(n, 0.0), f(n, 0.0);
  for (std::size_t i = 0; i < top; ++i) {
    const double pivot = diag[i] - (i > 0 ? lower[i] * c[i - 1] : 0.0);
    if (pivot == 0.0) return false;
    c[i] = upper[i] / pivot;
    d[i] = (rhs[i] - (i > 0 ? lower[i] * d[i - 1] : 0.0)) / pivot;
  }
  for (std::size_t i = n - 1; i > bottom; --i) {
    const double pivot = diag[i] - (i + 1 < n ? upper[i] * e[i + 1] : 0.0);
    if (pivot == 0.0) return false;
    e[i] = lower[i] / pivot;
    f[i] = (rhs[i] - (i + 1 < n ? upper[i] * f[i + 1] : 0.0)) / pivot;
  }

  if (odd) {
    const std::size_t k = top;
    double pc = 0.0, rc = 0.0;
    if (k > 0) {
      pc += lower[k] * c[k - 1];
      rc += lower[k] * d[k - 1];
    }
    if (k + 1 < n) {
      pc += upper[k] * e[k + 1];
      rc += upper[k] * f[k + 1];
    }
    const double pivot = diag[k] - pc;
    if (pivot == 0.0) return false;
    out[k] = (rhs[k] - rc) / pivot;
  } else {
    // Remaining 2x2 block [p u; l q] [x_k; x_k+1] = [r; s], solved by Cramer's rule.
    const std::size_t k = top;
    const double p = diag[k] - (k > 0 ? lower[k] * c[k - 1] : 0.0);
    const double r = rhs[k] - (k > 0 ? lower[k] * d[k - 1] : 0.0);
    const double q = diag[k + 1] - (k + 2 < n ? upper[k + 1] * e[k + 2] : 0.0);
    const double s = rhs[k + 1] - (k + 2 < n ? upper[k + 1] * f[k + 2] : 0.0);
    const double u = upper[k], l = lower[k + 1];
    const double det = p * q - u * l;
    if (det == 0.0) return false;
    out[k] = (r * q - u * s) / det;
    out[k + 1] = (p * s - l * r) / det;
  }
  for (std::size_t i = top; i-- > 0;) out[i] = d[i] - c[i] * out[i + 1];
  for (std::size_t i = bottom + 1; i < n; ++i) out[i] = f[i] - e[i] * out[i - 1];
  return true;
}

Tridiagonal combine(double alpha, const Tridiagonal& a, double beta, const Tridiagonal& b) {
  assert(a.size() == b.size());
  Tridiagonal r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    r.lower[i] = alpha * a.lower[i] + beta * b.lower[i];
    r.diag[i] = alpha * a.diag[i] + beta * b.diag[i];
    r.upper[i] = alpha * a.upper[i] + beta * b.upper[i];
  }
  return r;
}

}  // namespace mtfe
