#include "mtfe/spline.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "mtfe/tridiagonal.hpp"

namespace mtfe {

ClampedSpline ClampedSpline::fit(double a, double b, std::span<const double> values) {
  const int N = static_cast<int>(values.size()) - 1;
  if (N < 3) throw std::invalid_argument("clamped spline needs at least 3 intervals");
  ClampedSpline s;
  s.knots_ = {a, b, N};
  s.h_ = (b - a) / N;
  s.y_.assign(values.begin(), values.end());

  // Moment equations; the end rows carry the zero-slope conditions. Sums are grouped so that
  // mirrored data give mirrored moments bit for bit.
  const double h = s.h_;
  Tridiagonal A(static_cast<std::size_t>(N + 1));
  std::vector<double> rhs(static_cast<std::size_t>(N + 1));
  A.diag[0] = 2.0;
  A.upper[0] = 1.0;
  rhs[0] = 6.0 / (h * h) * (values[1] - values[0]);
  for (int k = 1; k < N; ++k) {
    A.lower[k] = 1.0;
    A.diag[k] = 4.0;
    A.upper[k] = 1.0;
    rhs[k] = 6.0 / (h * h) * ((values[k + 1] + values[k - 1]) - 2.0 * values[k]);
  }
  A.lower[N] = 1.0;
  A.diag[N] = 2.0;
  rhs[N] = 6.0 / (h * h) * (values[N - 1] - values[N]);
  A.solve(rhs, s.moments_);
  return s;
}

double ClampedSpline::slope_on(int k, double t, double u) const {
  return (moments_[k + 1] * t * t - moments_[k] * u * u) * h_ / 2.0 + (y_[k + 1] - y_[k]) / h_ -
         (moments_[k + 1] - moments_[k]) * h_ / 6.0;
}

double ClampedSpline::operator()(double x) const {
  x = std::clamp(x, a(), b());
  const int k = knots_.element(x);
  const double xl = knots_.node(k), xr = knots_.node(k + 1);
  if (x == xl) return y_[k];
  if (x == xr) return y_[k + 1];
  const double t = (x - xl) / h_, u = (xr - x) / h_, h2 = h_ * h_;
  return (moments_[k] * u * u * u * h2 / 6.0 + moments_[k + 1] * t * t * t * h2 / 6.0) +
         ((y_[k] - moments_[k] * h2 / 6.0) * u + (y_[k + 1] - moments_[k + 1] * h2 / 6.0) * t);
}

double ClampedSpline::derivative(double x) const {
  // Queries outside [a,b] see the clamped end slope, which is zero.
  if (x < a() || x > b()) return 0.0;
  const int N = intervals();
  const int k = knots_.element(x);
  const double xl = knots_.node(k), xr = knots_.node(k + 1);
  // At an interior knot both one-sided formulas agree up to rounding; averaging them keeps
  // the slope odd under reflection (zero at a symmetric centre knot).
  if (x == xl && k > 0) return 0.5 * (slope_on(k - 1, 1.0, 0.0) + slope_on(k, 0.0, 1.0));
  if (x == xr && k + 1 < N) return 0.5 * (slope_on(k, 1.0, 0.0) + slope_on(k + 1, 0.0, 1.0));
  return slope_on(k, (x - xl) / h_, (xr - x) / h_);
}

std::vector<double> ClampedSpline::derivative(std::span<const double> xs) const {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = derivative(xs[i]);
  return out;
}

ClampedSpline fit_clamped_spline(const FeField& field) {
  const auto values = field.node_values();
  return ClampedSpline::fit(field.grid.a, field.grid.b, values);
}

}  // namespace mtfe
