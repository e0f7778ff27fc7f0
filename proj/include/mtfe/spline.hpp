#pragma once

#include <span>
#include <vector>

#include "mtfe/grids.hpp"

namespace mtfe {

/// Cubic interpolant on uniform knots with zero slope at both ends.
class ClampedSpline {
 public:
  ClampedSpline() = default;

  /// values holds the data at the N+1 knots a, a+h, ..., b.
  static ClampedSpline fit(double a, double b, std::span<const double> values);

  double operator()(double x) const;
  double derivative(double x) const;
  std::vector<double> derivative(std::span<const double> xs) const;

  double a() const { return knots_.a; }
  double b() const { return knots_.b; }
  int intervals() const { return knots_.N; }

 private:
  // Slope on interval k at local coordinates t = (x - x_k)/h and u = (x_{k+1} - x)/h.
  double slope_on(int k, double t, double u) const;

  EulerGrid knots_;
  double h_ = 1.0;
  std::vector<double> y_;
  std::vector<double> moments_;  // second derivatives at the knots
};

ClampedSpline fit_clamped_spline(const FeField& field);

}  // namespace mtfe
