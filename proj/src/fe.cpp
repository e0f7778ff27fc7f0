#include "mtfe/fe.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace mtfe {

FeMatrices assemble_fe_matrices(const EulerGrid& grid) {
  const int N = grid.N;
  if (N < 3) throw std::invalid_argument("FE grid needs N >= 3");
  const double dx = grid.dx();
  const auto n = static_cast<std::size_t>(N - 1);
  FeMatrices m{Tridiagonal(n), Tridiagonal(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const bool boundary = (i == 0 || i + 1 == n);
    // Boundary functions carry a flat piece of length dx and a single ramp.
    m.mass.diag[i] = boundary ? 4.0 * dx / 3.0 : 2.0 * dx / 3.0;
    m.stiffness.diag[i] = boundary ? 1.0 / dx : 2.0 / dx;
    if (i > 0) {
      m.mass.lower[i] = dx / 6.0;
      m.stiffness.lower[i] = -1.0 / dx;
    }
    if (i + 1 < n) {
      m.mass.upper[i] = dx / 6.0;
      m.stiffness.upper[i] = -1.0 / dx;
    }
  }
  return m;
}

namespace {

// Sums a position-ordered list by pairing entries from both ends, so the reversed list (what a
// mirrored element sees) produces the same bits.
double outside_in_sum(const std::vector<double>& v) {
  double s = 0.0;
  std::size_t i = 0, j = v.size();
  while (j - i >= 2) s += v[i++] + v[--j];
  if (j > i) s += v[i];
  return s;
}

}  // namespace

std::vector<std::vector<double>> overlay_quadrature(const EulerGrid& grid,
                                                    const PiecewiseConstantDensity& density,
                                                    std::span<const FeField> fields,
                                                    std::span<const PointIntegrand> integrands) {
  const int N = grid.N;
  const double dx = grid.dx();
  const std::size_t ni = integrands.size();
  std::vector<std::vector<double>> nodal;
  nodal.reserve(fields.size());
  for (const auto& f : fields) nodal.push_back(f.node_values());

  // Breakpoints: Euler nodes merged with the density interfaces that fall inside (a,b).
  std::vector<double> cuts;
  cuts.reserve(static_cast<std::size_t>(N + 1) + density.interfaces.size());
  for (int k = 0; k <= N; ++k) cuts.push_back(grid.node(k));
  for (double v : density.interfaces)
    if (v > grid.a && v < grid.b) cuts.push_back(v);
  std::sort(cuts.begin(), cuts.end());

  // Per element, the contributions to its left and right end in order of position.
  std::vector<std::vector<double>> to_left(ni), to_right(ni);
  std::vector<std::vector<double>> elem_left(ni, std::vector<double>(static_cast<std::size_t>(N), 0.0));
  std::vector<std::vector<double>> elem_right = elem_left;
  auto flush = [&](int k) {
    for (std::size_t i = 0; i < ni; ++i) {
      elem_left[i][static_cast<std::size_t>(k)] = outside_in_sum(to_left[i]);
      elem_right[i][static_cast<std::size_t>(k)] = outside_in_sum(to_right[i]);
      to_left[i].clear();
      to_right[i].clear();
    }
  };

  static const double g = 1.0 / std::sqrt(3.0);
  std::vector<double> values(fields.size());
  const auto& iface = density.interfaces;
  std::size_t cell = 0;  // density cell cursor
  int k = 0;             // element cursor
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double lo = cuts[s], hi = cuts[s + 1];
    if (!(hi > lo)) continue;
    while (k + 1 < N && lo >= grid.node(k + 1)) flush(k++);
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double rho = 0.0;
    if (!density.values.empty() && mid > iface.front() && mid < iface.back()) {
      while (cell + 1 < density.values.size() && iface[cell + 1] <= mid) ++cell;
      rho = density.values[cell];
    }
    const double xl = grid.node(k), xr = grid.node(k + 1);
    for (double sign : {-1.0, 1.0}) {
      const double x = mid + sign * half * g;
      const double t = (x - xl) / dx, u = (xr - x) / dx;
      for (std::size_t f = 0; f < fields.size(); ++f)
        values[f] = u * nodal[f][static_cast<std::size_t>(k)] + t * nodal[f][static_cast<std::size_t>(k + 1)];
      for (std::size_t i = 0; i < ni; ++i) {
        const double r = half * integrands[i](rho, values);
        to_left[i].push_back(r * u);
        to_right[i].push_back(r * t);
      }
    }
  }
  flush(k);

  // Basis function b collects the right end of element b-1 and the left end of element b; the
  // boundary functions are flat over their outer element and take both of its ends.
  std::vector<std::vector<double>> loads(ni, std::vector<double>(static_cast<std::size_t>(N - 1), 0.0));
  for (std::size_t i = 0; i < ni; ++i) {
    const auto& L = elem_left[i];
    const auto& R = elem_right[i];
    for (int b = 1; b <= N - 1; ++b) {
      double v = R[static_cast<std::size_t>(b - 1)] + L[static_cast<std::size_t>(b)];
      if (b == 1) v = (L[0] + R[0]) + L[1];
      if (b == N - 1) v = (R[static_cast<std::size_t>(N - 1)] + L[static_cast<std::size_t>(N - 1)]) +
                          R[static_cast<std::size_t>(N - 2)];
      loads[i][static_cast<std::size_t>(b - 1)] = v;
    }
  }
  return loads;
}

std::vector<double> overlay_quadrature(const PiecewiseConstantDensity& density, const FeField& field,
                                       const std::function<double(double, double)>& integrand) {
  const FeField fields[] = {field};
  const PointIntegrand wrapped[] = {
      [&](double rho, std::span<const double> v) { return integrand(rho, v[0]); }};
  return overlay_quadrature(field.grid, density, fields, wrapped).front();
}

}  // namespace mtfe
