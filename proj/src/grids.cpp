#include "mtfe/grids.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mtfe/error.hpp"

namespace mtfe {

bool InverseDistribution::strictly_increasing() const {
  for (std::size_t j = 1; j < nodes.size(); ++j)
    if (!(nodes[j] > nodes[j - 1])) return false;
  return true;
}

double PiecewiseConstantDensity::total_mass() const {
  double m = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j)
    m += values[j] * (interfaces[j + 1] - interfaces[j]);
  return m;
}

double PiecewiseConstantDensity::at(double x) const {
  if (values.empty() || x < interfaces.front() || x > interfaces.back()) return 0.0;
  auto it = std::upper_bound(interfaces.begin(), interfaces.end(), x);
  auto cell = static_cast<std::ptrdiff_t>(it - interfaces.begin()) - 1;
  cell = std::clamp<std::ptrdiff_t>(cell, 0, static_cast<std::ptrdiff_t>(values.size()) - 1);
  return values[static_cast<std::size_t>(cell)];
}

double FeField::node_value(int k) const {
  return coeffs[static_cast<std::size_t>(basis_of_node(k, grid.N) - 1)];
}

int EulerGrid::element(double x) const {
  x = std::clamp(x, a, b);
  int k = std::clamp(static_cast<int>((x - a) / dx()), 0, N - 1);
  // The division may land one element off next to a node.
  if (k > 0 && x < node(k)) --k;
  if (k < N - 1 && x > node(k + 1)) ++k;
  return k;
}

double FeField::operator()(double x) const {
  const int N = grid.N;
  if (x <= grid.a) return node_value(0);
  if (x >= grid.b) return node_value(N);
  const int k = grid.element(x);
  const double xl = grid.node(k), xr = grid.node(k + 1);
  if (x == xl) return node_value(k);
  if (x == xr) return node_value(k + 1);
  // Both weights are measured from their own node, which keeps mirrored queries exact.
  const double dx = xr - xl;
  return (xr - x) / dx * node_value(k) + (x - xl) / dx * node_value(k + 1);
}

std::vector<double> FeField::node_values() const {
  std::vector<double> out(static_cast<std::size_t>(grid.N + 1));
  for (int k = 0; k <= grid.N; ++k) out[static_cast<std::size_t>(k)] = node_value(k);
  return out;
}

FeField FeField::interpolate(const EulerGrid& g, const std::function<double(double)>& f) {
  FeField field(g);
  for (int k = 1; k <= g.N - 1; ++k) field.coeffs[static_cast<std::size_t>(k - 1)] = f(g.node(k));
  return field;
}

PiecewiseConstantDensity reconstruct_density(const InverseDistribution& V) {
  const int M = V.M();
  PiecewiseConstantDensity rho;
  rho.interfaces = V.nodes;
  rho.values.resize(static_cast<std::size_t>(M));
  const double dw = V.grid.dw();
  for (int j = 1; j <= M; ++j) {
    const double width = V.nodes[j] - V.nodes[j - 1];
    if (!(width > 0.0))
      throw SolverError(ErrorCode::NonMonotone,
                        "V_" + std::to_string(j) + " <= V_" + std::to_string(j - 1));
    rho.values[static_cast<std::size_t>(j - 1)] = dw / width;
  }
  return rho;
}

InverseDistribution invert_cdf(const PiecewiseConstantDensity& density, double target_mass, int M) {
  if (!(target_mass > 0.0)) throw SolverError(ErrorCode::ZeroMass, "target mass must be positive");
  const auto& x = density.interfaces;
  const auto& rho = density.values;
  const std::size_t cells = rho.size();
  // Extended precision keeps the round trip through reconstruct_density at machine precision.
  std::vector<long double> cum(cells + 1, 0.0L);
  for (std::size_t i = 0; i < cells; ++i) {
    if (!(rho[i] > 0.0))
      throw SolverError(ErrorCode::NonPositiveDensity,
                        "cell " + std::to_string(i + 1) + " has density " + std::to_string(rho[i]));
    cum[i + 1] = cum[i] + static_cast<long double>(rho[i]) * (x[i + 1] - x[i]);
  }
  const double total = static_cast<double>(cum[cells]);
  if (std::abs(total - target_mass) > 1e-9 * std::max(total, target_mass))
    throw SolverError(ErrorCode::ZeroMass, "target mass does not match the density integral");

  InverseDistribution V;
  V.grid = MassGrid{M, target_mass};
  V.nodes.resize(static_cast<std::size_t>(M + 1));
  V.nodes.front() = x.front();
  V.nodes.back() = x.back();
  std::size_t cell = 0;
  for (int k = 1; k < M; ++k) {
    const long double t = cum[cells] * k / M;
    while (cell + 1 < cells && cum[cell + 1] <= t) ++cell;
    V.nodes[static_cast<std::size_t>(k)] = static_cast<double>(x[cell] + (t - cum[cell]) / rho[cell]);
  }
  return V;
}

namespace {

// 3-point Gauss-Legendre on [lo, hi].
double gauss3(const std::function<double(double)>& f, double lo, double hi) {
  static const double node = std::sqrt(0.6);
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  return half * (5.0 / 9.0 * f(mid - half * node) + 8.0 / 9.0 * f(mid) +
                 5.0 / 9.0 * f(mid + half * node));
}

}  // namespace

std::pair<InverseDistribution, double> init_inverse_from_density(
    const std::function<double(double)>& rho0, double a, double b, int M, int samples) {
  samples = std::max(samples, M);
  const double h = (b - a) / samples;
  auto xs = [&](int i) { return i == samples ? b : a + i * h; };
  std::vector<double> cum(static_cast<std::size_t>(samples + 1), 0.0);
  for (int i = 0; i < samples; ++i)
    cum[static_cast<std::size_t>(i + 1)] = cum[static_cast<std::size_t>(i)] + gauss3(rho0, xs(i), xs(i + 1));
  const double mass = cum.back();
  if (!(mass > 0.0)) throw SolverError(ErrorCode::ZeroMass, "initial density has no mass");

  InverseDistribution V;
  V.grid = MassGrid{M, mass};
  V.nodes.resize(static_cast<std::size_t>(M + 1));
  V.nodes.front() = a;
  V.nodes.back() = b;
  for (int j = 1; j < M; ++j) {
    const double target = mass * (static_cast<double>(j) / M);
    auto it = std::upper_bound(cum.begin(), cum.end(), target);
    int i = static_cast<int>(it - cum.begin()) - 1;
    i = std::clamp(i, 0, samples - 1);
    const double base = cum[static_cast<std::size_t>(i)];
    double lo = xs(i), hi = xs(i + 1);
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      const double c = base + gauss3(rho0, xs(i), mid);
      if (c < target) lo = mid; else hi = mid;
      if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid))) break;
    }
    V.nodes[static_cast<std::size_t>(j)] = 0.5 * (lo + hi);
  }
  return {std::move(V), mass};
}

InverseDistribution inverse_from_formula(const std::function<double(double)>& V, int M, double mass) {
  InverseDistribution out;
  out.grid = MassGrid{M, mass};
  out.nodes.resize(static_cast<std::size_t>(M + 1));
  for (int j = 0; j <= M; ++j) out.nodes[static_cast<std::size_t>(j)] = V(static_cast<double>(j) / M);
  return out;
}

}  // namespace mtfe
