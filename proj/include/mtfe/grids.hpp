#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace mtfe {

/// Uniform grid on the normalized mass interval (0,1) together with the current cell mass.
struct MassGrid {
  int M = 0;
  double mass = 0.0;

  double h_w() const { return 1.0 / M; }
  /// Physical mass carried by one Lagrangian cell.
  double dw() const { return mass * h_w(); }
};

/// Node values V_0..V_M of the pseudo-inverse cumulative distribution.
struct InverseDistribution {
  MassGrid grid;
  std::vector<double> nodes;

  int M() const { return grid.M; }
  bool strictly_increasing() const;
};

/// Cell averages rho_1..rho_M on the cells (V_{j-1}, V_j). values[j-1] holds rho_j.
struct PiecewiseConstantDensity {
  std::vector<double> interfaces;
  std::vector<double> values;

  int cells() const { return static_cast<int>(values.size()); }
  double total_mass() const;
  /// Zero outside [interfaces.front(), interfaces.back()]; at an interior interface the
  /// right-hand cell wins.
  double at(double x) const;
};

struct EulerGrid {
  double a = 0.0, b = 1.0;
  int N = 0;

  double dx() const { return (b - a) / N; }
  /// Measured from the nearer end, so nodes of a domain with b = -a are exact negatives.
  double node(int k) const { return 2 * k <= N ? a + k * dx() : b - (N - k) * dx(); }
  /// Element k containing x, with x_k <= x <= x_{k+1}; x is clamped to [a, b].
  int element(double x) const;

  bool operator==(const EulerGrid&) const = default;
};

/// Linear finite element function on an EulerGrid. The basis is phi_1..phi_{N-1}; phi_1 is
/// flat on [a,x_1] and phi_{N-1} is flat on [x_{N-1},b], so coeffs has N-1 entries.
struct FeField {
  EulerGrid grid;
  std::vector<double> coeffs;

  FeField() = default;
  explicit FeField(const EulerGrid& g, double value = 0.0)
      : grid(g), coeffs(static_cast<std::size_t>(g.N - 1), value) {}

  /// Value at node x_k, 0 <= k <= N.
  double node_value(int k) const;
  double operator()(double x) const;
  /// All N+1 node values.
  std::vector<double> node_values() const;

  static FeField interpolate(const EulerGrid& g, const std::function<double(double)>& f);

  bool operator==(const FeField&) const = default;
};

/// Basis index (1..N-1) that owns grid node k (0..N).
inline int basis_of_node(int k, int N) { return k < 1 ? 1 : (k > N - 1 ? N - 1 : k); }

PiecewiseConstantDensity reconstruct_density(const InverseDistribution& V);

/// Exact inversion of the piecewise linear CDF of a piecewise constant density. The end
/// nodes are the support ends of the density.
InverseDistribution invert_cdf(const PiecewiseConstantDensity& density, double target_mass, int M);

/// Discrete initial data from a density profile on [a,b]. The cumulative mass is integrated
/// on `samples` uniform subintervals (3-point Gauss-Legendre each) and each node is located
/// by bisection.
std::pair<InverseDistribution, double> init_inverse_from_density(
    const std::function<double(double)>& rho0, double a, double b, int M, int samples);

/// Nodes V_j = V(j/M) of a closed-form inverse distribution carrying the given mass.
InverseDistribution inverse_from_formula(const std::function<double(double)>& V, int M,
                                         double mass = 1.0);

}  // namespace mtfe
