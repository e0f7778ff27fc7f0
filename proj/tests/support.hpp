#pragma once

// Independent oracles shared by the unit tests and the acceptance binary. Nothing here calls
// the operators under test except where the oracle drives them (order studies).

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "mtfe/driver.hpp"
#include "mtfe/grids.hpp"
#include "mtfe/transport.hpp"

namespace oracle {

inline double bisect(const std::function<double(double)>& f, double lo, double hi, double target) {
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline std::vector<double> orders(const std::vector<double>& errors) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) out.push_back(std::log2(errors[k] / errors[k + 1]));
  return out;
}

// Neumann heat flow on [-1,1]: rho = 1 + A e^{-pi^2 D t} cos(pi (x+1)), mass 2.
struct CosineHeat {
  double D = 1.0;
  double A = 0.5;

  double amplitude(double t) const { return A * std::exp(-std::numbers::pi * std::numbers::pi * D * t); }
  double cdf(double x, double t) const {
    return (x + 1.0) + amplitude(t) * std::sin(std::numbers::pi * (x + 1.0)) / std::numbers::pi;
  }
  mtfe::InverseDistribution inverse(int M, double t) const {
    mtfe::InverseDistribution V;
    V.grid = {M, 2.0};
    V.nodes.resize(static_cast<std::size_t>(M + 1));
    V.nodes.front() = -1.0;
    V.nodes.back() = 1.0;
    for (int j = 1; j < M; ++j)
      V.nodes[j] = bisect([&](double x) { return cdf(x, t); }, -1.0, 1.0, 2.0 * j / M);
    return V;
  }
};

inline double mean_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double e = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) e += std::abs(a[j] - b[j]);
  return e / static_cast<double>(a.size() - 1);
}

// Pure transport with pinned ends; dt coupled to M so the error is O(dt^2 + M^-2).
inline std::vector<double> heat_transport_errors(const std::vector<int>& Ms, double T) {
  const CosineHeat heat;
  std::vector<double> errors;
  for (int M : Ms) {
    const int steps = 2 * M;
    const double dt = T / steps;
    auto V = heat.inverse(M, 0.0);
    const auto law = mtfe::DiffusionLaw::linear(heat.D);
    const auto cfg = mtfe::NewtonConfig::for_length(2.0);
    for (int n = 0; n < steps; ++n)
      V = mtfe::t_step(V, mtfe::TaxisSource::none(), law, dt, cfg, mtfe::Ends::Pinned);
    errors.push_back(mean_abs_diff(V.nodes, heat.inverse(M, T).nodes));
  }
  return errors;
}

inline double logistic(double rho0, double mu, double t) {
  return 1.0 / (1.0 + (1.0 / rho0 - 1.0) * std::exp(-mu * t));
}

// Cells with uniform density rho0 on (0,1) and logistic growth mu rho (1 - rho) only.
inline mtfe::ModelSpec logistic_model(double rho0, double mu) {
  mtfe::ModelSpec m;
  m.name = "logistic_oracle";
  m.diffusion = mtfe::DiffusionLaw::linear(0.0);
  m.cell_profile = {mtfe::ProfileShape::Constant, rho0, 0.0, 1.0};
  m.cell_reaction.terms = {{mu, {{"rho", 1}}}, {-mu, {{"rho", 2}}}};
  m.fields.push_back({"c", true, 0.0, 1.0, {}, {}});
  m.M = 8;
  m.N = 8;
  return m;
}

// Global error at T of the reaction operator on the logistic model, one entry per dt.
inline std::vector<double> logistic_errors(const std::vector<double>& dts, double T, double rho0 = 0.1,
                                           double mu = 2.0) {
  const auto model = logistic_model(rho0, mu);
  const mtfe::ReactionOperator S(model);
  const mtfe::Simulation sim(model);
  std::vector<double> errors;
  for (double dt : dts) {
    auto st = sim.initial_state();
    const int steps = static_cast<int>(std::lround(T / dt));
    for (int n = 0; n < steps; ++n) {
      auto r = S.step(st.V, st.fields, dt, {});
      st.V = std::move(r.V);
      st.fields = std::move(r.fields);
    }
    errors.push_back(std::abs(st.V.grid.mass - logistic(rho0, mu, T)));
  }
  return errors;
}

// Randomized trial of the explicit scheme at `factor` times the smaller monotonicity bound.
// Returns the number of trials whose output is not strictly increasing.
struct MonotonicityTrial {
  bool adversarial = false;  // rough attractant data with a strong taxis coefficient
  double factor = 0.99;
};

inline int monotonicity_violations(int trials, unsigned seed, const MonotonicityTrial& opt) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int bad = 0;
  for (int n = 0; n < trials; ++n) {
    const int M = 4 + static_cast<int>(U(rng) * 60);
    mtfe::InverseDistribution V;
    V.grid = {M, 0.2 + 2.0 * U(rng)};
    V.nodes.resize(static_cast<std::size_t>(M + 1));
    double x = -1.0 + U(rng);
    for (int j = 0; j <= M; ++j) {
      V.nodes[j] = x;
      // Gaps spread over three decades so both bounds get exercised.
      x += std::pow(10.0, -3.0 * U(rng)) * 2.0 / M;
    }
    const int N = 4 + static_cast<int>(U(rng) * 40);
    std::vector<double> data(static_cast<std::size_t>(N + 1));
    for (auto& d : data) d = opt.adversarial ? (U(rng) < 0.5 ? -1.0 : 1.0) * (1.0 + U(rng)) : U(rng);
    const auto spline = mtfe::ClampedSpline::fit(V.nodes.front(), V.nodes.back(), data);
    const double chi = opt.adversarial ? 5.0 + 20.0 * U(rng) : 2.0 * U(rng);
    const auto taxis = mtfe::TaxisSource::spline_field(spline, chi);
    const double D = opt.adversarial ? 1e-3 * U(rng) : 0.05 + U(rng);
    const auto law = U(rng) < 0.5 ? mtfe::DiffusionLaw::linear(D)
                                  : mtfe::DiffusionLaw::power_law(D, 1.0 + 2.0 * U(rng));
    const auto [bd, bt] = mtfe::cfl_bounds(V, taxis, law, 0.5);
    const double dt = opt.factor * std::min(bd, bt);
    const auto out = mtfe::explicit_euler_step(V, taxis, law, dt);
    if (!out.strictly_increasing()) ++bad;
  }
  return bad;
}

}  // namespace oracle
