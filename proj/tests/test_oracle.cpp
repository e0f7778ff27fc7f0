#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "mtfe/error.hpp"
#include "mtfe/fvfd.hpp"
#include "mtfe/harness.hpp"
#include "support.hpp"

using namespace mtfe;

namespace {

FvfdConfig cells(int n, std::optional<double> dt = std::nullopt) {
  FvfdConfig c;
  c.N_cells = n;
  c.fixed_dt = dt;
  return c;
}

ErrorCode fvfd_error(const ModelSpec& m, const FvfdConfig& c, double T) {
  try {
    fvfd_run(m, c, T);
  } catch (const SolverError& e) {
    return e.code();
  }
  FAIL("baseline accepted " << m.name);
  return ErrorCode::NonMonotone;
}

// Gaussian heat kernel started at t0 on [-2,2]; the boundary sees about 1e-7 of the mass.
struct GaussHeat {
  double D = 1.0, t0 = 0.01;
  double cell_average(double l, double r, double t) const {
    const double s = std::sqrt(4.0 * D * (t0 + t));
    return std::sqrt(t0 / (t0 + t)) * 0.5 * std::sqrt(std::numbers::pi) * s * (std::erf(r / s) - std::erf(l / s)) /
           (r - l);
  }
};

}  // namespace

TEST_CASE("projection onto piecewise constants") {
  const PiecewiseConstantDensity d{{0.0, 0.3, 0.5, 1.2}, {2.0, 1.0, 4.0}};
  CHECK(project_to_grid(d, d.interfaces) == d.values);

  const PiecewiseConstantDensity one{{-1.0, 0.2, 3.0}, {1.0, 1.0}};
  for (double v : project_to_grid(one, std::vector<double>{-0.5, 0.0, 0.7, 2.9})) CHECK(v == doctest::Approx(1.0));

  const auto outside = project_to_grid(one, std::vector<double>{-3.0, -2.0, -0.5});
  CHECK(outside[0] == 0.0);
  CHECK(outside[1] == doctest::Approx(1.0 / 3.0));  // half a unit of mass over a width of 1.5

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    PiecewiseConstantDensity src;
    double x = U(rng);
    src.interfaces.push_back(x);
    for (int j = 0; j < 5 + trial % 50; ++j) {
      x += 0.01 + U(rng);
      src.interfaces.push_back(x);
      src.values.push_back(U(rng) * 10.0);
    }
    std::vector<double> target{src.interfaces.front() - U(rng)};
    while (target.back() < src.interfaces.back()) target.push_back(target.back() + 0.05 + 2.0 * U(rng));
    const auto p = project_to_grid(src, target);
    double before = src.total_mass(), after = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) after += p[j] * (target[j + 1] - target[j]);
    CHECK(std::abs(after - before) <= 1e-12 * before);
  }
}

TEST_CASE("baseline heat flow converges at second order in L2") {
  ModelSpec m;
  m.name = "heat";
  m.a = -2.0;
  m.b = 2.0;
  m.diffusion = DiffusionLaw::linear(1.0);
  m.cell_profile = {ProfileShape::Gaussian, 0.0, 1.0, 0.04};
  m.M = 10;
  m.N = 10;
  const GaussHeat heat;
  const double T = 0.05;
  std::vector<double> errs;
  for (int n : {80, 160, 320, 640}) {
    const double h = 4.0 / n;
    const auto r = fvfd_run(m, cells(n, 0.25 * h), T);
    double e = 0.0;
    for (int j = 0; j < n; ++j) {
      const double l = -2.0 + j * h;
      e += h * std::pow(r.rho[j] - heat.cell_average(l, l + h, T), 2);
    }
    errs.push_back(std::sqrt(e));
  }
  for (double p : oracle::orders(errs)) CHECK(p >= 1.9);
}

TEST_CASE("baseline logistic reaction is second order in time") {
  const auto m = oracle::logistic_model(0.1, 2.0);
  std::vector<double> errs;
  for (double dt : {0.1, 0.05, 0.025, 0.0125}) {
    const auto r = fvfd_run(m, cells(8, dt), 1.0);
    errs.push_back(std::abs(r.rho[3] - oracle::logistic(0.1, 2.0, 1.0)));
  }
  for (double p : oracle::orders(errs)) CHECK(p >= 1.8);
}

TEST_CASE("baseline conserves mass without cell reactions") {
  auto m = find_preset("invasion").spec;
  m.cell_reaction = {};
  const auto r0 = fvfd_run(m, cells(256), 0.0);
  const auto r1 = fvfd_run(m, cells(256), 1.0);
  const double m0 = r0.density().total_mass(), m1 = r1.density().total_mass();
  CHECK(std::abs(m1 - m0) <= 1e-12 * m0);
  CHECK(r1.steps > 0);
}

TEST_CASE("baseline rejects what it cannot represent and flags instability") {
  CHECK(fvfd_error(find_preset("ks_log_blowup").spec, cells(64), 0.1) == ErrorCode::ConfigError);
  CHECK(fvfd_error(find_preset("upa_volume_filling_g2").spec, cells(64), 0.1) == ErrorCode::ConfigError);
  CHECK(fvfd_error(find_preset("pp_ks_peak_movement").spec, cells(64), 0.1) == ErrorCode::ConfigError);
  CHECK(fvfd_error(find_preset("invasion").spec, cells(4), 0.1) == ErrorCode::ConfigError);

  auto m = find_preset("invasion").spec;
  m.cell_reaction = {{{-50.0, {{"rho", 1}}}}};
  CHECK(fvfd_error(m, cells(64, 0.1), 1.0) == ErrorCode::InstabilityDetected);
}

TEST_CASE("baseline and mass transport solutions approach each other on the invasion model") {
  const auto m = find_preset("invasion").spec;
  std::vector<double> dist;
  for (int k = 0; k < 3; ++k) {
    auto mt = m;
    mt.M = mt.N = 40 << k;
    mt.snapshots.clear();
    const auto sim = Simulation(mt).run();
    const auto fv = fvfd_run(m, cells(256 << k), 1.0);
    dist.push_back(error_rho(reconstruct_density(sim.snapshots.back().V), fv.density()));
  }
  CHECK(dist[1] < dist[0]);
  CHECK(dist[2] < dist[1]);

  auto ladder = spatial_ladder(m, {40, 80, 160, 320}, 2e-4, 1.0);
  auto mt = m;
  mt.M = mt.N = 160;
  mt.snapshots.clear();
  const auto sim = Simulation(mt).run();
  const auto fine = fvfd_run(m, cells(2048), 1.0);
  const double d = error_rho(reconstruct_density(sim.snapshots.back().V), fine.density());
  const double emax = *std::max_element(ladder.errors_rho.begin(), ladder.errors_rho.end());
  MESSAGE("baseline 2048 vs mass transport 160: " << d << ", largest ladder error " << emax);
  CHECK(d <= 2.0 * emax);
}
