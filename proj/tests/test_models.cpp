#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "doctest.h"
#include "mtfe/config.hpp"
#include "mtfe/error.hpp"
#include "mtfe/model.hpp"

using namespace mtfe;

namespace {

bool mentions(const std::vector<std::string>& diags, const std::string& needle) {
  return std::any_of(diags.begin(), diags.end(), [&](const auto& d) { return d.find(needle) != std::string::npos; });
}

ErrorCode parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const SolverError& e) {
    return e.code();
  }
  FAIL("config accepted: " << text);
  return ErrorCode::NonMonotone;
}

}  // namespace

TEST_CASE("catalog contents") {
  const auto& cat = catalog();
  CHECK(cat.size() == 12);
  std::set<std::string> names;
  for (const auto& p : cat) {
    names.insert(p.name);
    CHECK(p.name == p.spec.name);
    CHECK(validate(p.spec).empty());
  }
  CHECK(names.size() == cat.size());
  for (const char* n : {"ks_log_blowup", "ks_log_logistic", "nonlinear_diffusion_g2", "nonlinear_diffusion_g1.5",
                        "volume_filling_g2", "volume_filling_g0.5", "pp_ks_peak_movement", "pp_ks_peak_splitting",
                        "invasion", "upa", "upa_volume_filling_g2", "upa_volume_filling_g0.5"})
    CHECK(names.count(n) == 1);
  try {
    find_preset("nope");
    FAIL("unknown preset accepted");
  } catch (const SolverError& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
  }
}

TEST_CASE("preset parameters") {
  const auto& blow = find_preset("ks_log_blowup").spec;
  CHECK(blow.attractant == AttractantKind::LogKernel);
  CHECK(blow.log_kernel_chi == doctest::Approx(2.5 * std::numbers::pi));
  CHECK(blow.diffusion.D == 1.0);
  CHECK(blow.cell_reaction.empty());
  CHECK(blow.M == 50);
  CHECK(blow.N == 0);
  CHECK(blow.whole_line);

  const auto& logi = find_preset("ks_log_logistic").spec;
  CHECK(logi.parameters.at("mu") == 0.2);
  CHECK(logi.t_end == 3.0);

  CHECK(find_preset("nonlinear_diffusion_g2").spec.diffusion.kind == DiffusionKind::PowerLaw);
  CHECK(find_preset("nonlinear_diffusion_g1.5").spec.diffusion.gamma == 1.5);
  CHECK(find_preset("nonlinear_diffusion_g1.5").spec.M == 500);
  CHECK(find_preset("volume_filling_g0.5").spec.diffusion.kind == DiffusionKind::VolumeFilling);
  CHECK(find_preset("volume_filling_g0.5").spec.M == 50);

  const auto& mv = find_preset("pp_ks_peak_movement").spec;
  CHECK(std::abs(mv.a + 1.58) <= 0.005);
  CHECK(mv.a == doctest::Approx(-0.5 / std::pow(0.01 * 1.01, 0.25)).epsilon(1e-15));
  CHECK(mv.b == doctest::Approx(-mv.a));
  CHECK(mv.diffusion.D == 0.1);
  CHECK(mv.fields[0].D == 0.01);
  CHECK(mv.taxis[0].chi == 2.5);
  CHECK(mv.M == 45);
  CHECK(mv.N == 230);
  CHECK(mv.fields[0].initial(0.0) == doctest::Approx(0.5));

  const auto& sp = find_preset("pp_ks_peak_splitting").spec;
  CHECK(sp.taxis[0].chi == 5.0);
  CHECK(sp.M == 90);
  CHECK(sp.N == 450);
  CHECK(sp.fields[0].initial(0.3) == doctest::Approx(1.0 - std::exp(-20.0 * 0.09)));

  const auto& inv = find_preset("invasion").spec;
  CHECK(inv.diffusion.D == 2e-4);
  CHECK(inv.taxis[0].chi == 5e-3);
  CHECK(inv.freeze_last_cell_reaction);
  CHECK(inv.M == 45);
  CHECK(inv.N == 45);
  CHECK(inv.parameters.at("beta") == 0.0);
  CHECK(inv.cell_profile(0.1) == doctest::Approx(std::exp(-1.0)));

  const auto& u = find_preset("upa").spec;
  CHECK(u.parameters.at("chi_u") == 3.05e-2);
  CHECK(u.parameters.at("phi_53") == 0.75);
  CHECK(u.parameters.size() == 22);  // 21 model constants plus the initial-data width
  CHECK(u.b == 10.0);
  CHECK(u.M == 400);
  CHECK(u.N == 400);
  CHECK(u.taxis.size() == 3);
  CHECK(find_preset("upa_volume_filling_g2").spec.diffusion.kind == DiffusionKind::VolumeFilling);
}

TEST_CASE("reactions evaluate as polynomials") {
  const auto& u = find_preset("upa").spec;
  const CompiledReaction R(u.fields[u.field_index("m")].reaction, u.field_names());
  const std::vector<double> f{0.4, 0.3, 0.2, 0.1};  // v, u, p, m
  const double rho = 0.7;
  CHECK(R(rho, f) == doctest::Approx(0.11 * 0.4 * 0.2 + 0.75 * rho * 0.3 - 0.5 * 0.1));
  try {
    CompiledReaction bad({{{1.0, {{"q", 1}}}}}, u.field_names());
    FAIL("unknown variable accepted");
  } catch (const SolverError& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
  }
}

TEST_CASE("validate reports problems") {
  auto m = find_preset("invasion").spec;
  m.taxis.push_back({"x", 1.0});
  CHECK(mentions(validate(m), "taxis: unknown field id 'x'"));

  auto k = find_preset("ks_log_blowup").spec;
  k.N = 40;
  CHECK(mentions(validate(k), "Euler grid unused"));

  auto g = find_preset("pp_ks_peak_movement").spec;
  g.M = 2;
  g.N = 2;
  const auto d = validate(g);
  CHECK(mentions(d, "M must be at least 3"));
  CHECK(mentions(d, "N must be at least 3"));

  auto p = find_preset("nonlinear_diffusion_g2").spec;
  p.diffusion.gamma = 1.0;
  CHECK(mentions(validate(p), "gamma > 1"));

  auto s = find_preset("invasion").spec;
  s.snapshots = {0.5, 0.2};
  CHECK(mentions(validate(s), "strictly increasing"));

  auto r = find_preset("invasion").spec;
  r.fields[1].reaction.terms.push_back({1.0, {{"zz", 1}}});
  CHECK(mentions(validate(r), "unknown field id 'zz'"));
}

TEST_CASE("every preset round-trips through the config format") {
  for (const auto& p : catalog()) {
    const auto text = to_config(p.spec);
    CHECK(parse_config(text) == p.spec);
    CHECK(to_config(parse_config(text)) == text);
  }
}

TEST_CASE("config files") {
  const std::string path = "test_models_config.txt";
  {
    std::ofstream out(path);
    out << "# a comment line\n" << to_config(find_preset("upa").spec) << "\n   # trailing comment\n";
  }
  CHECK(load_config(path) == find_preset("upa").spec);
  std::remove(path.c_str());

  auto partial = parse_config("name = tiny\nM = 12\nN = 8\nfields = c\nfield.c.D = 0.5\ntaxis = c:1.5\n");
  CHECK(partial.name == "tiny");
  CHECK(partial.M == 12);
  CHECK(partial.fields.size() == 1);
  CHECK(partial.fields[0].D == 0.5);
  CHECK(partial.taxis[0].chi == 1.5);
  CHECK(validate(partial).empty());

  CHECK(parse_error("M = twelve") == ErrorCode::ConfigError);
  CHECK(parse_error("colour = red") == ErrorCode::ConfigError);
  CHECK(parse_error("M = 3\nM = 4") == ErrorCode::ConfigError);
  CHECK(parse_error("just some words") == ErrorCode::ConfigError);
  CHECK(parse_error("diffusion.kind = quadratic") == ErrorCode::ConfigError);
  CHECK(parse_error("cell_reaction = 2*rho^") == ErrorCode::ConfigError);
  CHECK(parse_error("field.c.D = 1") == ErrorCode::ConfigError);
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("the single-peak inverse is finite and increasing up to M = 10^4") {
  for (int M : {3, 10, 50, 999, 10000}) {
    const auto V = inverse_from_formula(single_peak_inverse, M);
    CHECK(V.strictly_increasing());
    for (double x : V.nodes) CHECK(std::isfinite(x));
  }
}
