#include "mtfe/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "mtfe/error.hpp"

namespace mtfe {

CompiledReaction::CompiledReaction(const Reaction& r, const std::vector<std::string>& field_names) {
  for (const auto& m : r.terms) {
    Term t{m.coef, {}};
    for (const auto& [var, power] : m.factors) {
      int slot = -1;
      if (var == "rho") {
        slot = 0;
      } else {
        auto it = std::find(field_names.begin(), field_names.end(), var);
        if (it == field_names.end())
          throw SolverError(ErrorCode::ConfigError, "reaction references unknown variable '" + var + "'");
        slot = 1 + static_cast<int>(it - field_names.begin());
      }
      t.factors.emplace_back(slot, power);
    }
    terms_.push_back(std::move(t));
  }
}

double CompiledReaction::operator()(double rho, std::span<const double> fields) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.coef;
    for (auto [slot, power] : t.factors) {
      const double x = slot == 0 ? rho : fields[static_cast<std::size_t>(slot - 1)];
      for (int p = 0; p < power; ++p) v *= x;
    }
    sum += v;
  }
  return sum;
}

double Profile::operator()(double x) const {
  switch (shape) {
    case ProfileShape::Constant:
      return offset + amplitude;
    case ProfileShape::Gaussian:
      return offset + amplitude * std::exp(-x * x / param);
    case ProfileShape::Logistic:
      return offset + amplitude / (1.0 + std::exp(-param * x));
  }
  return offset;
}

double single_peak_centered(double s) { return s / std::pow((0.51 + s) * (0.51 - s), 0.25); }

double single_peak_inverse(double w) { return single_peak_centered(w - 0.5); }

InverseDistribution single_peak_initial(int M) {
  InverseDistribution V;
  V.grid = {M, 1.0};
  V.nodes.resize(static_cast<std::size_t>(M + 1));
  for (int j = 0; j <= M; ++j)
    V.nodes[static_cast<std::size_t>(j)] = single_peak_centered(static_cast<double>(2 * j - M) / (2.0 * M));
  return V;
}

int ModelSpec::field_index(const std::string& n) const {
  for (std::size_t i = 0; i < fields.size(); ++i)
    if (fields[i].name == n) return static_cast<int>(i);
  return -1;
}

std::vector<std::string> ModelSpec::field_names() const {
  std::vector<std::string> out;
  for (const auto& f : fields) out.push_back(f.name);
  return out;
}

namespace {

Monomial mono(double coef, std::vector<std::pair<std::string, int>> f = {}) {
  return {coef, std::move(f)};
}

Reaction logistic(double mu) {
  if (mu == 0.0) return {};
  return {{mono(mu, {{"rho", 1}}), mono(-mu, {{"rho", 2}})}};
}

Profile gaussian(double offset, double amplitude, double width) {
  return {ProfileShape::Gaussian, offset, amplitude, width};
}

std::vector<double> uniform_snapshots(double t_end, int count) {
  std::vector<double> s;
  for (int i = 1; i <= count; ++i) s.push_back(t_end * i / count);
  s.back() = t_end;
  return s;
}

ModelSpec log_kernel_base(const std::string& name, DiffusionLaw law, double mu, int M, double t_end) {
  ModelSpec s;
  s.name = name;
  s.whole_line = true;
  s.a = single_peak_inverse(0.0);
  s.b = single_peak_inverse(1.0);
  s.diffusion = law;
  s.attractant = AttractantKind::LogKernel;
  s.log_kernel_chi = 2.5 * std::numbers::pi;
  s.cell_reaction = logistic(mu);
  s.cell_init = CellInit::SinglePeakInverse;
  s.M = M;
  s.N = 0;
  s.t_end = t_end;
  s.snapshots = uniform_snapshots(t_end, 10);
  s.parameters = {{"D_rho", law.D}, {"chi", s.log_kernel_chi}, {"mu", mu}};
  if (law.kind != DiffusionKind::Linear) s.parameters["gamma"] = law.gamma;
  return s;
}

ModelSpec pp_ks(const std::string& name, double D_rho, double D_c, double chi, double alpha,
                double beta, Profile c0, int M, int N, double t_end) {
  ModelSpec s;
  s.name = name;
  s.a = single_peak_inverse(0.0);
  s.b = single_peak_inverse(1.0);
  s.diffusion = DiffusionLaw::linear(D_rho);
  s.taxis = {{"c", chi}};
  s.cell_init = CellInit::SinglePeakInverse;
  FieldSpec c;
  c.name = "c";
  c.D = D_c;
  c.reaction = {{mono(alpha, {{"rho", 1}}), mono(-beta, {{"c", 1}})}};
  c.initial = c0;
  s.fields = {c};
  s.M = M;
  s.N = N;
  s.t_end = t_end;
  s.snapshots = uniform_snapshots(t_end, 10);
  s.parameters = {{"D_rho", D_rho}, {"D_c", D_c}, {"chi", chi}, {"alpha", alpha}, {"beta", beta}};
  return s;
}

ModelSpec invasion() {
  const std::map<std::string, double> p = {{"D_c", 2e-4}, {"chi", 5e-3}, {"mu", 0.2},
                                           {"D_a", 1e-3}, {"delta", 10.0}, {"alpha", 0.1},
                                           {"beta", 0.0}, {"eps", 1e-2}};
  ModelSpec s;
  s.name = "invasion";
  s.a = 0.0;
  s.b = 1.0;
  s.diffusion = DiffusionLaw::linear(p.at("D_c"));
  s.taxis = {{"v", p.at("chi")}};
  s.cell_reaction = logistic(p.at("mu"));
  s.cell_init = CellInit::Density;
  s.cell_profile = gaussian(0.0, 1.0, p.at("eps"));
  FieldSpec v;
  v.name = "v";
  v.diffusing = false;
  v.reaction = {{mono(-p.at("delta"), {{"v", 1}, {"m", 1}})}};
  v.initial = gaussian(1.0, -0.5, p.at("eps"));
  FieldSpec m;
  m.name = "m";
  m.D = p.at("D_a");
  m.reaction = {{mono(p.at("alpha"), {{"rho", 1}}), mono(-p.at("beta"), {{"m", 1}})}};
  m.initial = gaussian(0.0, 0.5, p.at("eps"));
  s.fields = {v, m};
  s.M = 45;
  s.N = 45;
  s.freeze_last_cell_reaction = true;
  s.t_end = 1.0;
  s.snapshots = uniform_snapshots(1.0, 10);
  s.parameters = p;
  return s;
}

ModelSpec upa(const std::string& name, DiffusionLaw law) {
  const std::map<std::string, double> p = {
      {"D_c", 3.5e-4},   {"D_u", 2.5e-3},  {"D_p", 3.5e-3},   {"D_m", 4.91e-3},
      {"chi_u", 3.05e-2}, {"chi_p", 3.75e-2}, {"chi_v", 2.85e-2}, {"mu_1", 0.25},
      {"mu_2", 0.15},    {"delta", 8.15},  {"phi_21", 0.75},  {"phi_22", 0.55},
      {"phi_31", 0.75},  {"phi_33", 0.3},  {"phi_41", 0.75},  {"phi_42", 0.55},
      {"phi_52", 0.11},  {"phi_53", 0.75}, {"alpha_3", 0.215}, {"alpha_4", 0.5},
      {"alpha_5", 0.5},  {"eps", 5e-3}};
  const double eps = p.at("eps");
  ModelSpec s;
  s.name = name;
  s.a = 0.0;
  s.b = 10.0;
  s.diffusion = law;
  s.taxis = {{"v", p.at("chi_v")}, {"u", p.at("chi_u")}, {"p", p.at("chi_p")}};
  s.cell_reaction = logistic(p.at("mu_1"));
  s.cell_init = CellInit::Density;
  s.cell_profile = gaussian(0.0, 1.0, eps);

  FieldSpec v{"v", false, 0.0, 1.0,
              {{mono(-p.at("delta"), {{"v", 1}, {"m", 1}}), mono(p.at("phi_21"), {{"u", 1}, {"p", 1}}),
                mono(-p.at("phi_22"), {{"v", 1}, {"p", 1}}), mono(p.at("mu_2"), {{"v", 1}}),
                mono(-p.at("mu_2"), {{"v", 2}})}},
              gaussian(1.0, -0.5, eps)};
  FieldSpec u{"u", true, p.at("D_u"), 1.0,
              {{mono(-p.at("phi_31"), {{"u", 1}, {"p", 1}}), mono(-p.at("phi_33"), {{"rho", 1}, {"u", 1}}),
                mono(p.at("alpha_3"), {{"rho", 1}})}},
              gaussian(0.0, 0.5, eps)};
  FieldSpec pf{"p", true, p.at("D_p"), 1.0,
               {{mono(-p.at("phi_41"), {{"u", 1}, {"p", 1}}), mono(-p.at("phi_42"), {{"v", 1}, {"p", 1}}),
                 mono(p.at("alpha_4"), {{"m", 1}})}},
               gaussian(0.0, 0.05, eps)};
  FieldSpec m{"m", true, p.at("D_m"), 1.0,
              {{mono(p.at("phi_52"), {{"v", 1}, {"p", 1}}), mono(p.at("phi_53"), {{"rho", 1}, {"u", 1}}),
                mono(-p.at("alpha_5"), {{"m", 1}})}},
              Profile{}};
  s.fields = {v, u, pf, m};
  s.M = 400;
  s.N = 400;
  s.freeze_last_cell_reaction = true;
  s.t_end = 23.0;
  s.snapshots = uniform_snapshots(23.0, 23);
  s.parameters = p;
  if (law.kind != DiffusionKind::Linear) s.parameters["gamma"] = law.gamma;
  return s;
}

std::vector<Preset> build_catalog() {
  std::vector<Preset> c;
  c.push_back({"ks_log_blowup", log_kernel_base("ks_log_blowup", DiffusionLaw::linear(1.0), 0.0, 50, 0.5),
               {"blowup"}});
  c.push_back({"ks_log_logistic",
               log_kernel_base("ks_log_logistic", DiffusionLaw::linear(1.0), 0.2, 50, 3.0), {}});
  c.push_back({"nonlinear_diffusion_g2",
               log_kernel_base("nonlinear_diffusion_g2", DiffusionLaw::power_law(1.0, 2.0), 0.0, 500, 1.0),
               {}});
  c.push_back({"nonlinear_diffusion_g1.5",
               log_kernel_base("nonlinear_diffusion_g1.5", DiffusionLaw::power_law(1.0, 1.5), 0.0, 500, 1.0),
               {}});
  c.push_back({"volume_filling_g2",
               log_kernel_base("volume_filling_g2", DiffusionLaw::volume_filling(1.0, 2.0), 0.0, 50, 1.0),
               {"bounded-by-one"}});
  c.push_back({"volume_filling_g0.5",
               log_kernel_base("volume_filling_g0.5", DiffusionLaw::volume_filling(1.0, 0.5), 0.0, 50, 1.0),
               {"bounded-by-one"}});
  c.push_back({"pp_ks_peak_movement",
               pp_ks("pp_ks_peak_movement", 0.1, 0.01, 2.5, 0.5, 1.0,
                     {ProfileShape::Logistic, 0.0, 1.0, 5.0}, 45, 230, 2.0),
               {"traveling-front"}});
  c.push_back({"pp_ks_peak_splitting",
               pp_ks("pp_ks_peak_splitting", 0.1, 0.1, 5.0, 1.0, 1.0, gaussian(1.0, -1.0, 1.0 / 20.0), 90,
                     450, 0.5),
               {"two-peaks"}});
  c.push_back({"invasion", invasion(), {"traveling-front"}});
  c.push_back({"upa", upa("upa", DiffusionLaw::linear(3.5e-4)), {"multi-peak"}});
  c.push_back({"upa_volume_filling_g2", upa("upa_volume_filling_g2", DiffusionLaw::volume_filling(3.5e-4, 2.0)),
               {"bounded-by-one", "traveling-front"}});
  c.push_back({"upa_volume_filling_g0.5",
               upa("upa_volume_filling_g0.5", DiffusionLaw::volume_filling(3.5e-4, 0.5)),
               {"bounded-by-one", "traveling-front"}});
  return c;
}

bool variables_known(const Reaction& r, const ModelSpec& s, bool cells_only, std::vector<std::string>& diag,
                     const std::string& where) {
  bool ok = true;
  for (const auto& m : r.terms) {
    if (!std::isfinite(m.coef)) {
      diag.push_back(where + ": non-finite coefficient");
      ok = false;
    }
    for (const auto& [var, power] : m.factors) {
      if (power < 0) {
        diag.push_back(where + ": negative power of '" + var + "'");
        ok = false;
      }
      if (var == "rho") continue;
      if (cells_only || s.field_index(var) < 0) {
        diag.push_back(where + ": unknown field id '" + var + "'");
        ok = false;
      }
    }
  }
  return ok;
}

}  // namespace

const std::vector<Preset>& catalog() {
  static const std::vector<Preset> presets = build_catalog();
  return presets;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : catalog())
    if (p.name == name) return p;
  throw SolverError(ErrorCode::ConfigError, "unknown model '" + name + "'");
}

std::vector<std::string> validate(const ModelSpec& s) {
  std::vector<std::string> d;
  if (s.M < 3) d.push_back("M must be at least 3");
  if (!(s.diffusion.D >= 0.0)) d.push_back("cell diffusivity must be nonnegative");
  switch (s.diffusion.kind) {
    case DiffusionKind::Linear:
      break;
    case DiffusionKind::PowerLaw:
      if (!(s.diffusion.gamma > 1.0)) d.push_back("power-law diffusion needs gamma > 1");
      break;
    case DiffusionKind::VolumeFilling:
      if (!(s.diffusion.gamma > 0.0)) d.push_back("volume filling needs gamma > 0");
      break;
  }
  if (!(s.t_end >= 0.0)) d.push_back("t_end must be nonnegative");
  for (std::size_t i = 0; i < s.snapshots.size(); ++i) {
    const double t = s.snapshots[i];
    if (!(t >= 0.0 && t <= s.t_end)) d.push_back("snapshot time outside [0, t_end]");
    if (i > 0 && !(t > s.snapshots[i - 1])) d.push_back("snapshot times must be strictly increasing");
  }

  std::set<std::string> names;
  for (const auto& f : s.fields) {
    if (f.name.empty() || f.name == "rho") d.push_back("invalid field id '" + f.name + "'");
    if (!names.insert(f.name).second) d.push_back("duplicate field id '" + f.name + "'");
    if (f.diffusing) {
      if (!(f.D >= 0.0)) d.push_back("field '" + f.name + "': D must be nonnegative");
      if (!(f.eps > 0.0)) d.push_back("field '" + f.name + "': eps must be positive");
    }
    variables_known(f.reaction, s, false, d, "field '" + f.name + "' reaction");
  }
  variables_known(s.cell_reaction, s, true, d, "cell reaction");
  for (const auto& t : s.taxis) {
    if (s.field_index(t.field) < 0) d.push_back("taxis: unknown field id '" + t.field + "'");
    if (!std::isfinite(t.chi)) d.push_back("taxis: non-finite chi for '" + t.field + "'");
  }

  if (s.attractant == AttractantKind::LogKernel) {
    if (!s.taxis.empty()) d.push_back("log-kernel attractant forbids FE taxis fields");
    if (!s.fields.empty()) d.push_back("log-kernel attractant carries no FE fields");
    if (s.N != 0) d.push_back("Euler grid unused: log-kernel models must have N = 0");
    if (!s.whole_line) d.push_back("log-kernel attractant requires the whole line");
    if (!(s.log_kernel_chi >= 0.0)) d.push_back("log-kernel chi must be nonnegative");
  } else {
    if (s.whole_line) d.push_back("whole-line models need the log-kernel attractant");
    if (s.N < 3) d.push_back("N must be at least 3");
    if (!(s.b > s.a)) d.push_back("domain needs a < b");
  }
  if (s.cell_init == CellInit::SinglePeakInverse && !s.whole_line) {
    if (s.a != single_peak_inverse(0.0) || s.b != single_peak_inverse(1.0))
      d.push_back("single-peak initial data needs a = V0(0) and b = V0(1)");
  }
  if (s.cell_init == CellInit::Density && s.whole_line)
    d.push_back("whole-line models take the single-peak inverse initial data");
  return d;
}

}  // namespace mtfe
