#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "mtfe/transport.hpp"

namespace mtfe {

/// coef * prod(var^power). Variables are "rho" or a field name.
struct Monomial {
  double coef = 0.0;
  std::vector<std::pair<std::string, int>> factors;

  bool operator==(const Monomial&) const = default;
};

/// Polynomial reaction term; every source term of the catalog models has this shape.
struct Reaction {
  std::vector<Monomial> terms;

  bool empty() const { return terms.empty(); }
  bool operator==(const Reaction&) const = default;
};

/// Reaction bound to variable slots: slot 0 is rho, slot 1+i is field i.
class CompiledReaction {
 public:
  CompiledReaction() = default;
  CompiledReaction(const Reaction& r, const std::vector<std::string>& field_names);

  double operator()(double rho, std::span<const double> fields) const;
  bool empty() const { return terms_.empty(); }

 private:
  struct Term {
    double coef;
    std::vector<std::pair<int, int>> factors;  // (slot, power)
  };
  std::vector<Term> terms_;
};

enum class ProfileShape { Constant, Gaussian, Logistic };

/// offset + amplitude * shape(x); Gaussian: exp(-x^2/param), Logistic: 1/(1+exp(-param x)).
struct Profile {
  ProfileShape shape = ProfileShape::Constant;
  double offset = 0.0;
  double amplitude = 0.0;
  double param = 1.0;

  double operator()(double x) const;
  bool operator==(const Profile&) const = default;
};

struct FieldSpec {
  std::string name;
  bool diffusing = true;
  double D = 0.0;
  double eps = 1.0;
  Reaction reaction;
  Profile initial;

  bool operator==(const FieldSpec&) const = default;
};

struct TaxisCoupling {
  std::string field;
  double chi = 0.0;

  bool operator==(const TaxisCoupling&) const = default;
};

enum class AttractantKind { FeFields, LogKernel };

/// SinglePeakInverse: V0(w) = (w - 1/2) / ((w + 1/100)(101/100 - w))^(1/4) with unit mass.
enum class CellInit { SinglePeakInverse, Density };

double single_peak_inverse(double w);
/// The same profile in the centred coordinate s = w - 1/2; odd in s bit for bit.
double single_peak_centered(double s);
/// Nodes at s_j = (2j - M) / (2M), which are exact negatives of each other under j -> M - j.
InverseDistribution single_peak_initial(int M);

struct ModelSpec {
  std::string name;
  bool whole_line = false;
  double a = 0.0, b = 1.0;
  DiffusionLaw diffusion = DiffusionLaw::linear(1.0);
  AttractantKind attractant = AttractantKind::FeFields;
  double log_kernel_chi = 0.0;
  std::vector<TaxisCoupling> taxis;
  Reaction cell_reaction;
  std::vector<FieldSpec> fields;
  CellInit cell_init = CellInit::Density;
  Profile cell_profile;
  int M = 50;
  int N = 0;
  bool freeze_last_cell_reaction = false;
  double t_end = 1.0;
  std::vector<double> snapshots;
  std::map<std::string, double> parameters;  // named constants of the experiment

  int field_index(const std::string& name) const;
  std::vector<std::string> field_names() const;
  EulerGrid euler_grid() const { return {a, b, N}; }
  bool operator==(const ModelSpec&) const = default;
};

struct Preset {
  std::string name;
  ModelSpec spec;
  std::vector<std::string> tags;  // blowup, two-peaks, bounded-by-one, traveling-front, multi-peak
};

const std::vector<Preset>& catalog();
/// Throws SolverError(ConfigError) for unknown names.
const Preset& find_preset(const std::string& name);

/// Empty when the spec is well formed.
std::vector<std::string> validate(const ModelSpec& spec);

}  // namespace mtfe
