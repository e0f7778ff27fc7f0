#pragma once

#include <vector>

#include "mtfe/fe.hpp"
#include "mtfe/grids.hpp"
#include "mtfe/model.hpp"

namespace mtfe {

/// All Eulerian fields of a model on one FE basis, in ModelSpec::fields order. Diffusion
/// coefficients, eps and reactions are looked up in the model by position.
struct FieldSystem {
  std::vector<FeField> fields;

  bool operator==(const FieldSystem&) const = default;
};

struct BoundaryPolicy {
  bool freeze_last_cell_reaction = false;
};

struct SResult {
  InverseDistribution V;
  FieldSystem fields;
  double mass = 0.0;
  int clamped_negatives = 0;  // FE coefficients in [-1e-8, 0) reset to zero
};

/// Reaction-diffusion operator for one model. Holds the FE matrices and compiled reactions.
class ReactionOperator {
 public:
  explicit ReactionOperator(const ModelSpec& model);

  /// Throws NonPositiveDensity if a reaction stage drives a cell average to zero or below and
  /// SingularMassMatrix if a tridiagonal solve breaks down.
  SResult step(const InverseDistribution& V, const FieldSystem& fields, double dt,
               const BoundaryPolicy& policy) const;

  const FeMatrices& matrices() const { return fe_; }

 private:
  ModelSpec model_;
  EulerGrid grid_;
  FeMatrices fe_;
  CompiledReaction cell_;
  std::vector<CompiledReaction> field_reactions_;
};

SResult s_step(const InverseDistribution& V, const FieldSystem& fields, const ModelSpec& model,
               double dt, const BoundaryPolicy& policy);

/// Sum of rho_j (V_j - V_{j-1}).
double update_mass(const PiecewiseConstantDensity& rho);

}  // namespace mtfe
