#include "mtfe/reaction.hpp"

#include <cmath>

#include "mtfe/error.hpp"

namespace mtfe {

namespace {

constexpr double kClampTolerance = 1e-8;

// Explicit half/full reaction update of the cell averages.
std::vector<double> react_cells(const CompiledReaction& R, const std::vector<double>& base,
                                const std::vector<double>& at, double dt, bool freeze_last) {
  std::vector<double> out(base);
  if (R.empty()) return out;
  const std::size_t n = freeze_last ? base.size() - 1 : base.size();
  for (std::size_t j = 0; j < n; ++j) out[j] = base[j] + dt * R(at[j], {});
  for (std::size_t j = 0; j < out.size(); ++j)
    if (!(out[j] > 0.0))
      throw SolverError(ErrorCode::NonPositiveDensity,
                        "reaction update produced rho_" + std::to_string(j + 1) + " = " + std::to_string(out[j]));
  return out;
}

// Coefficient-wise values of all fields at dof k.
std::vector<double> dof_values(const FieldSystem& fs, std::size_t k) {
  std::vector<double> v(fs.fields.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fs.fields[i].coeffs[k];
  return v;
}

}  // namespace

double update_mass(const PiecewiseConstantDensity& rho) {
  const double m = rho.total_mass();
  if (!(m > 0.0)) throw SolverError(ErrorCode::ZeroMass, "updated mass is not positive");
  return m;
}

ReactionOperator::ReactionOperator(const ModelSpec& model)
    : model_(model), grid_(model.euler_grid()), cell_(model.cell_reaction, model.field_names()) {
  if (!model.fields.empty()) fe_ = assemble_fe_matrices(grid_);
  for (const auto& f : model.fields) field_reactions_.emplace_back(f.reaction, model.field_names());
}

SResult ReactionOperator::step(const InverseDistribution& V, const FieldSystem& fields, double dt,
                               const BoundaryPolicy& policy) const {
  const ModelSpec& model = model_;
  const PiecewiseConstantDensity rho = reconstruct_density(V);
  const bool freeze = policy.freeze_last_cell_reaction;

  // Stage 1: half step for the cells and the implicit half step for every field.
  PiecewiseConstantDensity rho_t{rho.interfaces, react_cells(cell_, rho.values, rho.values, 0.5 * dt, freeze)};

  const std::size_t nf = model.fields.size();
  std::vector<PointIntegrand> integrands;
  for (std::size_t i = 0; i < nf; ++i) {
    const CompiledReaction* R = &field_reactions_[i];
    integrands.push_back([R](double r, std::span<const double> c) { return (*R)(r, c); });
  }

  FieldSystem tilde = fields;
  if (nf > 0) {
    const auto loads = overlay_quadrature(grid_, rho, fields.fields, integrands);
    for (std::size_t i = 0; i < nf; ++i) {
      const FieldSpec& spec = model.fields[i];
      const auto& c = fields.fields[i].coeffs;
      if (spec.diffusing) {
        const double s = 2.0 * spec.eps / dt;
        const Tridiagonal A = combine(s, fe_.mass, spec.D, fe_.stiffness);
        std::vector<double> rhs = fe_.mass.apply(c);
        for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = s * rhs[k] + loads[i][k];
        if (!A.solve(rhs, tilde.fields[i].coeffs))
          throw SolverError(ErrorCode::SingularMassMatrix, "stage-1 system for field '" + spec.name + "'");
      } else {
        for (std::size_t k = 0; k < c.size(); ++k) {
          const double x = grid_.node(static_cast<int>(k) + 1);
          tilde.fields[i].coeffs[k] = c[k] + 0.5 * dt * field_reactions_[i](rho.at(x), dof_values(fields, k));
        }
      }
    }
  }

  // Stage 2: full steps driven by the midpoint values.
  std::vector<double> rho_new = react_cells(cell_, rho.values, rho_t.values, dt, freeze);

  SResult out;
  out.fields = fields;
  if (nf > 0) {
    const auto loads = overlay_quadrature(grid_, rho_t, tilde.fields, integrands);
    for (std::size_t i = 0; i < nf; ++i) {
      const FieldSpec& spec = model.fields[i];
      const auto& c = fields.fields[i].coeffs;
      auto& next = out.fields.fields[i].coeffs;
      if (spec.diffusing) {
        std::vector<double> rhs = fe_.stiffness.apply(tilde.fields[i].coeffs);
        for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = dt / spec.eps * (-spec.D * rhs[k] + loads[i][k]);
        std::vector<double> delta;
        if (!fe_.mass.solve(rhs, delta))
          throw SolverError(ErrorCode::SingularMassMatrix, "stage-2 system for field '" + spec.name + "'");
        for (std::size_t k = 0; k < c.size(); ++k) next[k] = c[k] + delta[k];
      } else {
        for (std::size_t k = 0; k < c.size(); ++k) {
          const double x = grid_.node(static_cast<int>(k) + 1);
          next[k] = c[k] + dt * field_reactions_[i](rho_t.at(x), dof_values(tilde, k));
        }
      }
      for (double& v : next) {
        if (v < 0.0 && v >= -kClampTolerance) {
          v = 0.0;
          ++out.clamped_negatives;
        }
      }
    }
  }

  if (rho_new == rho.values) {
    out.V = V;
    out.mass = V.grid.mass;
    return out;
  }
  const PiecewiseConstantDensity updated{rho.interfaces, std::move(rho_new)};
  out.mass = update_mass(updated);
  out.V = invert_cdf(updated, out.mass, V.M());
  return out;
}

SResult s_step(const InverseDistribution& V, const FieldSystem& fields, const ModelSpec& model, double dt,
               const BoundaryPolicy& policy) {
  return ReactionOperator(model).step(V, fields, dt, policy);
}

}  // namespace mtfe
