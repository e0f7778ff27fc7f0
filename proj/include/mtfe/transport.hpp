#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mtfe/grids.hpp"
#include "mtfe/spline.hpp"

namespace mtfe {

enum class DiffusionKind { Linear, PowerLaw, VolumeFilling };

struct DiffusionLaw {
  DiffusionKind kind = DiffusionKind::Linear;
  double D = 0.0;
  double gamma = 1.0;

  static DiffusionLaw linear(double D) { return {DiffusionKind::Linear, D, 1.0}; }
  static DiffusionLaw power_law(double D, double gamma) { return {DiffusionKind::PowerLaw, D, gamma}; }
  static DiffusionLaw volume_filling(double D, double gamma) {
    return {DiffusionKind::VolumeFilling, D, gamma};
  }

  /// D_rho * gamma^-1 * dw^(gamma-1), recomputed from the current cell mass.
  double effective_coefficient(double dw) const;
  /// Flux through a gap of width `gap`; the node residual is flux(right gap) - flux(left gap).
  double flux(double dw, double gap) const;
  double flux_derivative(double dw, double gap) const;

  bool operator==(const DiffusionLaw&) const = default;
};

/// Source of the attractant gradient seen by the cells.
struct TaxisSource {
  enum class Kind { None, SplineField, LogKernel };
  Kind kind = Kind::None;
  ClampedSpline spline;  // used by SplineField
  double chi = 0.0;

  static TaxisSource none() { return {}; }
  static TaxisSource spline_field(ClampedSpline s, double chi) {
    return {Kind::SplineField, std::move(s), chi};
  }
  static TaxisSource log_kernel(double chi) { return {Kind::LogKernel, {}, chi}; }
};

struct NewtonConfig {
  double tol = 1e-10;  // residual sup-norm, length units
  int max_iter = 50;
  double divergence_factor = 1e4;

  static NewtonConfig for_length(double length) { return {1e-10 * length, 50, 1e4}; }
};

/// Bounded domains keep V_0 = a and V_M = b; on the whole line every node moves and the
/// fluxes beyond the end nodes vanish.
enum class Ends { Pinned, Free };

struct NewtonReport {
  int iterations = 0;
  std::vector<double> residuals;  // sup-norms, starting with the initial guess
  bool folded = false;            // stopped on an inadmissible (non-increasing) iterate
};

/// Nonlinear system for the implicit stage. solve_jacobian solves J(x) step = r.
struct NewtonSystem {
  std::function<void(std::span<const double> x, std::vector<double>& r)> residual;
  std::function<bool(std::span<const double> x, std::span<const double> r, std::vector<double>& step)>
      solve_jacobian;
  std::function<bool(std::span<const double> x)> admissible;  // optional
};

/// Plain Newton iteration. Throws SolverError(Diverged) when the residual grows by
/// cfg.divergence_factor, the iterate becomes inadmissible or non-finite, or max_iter is hit.
std::vector<double> newton_solve_stage1(const NewtonSystem& system, std::vector<double> guess,
                                        const NewtonConfig& cfg, NewtonReport* report = nullptr);

/// Attractant slope at the given positions. For the log kernel the positions are the node
/// set itself and the singular index is skipped.
std::vector<double> eval_taxis_gradient(const TaxisSource& taxis, double dw,
                                        std::span<const double> positions);

/// Multiplier (1 - rho_bar_j^gamma) of the taxis term for volume filling, 1 otherwise.
std::vector<double> taxis_factors(const InverseDistribution& V, const DiffusionLaw& law);

struct TransportDiagnostics {
  NewtonReport newton;
};

/// One IMEX-midpoint step of the diffusion-taxis operator in inverse-distribution variables.
/// Throws BlowupDetected if the implicit stage diverges and NonMonotoneResult if the stage or
/// the result is not strictly increasing. The mass grid is passed through untouched.
InverseDistribution t_step(const InverseDistribution& V, const TaxisSource& taxis,
                           const DiffusionLaw& law, double dt, const NewtonConfig& cfg,
                           Ends ends = Ends::Free, TransportDiagnostics* diag = nullptr);

/// True if the stage-1 Jacobian evaluated at V is strictly diagonally dominant for dt.
bool stage1_diagonally_dominant(const InverseDistribution& V, const TaxisSource& taxis,
                                const DiffusionLaw& law, double dt, Ends ends);

/// Halves dt_start until stage1_diagonally_dominant holds; returns 0 if dt_min is passed.
double diagonal_dominance_dt(const InverseDistribution& V, const TaxisSource& taxis,
                             const DiffusionLaw& law, double dt_start, double dt_min, Ends ends);

}  // namespace mtfe
