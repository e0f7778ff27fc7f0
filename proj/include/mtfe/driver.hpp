#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mtfe/model.hpp"
#include "mtfe/reaction.hpp"
#include "mtfe/transport.hpp"

namespace mtfe {

struct TimeController {
  double cfl = 0.49;
  double K = 100.0;
  double dt_min = 0.0;  // 0 selects 1e-12 * t_end
  double t_end = 0.0;
  std::vector<double> snapshot_times;
  std::optional<double> fixed_dt;  // bypasses the adaptive rule (convergence ladders)
  int max_retries = 8;

  static TimeController for_model(const ModelSpec& model);
  double min_dt() const { return dt_min > 0.0 ? dt_min : 1e-12 * t_end; }
};

struct SimState {
  double t = 0.0;
  InverseDistribution V;
  FieldSystem fields;
  long step_count = 0;
  long newton_iters = 0;
  long retries = 0;
  long clamped_negatives = 0;
  std::vector<double> dt_history;   // accepted increments
  std::vector<double> dt_proposed;  // controller output before snapshot clipping, per accepted step

  double mass() const { return V.grid.mass; }
};

struct BlowupRecord {
  double t = 0.0;  // time of the last accepted state
  SimState last;
  std::string message;
};

struct RunResult {
  std::vector<SimState> snapshots;
  std::optional<BlowupRecord> blowup;
};

/// A model bound to its operators. Stateless apart from the model itself.
class Simulation {
 public:
  explicit Simulation(ModelSpec model);

  const ModelSpec& model() const { return model_; }
  Ends ends() const { return ends_; }
  const NewtonConfig& newton() const { return newton_; }

  SimState initial_state() const;
  /// Attractant seen by the cells for the given fields (spline of sum chi_i c_i with chi = 1).
  TaxisSource taxis(const FieldSystem& fields) const;

  InverseDistribution transport(const InverseDistribution& V, const TaxisSource& taxis, double dt,
                                long* newton_iters = nullptr) const;
  SResult reaction(const InverseDistribution& V, const FieldSystem& fields, double dt) const;

  /// T(dt/2) S(dt) T(dt/2).
  SimState strang_step(const SimState& state, double dt) const;
  /// Increment from the current state, not yet clipped to snapshot times.
  double adaptive_dt(const SimState& state, const TimeController& ctl) const;
  RunResult run(const TimeController& ctl) const;
  RunResult run() const { return run(TimeController::for_model(model_)); }

 private:
  ModelSpec model_;
  ReactionOperator reaction_;
  Ends ends_;
  NewtonConfig newton_;
};

SimState strang_step(const SimState& state, const ModelSpec& model, double dt);
double adaptive_dt(const SimState& state, const ModelSpec& model, const TimeController& ctl);
RunResult run(const ModelSpec& model, const TimeController& ctl);

/// Forward Euler transport step with free ends, for the monotonicity analysis only.
InverseDistribution explicit_euler_step(const InverseDistribution& V, const TaxisSource& taxis,
                                        const DiffusionLaw& law, double dt);

/// (diffusion bound, taxis bound) of the explicit scheme for the split parameter theta.
std::pair<double, double> cfl_bounds(const InverseDistribution& V, const TaxisSource& taxis,
                                     const DiffusionLaw& law, double theta);

}  // namespace mtfe
