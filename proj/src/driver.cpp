#include "mtfe/driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mtfe/error.hpp"

namespace mtfe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool retryable(ErrorCode c) { return c == ErrorCode::NonMonotoneResult || c == ErrorCode::NonPositiveDensity; }

std::string at_context(long step, double t) {
  return " (step " + std::to_string(step) + ", t = " + std::to_string(t) + ")";
}

}  // namespace

TimeController TimeController::for_model(const ModelSpec& model) {
  TimeController c;
  c.t_end = model.t_end;
  c.snapshot_times = model.snapshots;
  return c;
}

Simulation::Simulation(ModelSpec model)
    : model_(std::move(model)),
      reaction_(model_),
      ends_(model_.whole_line ? Ends::Free : Ends::Pinned) {
  const auto problems = validate(model_);
  if (!problems.empty()) {
    std::string msg = "invalid model '" + model_.name + "':";
    for (const auto& p : problems) msg += " " + p + ";";
    throw SolverError(ErrorCode::ConfigError, msg);
  }
  const double length = model_.whole_line ? single_peak_inverse(1.0) - single_peak_inverse(0.0) : model_.b - model_.a;
  newton_ = NewtonConfig::for_length(length);
}

SimState Simulation::initial_state() const {
  SimState s;
  if (model_.cell_init == CellInit::SinglePeakInverse) {
    s.V = single_peak_initial(model_.M);
  } else {
    const int samples = 64 * std::max(model_.M, model_.N);
    s.V = init_inverse_from_density(model_.cell_profile, model_.a, model_.b, model_.M, samples).first;
  }
  if (!model_.fields.empty()) {
    const EulerGrid g = model_.euler_grid();
    for (const auto& f : model_.fields) s.fields.fields.push_back(FeField::interpolate(g, f.initial));
  }
  return s;
}

TaxisSource Simulation::taxis(const FieldSystem& fields) const {
  if (model_.attractant == AttractantKind::LogKernel) return TaxisSource::log_kernel(model_.log_kernel_chi);
  if (model_.taxis.empty()) return TaxisSource::none();
  const EulerGrid g = model_.euler_grid();
  std::vector<double> phi(static_cast<std::size_t>(g.N + 1), 0.0);
  for (const auto& tc : model_.taxis) {
    const auto v = fields.fields[static_cast<std::size_t>(model_.field_index(tc.field))].node_values();
    for (std::size_t k = 0; k < phi.size(); ++k) phi[k] += tc.chi * v[k];
  }
  return TaxisSource::spline_field(ClampedSpline::fit(g.a, g.b, phi), 1.0);
}

InverseDistribution Simulation::transport(const InverseDistribution& V, const TaxisSource& taxis, double dt,
                                          long* newton_iters) const {
  TransportDiagnostics diag;
  auto out = t_step(V, taxis, model_.diffusion, dt, newton_, ends_, &diag);
  if (newton_iters) *newton_iters += diag.newton.iterations;
  return out;
}

SResult Simulation::reaction(const InverseDistribution& V, const FieldSystem& fields, double dt) const {
  return reaction_.step(V, fields, dt, {model_.freeze_last_cell_reaction});
}

SimState Simulation::strang_step(const SimState& state, double dt) const {
  if (!(dt > 0.0)) throw SolverError(ErrorCode::TimeStepUnderflow, "strang_step needs dt > 0");
  SimState next = state;
  const auto V1 = transport(state.V, taxis(state.fields), 0.5 * dt, &next.newton_iters);
  auto s = reaction(V1, state.fields, dt);
  next.V = transport(s.V, taxis(s.fields), 0.5 * dt, &next.newton_iters);
  next.fields = std::move(s.fields);
  next.clamped_negatives += s.clamped_negatives;
  next.t = state.t + dt;
  next.step_count += 1;
  next.dt_history.push_back(dt);
  return next;
}

double Simulation::adaptive_dt(const SimState& state, const TimeController& ctl) const {
  const double cap = ctl.K * state.V.grid.dw();
  const TaxisSource tx = taxis(state.fields);
  double dt = 0.0;
  if (tx.kind == TaxisSource::Kind::LogKernel) {
    dt = diagonal_dominance_dt(state.V, tx, model_.diffusion, ctl.cfl * cap, ctl.min_dt(), ends_);
  } else {
    double bound = cap;
    if (tx.kind == TaxisSource::Kind::SplineField) {
      const auto& V = state.V.nodes;
      const auto slope = tx.spline.derivative(V);
      for (std::size_t j = 0; j + 1 < V.size(); ++j) {
        const double jump = tx.chi * std::abs(slope[j + 1] - slope[j]);
        if (jump > 0.0) bound = std::min(bound, (V[j + 1] - V[j]) / jump);
      }
    }
    dt = ctl.cfl * bound;
  }
  if (tx.kind == TaxisSource::Kind::LogKernel && !(dt >= ctl.min_dt()))
    throw SolverError(ErrorCode::TimeStepUnderflow,
                      "no increment above dt_min keeps the implicit stage diagonally dominant" +
                          at_context(state.step_count, state.t));
  if (!(dt >= ctl.min_dt()))
    throw SolverError(ErrorCode::TimeStepUnderflow,
                      "adaptive increment " + std::to_string(dt) + " below dt_min" + at_context(state.step_count, state.t));
  return dt;
}

RunResult Simulation::run(const TimeController& ctl) const {
  RunResult result;
  SimState state = initial_state();
  result.snapshots.push_back(state);
  if (!(ctl.t_end > 0.0)) return result;

  std::vector<double> stops;
  for (double t : ctl.snapshot_times)
    if (t > 0.0 && t < ctl.t_end) stops.push_back(t);
  stops.push_back(ctl.t_end);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  const double landing_tol = 1e-12 * std::max(1.0, ctl.t_end);
  for (double stop : stops) {
    while (stop - state.t > landing_tol) {
      const double remaining = stop - state.t;
      double dt = 0.0;
      try {
        dt = ctl.fixed_dt ? *ctl.fixed_dt : adaptive_dt(state, ctl);
      } catch (const SolverError& e) {
        // With the log kernel the increment is dictated by diagonal dominance, which fails
        // for every dt once the nodes collapse: that is the aggregation singularity.
        if (e.code() != ErrorCode::TimeStepUnderflow || model_.attractant != AttractantKind::LogKernel) throw;
        result.blowup = BlowupRecord{state.t, state, std::string("BlowupDetected: ") + e.what()};
        return result;
      }
      const double proposed = dt;
      bool land = false;
      if (dt >= remaining * (1.0 - 1e-9)) {
        dt = remaining;
        land = true;
      }
      // The history is detached while stepping so that it is not copied every step.
      std::vector<double> history = std::move(state.dt_history);
      std::vector<double> proposals = std::move(state.dt_proposed);
      state.dt_history.clear();
      state.dt_proposed.clear();
      for (int attempt = 0;; ++attempt) {
        try {
          SimState next = strang_step(state, dt);
          if (land) next.t = stop;
          next.retries = state.retries + attempt;
          history.push_back(dt);
          proposals.push_back(proposed);
          next.dt_history = std::move(history);
          next.dt_proposed = std::move(proposals);
          state = std::move(next);
          break;
        } catch (const SolverError& e) {
          if (e.code() == ErrorCode::BlowupDetected) {
            state.dt_history = std::move(history);
            state.dt_proposed = std::move(proposals);
            result.blowup = BlowupRecord{state.t, state, e.what()};
            return result;
          }
          if (!retryable(e.code()) || attempt == ctl.max_retries)
            throw SolverError(e.code(), std::string(e.what()) + at_context(state.step_count, state.t));
          dt *= 0.5;
          land = false;
          if (dt < ctl.min_dt())
            throw SolverError(ErrorCode::TimeStepUnderflow,
                              "retries exhausted the increment" + at_context(state.step_count, state.t));
        }
      }
    }
    state.t = stop;
    result.snapshots.push_back(state);
  }
  return result;
}

SimState strang_step(const SimState& state, const ModelSpec& model, double dt) {
  return Simulation(model).strang_step(state, dt);
}

double adaptive_dt(const SimState& state, const ModelSpec& model, const TimeController& ctl) {
  return Simulation(model).adaptive_dt(state, ctl);
}

RunResult run(const ModelSpec& model, const TimeController& ctl) { return Simulation(model).run(ctl); }

InverseDistribution explicit_euler_step(const InverseDistribution& V, const TaxisSource& taxis,
                                        const DiffusionLaw& law, double dt) {
  const double dw = V.grid.dw();
  const auto& v = V.nodes;
  const int M = V.M();
  const auto slope = eval_taxis_gradient(taxis, dw, v);
  InverseDistribution out = V;
  for (int j = 0; j <= M; ++j) {
    double F = 0.0;
    if (j < M) F += law.flux(dw, v[j + 1] - v[j]);
    if (j > 0) F -= law.flux(dw, v[j] - v[j - 1]);
    out.nodes[j] = v[j] + dt * taxis.chi * slope[j] - dt * F;
  }
  return out;
}

std::pair<double, double> cfl_bounds(const InverseDistribution& V, const TaxisSource& taxis,
                                     const DiffusionLaw& law, double theta) {
  const auto& v = V.nodes;
  const int M = V.M();
  const double dw = V.grid.dw();
  const double g1 = law.kind == DiffusionKind::Linear ? 0.0 : law.gamma - 1.0;

  // Gaps beyond the end nodes are infinite, so only interior nodes constrain diffusion.
  double diff = kInf;
  for (int j = 1; j < M; ++j) {
    const double left = v[j] - v[j - 1], right = v[j + 1] - v[j];
    const double worst = std::max(std::pow(left, -g1), std::pow(right, -g1));
    diff = std::min(diff, left * right / worst);
  }
  diff *= theta / (2.0 * law.D * std::pow(dw, g1));

  double tax = kInf;
  if (taxis.chi != 0.0 && taxis.kind != TaxisSource::Kind::None) {
    const auto slope = eval_taxis_gradient(taxis, dw, v);
    for (int j = 0; j < M; ++j) {
      const double jump = std::abs(slope[j + 1] - slope[j]);
      if (jump > 0.0) tax = std::min(tax, (v[j + 1] - v[j]) / jump);
    }
    tax *= (1.0 - theta) / taxis.chi;
  }
  return {diff, tax};
}

}  // namespace mtfe
