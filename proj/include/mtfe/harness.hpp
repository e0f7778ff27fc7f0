#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mtfe/driver.hpp"
#include "mtfe/fvfd.hpp"

namespace mtfe {

/// (1/M) sum_{j=1}^{M-1} |V_j - V^fine_{2j}|. Throws ResolutionMismatch unless fine has 2M cells.
double error_V(const InverseDistribution& coarse, const InverseDistribution& fine);

/// log2(E_k / E_{k+1}) for consecutive entries. Throws NonPositiveError.
std::vector<double> eoc(const std::vector<double>& errors);

/// L1 distance between the coarse density and the fine one projected onto the coarse cells.
double error_rho(const PiecewiseConstantDensity& coarse, const PiecewiseConstantDensity& fine);

/// (1/M) sum_{j=1}^{M-1} |V_j - W_j| for two runs on the same mass grid.
double error_temporal(const InverseDistribution& a, const InverseDistribution& b);

/// L1 distance on [lo, hi] of the density from the reference projected onto its cells.
double windowed_l1(const PiecewiseConstantDensity& density, const PiecewiseConstantDensity& reference, double lo,
                   double hi);

enum class LadderMode { Spatial, Temporal };

struct EocLadder {
  LadderMode mode = LadderMode::Spatial;
  std::vector<int> resolutions;  // M per run (spatial) or the fixed M (temporal, single entry)
  std::vector<double> dts;       // fixed increment per run
  std::vector<double> errors_V;
  std::vector<double> errors_rho;  // spatial only
  std::vector<double> eoc_V;
  std::vector<double> eoc_rho;
  std::vector<int> max_nodes_per_fe_cell;  // spatial diagnostic, one per coarse rung
};

/// Runs the model with N = M for each M and fixed dt, in parallel. Entry k compares run k with
/// run k+1, which must have twice the resolution.
EocLadder spatial_ladder(const ModelSpec& model, const std::vector<int>& Ms, double dt, double t_end);

/// Runs at fixed M = N for each dt (halving), in parallel. Entry k compares dt_k with dt_{k+1}.
EocLadder temporal_ladder(const ModelSpec& model, int M, const std::vector<double>& dts, double t_end);

struct RunRecord {
  std::string preset;
  std::string method;  // "mtfe" or "fvfd"
  int resolution = 0;
  double wall_seconds = 0.0;
  double error = 0.0;
  long steps = 0;
  long newton_iters = 0;
  double dt_min = 0.0, dt_max = 0.0, dt_mean = 0.0;
  std::string status = "ok";

  bool operator==(const RunRecord&) const = default;
};

struct EfficiencyOptions {
  double t_end = 23.0;
  double window_lo = 0.0, window_hi = 5.0;
  int reference_cells = 0;  // 0 selects 2 * 6 * max(S)
  int fvfd_factor = 6;
};

/// MTFE with N = M and the baseline with 6M cells for every M in S, each scored against a fine
/// baseline run. Rows are sorted by method and resolution; failed rows keep their status.
std::vector<RunRecord> compare_efficiency(const ModelSpec& model, const std::vector<int>& S,
                                          const EfficiencyOptions& opt = {});

/// Fraction of MTFE rows whose error does not exceed the baseline error interpolated (log-log)
/// at the same wall time.
double mtfe_wins_at_equal_time(const std::vector<RunRecord>& rows);

/// Local maxima of a sequence whose topographic prominence is at least min_prominence.
std::vector<std::size_t> prominent_peaks(const std::vector<double>& values, double min_prominence);

// CSV with a header row, 17 significant digits and LF line endings.
std::string state_csv(const std::vector<SimState>& states);
std::string fields_csv(const std::vector<SimState>& states, const ModelSpec& model);
std::string records_csv(const std::vector<RunRecord>& rows);
std::string ladder_csv(const EocLadder& ladder);

struct StateRow {
  double t;
  int j;
  double w, V, rho;
  bool operator==(const StateRow&) const = default;
};
std::vector<StateRow> parse_state_csv(std::string_view text);
std::vector<RunRecord> parse_records_csv(std::string_view text);

}  // namespace mtfe
