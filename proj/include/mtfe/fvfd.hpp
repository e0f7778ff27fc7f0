#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mtfe/grids.hpp"
#include "mtfe/model.hpp"

namespace mtfe {

/// Uniform-grid finite volume baseline in the original variables. Strang split:
/// taxis(dt/2) diffusion-reaction(dt) taxis(dt/2). The taxis flux uses a minmod-limited
/// upwind reconstruction with SSP-RK2; diffusion and reactions use the same IMEX midpoint
/// rule as the mass transport scheme, with mirror ghosts at both ends.
struct FvfdConfig {
  int N_cells = 0;
  double cfl = 0.49;
  double dt_max = 1e-2;
  std::optional<double> fixed_dt;
};

struct FvfdResult {
  double a = 0.0, b = 1.0;
  double t = 0.0;
  std::vector<double> rho;                  // cell averages
  std::vector<std::vector<double>> fields;  // cell averages, ModelSpec::fields order
  long steps = 0;

  PiecewiseConstantDensity density() const;
};

/// Throws InstabilityDetected on NaN or rho below -1e-6, ConfigError for models it cannot
/// represent (whole line, nonlinear diffusion).
FvfdResult fvfd_run(const ModelSpec& model, const FvfdConfig& cfg, double t_end);

/// Cell averages of a piecewise constant function on the target cells, integrated exactly
/// on the common refinement. Outside its support the source is zero.
std::vector<double> project_to_grid(const PiecewiseConstantDensity& source, std::span<const double> target_interfaces);

}  // namespace mtfe
