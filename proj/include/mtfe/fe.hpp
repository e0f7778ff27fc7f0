#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mtfe/grids.hpp"
#include "mtfe/tridiagonal.hpp"

namespace mtfe {

/// Mass and stiffness matrices of the boundary-flattened hat basis, both of order N-1.
struct FeMatrices {
  Tridiagonal mass;
  Tridiagonal stiffness;
};

FeMatrices assemble_fe_matrices(const EulerGrid& grid);

/// Integrand R(rho, field values at x) for load vectors.
using PointIntegrand = std::function<double(double rho, std::span<const double> fields)>;

/// Load vectors (int R(rho_h, fields) phi_l dx)_l, one per integrand, integrated with 2-point
/// Gauss on the common refinement of the Euler grid and the density interfaces. The density is
/// taken as zero outside its support.
std::vector<std::vector<double>> overlay_quadrature(const EulerGrid& grid,
                                                    const PiecewiseConstantDensity& density,
                                                    std::span<const FeField> fields,
                                                    std::span<const PointIntegrand> integrands);

/// Single-field form: integrand(rho, c).
std::vector<double> overlay_quadrature(const PiecewiseConstantDensity& density, const FeField& field,
                                       const std::function<double(double, double)>& integrand);

}  // namespace mtfe
