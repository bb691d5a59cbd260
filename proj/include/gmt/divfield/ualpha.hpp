#pragma once

#include <vector>

#include "gmt/core/grid_field.hpp"

namespace gmt {

/// u_α(x) = |x| sin(|x|^{−α}), u_α(0) = 0.
[[nodiscard]] double u_alpha(double alpha, const Point& x, int dim);

/// |∇u_α(x)| = |sin t − α t cos t| with t = |x|^{−α}; 0 at the origin.
[[nodiscard]] double grad_u_alpha_norm(double alpha, const Point& x, int dim);

/// f_α = div(u_α W) for W = e₁ η_R, η_R(x) = exp(1 − 1/(1 − |x|²/R²)) on
/// |x| < R, so W(0) = e₁. Closed form away from 0; returns 0 at the origin.
[[nodiscard]] double f_alpha(double alpha, double bump_radius, const Point& x, int dim);

struct UAlphaFields {
  GridField u;  ///< u_α at cell centres
  GridField f;  ///< f_α at cell centres; a cell centred at 0 gets the mean of its axis neighbours
  GridField f_average;  ///< cell means of f_α from the flux of u_α W through the cell faces
  GridField f_plus_average;  ///< cell means of f_α⁺ by sub-sampling that follows the local wavelength
  double grad_u_l1 = 0.0;  ///< ∫ |∇u_α| over the grid from sub-sampled cell means
  bool origin_cell_averaged = false;
};

/// Throws DomainError for α ≤ 0 or R ≤ 0, and ResolutionError when α ≤ 2 and
/// the grid level is below 8. Sub-sampling is capped (64 per axis in 2D),
/// so cells where the oscillation is finer than that are sampled
/// quasi-randomly in phase.
[[nodiscard]] UAlphaFields u_alpha_field(double alpha, double bump_radius, const GridSpec& spec);

struct DensitySample {
  double radius = 0.0;
  double value = 0.0;
};

/// D(r) = r^{−exponent} ∫_{B(center, r)} max(f, 0), reading f as constant
/// on each cell; cells cut by the sphere are weighted by their sub-sampled
/// covered fraction. Radii must be strictly decreasing, at least four
/// spacings, and the balls must lie in the grid box.
[[nodiscard]] std::vector<DensitySample> density_profile_plus(const GridField& f, const std::vector<double>& radii,
                                                              double exponent, const Point& center = Point{});

}  // namespace gmt
