#pragma once

#include <functional>
#include <vector>

#include "gmt/core/grid_field.hpp"
#include "gmt/core/measure.hpp"

namespace gmt {

/// Surface area σ_{N−1} of the unit sphere in R^N (σ_0 = 2).
[[nodiscard]] double sphere_area(int dim);

/// Gradient of the fundamental solution: x/(σ_{N−1}|x|^N). In one dimension
/// this is sign(x)/2, so the field of μ is the centred cumulative mass.
[[nodiscard]] Point newtonian_kernel(const Point& x, int dim);

/// V(x) = Σ_a ±m_a K(x − x_a). Singular at the atoms.
[[nodiscard]] Point field_at(const SignedAtomicMeasure& mu, const Point& x);

struct NewtonianField {
  GridField V;
  /// Atoms that sat on a cell centre; they were shifted by half a spacing
  /// along the first axis for the evaluation.
  std::vector<Point> nudged_atoms;
};

/// V = K ∗ μ sampled at the cell centres of `spec` (same dimension as μ).
[[nodiscard]] NewtonianField newtonian_field(const SignedAtomicMeasure& mu, const GridSpec& spec);

using VectorFieldFn = std::function<Point(const Point&)>;

/// Outward flux of F through the sphere S(center, radius). Equal-weight nodes:
/// 2 in one dimension, `points` equispaced on the circle, `points` Fibonacci
/// nodes on the 2-sphere.
[[nodiscard]] double sphere_flux(const VectorFieldFn& F, int dim, const Point& center, double radius, int points);

/// Multilinear interpolation of every component of a vector field.
[[nodiscard]] Point interpolate_vector(const GridField& V, const Point& x);

/// exp(1 − 1/(1 − |x − c|²/R²)) inside the ball, 0 outside; equals 1 at c.
[[nodiscard]] double smooth_bump(const Point& x, const Point& center, double radius, int dim);
[[nodiscard]] GridField smooth_bump_field(const GridSpec& spec, const Point& center, double radius);

/// |∫ V·∇φ + Σ_a ±m_a φ(x_a)| with midpoint quadrature, central-difference ∇φ
/// and multilinear φ(x_a). Throws DomainError unless φ vanishes on the two
/// outermost cell layers.
[[nodiscard]] double weak_div_residual(const GridField& V, const SignedAtomicMeasure& mu, const GridField& phi);

}  // namespace gmt
