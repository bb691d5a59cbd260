#pragma once

#include <limits>
#include <span>
#include <vector>

#include "gmt/core/dyadic.hpp"
#include "gmt/core/gauge.hpp"
#include "gmt/core/measure.hpp"

namespace gmt {

inline constexpr double kNoDeltaCap = std::numeric_limits<double>::infinity();

struct ContentResult {
  double value = 0.0;
  Region optimal_cover;
  double delta_cap = kNoDeltaCap;
};

/// Dyadic Hausdorff content of A: the minimum of Σ h(r_Q) over covers of A by
/// dyadic cubes of level ≤ `max_level` with r_Q ≤ delta. `value` is the
/// correctly rounded sum of the cover prices. Throws InfeasibleCoverError if
/// A is nonempty and level-`max_level` cubes are wider than delta, and
/// ResolutionError if the cover would exceed `max_cover` cubes.
[[nodiscard]] ContentResult dyadic_content(const Region& A, const RootBox& box, const GaugeFunction& g, double delta,
                                           int max_level, std::size_t max_cover = std::size_t{1} << 22);

/// Same minimum without materializing the cover.
[[nodiscard]] double dyadic_content_value(const Region& A, const RootBox& box, const GaugeFunction& g, double delta,
                                          int max_level);

struct DensityLevel {
  int level = 0;
  double radius = 0.0;
  double max_ratio = 0.0;  ///< max μ(Q)/h(r_Q) over cubes of this level
  DyadicCube argmax;       ///< on the unshifted grid; index may exceed the grid by one when shifted
  int shift_mask = 0;      ///< axes along which the argmax grid is shifted by half a cube
};

struct DensityReport {
  std::vector<DensityLevel> levels;  ///< admissible levels (r_Q ≤ delta), coarse to fine
  double sup = 0.0;
};

/// Per-level maxima of μ(Q)/h(r_Q) over dyadic cubes with r_Q ≤ delta and
/// level in [min_level, max_level]; with `shifted_grids` the 2^N grids offset
/// by half a cube along each subset of axes are scanned too.
[[nodiscard]] DensityReport density_sup(const AtomicMeasure& mu, const GaugeFunction& g, double delta, int min_level,
                                        int max_level, bool shifted_grids = false);

struct ProfilePoint {
  double budget = 0.0;
  double mass = 0.0;
};

enum class ProfileMethod { kAuto, kExact, kLagrangian };

/// Largest mass an antichain of dyadic cubes (level ≤ L, r_Q ≤ delta) can
/// carry under a price budget. `frontier` holds the exact Pareto staircase or,
/// for the Lagrangian sweep, the vertices of the upper concave envelope.
struct ConcentrationProfile {
  std::vector<ProfilePoint> points;
  std::vector<ProfilePoint> frontier;
  double delta_cap = kNoDeltaCap;
  int max_level = 0;
  bool exact = false;
};

inline constexpr std::size_t kExactProfileNodes = 20;

[[nodiscard]] ConcentrationProfile concentration_profile(const AtomicMeasure& mu, const GaugeFunction& g,
                                                         double delta, int max_level, std::span<const double> budgets,
                                                         ProfileMethod method = ProfileMethod::kAuto);

/// Profile value at a budget read off the frontier.
[[nodiscard]] double profile_mass(const ConcentrationProfile& p, double budget);

/// Smallest budget at which the profile exceeds eps; every antichain of
/// smaller price carries mass ≤ eps. Infinity if eps ≥ total mass.
[[nodiscard]] double profile_modulus(const ConcentrationProfile& p, double eps);

/// Coarsest level radius δ at which every antichain of price ≤ M carries mass
/// ≤ eps, or 0 if no level ≤ max_level qualifies.
[[nodiscard]] double profile_delta(const AtomicMeasure& mu, const GaugeFunction& g, double M, double eps,
                                   int max_level, ProfileMethod method = ProfileMethod::kAuto);

}  // namespace gmt
