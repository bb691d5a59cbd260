#pragma once

#include "gmt/core/dyadic.hpp"
#include "gmt/core/gauge.hpp"
#include "gmt/core/measure.hpp"

namespace gmt {

struct FrostmanResult {
  AtomicMeasure measure;  ///< one atom per level-L cube of the region, at its center
  Region saturated_cover;  ///< maximal cubes Q with μ(Q) = h(r_Q)
  double total_mass = 0.0;
  int rescaled_cubes = 0;  ///< cubes whose subtree was scaled down
};

/// Relative slack under which a cube counts as saturated.
inline constexpr double kSaturationTolerance = 1e-12;

/// Dyadic Frostman construction: every level-L cube of A starts with mass
/// h(r_L); going up, the masses under any cube Q exceeding h(r_Q) are scaled
/// proportionally down to h(r_Q). The result satisfies μ(Q) ≤ h(r_Q) for every
/// dyadic cube of level ≤ L in exact arithmetic on the stored doubles.
[[nodiscard]] FrostmanResult frostman_construct(const Region& A, const RootBox& box, const GaugeFunction& g, int L);

}  // namespace gmt
