#pragma once

#include <memory>
#include <span>
#include <vector>

#include "gmt/core/dyadic.hpp"
#include "gmt/core/gauge.hpp"
#include "gmt/core/measure.hpp"

namespace gmt {

/// Relative slack allowed on a cube cap before a certificate fails.
inline constexpr double kCapTolerance = 1e-12;

/// Largest fractional restriction ν ≤ μ with ν(Q) ≤ c·h(r_Q) for every dyadic
/// cube of level ≤ L and r_Q ≤ delta. Bottom-up proportional capping on the
/// cube tree; on this laminar family it attains the maximum total mass.
/// c ≤ 0 gives the zero restriction; delta below the level-L radius throws
/// InfeasibleCoverError.
[[nodiscard]] WeightedRestriction max_restriction(std::shared_ptr<const AtomicMeasure> mu, const GaugeFunction& g,
                                                  double c, double delta, int L);

/// Per-atom fractions of the capped restriction of the measure with the
/// positions of `mu` and the given masses (zeros allowed). The products
/// fraction·mass satisfy every cap in exact arithmetic.
[[nodiscard]] std::vector<double> capped_fractions(const AtomicMeasure& mu, std::span<const double> masses,
                                                   const GaugeFunction& g, double c, double delta, int L);

struct CapCertificate {
  double cap = 0.0;
  double delta = 0.0;
  int coarsest_level = 0;  ///< admissible level range that was checked
  int finest_level = 0;
  double worst_ratio = 0.0;  ///< max ν(Q)/(c·h(r_Q))
  DyadicCube worst;
  bool passed = false;  ///< worst_ratio ≤ 1 + kCapTolerance
};

/// Checks ν(Q) ≤ c·h(r_Q) on every occupied cube of level ≤ L with r_Q ≤ delta.
[[nodiscard]] CapCertificate certify_caps(const AtomicMeasure& nu, const GaugeFunction& g, double c, double delta,
                                          int L);
[[nodiscard]] inline bool satisfies_caps(const AtomicMeasure& nu, const GaugeFunction& g, double c, double delta,
                                         int L) {
  return certify_caps(nu, g, c, delta, L).passed;
}

struct Calibration {
  double c = 0.0;
  WeightedRestriction restriction;
  double removed = 0.0;
  std::vector<std::pair<double, double>> trail;  ///< every (c, removed mass) evaluated, in order
};

/// Smallest cap c with tv_distance(μ, max_restriction(μ, c)) ≤ eps, located by
/// halving/doubling from c = 1 and then 10 bisection steps; returns the upper
/// end of the final bracket. eps ≥ μ's total mass gives c = 0 and ν = 0.
[[nodiscard]] Calibration calibrate_restriction(std::shared_ptr<const AtomicMeasure> mu, const GaugeFunction& g,
                                                double eps, double delta, int L);

}  // namespace gmt
