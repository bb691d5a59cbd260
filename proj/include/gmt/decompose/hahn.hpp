#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gmt/core/gauge.hpp"
#include "gmt/core/measure.hpp"

namespace gmt {

/// Set function T on subsets of the atoms of one measure. The axioms
/// T(∅) = 0, monotonicity and subadditivity are spot-checked on seeded random
/// subsets at construction; a failure throws OracleContractError.
class OuterMeasureOracle {
 public:
  /// Receives a sorted list of distinct atom indices.
  using Evaluator = std::function<double(std::span<const std::size_t>)>;

  OuterMeasureOracle(std::string name, Evaluator eval, std::size_t atom_count, std::uint64_t seed = 0x5eed,
                     int samples = 64);

  [[nodiscard]] double operator()(std::span<const std::size_t> atoms) const { return eval_(atoms); }
  [[nodiscard]] const std::string& name() const { return name_; }

  /// T(F) = c·Λ^h_δ of the level-L cubes holding the atoms of F.
  static OuterMeasureOracle content_cap(std::shared_ptr<const AtomicMeasure> mu, const GaugeFunction& g, double c,
                                        double delta, int L);
  /// T(F) = κ·|F|.
  static OuterMeasureOracle counting(double kappa, std::size_t atom_count);
  /// T ≡ 0.
  static OuterMeasureOracle zero(std::size_t atom_count);
  /// Parses "content-cap:c,δ" (δ may be "inf"), "counting:κ" or "zero".
  static OuterMeasureOracle parse(const std::string& spec, std::shared_ptr<const AtomicMeasure> mu,
                                  const GaugeFunction& g, int L);

 private:
  std::string name_;
  Evaluator eval_;
};

enum class HahnSearch { kExhaustive, kCubeGenerated };

inline constexpr std::size_t kExhaustiveHahnAtoms = 20;
/// Violating sets lighter than this are ignored.
inline constexpr double kHahnMassFloor = 1e-12;

struct HahnPiece {
  std::vector<std::size_t> atoms;
  double outer = 0.0;  ///< T(F_k)
  double mass = 0.0;   ///< μ(F_k)
  double sup_violation = 0.0;  ///< ε_k: largest violating mass when F_k was chosen
};

struct HahnResult {
  std::vector<std::size_t> kept;  ///< E
  std::vector<HahnPiece> pieces;  ///< F_0, F_1, ... in removal order
  double theta = 0.5;
  HahnSearch search = HahnSearch::kExhaustive;
  double removed_outer = 0.0;  ///< T(E^c)
  double removed_mass = 0.0;   ///< μ(E^c)
  bool certified = false;      ///< μ(S) ≤ T(S) for every S ⊆ E in the searched family
};

/// Repeatedly removes a violating set F (T(F) ≤ μ(F), μ(F) > kHahnMassFloor)
/// with μ(F) ≥ θ·sup of violating masses, choosing the lexicographically
/// smallest sorted index set among those. Exhaustive search scans every
/// subset of the remaining atoms (≤ 20 atoms); cube-generated search scans
/// the atom sets of the level ≤ L dyadic cubes plus the union of the
/// violating ones.
[[nodiscard]] HahnResult greedy_hahn(const AtomicMeasure& mu, const OuterMeasureOracle& T, double theta,
                                     HahnSearch search, int L = 10);

}  // namespace gmt
