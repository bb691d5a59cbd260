#pragma once

#include <memory>
#include <vector>

#include "gmt/core/dyadic.hpp"
#include "gmt/core/error.hpp"
#include "gmt/core/gauge.hpp"
#include "gmt/core/measure.hpp"
#include "gmt/decompose/restriction.hpp"

namespace gmt {

struct SeparatedPieces {
  std::vector<Region> pieces;        ///< trimmed pieces (occupied level-L cubes)
  std::vector<double> dropped_mass;  ///< per piece
  double delta_lower = 0.0;          ///< trimmed pieces are ≥ 2·delta_lower apart
};

/// Trims pieces (as sets of atoms: those whose level-L cube the piece covers)
/// so that distinct pieces are at least 2·δ̲ apart, dropping at most eps/n
/// mass from each, with the largest δ̲ realizable by level-L cubes. Earlier
/// pieces take precedence. A single piece is returned unchanged with
/// δ̲ = root side. Throws DomainError if two pieces share an atom and
/// InfeasibleCoverError if no positive δ̲ meets the mass budget.
[[nodiscard]] SeparatedPieces separate_pieces(const std::vector<Region>& pieces, const AtomicMeasure& mu, double eps,
                                              int L);

struct ScheduleStep {
  double c = 0.0;
  double delta = 0.0;
  double eps = 0.0;
};

struct SeriesPiece {
  WeightedRestriction restriction;  ///< ν_k as weights on μ
  ScheduleStep step;                ///< for the remainder piece: the achieved cap at the last delta
  CapCertificate certificate;
  bool remainder = false;
};

struct SeriesDecomposition {
  std::vector<SeriesPiece> pieces;
  std::vector<ScheduleStep> schedule;
  double residual_mass = 0.0;  ///< mass left after the scheduled pieces
  int max_level = 0;
};

/// Thrown in strict mode when the schedule runs out with mass above min ε.
class IncompleteDecompositionError : public Error {
 public:
  IncompleteDecompositionError(const std::string& what, WeightedRestriction remainder)
      : Error(what), remainder_(std::move(remainder)) {}
  [[nodiscard]] const WeightedRestriction& remainder() const { return remainder_; }

 private:
  WeightedRestriction remainder_;
};

/// Piece k is the capped restriction (c_k, δ_k) of what earlier pieces left.
/// Stops once the remainder mass is ≤ min ε_k or the schedule is exhausted;
/// a nonzero remainder becomes a final piece. Weights are multiples of 2^-52,
/// so they sum to exactly 1 on every atom.
[[nodiscard]] SeriesDecomposition series_decomposition(std::shared_ptr<const AtomicMeasure> mu, const GaugeFunction& g,
                                                       const std::vector<ScheduleStep>& schedule, int L,
                                                       bool strict = false);

/// μ_n = ν_0 + … + ν_n over the scheduled pieces, one entry per schedule step
/// (constant once the pieces run out). Requires c strictly decreasing.
[[nodiscard]] std::vector<WeightedRestriction> approx_sequence(std::shared_ptr<const AtomicMeasure> mu,
                                                               const GaugeFunction& g,
                                                               const std::vector<ScheduleStep>& schedule, int L);

}  // namespace gmt
