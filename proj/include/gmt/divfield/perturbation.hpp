#pragma once

#include <vector>

#include "gmt/core/grid_field.hpp"
#include "gmt/core/measure.hpp"
#include "gmt/decompose/series.hpp"

namespace gmt {

/// c_k = 2^{k−4}, δ_k = max(r_0 2^{−k}, r_L), ε_k = ε 2^{−k−1} for k < 12.
[[nodiscard]] std::vector<ScheduleStep> default_perturbation_schedule(const RootBox& box, int L, double eps);

struct PerturbationOptions {
  GridSpec grid;
  std::vector<ScheduleStep> schedule;  ///< empty: default_perturbation_schedule at the grid level
  double alpha_budget = 0.0;  ///< A; nonpositive means A = ε
};

struct PerturbationPiece {
  int k = 0;
  double mass = 0.0;  ///< ν_k⁺(R^N) + ν_k⁻(R^N), correctly rounded
  bool tail = false;  ///< k > j
  double delta = 0.0;  ///< mollifier scale (tail pieces)
  double alpha = 0.0;  ///< A 2^{−(k+1)} (tail pieces)
  double sup_error = 0.0;  ///< grid sup of |W_k − ρ_δ ∗ W_k| at the chosen δ
  bool alpha_met = false;
};

struct ModulusSample {
  double distance = 0.0;
  double oscillation = 0.0;
};

struct PerturbationResult {
  GridField V;  ///< Σ_{k≤j} W_k + Σ_{k>j} (W_k − ρ_{δ_k} ∗ W_k)
  GridField f;  ///< Σ_{k>j} ρ_{δ_k} ∗ ν_k
  int j = -1;
  double eps = 0.0;
  double tail_mass = 0.0;  ///< correctly rounded Σ_{k>j} of the products w_{k,a} m_a
  double f_l1 = 0.0;  ///< midpoint quadrature of |f|
  double alpha_budget = 0.0;
  double alpha_sum = 0.0;
  bool alpha_certified = false;  ///< every tail piece met its α_k
  std::vector<PerturbationPiece> pieces;
  std::vector<ModulusSample> modulus;
  SeriesDecomposition positive;
  SeriesDecomposition negative;
};

/// max over cells and axes of |V(x + d e_i) − V(x)| for d = 1, 2, 4, …
/// spacings, reported as a running maximum so it is nondecreasing in d.
[[nodiscard]] std::vector<ModulusSample> continuity_modulus(const GridField& V);

/// Splits μ^± with series_decomposition for the gauge t^{N−1}, takes the
/// smallest j ≥ −1 whose tail mass is ≤ ε, and mollifies the tail pieces.
/// δ_k halves from an eighth of the box side while it stays resolvable, and
/// stops at the first δ whose sup error is ≤ α_k (otherwise at the smallest
/// one, with alpha_met false). Requires N ≥ 2, ε > 0, and μ inside the open box.
[[nodiscard]] PerturbationResult l1_perturbation(const SignedAtomicMeasure& mu, double eps,
                                                 const PerturbationOptions& options);

}  // namespace gmt
