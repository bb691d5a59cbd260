#pragma once

#include "gmt/core/dyadic.hpp"

namespace gmt {

/// ∫_{|x|<1} exp(1/(|x|² − 1)) dx in dimension `dim`.
[[nodiscard]] double bump_integral(int dim);

/// ρ_δ(x) = δ^{-N} ρ(x/δ) with ρ = C exp(1/(|x|² − 1)) on the unit ball.
class MollifierSpec {
 public:
  /// Throws DomainError unless dim ∈ [1, 3] and delta > 0.
  MollifierSpec(int dim, double delta);

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] double delta() const { return delta_; }
  /// C such that ∫ ρ = 1.
  [[nodiscard]] double normalization() const { return norm_; }

  /// ρ_δ evaluated at displacement x.
  [[nodiscard]] double operator()(const Point& x) const;

 private:
  int dim_;
  double delta_;
  double norm_;
};

}  // namespace gmt
