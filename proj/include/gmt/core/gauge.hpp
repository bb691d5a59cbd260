#pragma once

#include <utility>
#include <variant>
#include <vector>

namespace gmt {

/// h(t) = t^s, optionally scaled by ω_s = π^{s/2} / Γ(s/2 + 1).
struct PowerGauge {
  double s = 1.0;
  bool normalized = false;
};

/// h(t) = t^s · log(1/t)^{-β} for t ≤ 1/e, continued as t^s above 1/e.
///
/// Both branches agree at t = 1/e, so the gauge is continuous and
/// nondecreasing on [0, ∞) while h(t)/t^s → 0 as t → 0.
struct PowerLogGauge {
  double s = 1.0;
  double beta = 1.0;
};

/// Monotone piecewise-linear interpolation through (t, h) knots, with an
/// implicit knot (0, 0) and clamping above the last knot.
struct TableGauge {
  std::vector<std::pair<double, double>> knots;
};

/// A dimension function: continuous, nondecreasing, h(0) = 0, h(t) > 0 for t > 0.
class GaugeFunction {
 public:
  using Kind = std::variant<PowerGauge, PowerLogGauge, TableGauge>;

  /// Validates parameters; throws DomainError on an inadmissible gauge.
  explicit GaugeFunction(Kind kind);

  static GaugeFunction power(double s, bool normalized = false) {
    return GaugeFunction(PowerGauge{s, normalized});
  }
  static GaugeFunction power_log(double s, double beta) {
    return GaugeFunction(PowerLogGauge{s, beta});
  }
  static GaugeFunction table(std::vector<std::pair<double, double>> knots) {
    return GaugeFunction(TableGauge{std::move(knots)});
  }

  [[nodiscard]] const Kind& kind() const { return kind_; }
  /// ω_s for normalized power gauges, 1 otherwise.
  [[nodiscard]] double normalization() const { return omega_; }

  [[nodiscard]] double operator()(double t) const;

  friend bool operator==(const GaugeFunction& a, const GaugeFunction& b);

 private:
  Kind kind_;
  double omega_ = 1.0;
};

/// Volume of the unit ball in dimension s (non-integer s allowed).
[[nodiscard]] double unit_ball_volume(double s);

[[nodiscard]] double eval_gauge(const GaugeFunction& g, double t);

/// h(t) / t^{N-1}; the Besicovitch admissibility ratio.
[[nodiscard]] double gauge_ratio(const GaugeFunction& g, double t, int dim);

/// True when gauge_ratio is strictly decreasing along t = 2^{-k_min} ... 2^{-k_max}.
[[nodiscard]] bool ratio_strictly_decreasing(const GaugeFunction& g, int dim, int k_min, int k_max);

}  // namespace gmt
