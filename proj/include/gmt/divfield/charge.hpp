#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gmt/core/dyadic.hpp"
#include "gmt/core/grid_field.hpp"
#include "gmt/core/measure.hpp"

namespace gmt {

/// Cubic B-spline rescaled to [−1, 1] with peak 1 at 0; ∫ = 3/4.
[[nodiscard]] double spline_bump(double t);
[[nodiscard]] double spline_bump_derivative(double t);
/// ∫_{−1}^{t} spline_bump.
[[nodiscard]] double spline_bump_primitive(double t);
/// K_N = ∫_{[−1,1]^N} |∇Φ| for Φ(y) = Π_i spline_bump(y_i); K_1 = 2.
[[nodiscard]] double spline_gradient_constant(int dim);

/// φ(x) = sign · Φ((x − center)/width), supported in center + [−width, width]^N.
struct TestFunction {
  Point center{};
  double width = 0.0;
  int sign = 1;
};

struct TestFunctionRecord {
  TestFunction phi;
  double integral = 0.0;  ///< ∫ φ dμ
  double l1 = 0.0;  ///< ‖φ‖₁ = (3w/4)^N
  double grad_l1 = 0.0;  ///< ‖Dφ‖₁ = K_N w^{N−1}
  double sup = 1.0;  ///< ‖φ‖_∞
  double excess = 0.0;  ///< |∫φ dμ| − ε(‖Dφ‖₁ + ‖φ‖_∞), without the sup term in strong mode
  double ratio = 0.0;  ///< excess / ‖φ‖₁: the smallest C this φ allows
};

/// Atoms: Σ ±m_a φ(x_a). Grid: f read as constant per cell, integrated against
/// φ exactly through the spline primitive.
[[nodiscard]] TestFunctionRecord evaluate_test_function(const SignedAtomicMeasure& mu, const TestFunction& phi,
                                                        double eps, bool strong);
[[nodiscard]] TestFunctionRecord evaluate_test_function(const GridField& f, const TestFunction& phi, double eps,
                                                        bool strong);

enum class ChargeVerdict { kSatisfiedOnFamily, kViolated };

struct ChargeOptions {
  double eps = 0.0;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  int ladder_steps = 20;
  bool strong = false;  ///< drop the ε‖φ‖_∞ term (strong-charge inequality)
};

struct ChargeReport {
  double C = 0.0;  ///< max(0, max ratio) over the random family and the ladders
  ChargeOptions options;
  std::string family;
  TestFunctionRecord worst;
  ChargeVerdict verdict = ChargeVerdict::kSatisfiedOnFamily;
  /// Last ladder step of a refuting ladder: positive excess with ‖φ‖₁ → 0.
  std::optional<TestFunctionRecord> certificate;
  int refutation_step = -1;  ///< 1-based ladder step from which the excess stays positive and the ratio grows
  std::size_t evaluated = 0;
};

/// Relative slack for floating-point rounding when comparing C against a bound.
inline constexpr double kChargeRoundoff = 1e-12;

/// True when no test function of the report needs a constant above C.
[[nodiscard]] inline bool satisfied_at(const ChargeReport& r, double C) {
  return r.verdict == ChargeVerdict::kSatisfiedOnFamily && r.C <= C * (1.0 + kChargeRoundoff);
}

/// Random tensor-spline bumps inside the cubes of K (log-uniform widths,
/// random signs) plus a halving ladder of bumps at each atom. A ladder
/// refutes when, from some step on, the excess stays positive and the ratio
/// strictly increases for at least three steps. A "satisfied" verdict only
/// speaks for this family. Throws DomainError if K is empty or lies outside
/// the root box, or if the family would be empty.
[[nodiscard]] ChargeReport charge_test(const SignedAtomicMeasure& mu, const Region& K, const ChargeOptions& options);
/// Grid version: widths stay at two spacings or more; ladders sit at the cell
/// of largest |f| and at the centres of the cubes of K.
[[nodiscard]] ChargeReport charge_test(const GridField& f, const Region& K, const ChargeOptions& options);

}  // namespace gmt
