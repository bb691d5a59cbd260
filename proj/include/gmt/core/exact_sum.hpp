#pragma once

#include <span>
#include <vector>

namespace gmt {

/// Correctly rounded floating-point accumulator (Shewchuk partials).
///
/// The result of `value()` is the double nearest to the exact real sum of
/// every added term, so it does not depend on the order of insertion.
class ExactSum {
 public:
  void add(double x);
  ExactSum& operator+=(double x) {
    add(x);
    return *this;
  }
  [[nodiscard]] double value() const;

 private:
  std::vector<double> partials_;
};

[[nodiscard]] double exact_sum(std::span<const double> xs);

}  // namespace gmt
