#include "gmt/core/mollifier.hpp"

#include <array>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "gmt/core/error.hpp"

namespace gmt {

double bump_integral(int dim) {
  if (dim < 1 || dim > kMaxDim) throw DomainError("dimension must be in [1, 3]");
  static const std::array<double, kMaxDim> cache = [] {
    std::array<double, kMaxDim> out{};
    boost::math::quadrature::tanh_sinh<double> integrator;
    for (int n = 1; n <= kMaxDim; ++n) {
      auto radial = [n](double r) {
        if (r >= 1.0) return 0.0;
        return std::pow(r, n - 1) * std::exp(1.0 / (r * r - 1.0));
      };
      const double sphere = 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
      out[static_cast<std::size_t>(n - 1)] = sphere * integrator.integrate(radial, 0.0, 1.0);
    }
    return out;
  }();
  return cache[static_cast<std::size_t>(dim - 1)];
}

MollifierSpec::MollifierSpec(int dim, double delta) : dim_(dim), delta_(delta) {
  if (dim < 1 || dim > kMaxDim) throw DomainError("dimension must be in [1, 3]");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("mollifier scale must be positive");
  norm_ = 1.0 / bump_integral(dim);
}

double MollifierSpec::operator()(const Point& x) const {
  double r2 = 0.0;
  for (int i = 0; i < dim_; ++i) r2 += x[i] * x[i];
  r2 /= delta_ * delta_;
  if (r2 >= 1.0) return 0.0;
  return norm_ * std::exp(1.0 / (r2 - 1.0)) / std::pow(delta_, dim_);
}

}  // namespace gmt
