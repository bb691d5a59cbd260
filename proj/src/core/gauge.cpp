#include "gmt/core/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gmt/core/error.hpp"

namespace gmt {

namespace {

constexpr double kLogCutoff = 1.0 / std::numbers::e;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate(const TableGauge& g) {
  if (g.knots.empty()) throw DomainError("table gauge needs at least one knot");
  double prev_t = 0.0;
  double prev_h = 0.0;
  bool first = true;
  for (const auto& [t, h] : g.knots) {
    if (!std::isfinite(t) || !std::isfinite(h)) throw DomainError("table gauge knot is not finite");
    if (t < 0.0) throw DomainError("table gauge knot with negative t");
    if (first && t == 0.0) {
      if (h != 0.0) throw DomainError("table gauge must satisfy h(0) = 0");
    } else {
      if (!first && t <= prev_t) throw DomainError("table gauge knots must be strictly increasing in t");
      if (h <= 0.0) throw DomainError("table gauge must be positive for t > 0");
    }
    if (h < prev_h) throw DomainError("table gauge knots must be nondecreasing in h");
    prev_t = t;
    prev_h = h;
    first = false;
  }
  if (g.knots.back().first <= 0.0) throw DomainError("table gauge needs a knot with t > 0");
}

double eval_table(const TableGauge& g, double t) {
  const auto& k = g.knots;
  if (t >= k.back().first) return k.back().second;
  auto it = std::upper_bound(k.begin(), k.end(), t,
                             [](double v, const std::pair<double, double>& p) { return v < p.first; });
  double t0 = 0.0;
  double h0 = 0.0;
  if (it != k.begin()) {
    t0 = std::prev(it)->first;
    h0 = std::prev(it)->second;
  }
  const double t1 = it->first;
  const double h1 = it->second;
  if (t == t0) return h0;
  return h0 + (h1 - h0) * ((t - t0) / (t1 - t0));
}

}  // namespace

double unit_ball_volume(double s) {
  // Integer dimensions via ω_s = 2π/s · ω_{s−2}, which keeps ω_1 = 2 exact.
  if (s == std::floor(s) && s <= 64.0) {
    double w = std::fmod(s, 2.0) == 0.0 ? 1.0 : 2.0;
    for (double k = std::fmod(s, 2.0) + 2.0; k <= s; k += 2.0) w *= 2.0 * std::numbers::pi / k;
    return w;
  }
  return std::pow(std::numbers::pi, s / 2.0) / std::tgamma(s / 2.0 + 1.0);
}

GaugeFunction::GaugeFunction(Kind kind) : kind_(std::move(kind)) {
  std::visit(Overloaded{
                 [this](const PowerGauge& g) {
                   if (!(g.s > 0.0) || !std::isfinite(g.s)) throw DomainError("power gauge needs s > 0");
                   if (g.normalized) omega_ = unit_ball_volume(g.s);
                 },
                 [](const PowerLogGauge& g) {
                   if (!(g.s > 0.0) || !std::isfinite(g.s)) throw DomainError("power_log gauge needs s > 0");
                   if (!(g.beta > 0.0) || !std::isfinite(g.beta))
                     throw DomainError("power_log gauge needs beta > 0");
                 },
                 [](const TableGauge& g) { validate(g); },
             },
             kind_);
}

double GaugeFunction::operator()(double t) const {
  if (std::isnan(t) || t < 0.0) throw DomainError("gauge evaluated at negative t");
  if (t == 0.0) return 0.0;
  return std::visit(Overloaded{
                        [this, t](const PowerGauge& g) { return omega_ * std::pow(t, g.s); },
                        [t](const PowerLogGauge& g) {
                          const double p = std::pow(t, g.s);
                          if (t >= kLogCutoff) return p;
                          return p * std::pow(std::log(1.0 / t), -g.beta);
                        },
                        [t](const TableGauge& g) { return eval_table(g, t); },
                    },
                    kind_);
}

bool operator==(const GaugeFunction& a, const GaugeFunction& b) {
  if (a.kind_.index() != b.kind_.index()) return false;
  return std::visit(Overloaded{
                        [&](const PowerGauge& x) {
                          const auto& y = std::get<PowerGauge>(b.kind_);
                          return x.s == y.s && x.normalized == y.normalized;
                        },
                        [&](const PowerLogGauge& x) {
                          const auto& y = std::get<PowerLogGauge>(b.kind_);
                          return x.s == y.s && x.beta == y.beta;
                        },
                        [&](const TableGauge& x) { return x.knots == std::get<TableGauge>(b.kind_).knots; },
                    },
                    a.kind_);
}

double eval_gauge(const GaugeFunction& g, double t) { return g(t); }

double gauge_ratio(const GaugeFunction& g, double t, int dim) {
  if (dim < 1) throw DomainError("dimension must be at least 1");
  if (std::isnan(t) || t <= 0.0) throw DomainError("gauge ratio needs t > 0");
  return g(t) / std::pow(t, dim - 1);
}

bool ratio_strictly_decreasing(const GaugeFunction& g, int dim, int k_min, int k_max) {
  double prev = gauge_ratio(g, std::ldexp(1.0, -k_min), dim);
  for (int k = k_min + 1; k <= k_max; ++k) {
    const double cur = gauge_ratio(g, std::ldexp(1.0, -k), dim);
    if (!(cur < prev)) return false;
    prev = cur;
  }
  return true;
}

}  // namespace gmt
