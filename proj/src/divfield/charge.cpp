#include "gmt/divfield/charge.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "gmt/core/error.hpp"
#include "gmt/core/exact_sum.hpp"
#include "gmt/core/parallel.hpp"

namespace gmt {

double spline_bump(double t) {
  const double u = 2.0 * std::fabs(t);
  if (u >= 2.0) return 0.0;
  if (u <= 1.0) return 1.0 - 1.5 * u * u + 0.75 * u * u * u;
  const double v = 2.0 - u;
  return 0.25 * v * v * v;
}

double spline_bump_derivative(double t) {
  const double u = 2.0 * std::fabs(t);
  if (u >= 2.0) return 0.0;
  const double s = t < 0.0 ? -2.0 : 2.0;
  if (u <= 1.0) return s * (-3.0 * u + 2.25 * u * u);
  const double v = 2.0 - u;
  return s * (-0.75 * v * v);
}

double spline_bump_primitive(double t) {
  if (t <= -1.0) return 0.0;
  if (t >= 1.0) return 0.75;
  const double u = 2.0 * std::fabs(t);
  double g = 0.0;  // ∫_0^u of the profile in the variable u
  if (u <= 1.0) {
    g = u - 0.5 * u * u * u + 0.1875 * u * u * u * u;
  } else {
    const double v = 2.0 - u;
    g = 0.6875 + 0.0625 * (1.0 - v * v * v * v);
  }
  return t < 0.0 ? 0.375 - 0.5 * g : 0.375 + 0.5 * g;
}

double spline_gradient_constant(int dim) {
  if (dim < 1 || dim > kMaxDim) throw DomainError("dimension must be in [1, 3]");
  static const std::array<double, kMaxDim> cache = [] {
    using Rule = boost::math::quadrature::gauss<double, 30>;
    // Integrate piecewise over the knots of the spline on every axis.
    const std::array<double, 5> knots{-1.0, -0.5, 0.0, 0.5, 1.0};
    auto integrate1 = [&](auto&& fn) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += Rule::integrate(fn, knots[k], knots[k + 1]);
      return s;
    };
    std::array<double, kMaxDim> out{};
    out[0] = 2.0;
    out[1] = integrate1([&](double y) {
      return integrate1([&](double x) {
        const double gx = spline_bump_derivative(x) * spline_bump(y);
        const double gy = spline_bump(x) * spline_bump_derivative(y);
        return std::sqrt(gx * gx + gy * gy);
      });
    });
    out[2] = integrate1([&](double z) {
      return integrate1([&](double y) {
        return integrate1([&](double x) {
          const double bx = spline_bump(x), by = spline_bump(y), bz = spline_bump(z);
          const double gx = spline_bump_derivative(x) * by * bz;
          const double gy = bx * spline_bump_derivative(y) * bz;
          const double gz = bx * by * spline_bump_derivative(z);
          return std::sqrt(gx * gx + gy * gy + gz * gz);
        });
      });
    });
    return out;
  }();
  return cache[static_cast<std::size_t>(dim - 1)];
}

namespace {

TestFunctionRecord finish(const TestFunction& phi, int dim, double integral, double eps, bool strong) {
  TestFunctionRecord r;
  r.phi = phi;
  r.integral = integral;
  r.l1 = std::pow(0.75 * phi.width, dim);
  r.grad_l1 = spline_gradient_constant(dim) * std::pow(phi.width, dim - 1);
  r.sup = 1.0;
  r.excess = std::fabs(integral) - eps * (r.grad_l1 + (strong ? 0.0 : r.sup));
  r.ratio = r.excess / r.l1;
  return r;
}

double phi_at(const TestFunction& phi, const Point& x, int dim) {
  double v = phi.sign;
  for (int i = 0; i < dim && v != 0.0; ++i) v *= spline_bump((x[i] - phi.center[i]) / phi.width);
  return v;
}

void validate_phi(const TestFunction& phi) {
  if (!(phi.width > 0.0) || !std::isfinite(phi.width)) throw DomainError("test function width must be positive");
  if (phi.sign != 1 && phi.sign != -1) throw DomainError("test function sign must be +1 or -1");
}

// Parameters of the random family and the ladders, generated sequentially so
// that the list depends only on the seed.
struct Family {
  std::vector<TestFunction> random;
  std::vector<std::vector<TestFunction>> ladders;
};

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void check_region(const Region& K, const RootBox& box) {
  if (K.empty()) throw DomainError("charge test region is empty");
  if (K.dim() != box.dim) throw DomainError("region and measure dimensions differ");
  for (const auto& q : K.cubes()) validate_cube(q, box.dim);
}

std::vector<TestFunction> random_family(const Region& K, const RootBox& box, const ChargeOptions& opt, double min_width) {
  std::mt19937_64 rng(opt.seed);
  std::vector<TestFunction> out;
  out.reserve(opt.trials);
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const auto& q = K.cubes()[rng() % K.size()];
    const double side = q.side(box);
    const double wmax = 0.5 * side;
    const double wmin = std::min(wmax, std::max(min_width, wmax * 0x1.0p-10));
    TestFunction phi;
    phi.width = wmin * std::pow(wmax / wmin, uniform01(rng));
    const Point lo = q.lower(box);
    for (int i = 0; i < box.dim; ++i) phi.center[i] = lo[i] + phi.width + uniform01(rng) * (side - 2.0 * phi.width);
    phi.sign = (rng() & 1U) ? 1 : -1;
    out.push_back(phi);
  }
  return out;
}

std::vector<TestFunction> ladder_at(const Point& c, const Region& K, const RootBox& box, int steps, double min_width) {
  std::vector<TestFunction> out;
  for (const auto& q : K.cubes()) {
    const Point lo = q.lower(box);
    const double side = q.side(box);
    double room = side;
    for (int i = 0; i < box.dim; ++i) room = std::min({room, c[i] - lo[i], lo[i] + side - c[i]});
    if (!(room > 0.0)) continue;
    for (int k = 0; k < steps; ++k) {
      const double w = std::ldexp(room, -k);
      if (w < min_width) break;
      out.push_back({c, w, 1});
    }
    break;
  }
  return out;
}

template <typename Eval>
ChargeReport run(const Family& fam, const ChargeOptions& opt, const std::string& family, Eval&& eval) {
  if (fam.random.empty() && std::all_of(fam.ladders.begin(), fam.ladders.end(), [](const auto& l) { return l.empty(); }))
    throw DomainError("test family is empty");
  std::vector<TestFunctionRecord> rand(fam.random.size());
  parallel_for(fam.random.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) rand[i] = eval(fam.random[i]);
  });
  ChargeReport rep;
  rep.options = opt;
  rep.family = family;
  bool have = false;
  auto consider = [&](const TestFunctionRecord& r) {
    ++rep.evaluated;
    if (!have || r.ratio > rep.worst.ratio) {
      rep.worst = r;
      have = true;
    }
  };
  for (const auto& r : rand) consider(r);
  for (const auto& ladder : fam.ladders) {
    std::vector<TestFunctionRecord> recs;
    for (const auto& phi : ladder) recs.push_back(eval(phi));
    for (const auto& r : recs) consider(r);
    const int n = static_cast<int>(recs.size());
    int start = n;
    while (start > 0 && recs[static_cast<std::size_t>(start - 1)].excess > 0.0 &&
           (start == n || recs[static_cast<std::size_t>(start)].ratio > recs[static_cast<std::size_t>(start - 1)].ratio))
      --start;
    if (n - start >= 3 && (rep.refutation_step < 0 || start + 1 < rep.refutation_step)) {
      rep.verdict = ChargeVerdict::kViolated;
      rep.refutation_step = start + 1;
      rep.certificate = recs.back();
    }
  }
  rep.C = std::max(0.0, rep.worst.ratio);
  return rep;
}

std::string describe(const ChargeOptions& opt, std::size_t ladders) {
  return "tensor cubic B-spline bumps: " + std::to_string(opt.trials) + " random (log-uniform widths, random signs), " +
         std::to_string(ladders) + " halving ladders of " + std::to_string(opt.ladder_steps) + " steps";
}

void check_options(const ChargeOptions& opt) {
  if (!(opt.eps >= 0.0) || !std::isfinite(opt.eps)) throw DomainError("eps must be a nonnegative number");
  if (opt.ladder_steps < 0) throw DomainError("ladder steps must be nonnegative");
}

}  // namespace

TestFunctionRecord evaluate_test_function(const SignedAtomicMeasure& mu, const TestFunction& phi, double eps,
                                          bool strong) {
  validate_phi(phi);
  ExactSum sum;
  for (const auto& a : mu.positive().atoms()) sum.add(a.mass * phi_at(phi, a.x, mu.dim()));
  for (const auto& a : mu.negative().atoms()) sum.add(-a.mass * phi_at(phi, a.x, mu.dim()));
  return finish(phi, mu.dim(), sum.value(), eps, strong);
}

TestFunctionRecord evaluate_test_function(const GridField& f, const TestFunction& phi, double eps, bool strong) {
  validate_phi(phi);
  if (f.rank() != FieldRank::kScalar) throw DomainError("charge test expects a scalar field");
  const auto& spec = f.spec();
  const int n = spec.dim();
  const double h = spec.spacing();
  const auto cells = static_cast<long>(spec.cells_per_axis());
  // Per axis: cell range meeting the support and ∫ over each cell of the 1D factor.
  std::array<long, kMaxDim> lo{};
  std::array<std::vector<double>, kMaxDim> weight;
  for (int i = 0; i < n; ++i) {
    const double a = (phi.center[i] - phi.width - spec.box.origin[i]) / h;
    const double b = (phi.center[i] + phi.width - spec.box.origin[i]) / h;
    lo[i] = std::clamp(static_cast<long>(std::floor(a)), 0L, cells);
    const long hi = std::clamp(static_cast<long>(std::ceil(b)), 0L, cells);
    for (long k = lo[i]; k < hi; ++k) {
      const double x0 = spec.box.origin[i] + static_cast<double>(k) * h;
      const double w = phi.width * (spline_bump_primitive((x0 + h - phi.center[i]) / phi.width) -
                                    spline_bump_primitive((x0 - phi.center[i]) / phi.width));
      weight[static_cast<std::size_t>(i)].push_back(w);
    }
  }
  ExactSum sum;
  for (int i = 0; i < n; ++i)
    if (weight[static_cast<std::size_t>(i)].empty()) return finish(phi, n, 0.0, eps, strong);
  std::array<std::size_t, kMaxDim> k{};
  while (true) {
    CubeIndex idx{};
    double w = phi.sign;
    for (int i = 0; i < n; ++i) {
      idx[i] = static_cast<std::uint32_t>(lo[i] + static_cast<long>(k[i]));
      w *= weight[static_cast<std::size_t>(i)][k[i]];
    }
    if (w != 0.0) sum.add(w * f.at(spec.flatten(idx)));
    int i = 0;
    while (i < n && k[i] + 1 == weight[static_cast<std::size_t>(i)].size()) k[i++] = 0;
    if (i == n) break;
    ++k[i];
  }
  return finish(phi, n, sum.value(), eps, strong);
}

ChargeReport charge_test(const SignedAtomicMeasure& mu, const Region& K, const ChargeOptions& options) {
  check_options(options);
  check_region(K, mu.box());
  Family fam;
  fam.random = random_family(K, mu.box(), options, 0.0);
  std::vector<Point> centers;
  for (const auto* part : {&mu.positive(), &mu.negative()})
    for (const auto& a : part->atoms()) centers.push_back(a.x);
  std::sort(centers.begin(), centers.end());
  centers.erase(std::unique(centers.begin(), centers.end()), centers.end());
  for (const auto& c : centers) fam.ladders.push_back(ladder_at(c, K, mu.box(), options.ladder_steps, 0.0));
  return run(fam, options, describe(options, centers.size()),
             [&](const TestFunction& phi) { return evaluate_test_function(mu, phi, options.eps, options.strong); });
}

ChargeReport charge_test(const GridField& f, const Region& K, const ChargeOptions& options) {
  check_options(options);
  if (f.rank() != FieldRank::kScalar) throw DomainError("charge test expects a scalar field");
  const auto& spec = f.spec();
  check_region(K, spec.box);
  const double min_width = 2.0 * spec.spacing();
  Family fam;
  fam.random = random_family(K, spec.box, options, min_width);
  std::vector<Point> centers;
  std::size_t peak = 0;
  for (std::size_t c = 1; c < spec.cell_count(); ++c)
    if (std::fabs(f.at(c)) > std::fabs(f.at(peak))) peak = c;
  centers.push_back(spec.center(peak));
  for (const auto& q : K.cubes()) centers.push_back(q.center(spec.box));
  for (const auto& c : centers) fam.ladders.push_back(ladder_at(c, K, spec.box, options.ladder_steps, min_width));
  return run(fam, options, describe(options, centers.size()),
             [&](const TestFunction& phi) { return evaluate_test_function(f, phi, options.eps, options.strong); });
}

}  // namespace gmt
