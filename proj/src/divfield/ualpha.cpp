#include "gmt/divfield/ualpha.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gmt/core/error.hpp"
#include "gmt/core/exact_sum.hpp"
#include "gmt/core/parallel.hpp"

namespace gmt {

namespace {

double norm(const Point& x, int dim) {
  double r2 = 0.0;
  for (int i = 0; i < dim; ++i) r2 += x[i] * x[i];
  return std::sqrt(r2);
}

double eta(double r, double R) {
  const double s = r * r / (R * R);
  return s >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - s));
}

int max_samples_per_axis(int dim) { return dim == 1 ? 4096 : dim == 2 ? 64 : 16; }

// Sub-samples per axis so that a cell (or face) at distance rho from 0 is
// cut into pieces of about a quarter of the local wavelength 2πρ^{α+1}/α.
int samples_for(double alpha, double rho, double h, int dim) {
  const int cap = max_samples_per_axis(dim);
  if (rho <= 0.0) return cap;
  const double wavelength = 2.0 * std::numbers::pi * std::pow(rho, alpha + 1.0) / alpha;
  const double s = std::ceil(4.0 * h / wavelength);
  return s >= cap ? cap : std::max(1, static_cast<int>(s));
}

// Distance from 0 to the axis-aligned box [lo, lo + h]^dim.
double distance_to_cell(const Point& lo, double h, int dim) {
  double d2 = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double v = lo[i] > 0.0 ? lo[i] : (lo[i] + h < 0.0 ? -(lo[i] + h) : 0.0);
    d2 += v * v;
  }
  return std::sqrt(d2);
}

// Mean of fn over the midpoints of an s^k sub-lattice of the box lo + [0,h]^k
// in the coordinates listed in axes; the remaining coordinates are fixed.
template <typename Fn>
double lattice_mean(const Point& base, const std::array<int, kMaxDim>& axes, int k, double h, int s, Fn&& fn) {
  ExactSum sum;
  std::array<int, kMaxDim> j{};
  const long total = static_cast<long>(std::pow(s, k));
  for (long n = 0; n < total; ++n) {
    long rest = n;
    Point x = base;
    for (int a = 0; a < k; ++a) {
      j[a] = static_cast<int>(rest % s);
      rest /= s;
      x[axes[a]] = base[axes[a]] + (j[a] + 0.5) * h / s;
    }
    sum.add(fn(x));
  }
  return sum.value() / static_cast<double>(total);
}

}  // namespace

double u_alpha(double alpha, const Point& x, int dim) {
  const double r = norm(x, dim);
  return r == 0.0 ? 0.0 : r * std::sin(std::pow(r, -alpha));
}

double grad_u_alpha_norm(double alpha, const Point& x, int dim) {
  const double r = norm(x, dim);
  if (r == 0.0) return 0.0;
  const double t = std::pow(r, -alpha);
  return std::fabs(std::sin(t) - alpha * t * std::cos(t));
}

double f_alpha(double alpha, double bump_radius, const Point& x, int dim) {
  const double r = norm(x, dim);
  if (r == 0.0) return 0.0;
  const double e = eta(r, bump_radius);
  if (e == 0.0) return 0.0;
  const double t = std::pow(r, -alpha);
  const double u = r * std::sin(t);
  const double s = r * r / (bump_radius * bump_radius);
  const double d1_eta = e * (-2.0 * x[0] / (bump_radius * bump_radius * (1.0 - s) * (1.0 - s)));
  return e * (x[0] / r) * (std::sin(t) - alpha * t * std::cos(t)) + u * d1_eta;
}

UAlphaFields u_alpha_field(double alpha, double bump_radius, const GridSpec& spec) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive");
  if (!(bump_radius > 0.0)) throw DomainError("bump radius must be positive");
  validate_grid(spec);
  if (alpha <= 2.0 && spec.level < 8) throw ResolutionError("u_alpha needs grid level >= 8 for alpha <= 2");
  const int n = spec.dim();
  const double h = spec.spacing();
  UAlphaFields out{GridField::scalar(spec), GridField::scalar(spec), GridField::scalar(spec), GridField::scalar(spec)};
  std::vector<double> grad(spec.cell_count());

  parallel_for(spec.cell_count(), [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c) {
      const Point x = spec.center(c);
      out.u.at(c) = u_alpha(alpha, x, n);
      out.f.at(c) = f_alpha(alpha, bump_radius, x, n);
      Point lo{};
      for (int i = 0; i < n; ++i) lo[i] = x[i] - 0.5 * h;
      const int s = samples_for(alpha, distance_to_cell(lo, h, n), h, n);
      std::array<int, kMaxDim> all{0, 1, 2};
      out.f_plus_average.at(c) =
          lattice_mean(lo, all, n, h, s, [&](const Point& p) { return std::max(0.0, f_alpha(alpha, bump_radius, p, n)); });
      grad[c] = lattice_mean(lo, all, n, h, s, [&](const Point& p) { return grad_u_alpha_norm(alpha, p, n); });

      // ∫_cell div(uW) = ∫ uη over the face x₁ = hi minus the face x₁ = lo.
      auto flux = [&](double x1) {
        Point base = lo;
        base[0] = x1;
        Point across = lo;
        across[0] = 0.0;  // distance to the face: |x1| combined with the transverse gap
        const double d = distance_to_cell(across, h, n);
        const int sf = samples_for(alpha, std::hypot(x1, d), h, n);
        std::array<int, kMaxDim> rest{1, 2, 0};
        const double mean = lattice_mean(base, rest, n - 1, h, sf,
                                         [&](const Point& p) { return u_alpha(alpha, p, n) * eta(norm(p, n), bump_radius); });
        return mean * std::pow(h, n - 1);
      };
      out.f_average.at(c) = (flux(lo[0] + h) - flux(lo[0])) / spec.cell_volume();
    }
  });

  // A cell centred exactly at the origin: f there is a removable convention.
  for (std::size_t c = 0; c < spec.cell_count(); ++c) {
    const Point x = spec.center(c);
    if (norm(x, n) > 1e-12 * h) continue;
    const CubeIndex idx = spec.unflatten(c);
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < n; ++i)
      for (int step : {-1, 1}) {
        const long v = static_cast<long>(idx[i]) + step;
        if (v < 0 || v >= static_cast<long>(spec.cells_per_axis())) continue;
        CubeIndex j = idx;
        j[i] = static_cast<std::uint32_t>(v);
        sum += out.f.at(spec.flatten(j));
        ++count;
      }
    out.f.at(c) = count > 0 ? sum / count : 0.0;
    out.origin_cell_averaged = true;
  }
  out.grad_u_l1 = exact_sum(grad) * spec.cell_volume();
  return out;
}

std::vector<DensitySample> density_profile_plus(const GridField& f, const std::vector<double>& radii, double exponent,
                                                const Point& center) {
  if (f.rank() != FieldRank::kScalar) throw DomainError("density profile expects a scalar field");
  const auto& spec = f.spec();
  const int n = spec.dim();
  const double h = spec.spacing();
  const int sub = n == 3 ? 8 : 16;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (radii[k] < 4.0 * h) throw ResolutionError("radius below four grid spacings");
    if (k > 0 && !(radii[k] < radii[k - 1])) throw DomainError("radii must be strictly decreasing");
    for (int i = 0; i < n; ++i)
      if (center[i] - radii[k] < spec.box.origin[i] - 1e-12 || center[i] + radii[k] > spec.box.origin[i] + spec.box.side + 1e-12)
        throw DomainError("ball leaves the grid box");
  }
  std::vector<DensitySample> out;
  const auto cells = static_cast<long>(spec.cells_per_axis());
  for (double r : radii) {
    std::array<long, kMaxDim> lo{};
    std::array<long, kMaxDim> hi{};
    for (int i = 0; i < n; ++i) {
      lo[i] = std::max(0L, static_cast<long>(std::floor((center[i] - r - spec.box.origin[i]) / h)));
      hi[i] = std::min(cells - 1, static_cast<long>(std::floor((center[i] + r - spec.box.origin[i]) / h)));
    }
    ExactSum sum;
    std::array<long, kMaxDim> k = lo;
    while (true) {
      CubeIndex idx{};
      Point corner{};
      double near2 = 0.0;
      double far2 = 0.0;
      for (int i = 0; i < n; ++i) {
        idx[i] = static_cast<std::uint32_t>(k[i]);
        corner[i] = spec.box.origin[i] + static_cast<double>(k[i]) * h;
        const double a = corner[i] - center[i];
        const double b = a + h;
        const double nearest = a > 0.0 ? a : (b < 0.0 ? -b : 0.0);
        const double farthest = std::max(std::fabs(a), std::fabs(b));
        near2 += nearest * nearest;
        far2 += farthest * farthest;
      }
      const double value = std::max(0.0, f.at(spec.flatten(idx)));
      if (value > 0.0 && near2 < r * r) {
        double frac = 1.0;
        if (far2 > r * r) {
          std::array<int, kMaxDim> all{0, 1, 2};
          frac = lattice_mean(corner, all, n, h, sub, [&](const Point& p) {
            double d2 = 0.0;
            for (int i = 0; i < n; ++i) d2 += (p[i] - center[i]) * (p[i] - center[i]);
            return d2 < r * r ? 1.0 : 0.0;
          });
        }
        sum.add(value * frac);
      }
      int i = 0;
      while (i < n && k[i] == hi[i]) {
        k[i] = lo[i];
        ++i;
      }
      if (i == n) break;
      ++k[i];
    }
    out.push_back({r, sum.value() * spec.cell_volume() / std::pow(r, exponent)});
  }
  return out;
}

}  // namespace gmt
