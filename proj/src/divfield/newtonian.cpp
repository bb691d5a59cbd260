#include "gmt/divfield/newtonian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "gmt/core/error.hpp"
#include "gmt/core/exact_sum.hpp"
#include "gmt/core/gauge.hpp"
#include "gmt/core/parallel.hpp"

namespace gmt {

double sphere_area(int dim) {
  if (dim < 1 || dim > kMaxDim) throw DomainError("dimension must be in [1, 3]");
  return dim * unit_ball_volume(dim);
}

Point newtonian_kernel(const Point& x, int dim) {
  double r2 = 0.0;
  for (int i = 0; i < dim; ++i) r2 += x[i] * x[i];
  Point out{};
  if (r2 == 0.0) return out;
  const double scale = 1.0 / (sphere_area(dim) * std::pow(r2, 0.5 * dim));
  for (int i = 0; i < dim; ++i) out[i] = x[i] * scale;
  return out;
}

namespace {

void accumulate(const AtomicMeasure& mu, double sign, const Point& x, int dim, Point& out) {
  for (const auto& a : mu.atoms()) {
    Point d{};
    for (int i = 0; i < dim; ++i) d[i] = x[i] - a.x[i];
    const Point k = newtonian_kernel(d, dim);
    for (int i = 0; i < dim; ++i) out[i] += sign * a.mass * k[i];
  }
}

// Atoms exactly on a cell centre would make that sample infinite.
AtomicMeasure nudge(const AtomicMeasure& mu, const GridSpec& spec, std::vector<Point>& nudged) {
  const double h = spec.spacing();
  std::vector<Atom> atoms = mu.atoms();
  bool changed = false;
  for (auto& a : atoms) {
    bool on_center = true;
    for (int i = 0; i < spec.dim() && on_center; ++i) {
      const double u = (a.x[i] - spec.box.origin[i]) / h - 0.5;
      on_center = std::fabs(u - std::round(u)) <= 1e-9 && u > -0.5 && u < static_cast<double>(spec.cells_per_axis()) - 0.5;
    }
    if (!on_center) continue;
    nudged.push_back(a.x);
    a.x[0] += 0.5 * h;
    changed = true;
  }
  if (!changed) return mu;
  // The shifted atom may leave the root box of μ; the field does not care.
  RootBox wide = mu.box();
  for (int i = 0; i < wide.dim; ++i) wide.origin[i] -= h;
  wide.side += 2.0 * h;
  return AtomicMeasure(wide, std::move(atoms));
}

}  // namespace

Point field_at(const SignedAtomicMeasure& mu, const Point& x) {
  Point out{};
  accumulate(mu.positive(), 1.0, x, mu.dim(), out);
  accumulate(mu.negative(), -1.0, x, mu.dim(), out);
  return out;
}

NewtonianField newtonian_field(const SignedAtomicMeasure& mu, const GridSpec& spec) {
  validate_grid(spec);
  if (spec.dim() != mu.dim()) throw DomainError("grid and measure dimensions differ");
  NewtonianField out{GridField::vector(spec), {}};
  const AtomicMeasure pos = nudge(mu.positive(), spec, out.nudged_atoms);
  const AtomicMeasure neg = nudge(mu.negative(), spec, out.nudged_atoms);
  const int n = spec.dim();
  parallel_for(spec.cell_count(), [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c) {
      const Point x = spec.center(c);
      Point v{};
      accumulate(pos, 1.0, x, n, v);
      accumulate(neg, -1.0, x, n, v);
      for (int i = 0; i < n; ++i) out.V.at(c, i) = v[i];
    }
  });
  return out;
}

double sphere_flux(const VectorFieldFn& F, int dim, const Point& center, double radius, int points) {
  if (!(radius > 0.0)) throw DomainError("sphere radius must be positive");
  if (dim == 1) {
    Point lo = center;
    Point hi = center;
    lo[0] -= radius;
    hi[0] += radius;
    return F(hi)[0] - F(lo)[0];
  }
  if (points < 3) throw DomainError("need at least 3 quadrature points");
  ExactSum sum;
  if (dim == 2) {
    for (int k = 0; k < points; ++k) {
      const double th = 2.0 * std::numbers::pi * (k + 0.5) / points;
      const Point n{std::cos(th), std::sin(th), 0.0};
      const Point x{center[0] + radius * n[0], center[1] + radius * n[1], 0.0};
      const Point v = F(x);
      sum.add(v[0] * n[0] + v[1] * n[1]);
    }
    return sum.value() * 2.0 * std::numbers::pi * radius / points;
  }
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < points; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / points;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double th = golden * k;
    const Point n{rho * std::cos(th), rho * std::sin(th), z};
    Point x{};
    for (int i = 0; i < 3; ++i) x[i] = center[i] + radius * n[i];
    const Point v = F(x);
    sum.add(v[0] * n[0] + v[1] * n[1] + v[2] * n[2]);
  }
  return sum.value() * 4.0 * std::numbers::pi * radius * radius / points;
}

Point interpolate_vector(const GridField& V, const Point& x) {
  if (V.rank() != FieldRank::kVector) throw DomainError("expected a vector field");
  const auto& spec = V.spec();
  const int n = spec.dim();
  const double h = spec.spacing();
  const auto cells = static_cast<double>(spec.cells_per_axis());
  CubeIndex lo{};
  std::array<double, kMaxDim> t{};
  for (int i = 0; i < n; ++i) {
    const double u = std::clamp((x[i] - spec.box.origin[i]) / h - 0.5, 0.0, std::max(0.0, cells - 1.0));
    const double fl = std::min(std::floor(u), std::max(0.0, cells - 2.0));
    lo[i] = static_cast<std::uint32_t>(fl);
    t[i] = cells > 1.0 ? u - fl : 0.0;
  }
  Point out{};
  for (std::uint32_t corner = 0; corner < (1U << n); ++corner) {
    double w = 1.0;
    CubeIndex idx{};
    for (int i = 0; i < n; ++i) {
      const bool up = (corner >> i) & 1U;
      w *= up ? t[i] : 1.0 - t[i];
      idx[i] = std::min<std::uint32_t>(lo[i] + (up ? 1U : 0U), static_cast<std::uint32_t>(spec.cells_per_axis() - 1));
    }
    if (w == 0.0) continue;
    const std::size_t c = spec.flatten(idx);
    for (int i = 0; i < n; ++i) out[i] += w * V.at(c, i);
  }
  return out;
}

double smooth_bump(const Point& x, const Point& center, double radius, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += (x[i] - center[i]) * (x[i] - center[i]);
  s /= radius * radius;
  if (s >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s));
}

GridField smooth_bump_field(const GridSpec& spec, const Point& center, double radius) {
  if (!(radius > 0.0)) throw DomainError("bump radius must be positive");
  GridField f = GridField::scalar(spec);
  for (std::size_t c = 0; c < spec.cell_count(); ++c) f.at(c) = smooth_bump(spec.center(c), center, radius, spec.dim());
  return f;
}

double weak_div_residual(const GridField& V, const SignedAtomicMeasure& mu, const GridField& phi) {
  const auto& spec = V.spec();
  if (V.rank() != FieldRank::kVector || phi.rank() != FieldRank::kScalar || !(phi.spec() == spec))
    throw DomainError("weak residual needs a vector V and a scalar φ on the same grid");
  if (mu.dim() != spec.dim()) throw DomainError("grid and measure dimensions differ");
  const auto m = spec.cells_per_axis();
  for (std::size_t c = 0; c < spec.cell_count(); ++c) {
    const CubeIndex idx = spec.unflatten(c);
    bool shell = false;
    for (int i = 0; i < spec.dim(); ++i) shell = shell || idx[i] < 2 || idx[i] + 2 >= m;
    if (shell && phi.at(c) != 0.0) throw DomainError("test function must vanish on the boundary shell");
  }
  const GridField grad = gradient(phi);
  ExactSum sum;
  for (std::size_t c = 0; c < spec.cell_count(); ++c)
    for (int i = 0; i < spec.dim(); ++i) sum.add(V.at(c, i) * grad.at(c, i) * spec.cell_volume());
  for (const auto& a : mu.positive().atoms()) sum.add(a.mass * interpolate(phi, a.x));
  for (const auto& a : mu.negative().atoms()) sum.add(-a.mass * interpolate(phi, a.x));
  return std::fabs(sum.value());
}

}  // namespace gmt
