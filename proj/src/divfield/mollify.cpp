#include "gmt/divfield/mollify.hpp"

#include <cmath>
#include <vector>

#include "gmt/core/error.hpp"
#include "gmt/core/exact_sum.hpp"
#include "gmt/core/parallel.hpp"

namespace gmt {

namespace {

struct Offset {
  std::array<long, kMaxDim> d{};
  double w = 0.0;
};

void check_resolution(const MollifierSpec& rho, const GridSpec& spec) {
  validate_grid(spec);
  if (rho.dim() != spec.dim()) throw DomainError("mollifier and grid dimensions differ");
  if (rho.delta() < min_resolvable_delta(spec)) throw ResolutionError("mollifier scale below two grid spacings");
}

// Lattice offsets k with |k·h| < δ and their kernel values.
std::vector<Offset> stencil(const MollifierSpec& rho, double h) {
  const int n = rho.dim();
  const long reach = static_cast<long>(std::ceil(rho.delta() / h));
  std::vector<Offset> out;
  std::array<long, kMaxDim> k{};
  for (int i = 0; i < n; ++i) k[i] = -reach;
  while (true) {
    Point x{};
    for (int i = 0; i < n; ++i) x[i] = static_cast<double>(k[i]) * h;
    const double w = rho(x);
    if (w > 0.0) out.push_back({k, w});
    int i = 0;
    while (i < n && k[i] == reach) k[i++] = -reach;
    if (i == n) break;
    ++k[i];
  }
  return out;
}

void deposit(const AtomicMeasure& nu, double sign, const MollifierSpec& rho, const GridSpec& spec, GridField& out) {
  const int n = spec.dim();
  const double h = spec.spacing();
  const long reach = static_cast<long>(std::ceil(rho.delta() / h)) + 1;
  const auto cells = static_cast<long>(spec.cells_per_axis());
  for (const auto& a : nu.atoms()) {
    // Cell whose centre is nearest below the atom, per axis.
    std::array<long, kMaxDim> base{};
    for (int i = 0; i < n; ++i) base[i] = static_cast<long>(std::floor((a.x[i] - spec.box.origin[i]) / h - 0.5));
    std::vector<std::pair<std::array<long, kMaxDim>, double>> taps;
    ExactSum total;
    std::array<long, kMaxDim> k{};
    for (int i = 0; i < n; ++i) k[i] = -reach;
    while (true) {
      Point d{};
      std::array<long, kMaxDim> cell{};
      for (int i = 0; i < n; ++i) {
        cell[i] = base[i] + k[i];
        d[i] = spec.box.origin[i] + (static_cast<double>(cell[i]) + 0.5) * h - a.x[i];
      }
      const double w = rho(d);
      if (w > 0.0) {
        taps.emplace_back(cell, w);
        total.add(w);
      }
      int i = 0;
      while (i < n && k[i] == reach) k[i++] = -reach;
      if (i == n) break;
      ++k[i];
    }
    const double scale = sign * a.mass / (total.value() * spec.cell_volume());
    for (const auto& [cell, w] : taps) {
      bool inside = true;
      CubeIndex idx{};
      for (int i = 0; i < n; ++i) {
        inside = inside && cell[i] >= 0 && cell[i] < cells;
        idx[i] = static_cast<std::uint32_t>(std::max(0L, cell[i]));
      }
      if (inside) out.at(spec.flatten(idx)) += w * scale;
    }
  }
}

}  // namespace

double min_resolvable_delta(const GridSpec& spec) { return 2.0 * spec.spacing(); }

GridField mollify_measure(const AtomicMeasure& nu, const MollifierSpec& rho, const GridSpec& spec) {
  return mollify_measure(SignedAtomicMeasure(nu), rho, spec);
}

GridField mollify_measure(const SignedAtomicMeasure& nu, const MollifierSpec& rho, const GridSpec& spec) {
  check_resolution(rho, spec);
  if (nu.dim() != spec.dim()) throw DomainError("grid and measure dimensions differ");
  GridField out = GridField::scalar(spec);
  deposit(nu.positive(), 1.0, rho, spec, out);
  deposit(nu.negative(), -1.0, rho, spec, out);
  return out;
}

GridField mollify_field(const GridField& W, const MollifierSpec& rho) {
  const auto& spec = W.spec();
  check_resolution(rho, spec);
  const int n = spec.dim();
  const int nc = W.components();
  const auto taps = stencil(rho, spec.spacing());
  const auto cells = static_cast<long>(spec.cells_per_axis());
  GridField out(spec, W.rank());
  parallel_for(spec.cell_count(), [&](std::size_t b, std::size_t e) {
    std::vector<double> acc(static_cast<std::size_t>(nc));
    for (std::size_t c = b; c < e; ++c) {
      const CubeIndex idx = spec.unflatten(c);
      std::fill(acc.begin(), acc.end(), 0.0);
      double weight = 0.0;
      for (const auto& t : taps) {
        CubeIndex j{};
        bool inside = true;
        for (int i = 0; i < n && inside; ++i) {
          const long v = static_cast<long>(idx[i]) + t.d[i];
          inside = v >= 0 && v < cells;
          j[i] = static_cast<std::uint32_t>(std::max(0L, v));
        }
        if (!inside) continue;
        const std::size_t src = spec.flatten(j);
        weight += t.w;
        for (int k = 0; k < nc; ++k) acc[static_cast<std::size_t>(k)] += t.w * W.at(src, k);
      }
      for (int k = 0; k < nc; ++k) out.at(c, k) = acc[static_cast<std::size_t>(k)] / weight;
    }
  });
  return out;
}

}  // namespace gmt
