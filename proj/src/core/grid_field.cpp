#include "gmt/core/grid_field.hpp"

#include <algorithm>
#include <cmath>

#include "gmt/core/error.hpp"
#include "gmt/core/exact_sum.hpp"

namespace gmt {

double GridSpec::cell_volume() const { return std::pow(spacing(), box.dim); }

CubeIndex GridSpec::unflatten(std::size_t flat) const {
  CubeIndex idx{};
  for (int i = box.dim - 1; i >= 0; --i) {
    idx[i] = static_cast<std::uint32_t>(flat & (cells_per_axis() - 1));
    flat >>= level;
  }
  return idx;
}

std::size_t GridSpec::flatten(const CubeIndex& idx) const {
  std::size_t flat = 0;
  for (int i = 0; i < box.dim; ++i) flat = (flat << level) | idx[i];
  return flat;
}

Point GridSpec::center(std::size_t flat) const {
  const CubeIndex idx = unflatten(flat);
  const double h = spacing();
  Point p{};
  for (int i = 0; i < box.dim; ++i) p[i] = box.origin[i] + h * (idx[i] + 0.5);
  return p;
}

void validate_grid(const GridSpec& spec) {
  validate_box(spec.box);
  if (spec.level < 0 || spec.box.dim * spec.level > 27) throw ResolutionError("grid level out of supported range");
}

GridField::GridField(GridSpec spec, FieldRank rank) : spec_(spec), rank_(rank) {
  validate_grid(spec_);
  values_.assign(spec_.cell_count() * static_cast<std::size_t>(components()), 0.0);
}

GridField::GridField(GridSpec spec, FieldRank rank, std::vector<double> values)
    : spec_(spec), rank_(rank), values_(std::move(values)) {
  validate_grid(spec_);
  if (values_.size() != spec_.cell_count() * static_cast<std::size_t>(components()))
    throw FormatError("grid field value count does not match its header");
}

std::vector<double> GridField::integral() const {
  const int nc = components();
  std::vector<ExactSum> sums(static_cast<std::size_t>(nc));
  for (std::size_t c = 0; c < spec_.cell_count(); ++c)
    for (int k = 0; k < nc; ++k) sums[static_cast<std::size_t>(k)].add(at(c, k));
  std::vector<double> out;
  for (const auto& s : sums) out.push_back(s.value() * spec_.cell_volume());
  return out;
}

double GridField::l1_norm() const {
  const int nc = components();
  ExactSum sum;
  for (std::size_t c = 0; c < spec_.cell_count(); ++c) {
    double n2 = 0.0;
    for (int k = 0; k < nc; ++k) n2 += at(c, k) * at(c, k);
    sum.add(std::sqrt(n2));
  }
  return sum.value() * spec_.cell_volume();
}

double GridField::sup_norm() const {
  const int nc = components();
  double best = 0.0;
  for (std::size_t c = 0; c < spec_.cell_count(); ++c) {
    double n2 = 0.0;
    for (int k = 0; k < nc; ++k) n2 += at(c, k) * at(c, k);
    best = std::max(best, std::sqrt(n2));
  }
  return best;
}

GridField& GridField::operator+=(const GridField& other) {
  if (!(spec_ == other.spec_) || rank_ != other.rank_) throw DomainError("grid fields are not compatible");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridField& GridField::operator-=(const GridField& other) {
  if (!(spec_ == other.spec_) || rank_ != other.rank_) throw DomainError("grid fields are not compatible");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

double interpolate(const GridField& f, const Point& x) {
  if (f.rank() != FieldRank::kScalar) throw DomainError("interpolation expects a scalar field");
  const auto& spec = f.spec();
  const int n = spec.dim();
  const double h = spec.spacing();
  const auto cells = static_cast<double>(spec.cells_per_axis());
  std::array<std::uint32_t, kMaxDim> lo{};
  std::array<double, kMaxDim> t{};
  for (int i = 0; i < n; ++i) {
    double u = (x[i] - spec.box.origin[i]) / h - 0.5;
    u = std::clamp(u, 0.0, cells - 1.0);
    double fl = std::floor(u);
    if (fl >= cells - 1.0) fl = std::max(0.0, cells - 2.0);
    lo[i] = static_cast<std::uint32_t>(fl);
    t[i] = cells > 1.0 ? u - fl : 0.0;
  }
  double value = 0.0;
  for (std::uint32_t corner = 0; corner < (1U << n); ++corner) {
    double w = 1.0;
    CubeIndex idx{};
    bool valid = true;
    for (int i = 0; i < n; ++i) {
      const bool up = (corner >> i) & 1U;
      w *= up ? t[i] : 1.0 - t[i];
      idx[i] = lo[i] + (up ? 1U : 0U);
      if (idx[i] >= spec.cells_per_axis()) valid = false;
    }
    if (w == 0.0 || !valid) continue;
    value += w * f.at(spec.flatten(idx));
  }
  return value;
}

GridField gradient(const GridField& f) {
  if (f.rank() != FieldRank::kScalar) throw DomainError("gradient expects a scalar field");
  const auto& spec = f.spec();
  const int n = spec.dim();
  const double h = spec.spacing();
  const auto m = spec.cells_per_axis();
  GridField g = GridField::vector(spec);
  if (m < 2) return g;
  for (std::size_t c = 0; c < spec.cell_count(); ++c) {
    const CubeIndex idx = spec.unflatten(c);
    for (int i = 0; i < n; ++i) {
      CubeIndex lo = idx;
      CubeIndex hi = idx;
      double span = 2.0 * h;
      if (idx[i] == 0) {
        hi[i] += 1;
        span = h;
      } else if (idx[i] + 1 == m) {
        lo[i] -= 1;
        span = h;
      } else {
        lo[i] -= 1;
        hi[i] += 1;
      }
      g.at(c, i) = (f.at(spec.flatten(hi)) - f.at(spec.flatten(lo))) / span;
    }
  }
  return g;
}

}  // namespace gmt
