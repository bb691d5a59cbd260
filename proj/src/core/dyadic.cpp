#include "gmt/core/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gmt/core/error.hpp"

namespace gmt {

void validate_box(const RootBox& box) {
  if (box.dim < 1 || box.dim > kMaxDim) throw DomainError("dimension must be in [1, 3]");
  if (!(box.side > 0.0) || !std::isfinite(box.side)) throw DomainError("root box side must be positive");
  for (int i = 0; i < box.dim; ++i)
    if (!std::isfinite(box.origin[i])) throw DomainError("root box origin must be finite");
}

double cube_side(const RootBox& box, int level) { return std::ldexp(box.side, -level); }

double cube_radius(const RootBox& box, int level) {
  return std::ldexp(box.side * std::sqrt(static_cast<double>(box.dim)), -level - 1);
}

int first_admissible_level(const RootBox& box, double delta) {
  for (int l = 0; l <= kMaxLevel; ++l)
    if (cube_radius(box, l) <= delta) return l;
  return kMaxLevel + 1;
}

std::uint64_t morton_encode(int dim, const CubeIndex& index, int level) {
  std::uint64_t key = 0;
  for (int b = level - 1; b >= 0; --b)
    for (int i = 0; i < dim; ++i) key = (key << 1) | ((index[i] >> b) & 1U);
  return key;
}

CubeIndex morton_decode(int dim, std::uint64_t key, int level) {
  CubeIndex index{};
  for (int b = 0; b < level; ++b)
    for (int i = dim - 1; i >= 0; --i) {
      index[i] |= static_cast<std::uint32_t>(key & 1U) << b;
      key >>= 1;
    }
  return index;
}

std::uint64_t DyadicCube::morton() const { return morton_encode(dim, index, level); }

DyadicCube DyadicCube::from_morton(int dim, int level, std::uint64_t key) {
  return DyadicCube{dim, level, morton_decode(dim, key, level)};
}

DyadicCube DyadicCube::parent() const {
  if (level == 0) throw DomainError("root cube has no parent");
  DyadicCube p = *this;
  p.level = level - 1;
  for (int i = 0; i < dim; ++i) p.index[i] >>= 1;
  return p;
}

DyadicCube DyadicCube::ancestor(int at_level) const {
  if (at_level < 0 || at_level > level) throw DomainError("ancestor level out of range");
  DyadicCube a = *this;
  a.level = at_level;
  for (int i = 0; i < dim; ++i) a.index[i] >>= (level - at_level);
  return a;
}

std::vector<DyadicCube> DyadicCube::children() const {
  if (level >= kMaxLevel) throw DomainError("cube is already at the deepest supported level");
  std::vector<DyadicCube> out;
  out.reserve(std::size_t{1} << dim);
  const std::uint64_t base = morton() << dim;
  for (std::uint64_t c = 0; c < (std::uint64_t{1} << dim); ++c) out.push_back(from_morton(dim, level + 1, base | c));
  return out;
}

bool DyadicCube::contains(const DyadicCube& other) const {
  if (other.dim != dim || other.level < level) return false;
  const int shift = other.level - level;
  for (int i = 0; i < dim; ++i)
    if ((other.index[i] >> shift) != index[i]) return false;
  return true;
}

Point DyadicCube::lower(const RootBox& box) const {
  Point p{};
  const double s = cube_side(box, level);
  for (int i = 0; i < dim; ++i) p[i] = box.origin[i] + s * index[i];
  return p;
}

Point DyadicCube::center(const RootBox& box) const {
  Point p{};
  const double s = cube_side(box, level);
  for (int i = 0; i < dim; ++i) p[i] = box.origin[i] + s * (index[i] + 0.5);
  return p;
}

bool operator<(const DyadicCube& a, const DyadicCube& b) {
  if (a.level != b.level) return a.level < b.level;
  return a.morton() < b.morton();
}

void validate_cube(const DyadicCube& q, int dim) {
  if (q.dim != dim) throw DomainError("cube dimension does not match");
  if (q.level < 0 || q.level > kMaxLevel) throw DomainError("cube level out of range");
  const std::uint64_t n = std::uint64_t{1} << q.level;
  for (int i = 0; i < kMaxDim; ++i) {
    if (i < dim && q.index[i] >= n) throw DomainError("cube index out of range for its level");
    if (i >= dim && q.index[i] != 0) throw DomainError("cube index has entries beyond its dimension");
  }
}

double cube_distance(const RootBox& box, const DyadicCube& a, const DyadicCube& b) {
  const Point la = a.lower(box);
  const Point lb = b.lower(box);
  const double sa = a.side(box);
  const double sb = b.side(box);
  double d2 = 0.0;
  for (int i = 0; i < box.dim; ++i) {
    const double gap = std::max({0.0, lb[i] - (la[i] + sa), la[i] - (lb[i] + sb)});
    d2 += gap * gap;
  }
  return std::sqrt(d2);
}

Region::Region(int dim, std::vector<DyadicCube> cubes) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw DomainError("dimension must be in [1, 3]");
  for (const auto& q : cubes) validate_cube(q, dim);
  std::sort(cubes.begin(), cubes.end());
  cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());
  // Coarse cubes come first; keep a cube only if no kept ancestor exists.
  std::vector<std::vector<std::uint64_t>> kept_by_level(kMaxLevel + 1);
  for (const auto& q : cubes) {
    bool inside = false;
    for (int l = 0; l < q.level && !inside; ++l) {
      const auto& keys = kept_by_level[l];
      if (keys.empty()) continue;
      inside = std::binary_search(keys.begin(), keys.end(), q.ancestor(l).morton());
    }
    if (inside) continue;
    kept_by_level[q.level].push_back(q.morton());
    cubes_.push_back(q);
  }
}

int Region::max_level() const {
  int m = 0;
  for (const auto& q : cubes_) m = std::max(m, q.level);
  return m;
}

bool Region::covers(const DyadicCube& q) const {
  for (const auto& c : cubes_)
    if (c.contains(q)) return true;
  return false;
}

std::vector<DyadicCube> Region::refine_to(int level, std::size_t max_cubes) const {
  std::size_t total = 0;
  for (const auto& q : cubes_) {
    if (q.level > level) throw DomainError("region has cubes finer than the requested level");
    const int bits = dim_ * (level - q.level);
    if (bits >= 63 || (total += std::size_t{1} << bits) > max_cubes)
      throw ResolutionError("refined region exceeds the cube budget");
  }
  std::vector<DyadicCube> out;
  out.reserve(total);
  for (const auto& q : cubes_) {
    const int bits = dim_ * (level - q.level);
    const std::uint64_t base = q.morton() << bits;
    for (std::uint64_t c = 0; c < (std::uint64_t{1} << bits); ++c)
      out.push_back(DyadicCube::from_morton(dim_, level, base | c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Region region_union(const Region& a, const Region& b) {
  if (a.dim() != b.dim()) throw DomainError("region dimensions differ");
  std::vector<DyadicCube> all = a.cubes();
  all.insert(all.end(), b.cubes().begin(), b.cubes().end());
  return Region(a.dim(), std::move(all));
}

Region corner_cantor_region(int dim, int generations) {
  if (generations < 0 || 2 * generations > kMaxLevel) throw DomainError("Cantor generations out of range");
  std::vector<DyadicCube> current{DyadicCube{dim, 0, {}}};
  for (int g = 0; g < generations; ++g) {
    std::vector<DyadicCube> next;
    for (const auto& q : current) {
      for (std::uint32_t corner = 0; corner < (1U << dim); ++corner) {
        DyadicCube c{dim, q.level + 2, {}};
        for (int i = 0; i < dim; ++i) c.index[i] = q.index[i] * 4 + (((corner >> i) & 1U) ? 3U : 0U);
        next.push_back(c);
      }
    }
    current = std::move(next);
  }
  return Region(dim, std::move(current));
}

}  // namespace gmt
