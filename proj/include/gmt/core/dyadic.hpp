#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace gmt {

inline constexpr int kMaxDim = 3;
/// Deepest supported dyadic level; keeps Morton keys of N ≤ 3 inside 64 bits.
inline constexpr int kMaxLevel = 20;

using Point = std::array<double, kMaxDim>;
using CubeIndex = std::array<std::uint32_t, kMaxDim>;

/// Axis-aligned cube [origin, origin + side)^N that roots the dyadic hierarchy.
struct RootBox {
  int dim = 1;
  Point origin{};
  double side = 1.0;

  friend bool operator==(const RootBox&, const RootBox&) = default;
};

/// Validates dim in [1, kMaxDim], finite origin and side > 0.
void validate_box(const RootBox& box);

/// Radius of the smallest ball containing a level-`level` cube: side·√N·2^{-level-1}.
[[nodiscard]] double cube_radius(const RootBox& box, int level);
[[nodiscard]] double cube_side(const RootBox& box, int level);

/// Smallest level whose cube radius does not exceed delta (kMaxLevel + 1 if none).
[[nodiscard]] int first_admissible_level(const RootBox& box, double delta);

/// Node of the dyadic hierarchy. Unused trailing index entries are zero.
struct DyadicCube {
  int dim = 1;
  int level = 0;
  CubeIndex index{};

  [[nodiscard]] std::uint64_t morton() const;
  static DyadicCube from_morton(int dim, int level, std::uint64_t key);

  [[nodiscard]] DyadicCube parent() const;
  [[nodiscard]] std::vector<DyadicCube> children() const;
  [[nodiscard]] DyadicCube ancestor(int at_level) const;
  /// Closed containment: true when `other` is this cube or one of its descendants.
  [[nodiscard]] bool contains(const DyadicCube& other) const;

  [[nodiscard]] Point lower(const RootBox& box) const;
  [[nodiscard]] Point center(const RootBox& box) const;
  [[nodiscard]] double side(const RootBox& box) const { return cube_side(box, level); }
  [[nodiscard]] double radius(const RootBox& box) const { return cube_radius(box, level); }

  friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
  /// Orders by level, then Morton key.
  friend bool operator<(const DyadicCube& a, const DyadicCube& b);
};

/// Checks level bounds and index range; throws DomainError.
void validate_cube(const DyadicCube& q, int dim);

/// Euclidean distance between two closed cubes.
[[nodiscard]] double cube_distance(const RootBox& box, const DyadicCube& a, const DyadicCube& b);

/// Interleaves the low `level` bits of each coordinate.
[[nodiscard]] std::uint64_t morton_encode(int dim, const CubeIndex& index, int level);
[[nodiscard]] CubeIndex morton_decode(int dim, std::uint64_t key, int level);

/// A finite union of dyadic cubes stored as an antichain (no cube contains another).
class Region {
 public:
  explicit Region(int dim = 1) : dim_(dim) {}
  /// Canonicalizes: drops duplicates and cubes contained in another member.
  Region(int dim, std::vector<DyadicCube> cubes);

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] const std::vector<DyadicCube>& cubes() const { return cubes_; }
  [[nodiscard]] bool empty() const { return cubes_.empty(); }
  [[nodiscard]] std::size_t size() const { return cubes_.size(); }
  [[nodiscard]] int max_level() const;

  /// True when q lies inside some member cube.
  [[nodiscard]] bool covers(const DyadicCube& q) const;
  /// All level-`level` cubes under the region; throws if the result exceeds max_cubes.
  [[nodiscard]] std::vector<DyadicCube> refine_to(int level, std::size_t max_cubes = std::size_t{1} << 24) const;

  friend Region region_union(const Region& a, const Region& b);
  friend bool operator==(const Region&, const Region&) = default;

 private:
  int dim_;
  std::vector<DyadicCube> cubes_;
};

[[nodiscard]] Region region_union(const Region& a, const Region& b);

/// Corner Cantor iterate: each generation keeps the 2^N corner subcubes of
/// quarter side, so generation k consists of 2^{N k} cubes at level 2k.
[[nodiscard]] Region corner_cantor_region(int dim, int generations);

}  // namespace gmt
