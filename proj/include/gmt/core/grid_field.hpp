#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gmt/core/dyadic.hpp"

namespace gmt {

/// Uniform cell-centred grid with 2^level cells per axis over a root box.
struct GridSpec {
  RootBox box{};
  int level = 0;

  [[nodiscard]] int dim() const { return box.dim; }
  [[nodiscard]] std::size_t cells_per_axis() const { return std::size_t{1} << level; }
  [[nodiscard]] std::size_t cell_count() const { return std::size_t{1} << (box.dim * level); }
  [[nodiscard]] double spacing() const { return cube_side(box, level); }
  [[nodiscard]] double cell_volume() const;
  /// Centre of the cell with row-major flat index (fastest axis last).
  [[nodiscard]] Point center(std::size_t flat) const;
  [[nodiscard]] CubeIndex unflatten(std::size_t flat) const;
  [[nodiscard]] std::size_t flatten(const CubeIndex& idx) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Validates the box and 0 ≤ level with at most 2^27 cells.
void validate_grid(const GridSpec& spec);

enum class FieldRank { kScalar, kVector };

/// Dense field of doubles on a GridSpec. Vector fields interleave components,
/// i.e. the component index is the fastest axis.
class GridField {
 public:
  GridField() = default;
  GridField(GridSpec spec, FieldRank rank);
  GridField(GridSpec spec, FieldRank rank, std::vector<double> values);

  static GridField scalar(GridSpec spec) { return GridField(spec, FieldRank::kScalar); }
  static GridField vector(GridSpec spec) { return GridField(spec, FieldRank::kVector); }

  [[nodiscard]] const GridSpec& spec() const { return spec_; }
  [[nodiscard]] FieldRank rank() const { return rank_; }
  [[nodiscard]] int components() const { return rank_ == FieldRank::kScalar ? 1 : spec_.dim(); }
  [[nodiscard]] std::span<double> values() { return values_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }

  [[nodiscard]] double& at(std::size_t cell, int component = 0) {
    return values_[cell * static_cast<std::size_t>(components()) + static_cast<std::size_t>(component)];
  }
  [[nodiscard]] double at(std::size_t cell, int component = 0) const {
    return values_[cell * static_cast<std::size_t>(components()) + static_cast<std::size_t>(component)];
  }

  /// Midpoint-rule integral of each component (scalar fields: one entry).
  [[nodiscard]] std::vector<double> integral() const;
  /// ∫ |F| with |·| the Euclidean norm for vector fields.
  [[nodiscard]] double l1_norm() const;
  /// max over cells of |F|.
  [[nodiscard]] double sup_norm() const;

  GridField& operator+=(const GridField& other);
  GridField& operator-=(const GridField& other);

  friend bool operator==(const GridField&, const GridField&) = default;

 private:
  GridSpec spec_{};
  FieldRank rank_ = FieldRank::kScalar;
  std::vector<double> values_;
};

/// Multilinear interpolation of a scalar field at x (cell-centred samples,
/// constant extrapolation beyond the outermost centres).
[[nodiscard]] double interpolate(const GridField& f, const Point& x);

/// Central-difference gradient of a scalar field (one-sided at the boundary).
[[nodiscard]] GridField gradient(const GridField& f);

}  // namespace gmt
