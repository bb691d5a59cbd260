#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gmt/core/dyadic.hpp"
#include "gmt/core/measure.hpp"

namespace gmt {

/// Minimal subtree of the dyadic hierarchy spanning a set of cubes: every
/// input cube plus all of its ancestors up to the root, stored level by level
/// in Morton order so each node's children are contiguous on the next level.
class CubeTree {
 public:
  struct Node {
    std::uint64_t key = 0;
    std::uint32_t parent = 0;
    std::uint32_t child_begin = 0;
    std::uint32_t child_end = 0;
    bool marked = false;  ///< one of the input cubes
  };

  CubeTree(int dim, std::span<const DyadicCube> cubes);

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] int depth() const { return static_cast<int>(levels_.size()) - 1; }
  [[nodiscard]] const std::vector<Node>& level(int l) const { return levels_[static_cast<std::size_t>(l)]; }
  [[nodiscard]] std::size_t node_count() const;
  [[nodiscard]] DyadicCube cube(int l, std::size_t i) const {
    return DyadicCube::from_morton(dim_, l, level(l)[i].key);
  }
  /// Index of `key` on level l, or npos.
  [[nodiscard]] std::size_t find(int l, std::uint64_t key) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  int dim_;
  std::vector<std::vector<Node>> levels_;
};

/// Spanning tree of the level-`level` leaves occupied by the atoms of μ, with
/// the leaf index of every atom.
struct AtomTree {
  CubeTree tree;
  std::vector<std::uint32_t> atom_leaf;
};

[[nodiscard]] AtomTree build_atom_tree(const AtomicMeasure& mu, int level);

}  // namespace gmt
