#include "gmt/core/cube_tree.hpp"

#include <algorithm>

#include "gmt/core/error.hpp"

namespace gmt {

CubeTree::CubeTree(int dim, std::span<const DyadicCube> cubes) : dim_(dim) {
  int depth = 0;
  for (const auto& q : cubes) {
    validate_cube(q, dim);
    depth = std::max(depth, q.level);
  }
  std::vector<std::vector<std::uint64_t>> marked(static_cast<std::size_t>(depth) + 1);
  for (const auto& q : cubes) marked[static_cast<std::size_t>(q.level)].push_back(q.morton());
  for (auto& m : marked) {
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
  }

  levels_.resize(static_cast<std::size_t>(depth) + 1);
  std::vector<std::uint64_t> keys;
  for (int l = depth; l >= 0; --l) {
    const auto ul = static_cast<std::size_t>(l);
    keys = marked[ul];
    if (l < depth)
      for (const auto& n : levels_[ul + 1]) keys.push_back(n.key >> dim);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    auto& nodes = levels_[ul];
    nodes.resize(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
      nodes[i].key = keys[i];
      nodes[i].marked = std::binary_search(marked[ul].begin(), marked[ul].end(), keys[i]);
    }
    if (l < depth) {
      auto& kids = levels_[ul + 1];
      std::size_t p = 0;
      for (std::size_t c = 0; c < kids.size(); ++c) {
        const std::uint64_t pk = kids[c].key >> dim;
        while (nodes[p].key != pk) ++p;
        if (nodes[p].child_end == 0) nodes[p].child_begin = static_cast<std::uint32_t>(c);
        nodes[p].child_end = static_cast<std::uint32_t>(c + 1);
        kids[c].parent = static_cast<std::uint32_t>(p);
      }
    }
  }
  if (levels_[0].empty()) levels_[0].push_back(Node{});
}

std::size_t CubeTree::node_count() const {
  std::size_t n = 0;
  for (const auto& l : levels_) n += l.size();
  return n;
}

std::size_t CubeTree::find(int l, std::uint64_t key) const {
  const auto& nodes = level(l);
  auto it = std::lower_bound(nodes.begin(), nodes.end(), key, [](const Node& n, std::uint64_t k) { return n.key < k; });
  if (it == nodes.end() || it->key != key) return npos;
  return static_cast<std::size_t>(it - nodes.begin());
}

AtomTree build_atom_tree(const AtomicMeasure& mu, int level) {
  if (level < 0 || level > kMaxLevel) throw DomainError("level out of range");
  std::vector<DyadicCube> leaves;
  leaves.reserve(mu.size());
  for (std::size_t a = 0; a < mu.size(); ++a) leaves.push_back(leaf_of(mu, a, level));
  if (leaves.empty()) leaves.push_back(DyadicCube{mu.dim(), 0, {}});
  AtomTree out{CubeTree(mu.dim(), leaves), {}};
  out.atom_leaf.reserve(mu.size());
  for (std::size_t a = 0; a < mu.size(); ++a)
    out.atom_leaf.push_back(static_cast<std::uint32_t>(out.tree.find(level, leaves[a].morton())));
  return out;
}

}  // namespace gmt
