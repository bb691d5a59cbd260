#include "gmt/frostman/frostman.hpp"

#include <cmath>

#include "gmt/core/cube_tree.hpp"
#include "gmt/core/error.hpp"
#include "gmt/core/exact_sum.hpp"
#include "gmt/core/parallel.hpp"

namespace gmt {

namespace {

using LevelValues = std::vector<std::vector<double>>;

// Leaf index range [first, last) of every node on every level.
std::vector<std::vector<std::pair<std::size_t, std::size_t>>> leaf_ranges(const CubeTree& tree) {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out(static_cast<std::size_t>(tree.depth()) + 1);
  auto& leaves = out.back();
  for (std::size_t i = 0; i < tree.level(tree.depth()).size(); ++i) leaves.emplace_back(i, i + 1);
  for (int l = tree.depth() - 1; l >= 0; --l) {
    const auto& below = out[static_cast<std::size_t>(l) + 1];
    for (const auto& n : tree.level(l))
      out[static_cast<std::size_t>(l)].emplace_back(below[n.child_begin].first, below[n.child_end - 1].second);
  }
  return out;
}

}  // namespace

FrostmanResult frostman_construct(const Region& A, const RootBox& box, const GaugeFunction& g, int L) {
  if (A.empty()) throw DomainError("Frostman construction needs a nonempty region");
  if (A.dim() != box.dim) throw DomainError("region and box dimensions differ");
  if (L < 0 || L > kMaxLevel) throw DomainError("level out of range");
  const double leaf_price = g(cube_radius(box, L));
  if (!(leaf_price > 0.0)) throw DegenerateGaugeError("gauge vanishes at the leaf radius");

  const auto leaves = A.refine_to(L);
  const CubeTree tree(box.dim, leaves);
  if (tree.depth() != L) throw DomainError("refined region does not reach the requested level");
  const auto ranges = leaf_ranges(tree);
  const std::size_t n_leaves = tree.level(L).size();

  std::vector<double> price(static_cast<std::size_t>(L) + 1);
  for (int l = 0; l <= L; ++l) price[static_cast<std::size_t>(l)] = g(cube_radius(box, l));

  // Bottom-up: scale factor per node, with node masses taken after the scaling
  // of their descendants.
  LevelValues factor(static_cast<std::size_t>(L) + 1);
  std::vector<double> below(n_leaves, leaf_price);
  factor.back().assign(n_leaves, 1.0);
  int rescaled = 0;
  for (int l = L - 1; l >= 0; --l) {
    const auto ul = static_cast<std::size_t>(l);
    const auto& nodes = tree.level(l);
    std::vector<double> here(nodes.size());
    factor[ul].assign(nodes.size(), 1.0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      ExactSum s;
      for (auto c = nodes[i].child_begin; c < nodes[i].child_end; ++c) s.add(below[c]);
      here[i] = s.value();
      if (here[i] > price[ul]) {
        factor[ul][i] = price[ul] / here[i];
        here[i] = price[ul];
        ++rescaled;
      }
    }
    below = std::move(here);
  }

  // Top-down: each leaf mass is h(r_L) times the product of its ancestors' factors.
  std::vector<double> cum{factor[0][0]};
  for (int l = 1; l <= L; ++l) {
    const auto& nodes = tree.level(l);
    std::vector<double> next(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) next[i] = cum[nodes[i].parent] * factor[static_cast<std::size_t>(l)][i];
    cum = std::move(next);
  }
  std::vector<double> leaf_mass(n_leaves);
  for (std::size_t i = 0; i < n_leaves; ++i) leaf_mass[i] = leaf_price * cum[i];

  // Rounding in the products can leave a cube a few ulps above its cap; pull
  // such subtrees down until the exact sums comply.
  for (int l = L; l >= 0; --l) {
    const auto& r = ranges[static_cast<std::size_t>(l)];
    for (const auto& [first, last] : r) {
      for (int attempt = 0; attempt < 64; ++attempt) {
        ExactSum s;
        for (std::size_t k = first; k < last; ++k) s.add(leaf_mass[k]);
        const double cap = price[static_cast<std::size_t>(l)];
        const double total = s.value();
        s.add(-cap);  // sign of the exact excess
        if (s.value() <= 0.0) break;
        const double shrink = std::nextafter(cap / total, 0.0);
        for (std::size_t k = first; k < last; ++k) leaf_mass[k] *= shrink;
      }
    }
  }

  // Exact masses of every tree cube, straight from the leaves.
  LevelValues mass(static_cast<std::size_t>(L) + 1);
  for (int l = 0; l <= L; ++l) {
    const auto& r = ranges[static_cast<std::size_t>(l)];
    auto& m = mass[static_cast<std::size_t>(l)];
    m.resize(r.size());
    parallel_for(r.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i)
        m[i] = exact_sum(std::span<const double>(leaf_mass).subspan(r[i].first, r[i].second - r[i].first));
    });
  }
  std::vector<Atom> atoms;
  atoms.reserve(n_leaves);
  for (std::size_t i = 0; i < n_leaves; ++i) atoms.push_back(Atom{tree.cube(L, i).center(box), leaf_mass[i]});

  std::vector<DyadicCube> saturated;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [l, i] = stack.back();
    stack.pop_back();
    const double cap = price[static_cast<std::size_t>(l)];
    if (mass[static_cast<std::size_t>(l)][i] >= cap * (1.0 - kSaturationTolerance)) {
      saturated.push_back(tree.cube(l, i));
      continue;
    }
    const auto& n = tree.level(l)[i];
    for (auto c = n.child_begin; c < n.child_end; ++c) stack.emplace_back(l + 1, c);
  }

  return FrostmanResult{AtomicMeasure(box, std::move(atoms)), Region(box.dim, std::move(saturated)),
                        mass[0][0], rescaled};
}

}  // namespace gmt
