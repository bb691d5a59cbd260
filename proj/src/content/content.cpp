#include "gmt/content/content.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "gmt/core/cube_tree.hpp"
#include "gmt/core/error.hpp"
#include "gmt/core/exact_sum.hpp"
#include "gmt/core/parallel.hpp"

namespace gmt {

namespace {

// Cheapest admissible cover of a whole level-l cube: f(l) = min(h(r_l), 2^N f(l+1))
// with f(L) = h(r_L). `cover_level[l]` is the level whose cubes realize f(l).
struct FullCubeCost {
  std::vector<double> cost;
  std::vector<int> cover_level;
};

FullCubeCost full_cube_costs(const RootBox& box, const GaugeFunction& g, double delta, int max_level) {
  FullCubeCost f;
  const auto n = static_cast<std::size_t>(max_level) + 1;
  f.cost.resize(n);
  f.cover_level.resize(n);
  f.cost[n - 1] = g(cube_radius(box, max_level));
  f.cover_level[n - 1] = max_level;
  for (int l = max_level - 1; l >= 0; --l) {
    const auto ul = static_cast<std::size_t>(l);
    const double split = std::ldexp(f.cost[ul + 1], box.dim);
    const double r = cube_radius(box, l);
    if (r <= delta && g(r) <= split) {
      f.cost[ul] = g(r);
      f.cover_level[ul] = l;
    } else {
      f.cost[ul] = split;
      f.cover_level[ul] = f.cover_level[ul + 1];
    }
  }
  return f;
}

enum class Choice : unsigned char { kSelf, kChildren, kFull };

struct ContentPlan {
  CubeTree tree;
  std::vector<std::vector<Choice>> choice;
  FullCubeCost full;
};

ContentPlan plan_content(const Region& A, const RootBox& box, const GaugeFunction& g, double delta, int max_level) {
  if (A.dim() != box.dim) throw DomainError("region and box dimensions differ");
  if (max_level < 0 || max_level > kMaxLevel) throw DomainError("max level out of range");
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  if (A.max_level() > max_level) throw DomainError("region has cubes finer than the max level");
  if (cube_radius(box, max_level) > delta)
    throw InfeasibleCoverError("no admissible cover: level-" + std::to_string(max_level) + " cubes are wider than delta");

  ContentPlan plan{CubeTree(A.dim(), A.cubes()), {}, full_cube_costs(box, g, delta, max_level)};
  const int depth = plan.tree.depth();
  plan.choice.resize(static_cast<std::size_t>(depth) + 1);
  std::vector<double> below;  // costs of the level below
  for (int l = depth; l >= 0; --l) {
    const auto& nodes = plan.tree.level(l);
    std::vector<double> cost(nodes.size());
    auto& choice = plan.choice[static_cast<std::size_t>(l)];
    choice.resize(nodes.size());
    const double r = cube_radius(box, l);
    const double price = g(r);
    parallel_for(nodes.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const auto& n = nodes[i];
        if (n.marked) {
          cost[i] = plan.full.cost[static_cast<std::size_t>(l)];
          choice[i] = Choice::kFull;
          continue;
        }
        ExactSum kids;
        for (auto c = n.child_begin; c < n.child_end; ++c) kids.add(below[c]);
        const double split = kids.value();
        if (r <= delta && price <= split) {
          cost[i] = price;
          choice[i] = Choice::kSelf;
        } else {
          cost[i] = split;
          choice[i] = Choice::kChildren;
        }
      }
    });
    below = std::move(cost);
  }
  return plan;
}

template <class Visit>
void walk_plan(const ContentPlan& plan, int l, std::size_t i, const Visit& visit) {
  const auto& n = plan.tree.level(l)[i];
  const Choice c = plan.choice[static_cast<std::size_t>(l)][i];
  if (c == Choice::kChildren) {
    for (auto k = n.child_begin; k < n.child_end; ++k) walk_plan(plan, l + 1, k, visit);
  } else {
    visit(l, i, c);
  }
}

}  // namespace

double dyadic_content_value(const Region& A, const RootBox& box, const GaugeFunction& g, double delta, int max_level) {
  if (A.empty()) {
    if (A.dim() != box.dim) throw DomainError("region and box dimensions differ");
    return 0.0;
  }
  const ContentPlan plan = plan_content(A, box, g, delta, max_level);
  ExactSum total;
  walk_plan(plan, 0, 0, [&](int l, std::size_t, Choice c) {
    if (c == Choice::kSelf) {
      total.add(g(cube_radius(box, l)));
    } else {
      const int m = plan.full.cover_level[static_cast<std::size_t>(l)];
      // 2^{N(m-l)} equal prices sum exactly to this power-of-two multiple.
      total.add(std::ldexp(g(cube_radius(box, m)), box.dim * (m - l)));
    }
  });
  return total.value();
}

ContentResult dyadic_content(const Region& A, const RootBox& box, const GaugeFunction& g, double delta, int max_level,
                             std::size_t max_cover) {
  ContentResult out{0.0, Region(A.dim(), {}), delta};
  if (A.empty()) {
    if (A.dim() != box.dim) throw DomainError("region and box dimensions differ");
    return out;
  }
  const ContentPlan plan = plan_content(A, box, g, delta, max_level);
  std::size_t count = 0;
  walk_plan(plan, 0, 0, [&](int l, std::size_t, Choice c) {
    const int bits = c == Choice::kSelf ? 0 : box.dim * (plan.full.cover_level[static_cast<std::size_t>(l)] - l);
    if (bits >= 63 || (count += std::size_t{1} << bits) > max_cover)
      throw ResolutionError("optimal cover exceeds the cube budget");
  });
  std::vector<DyadicCube> cover;
  cover.reserve(count);
  ExactSum total;
  walk_plan(plan, 0, 0, [&](int l, std::size_t i, Choice c) {
    const DyadicCube q = plan.tree.cube(l, i);
    if (c == Choice::kSelf) {
      cover.push_back(q);
      total.add(g(cube_radius(box, l)));
      return;
    }
    const int m = plan.full.cover_level[static_cast<std::size_t>(l)];
    const int bits = box.dim * (m - l);
    const std::uint64_t base = q.morton() << bits;
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << bits); ++k)
      cover.push_back(DyadicCube::from_morton(box.dim, m, base | k));
    total.add(std::ldexp(g(cube_radius(box, m)), bits));
  });
  out.value = total.value();
  out.optimal_cover = Region(A.dim(), std::move(cover));
  return out;
}

DensityReport density_sup(const AtomicMeasure& mu, const GaugeFunction& g, double delta, int min_level, int max_level,
                          bool shifted_grids) {
  if (min_level < 0 || max_level > kMaxLevel || min_level > max_level) throw DomainError("level range out of bounds");
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  DensityReport report;
  const int dim = mu.dim();
  const int masks = shifted_grids ? 1 << dim : 1;
  const int first = std::max(min_level, first_admissible_level(mu.box(), delta));
  for (int l = first; l <= max_level; ++l) {
    DensityLevel row;
    row.level = l;
    row.radius = cube_radius(mu.box(), l);
    const double price = g(row.radius);
    const int shift = AtomicMeasure::kFineLevel - l;
    row.argmax = DyadicCube{dim, l, {}};
    for (int mask = 0; mask < masks; ++mask) {
      std::vector<std::pair<std::uint64_t, std::size_t>> keyed(mu.size());
      for (std::size_t a = 0; a < mu.size(); ++a) {
        CubeIndex idx{};
        for (int i = 0; i < dim; ++i) {
          const std::uint32_t off = ((mask >> i) & 1) ? std::uint32_t{1} << (shift - 1) : 0U;
          idx[i] = (mu.fine_index(a)[i] + off) >> shift;
        }
        keyed[a] = {morton_encode(dim, idx, l + 1), a};
      }
      std::sort(keyed.begin(), keyed.end());
      for (std::size_t s = 0; s < keyed.size();) {
        ExactSum m;
        std::size_t e = s;
        for (; e < keyed.size() && keyed[e].first == keyed[s].first; ++e) m.add(mu.atoms()[keyed[e].second].mass);
        const double ratio = m.value() / price;
        if (ratio > row.max_ratio) {
          row.max_ratio = ratio;
          row.argmax = DyadicCube{dim, l, morton_decode(dim, keyed[s].first, l + 1)};
          row.shift_mask = mask;
        }
        s = e;
      }
    }
    report.sup = std::max(report.sup, row.max_ratio);
    report.levels.push_back(row);
  }
  return report;
}

namespace {

struct ProfileTree {
  AtomTree atoms;
  std::vector<std::vector<double>> mass;  // per level, per node
  std::vector<double> price;              // per level
  std::vector<bool> admissible;           // per level
};

ProfileTree profile_tree(const AtomicMeasure& mu, const GaugeFunction& g, double delta, int max_level) {
  ProfileTree t{build_atom_tree(mu, max_level), {}, {}, {}};
  const int depth = t.atoms.tree.depth();
  std::vector<std::vector<ExactSum>> sums(static_cast<std::size_t>(depth) + 1);
  for (int l = 0; l <= depth; ++l) sums[static_cast<std::size_t>(l)].resize(t.atoms.tree.level(l).size());
  for (std::size_t a = 0; a < mu.size(); ++a) {
    std::size_t i = t.atoms.atom_leaf[a];
    for (int l = depth; l >= 0; --l) {
      sums[static_cast<std::size_t>(l)][i].add(mu.atoms()[a].mass);
      i = t.atoms.tree.level(l)[i].parent;
    }
  }
  for (int l = 0; l <= depth; ++l) {
    std::vector<double> m;
    for (const auto& s : sums[static_cast<std::size_t>(l)]) m.push_back(s.value());
    t.mass.push_back(std::move(m));
    const double r = cube_radius(mu.box(), l);
    t.price.push_back(g(r));
    t.admissible.push_back(r <= delta && !mu.empty());
  }
  return t;
}

struct Selection {
  double mass = 0.0;
  double cost = 0.0;
};

Selection exact_selection(const ProfileTree& t, const std::vector<std::pair<int, std::size_t>>& nodes) {
  ExactSum m;
  ExactSum c;
  for (const auto& [l, i] : nodes) {
    m.add(t.mass[static_cast<std::size_t>(l)][i]);
    c.add(t.price[static_cast<std::size_t>(l)]);
  }
  return {m.value(), c.value()};
}

std::vector<ProfilePoint> exact_frontier(const ProfileTree& t) {
  // Preorder flattening with subtree ends, then include/skip enumeration.
  struct Flat {
    int level;
    std::size_t index;
    std::size_t end;
  };
  std::vector<Flat> flat;
  std::function<void(int, std::size_t)> visit = [&](int l, std::size_t i) {
    const std::size_t at = flat.size();
    flat.push_back({l, i, 0});
    const auto& n = t.atoms.tree.level(l)[i];
    for (auto c = n.child_begin; c < n.child_end; ++c) visit(l + 1, c);
    flat[at].end = flat.size();
  };
  visit(0, 0);

  std::vector<ProfilePoint> all;
  std::vector<std::pair<int, std::size_t>> chosen;
  std::function<void(std::size_t)> enumerate = [&](std::size_t pos) {
    if (pos == flat.size()) {
      const Selection s = exact_selection(t, chosen);
      all.push_back({s.cost, s.mass});
      return;
    }
    enumerate(pos + 1);
    if (t.admissible[static_cast<std::size_t>(flat[pos].level)]) {
      chosen.emplace_back(flat[pos].level, flat[pos].index);
      enumerate(flat[pos].end);
      chosen.pop_back();
    }
  };
  enumerate(0);

  std::sort(all.begin(), all.end(), [](const ProfilePoint& a, const ProfilePoint& b) {
    return a.budget != b.budget ? a.budget < b.budget : a.mass > b.mass;
  });
  std::vector<ProfilePoint> frontier;
  for (const auto& p : all)
    if (frontier.empty() || p.mass > frontier.back().mass) frontier.push_back(p);
  return frontier;
}

// Maximizes mass − λ·cost over antichains, ties broken towards lower cost.
ProfilePoint lagrangian_vertex(const ProfileTree& t, double lambda, double tol) {
  struct Best {
    double obj = 0.0;
    double cost = 0.0;
  };
  const auto& tree = t.atoms.tree;
  const int depth = tree.depth();
  std::vector<std::vector<bool>> take(static_cast<std::size_t>(depth) + 1);
  std::vector<Best> below;
  for (int l = depth; l >= 0; --l) {
    const auto ul = static_cast<std::size_t>(l);
    const auto& nodes = tree.level(l);
    std::vector<Best> here(nodes.size());
    take[ul].assign(nodes.size(), false);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      Best kids;
      for (auto c = nodes[i].child_begin; c < nodes[i].child_end; ++c) {
        kids.obj += below[c].obj;
        kids.cost += below[c].cost;
      }
      here[i] = kids;
      if (!t.admissible[ul]) continue;
      const Best self{t.mass[ul][i] - lambda * t.price[ul], t.price[ul]};
      if (self.obj > kids.obj + tol || (self.obj >= kids.obj - tol && self.cost < kids.cost)) {
        here[i] = self;
        take[ul][i] = true;
      }
    }
    below = std::move(here);
  }
  std::vector<std::pair<int, std::size_t>> chosen;
  std::function<void(int, std::size_t)> collect = [&](int l, std::size_t i) {
    if (take[static_cast<std::size_t>(l)][i]) {
      chosen.emplace_back(l, i);
      return;
    }
    const auto& n = tree.level(l)[i];
    for (auto c = n.child_begin; c < n.child_end; ++c) collect(l + 1, c);
  };
  collect(0, 0);
  const Selection s = exact_selection(t, chosen);
  return {s.cost, s.mass};
}

std::vector<ProfilePoint> lagrangian_frontier(const ProfileTree& t, double total) {
  const double tol = 1e-13 * std::max(total, 1e-300);
  std::vector<ProfilePoint> hull{{0.0, 0.0}};
  const ProfilePoint top = lagrangian_vertex(t, 0.0, tol);
  if (!(top.mass > 0.0)) return hull;
  // Eisner-Severance search for the envelope vertices between two known ones.
  std::function<void(const ProfilePoint&, const ProfilePoint&, int)> refine = [&](const ProfilePoint& a,
                                                                                  const ProfilePoint& b, int depth) {
    if (depth > 200 || b.budget <= a.budget) return;
    const double lambda = (b.mass - a.mass) / (b.budget - a.budget);
    const ProfilePoint p = lagrangian_vertex(t, lambda, tol);
    const double gain = (p.mass - lambda * p.budget) - (a.mass - lambda * a.budget);
    if (gain <= tol * (1.0 + lambda) || p.budget <= a.budget || p.budget >= b.budget) return;
    refine(a, p, depth + 1);
    hull.push_back(p);
    refine(p, b, depth + 1);
  };
  refine(hull.front(), top, 0);
  hull.push_back(top);
  return hull;
}

}  // namespace

double profile_mass(const ConcentrationProfile& p, double budget) {
  if (budget < 0.0) throw DomainError("budget must be nonnegative");
  const auto& f = p.frontier;
  auto it = std::upper_bound(f.begin(), f.end(), budget,
                             [](double b, const ProfilePoint& q) { return b < q.budget; });
  // `it` is the first vertex priced above the budget.
  if (it == f.begin()) return 0.0;
  const ProfilePoint& lo = *(it - 1);
  if (p.exact || it == f.end()) return lo.mass;
  const double w = (budget - lo.budget) / (it->budget - lo.budget);
  return std::min(it->mass, lo.mass + w * (it->mass - lo.mass));
}

double profile_modulus(const ConcentrationProfile& p, double eps) {
  const auto& f = p.frontier;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (f[k].mass <= eps) continue;
    if (p.exact || k == 0) return f[k].budget;
    const ProfilePoint& a = f[k - 1];
    return a.budget + (eps - a.mass) * (f[k].budget - a.budget) / (f[k].mass - a.mass);
  }
  return std::numeric_limits<double>::infinity();
}

ConcentrationProfile concentration_profile(const AtomicMeasure& mu, const GaugeFunction& g, double delta,
                                           int max_level, std::span<const double> budgets, ProfileMethod method) {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  for (double b : budgets)
    if (!(b >= 0.0)) throw DomainError("budgets must be nonnegative");
  const ProfileTree t = profile_tree(mu, g, delta, max_level);
  ConcentrationProfile p;
  p.delta_cap = delta;
  p.max_level = max_level;
  const bool small = t.atoms.tree.node_count() <= kExactProfileNodes;
  p.exact = method == ProfileMethod::kExact || (method == ProfileMethod::kAuto && small);
  if (p.exact && !small) throw ResolutionError("exact profile enumeration needs a tree of at most 20 nodes");
  p.frontier = p.exact ? exact_frontier(t) : lagrangian_frontier(t, mu.total_mass());
  for (double b : budgets) p.points.push_back({b, profile_mass(p, b)});
  return p;
}

double profile_delta(const AtomicMeasure& mu, const GaugeFunction& g, double M, double eps, int max_level,
                     ProfileMethod method) {
  const double budget[] = {M};
  for (int l = 0; l <= max_level; ++l) {
    const double r = cube_radius(mu.box(), l);
    const auto p = concentration_profile(mu, g, r, max_level, budget, method);
    if (p.points[0].mass <= eps) return r;
  }
  return 0.0;
}

}  // namespace gmt
