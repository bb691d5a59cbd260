#include "gmt/decompose/restriction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "gmt/core/cube_tree.hpp"
#include "gmt/core/error.hpp"
#include "gmt/core/exact_sum.hpp"

namespace gmt {

std::vector<double> capped_fractions(const AtomicMeasure& mu, std::span<const double> masses, const GaugeFunction& g,
                                     double c, double delta, int L) {
  if (masses.size() != mu.size()) throw DomainError("mass count does not match atom count");
  if (L < 0 || L > kMaxLevel) throw DomainError("level out of range");
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  if (cube_radius(mu.box(), L) > delta)
    throw InfeasibleCoverError("delta is below the radius of the level-" + std::to_string(L) + " cubes");
  std::vector<double> frac(mu.size(), c > 0.0 ? 1.0 : 0.0);
  if (!(c > 0.0) || mu.empty()) return frac;

  const AtomTree at = build_atom_tree(mu, L);
  const CubeTree& tree = at.tree;
  const int first = first_admissible_level(mu.box(), delta);
  std::vector<double> cap(static_cast<std::size_t>(L) + 1, std::numeric_limits<double>::infinity());
  for (int l = first; l <= L; ++l) cap[static_cast<std::size_t>(l)] = c * g(cube_radius(mu.box(), l));

  // Atoms of each node as contiguous runs of the leaf-sorted atom order.
  std::vector<std::size_t> order(mu.size());
  for (std::size_t a = 0; a < order.size(); ++a) order[a] = a;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return at.atom_leaf[x] < at.atom_leaf[y]; });
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> runs(static_cast<std::size_t>(L) + 1);
  {
    auto& leaves = runs.back();
    leaves.assign(tree.level(L).size(), {0, 0});
    std::size_t s = 0;
    while (s < order.size()) {
      std::size_t e = s;
      while (e < order.size() && at.atom_leaf[order[e]] == at.atom_leaf[order[s]]) ++e;
      leaves[at.atom_leaf[order[s]]] = {s, e};
      s = e;
    }
    for (int l = L - 1; l >= 0; --l) {
      const auto& below = runs[static_cast<std::size_t>(l) + 1];
      for (const auto& n : tree.level(l))
        runs[static_cast<std::size_t>(l)].emplace_back(below[n.child_begin].first, below[n.child_end - 1].second);
    }
  }

  // Bottom-up capping with per-node scale factors.
  std::vector<std::vector<double>> factor(static_cast<std::size_t>(L) + 1);
  std::vector<double> below;
  for (int l = L; l >= 0; --l) {
    const auto ul = static_cast<std::size_t>(l);
    const auto& nodes = tree.level(l);
    std::vector<double> here(nodes.size());
    factor[ul].assign(nodes.size(), 1.0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      ExactSum s;
      if (l == L) {
        for (std::size_t k = runs[ul][i].first; k < runs[ul][i].second; ++k) s.add(masses[order[k]]);
      } else {
        for (auto ch = nodes[i].child_begin; ch < nodes[i].child_end; ++ch) s.add(below[ch]);
      }
      here[i] = s.value();
      if (here[i] > cap[ul]) {
        factor[ul][i] = cap[ul] / here[i];
        here[i] = cap[ul];
      }
    }
    below = std::move(here);
  }
  std::vector<double> cum{factor[0][0]};
  for (int l = 1; l <= L; ++l) {
    const auto& nodes = tree.level(l);
    std::vector<double> next(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) next[i] = cum[nodes[i].parent] * factor[static_cast<std::size_t>(l)][i];
    cum = std::move(next);
  }
  for (std::size_t a = 0; a < mu.size(); ++a) frac[a] = std::min(1.0, cum[at.atom_leaf[a]]);

  // Pull down any admissible cube whose exact kept mass exceeds its cap by rounding.
  for (int l = L; l >= first; --l) {
    const auto ul = static_cast<std::size_t>(l);
    for (const auto& [s0, e0] : runs[ul]) {
      for (int attempt = 0; attempt < 64; ++attempt) {
        ExactSum s;
        for (std::size_t k = s0; k < e0; ++k) s.add(frac[order[k]] * masses[order[k]]);
        const double kept = s.value();
        s.add(-cap[ul]);
        if (s.value() <= 0.0) break;
        const double shrink = std::nextafter(cap[ul] / kept, 0.0);
        for (std::size_t k = s0; k < e0; ++k) frac[order[k]] *= shrink;
      }
    }
  }
  return frac;
}

WeightedRestriction max_restriction(std::shared_ptr<const AtomicMeasure> mu, const GaugeFunction& g, double c,
                                    double delta, int L) {
  std::vector<double> masses;
  masses.reserve(mu->size());
  for (const auto& a : mu->atoms()) masses.push_back(a.mass);
  auto frac = capped_fractions(*mu, masses, g, c, delta, L);
  return WeightedRestriction(std::move(mu), std::move(frac));
}

CapCertificate certify_caps(const AtomicMeasure& nu, const GaugeFunction& g, double c, double delta, int L) {
  if (L < 0 || L > kMaxLevel) throw DomainError("level out of range");
  CapCertificate cert;
  cert.cap = c;
  cert.delta = delta;
  cert.coarsest_level = first_admissible_level(nu.box(), delta);
  cert.finest_level = L;
  cert.worst = DyadicCube{nu.dim(), 0, {}};
  for (int l = cert.coarsest_level; l <= L; ++l) {
    std::map<std::uint64_t, ExactSum> bins;
    for (std::size_t a = 0; a < nu.size(); ++a) bins[leaf_of(nu, a, l).morton()].add(nu.atoms()[a].mass);
    const double price = g(cube_radius(nu.box(), l));
    for (const auto& [key, s] : bins) {
      const double m = s.value();
      const double ratio = c > 0.0 ? m / (c * price) : (m > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      if (ratio > cert.worst_ratio) {
        cert.worst_ratio = ratio;
        cert.worst = DyadicCube::from_morton(nu.dim(), l, key);
      }
    }
  }
  cert.passed = cert.worst_ratio <= 1.0 + kCapTolerance;
  return cert;
}

Calibration calibrate_restriction(std::shared_ptr<const AtomicMeasure> mu, const GaugeFunction& g, double eps,
                                  double delta, int L) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  Calibration out;
  if (eps >= mu->total_mass()) {
    out.restriction = WeightedRestriction::zero(mu);
    out.removed = mu->total_mass();
    return out;
  }
  auto removed_at = [&](double c) {
    auto nu = max_restriction(mu, g, c, delta, L);
    const double r = tv_distance(*mu, nu);
    out.trail.emplace_back(c, r);
    return std::make_pair(r, std::move(nu));
  };

  double lo = 0.0;
  double hi = 1.0;
  auto best = removed_at(hi);
  if (best.first <= eps) {
    // Halve until the removal exceeds eps.
    for (int k = 0; k < 1100; ++k) {
      auto trial = removed_at(hi / 2.0);
      if (trial.first > eps) {
        lo = hi / 2.0;
        break;
      }
      hi /= 2.0;
      best = std::move(trial);
    }
  } else {
    lo = hi;
    for (int k = 0; k < 1100; ++k) {
      hi *= 2.0;
      best = removed_at(hi);
      if (best.first <= eps) break;
      lo = hi;
    }
    if (best.first > eps) throw DomainError("no finite cap reaches the requested removal");
  }
  for (int step = 0; step < 10; ++step) {
    const double mid = 0.5 * (lo + hi);
    auto trial = removed_at(mid);
    if (trial.first <= eps) {
      hi = mid;
      best = std::move(trial);
    } else {
      lo = mid;
    }
  }
  out.c = hi;
  out.removed = best.first;
  out.restriction = std::move(best.second);
  return out;
}

}  // namespace gmt
