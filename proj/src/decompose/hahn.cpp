#include "gmt/decompose/hahn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "gmt/content/content.hpp"
#include "gmt/core/cube_tree.hpp"
#include "gmt/core/error.hpp"
#include "gmt/core/exact_sum.hpp"
#include "gmt/core/parallel.hpp"

namespace gmt {

namespace {

bool within(double lhs, double rhs) { return lhs <= rhs + 1e-12 * std::fabs(rhs) + 1e-15; }

std::vector<std::size_t> random_subset(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::size_t> s;
  const std::uint64_t density = 1 + rng() % 4;  // keep roughly 1/density of the atoms
  for (std::size_t a = 0; a < n; ++a)
    if (rng() % density == 0) s.push_back(a);
  return s;
}

std::vector<std::size_t> set_union(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> u;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
  return u;
}

std::vector<std::size_t> atoms_of(std::uint64_t mask) {
  std::vector<std::size_t> out;
  for (; mask != 0; mask &= mask - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(mask)));
  return out;
}

double mass_of(const AtomicMeasure& mu, std::span<const std::size_t> atoms) {
  ExactSum s;
  for (std::size_t a : atoms) s.add(mu.atoms()[a].mass);
  return s.value();
}

// Lexicographic order on sorted index lists encoded as bit masks.
bool mask_lex_less(std::uint64_t a, std::uint64_t b) {
  while (a != 0 && b != 0) {
    const int x = std::countr_zero(a);
    const int y = std::countr_zero(b);
    if (x != y) return x < y;
    a &= a - 1;
    b &= b - 1;
  }
  return a == 0 && b != 0;
}

}  // namespace

OuterMeasureOracle::OuterMeasureOracle(std::string name, Evaluator eval, std::size_t atom_count, std::uint64_t seed,
                                       int samples)
    : name_(std::move(name)), eval_(std::move(eval)) {
  if (!eval_) throw OracleContractError("oracle '" + name_ + "' has no evaluator");
  const double empty = eval_({});
  if (empty != 0.0) throw OracleContractError("oracle '" + name_ + "' violates T(empty) = 0");
  if (atom_count == 0) return;
  std::mt19937_64 rng(seed);
  for (int k = 0; k < samples; ++k) {
    const auto a = random_subset(rng, atom_count);
    const auto b = random_subset(rng, atom_count);
    const auto u = set_union(a, b);
    const double ta = eval_(a);
    const double tb = eval_(b);
    const double tu = eval_(u);
    if (!(ta >= 0.0) || !(tb >= 0.0) || !(tu >= 0.0))
      throw OracleContractError("oracle '" + name_ + "' returned a negative or NaN value");
    if (!within(ta, tu) || !within(tb, tu)) throw OracleContractError("oracle '" + name_ + "' is not monotone");
    if (!within(tu, ta + tb)) throw OracleContractError("oracle '" + name_ + "' is not subadditive");
  }
}

OuterMeasureOracle OuterMeasureOracle::content_cap(std::shared_ptr<const AtomicMeasure> mu, const GaugeFunction& g,
                                                   double c, double delta, int L) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("content-cap oracle needs a finite c ≥ 0");
  if (cube_radius(mu->box(), L) > delta) throw InfeasibleCoverError("content-cap delta is below the leaf radius");
  std::vector<DyadicCube> leaves;
  for (std::size_t a = 0; a < mu->size(); ++a) leaves.push_back(leaf_of(*mu, a, L));
  std::ostringstream name;
  name << "content-cap:" << c << "," << delta;
  const std::size_t n = mu->size();
  Evaluator eval = [mu, g, c, delta, L, leaves](std::span<const std::size_t> atoms) {
    if (atoms.empty()) return 0.0;
    std::vector<DyadicCube> cubes;
    for (std::size_t a : atoms) cubes.push_back(leaves[a]);
    return c * dyadic_content_value(Region(mu->dim(), std::move(cubes)), mu->box(), g, delta, L);
  };
  return OuterMeasureOracle(name.str(), std::move(eval), n);
}

OuterMeasureOracle OuterMeasureOracle::counting(double kappa, std::size_t atom_count) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw DomainError("counting oracle needs a finite κ ≥ 0");
  std::ostringstream name;
  name << "counting:" << kappa;
  return OuterMeasureOracle(
      name.str(), [kappa](std::span<const std::size_t> atoms) { return kappa * static_cast<double>(atoms.size()); },
      atom_count);
}

OuterMeasureOracle OuterMeasureOracle::zero(std::size_t atom_count) {
  return OuterMeasureOracle("zero", [](std::span<const std::size_t>) { return 0.0; }, atom_count);
}

OuterMeasureOracle OuterMeasureOracle::parse(const std::string& spec, std::shared_ptr<const AtomicMeasure> mu,
                                             const GaugeFunction& g, int L) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto number = [&](const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw FormatError("bad number '" + s + "' in oracle spec '" + spec + "'");
    return v;
  };
  if (kind == "zero" && args.empty()) return zero(mu->size());
  if (kind == "counting") return counting(number(args), mu->size());
  if (kind == "content-cap") {
    const auto comma = args.find(',');
    if (comma == std::string::npos) throw FormatError("content-cap oracle needs 'c,delta'");
    return content_cap(std::move(mu), g, number(args.substr(0, comma)), number(args.substr(comma + 1)), L);
  }
  throw FormatError("unknown oracle '" + spec + "'");
}

namespace {

HahnResult exhaustive_hahn(const AtomicMeasure& mu, const OuterMeasureOracle& T, double theta) {
  const std::size_t n = mu.size();
  if (n > kExhaustiveHahnAtoms) throw DomainError("exhaustive Hahn search is limited to 20 atoms");
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  std::vector<double> outer(full + 1);
  std::vector<double> mass(full + 1);
  parallel_for(full + 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t m = begin; m < end; ++m) {
      const auto atoms = atoms_of(m);
      outer[m] = T(atoms);
      mass[m] = mass_of(mu, atoms);
    }
  });

  HahnResult res;
  res.theta = theta;
  res.search = HahnSearch::kExhaustive;
  std::uint64_t remaining = full;
  while (remaining != 0) {
    double sup = 0.0;
    for (std::uint64_t s = remaining; s != 0; s = (s - 1) & remaining)
      if (mass[s] > kHahnMassFloor && outer[s] <= mass[s]) sup = std::max(sup, mass[s]);
    if (sup == 0.0) break;
    std::uint64_t pick = 0;
    for (std::uint64_t s = remaining; s != 0; s = (s - 1) & remaining)
      if (mass[s] > kHahnMassFloor && outer[s] <= mass[s] && mass[s] >= theta * sup && (pick == 0 || mask_lex_less(s, pick)))
        pick = s;
    res.pieces.push_back(HahnPiece{atoms_of(pick), outer[pick], mass[pick], sup});
    remaining &= ~pick;
  }
  res.kept = atoms_of(remaining);
  res.certified = true;
  for (std::uint64_t s = remaining; s != 0; s = (s - 1) & remaining)
    if (mass[s] > outer[s]) res.certified = false;
  const std::uint64_t removed = full & ~remaining;
  res.removed_outer = outer[removed];
  res.removed_mass = mass[removed];
  return res;
}

HahnResult cube_hahn(const AtomicMeasure& mu, const OuterMeasureOracle& T, double theta, int L) {
  const AtomTree at = build_atom_tree(mu, L);
  // Atom set of every tree cube.
  std::vector<std::vector<std::size_t>> family;
  {
    std::vector<std::vector<std::vector<std::size_t>>> per_level(static_cast<std::size_t>(L) + 1);
    per_level.back().resize(at.tree.level(L).size());
    for (std::size_t a = 0; a < mu.size(); ++a) per_level.back()[at.atom_leaf[a]].push_back(a);
    for (int l = L - 1; l >= 0; --l) {
      for (const auto& node : at.tree.level(l)) {
        std::vector<std::size_t> atoms;
        for (auto c = node.child_begin; c < node.child_end; ++c) {
          const auto& kid = per_level[static_cast<std::size_t>(l) + 1][c];
          atoms.insert(atoms.end(), kid.begin(), kid.end());
        }
        std::sort(atoms.begin(), atoms.end());
        per_level[static_cast<std::size_t>(l)].push_back(std::move(atoms));
      }
    }
    for (auto& level : per_level)
      for (auto& s : level)
        if (!s.empty()) family.push_back(std::move(s));
  }

  HahnResult res;
  res.theta = theta;
  res.search = HahnSearch::kCubeGenerated;
  std::vector<bool> alive(mu.size(), true);
  auto restrict_alive = [&](const std::vector<std::size_t>& s) {
    std::vector<std::size_t> out;
    for (std::size_t a : s)
      if (alive[a]) out.push_back(a);
    return out;
  };
  for (;;) {
    std::vector<std::vector<std::size_t>> cands(family.size());
    std::vector<double> outer(family.size());
    std::vector<double> mass(family.size());
    parallel_for(family.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) {
        cands[k] = restrict_alive(family[k]);
        if (cands[k].empty()) continue;
        outer[k] = T(cands[k]);
        mass[k] = mass_of(mu, cands[k]);
      }
    });
    std::vector<std::size_t> violating_union;
    for (std::size_t k = 0; k < family.size(); ++k)
      if (!cands[k].empty() && mass[k] > kHahnMassFloor && outer[k] <= mass[k])
        violating_union = set_union(violating_union, cands[k]);
    if (violating_union.empty()) break;
    cands.push_back(violating_union);
    outer.push_back(T(violating_union));
    mass.push_back(mass_of(mu, violating_union));

    double sup = 0.0;
    for (std::size_t k = 0; k < cands.size(); ++k)
      if (!cands[k].empty() && mass[k] > kHahnMassFloor && outer[k] <= mass[k]) sup = std::max(sup, mass[k]);
    std::size_t pick = cands.size();
    for (std::size_t k = 0; k < cands.size(); ++k) {
      if (cands[k].empty() || !(mass[k] > kHahnMassFloor) || outer[k] > mass[k] || mass[k] < theta * sup) continue;
      if (pick == cands.size() || cands[k] < cands[pick]) pick = k;
    }
    res.pieces.push_back(HahnPiece{cands[pick], outer[pick], mass[pick], sup});
    for (std::size_t a : cands[pick]) alive[a] = false;
  }
  for (std::size_t a = 0; a < mu.size(); ++a)
    if (alive[a]) res.kept.push_back(a);
  res.certified = true;
  for (const auto& s : family) {
    const auto e = restrict_alive(s);
    if (!e.empty() && mass_of(mu, e) > T(e)) res.certified = false;
  }
  std::vector<std::size_t> removed;
  for (std::size_t a = 0; a < mu.size(); ++a)
    if (!alive[a]) removed.push_back(a);
  res.removed_outer = T(removed);
  res.removed_mass = mass_of(mu, removed);
  return res;
}

}  // namespace

HahnResult greedy_hahn(const AtomicMeasure& mu, const OuterMeasureOracle& T, double theta, HahnSearch search, int L) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("theta must lie in (0, 1)");
  if (L < 0 || L > kMaxLevel) throw DomainError("level out of range");
  return search == HahnSearch::kExhaustive ? exhaustive_hahn(mu, T, theta) : cube_hahn(mu, T, theta, L);
}

}  // namespace gmt
