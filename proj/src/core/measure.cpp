#include "gmt/core/measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gmt/core/error.hpp"
#include "gmt/core/exact_sum.hpp"

namespace gmt {

namespace {

constexpr double kPlacementTolerance = 1e-12;

CubeIndex fine_coordinates(const RootBox& box, const Point& x) {
  CubeIndex idx{};
  const double n = std::ldexp(1.0, AtomicMeasure::kFineLevel);
  for (int i = 0; i < box.dim; ++i) {
    const double y = (x[i] - box.origin[i]) / box.side;
    if (!std::isfinite(y) || y < -kPlacementTolerance || y > 1.0 + kPlacementTolerance)
      throw PlacementError("atom lies outside the root box");
    const double f = std::floor(y * n);
    idx[i] = static_cast<std::uint32_t>(std::clamp(f, 0.0, n - 1.0));
  }
  return idx;
}

}  // namespace

AtomicMeasure::AtomicMeasure(RootBox box, std::vector<Atom> atoms) : box_(box), atoms_(std::move(atoms)) {
  validate_box(box_);
  fine_.reserve(atoms_.size());
  ExactSum total;
  for (auto& a : atoms_) {
    if (!(a.mass > 0.0) || !std::isfinite(a.mass)) throw DomainError("atom masses must be positive and finite");
    for (int i = box_.dim; i < kMaxDim; ++i) a.x[i] = 0.0;
    fine_.push_back(fine_coordinates(box_, a.x));
    total.add(a.mass);
  }
  total_ = total.value();
}

DyadicCube leaf_of(const AtomicMeasure& mu, std::size_t a, int level) {
  if (a >= mu.size()) throw DomainError("atom index out of range");
  if (level < 0 || level > kMaxLevel) throw DomainError("level out of range");
  DyadicCube q{mu.dim(), level, {}};
  const int shift = AtomicMeasure::kFineLevel - level;
  for (int i = 0; i < mu.dim(); ++i) q.index[i] = mu.fine_index(a)[i] >> shift;
  return q;
}

std::vector<double> cube_masses(const AtomicMeasure& mu, std::span<const DyadicCube> cubes) {
  std::vector<ExactSum> sums(cubes.size());
  std::map<std::pair<int, std::uint64_t>, std::vector<std::size_t>> lookup;
  for (std::size_t i = 0; i < cubes.size(); ++i) lookup[{cubes[i].level, cubes[i].morton()}].push_back(i);
  std::vector<int> levels;
  for (const auto& [key, _] : lookup) levels.push_back(key.first);
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  for (std::size_t a = 0; a < mu.size(); ++a) {
    for (int l : levels) {
      auto it = lookup.find({l, leaf_of(mu, a, l).morton()});
      if (it == lookup.end()) continue;
      for (std::size_t i : it->second) sums[i].add(mu.atoms()[a].mass);
    }
  }
  std::vector<double> out;
  out.reserve(cubes.size());
  for (const auto& s : sums) out.push_back(s.value());
  return out;
}

AtomicMeasure scaled(const AtomicMeasure& mu, std::span<const double> weights) {
  if (weights.size() != mu.size()) throw DomainError("weight count does not match atom count");
  std::vector<Atom> atoms;
  for (std::size_t a = 0; a < mu.size(); ++a) {
    const double m = weights[a] * mu.atoms()[a].mass;
    if (m > 0.0) atoms.push_back(Atom{mu.atoms()[a].x, m});
  }
  return AtomicMeasure(mu.box(), std::move(atoms));
}

SignedAtomicMeasure::SignedAtomicMeasure(AtomicMeasure positive, AtomicMeasure negative)
    : pos_(std::move(positive)), neg_(std::move(negative)) {
  if (!(pos_.box() == neg_.box())) throw DomainError("signed measure parts must share the root box");
  std::vector<Point> pp;
  for (const auto& a : pos_.atoms()) pp.push_back(a.x);
  std::sort(pp.begin(), pp.end());
  for (const auto& a : neg_.atoms())
    if (std::binary_search(pp.begin(), pp.end(), a.x))
      throw DomainError("a position carries both positive and negative mass");
}

SignedAtomicMeasure::SignedAtomicMeasure(AtomicMeasure positive)
    : pos_(std::move(positive)), neg_(pos_.box(), {}) {}

double SignedAtomicMeasure::total_signed_mass() const {
  ExactSum s;
  for (const auto& a : pos_.atoms()) s.add(a.mass);
  for (const auto& a : neg_.atoms()) s.add(-a.mass);
  return s.value();
}

double SignedAtomicMeasure::total_variation() const {
  ExactSum s;
  for (const auto& a : pos_.atoms()) s.add(a.mass);
  for (const auto& a : neg_.atoms()) s.add(a.mass);
  return s.value();
}

WeightedRestriction::WeightedRestriction(std::shared_ptr<const AtomicMeasure> base, std::vector<double> weights)
    : base_(std::move(base)), weights_(std::move(weights)) {
  if (!base_) throw DomainError("restriction needs a base measure");
  if (weights_.size() != base_->size()) throw DomainError("weight count does not match atom count");
  for (double w : weights_)
    if (!(w >= 0.0 && w <= 1.0)) throw DomainError("restriction weights must lie in [0, 1]");
}

WeightedRestriction WeightedRestriction::identity(std::shared_ptr<const AtomicMeasure> base) {
  const auto n = base->size();
  return WeightedRestriction(std::move(base), std::vector<double>(n, 1.0));
}

WeightedRestriction WeightedRestriction::zero(std::shared_ptr<const AtomicMeasure> base) {
  const auto n = base->size();
  return WeightedRestriction(std::move(base), std::vector<double>(n, 0.0));
}

double WeightedRestriction::total_mass() const {
  ExactSum s;
  for (std::size_t a = 0; a < weights_.size(); ++a) s.add(weights_[a] * base_->atoms()[a].mass);
  return s.value();
}

double tv_distance(const AtomicMeasure& mu, const WeightedRestriction& nu) {
  if (&mu != &nu.base() && !(mu == nu.base())) throw DomainError("restriction does not restrict this measure");
  // Kept mass per atom is fl(w m); the removed part m − fl(w m) is added
  // exactly (value plus rounding error) so removed + kept = m holds in reals.
  ExactSum s;
  for (std::size_t a = 0; a < mu.size(); ++a) {
    const double m = mu.atoms()[a].mass;
    const double kept = nu.weights()[a] * m;
    const double r = m - kept;
    const double z = r - m;
    const double err = (m - (r - z)) + (-kept - z);
    s.add(r);
    s.add(err);
  }
  return s.value();
}

}  // namespace gmt
