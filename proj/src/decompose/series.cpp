#include "gmt/decompose/series.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gmt/content/content.hpp"
#include "gmt/core/exact_sum.hpp"

namespace gmt {

SeparatedPieces separate_pieces(const std::vector<Region>& pieces, const AtomicMeasure& mu, double eps, int L) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  if (L < 0 || L > kMaxLevel) throw DomainError("level out of range");
  const std::size_t n = pieces.size();
  for (const auto& p : pieces)
    if (p.dim() != mu.dim()) throw DomainError("piece dimension does not match the measure");

  // Occupied level-L cubes of every piece, with their masses.
  std::vector<std::map<DyadicCube, ExactSum>> leaves(n);
  for (std::size_t a = 0; a < mu.size(); ++a) {
    const DyadicCube q = leaf_of(mu, a, L);
    std::size_t owner = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!pieces[i].covers(q)) continue;
      if (owner != n) throw DomainError("pieces share an atom");
      owner = i;
    }
    if (owner != n) leaves[owner][q].add(mu.atoms()[a].mass);
  }

  SeparatedPieces out;
  out.dropped_mass.assign(n, 0.0);
  if (n <= 1) {
    out.pieces = pieces;
    out.delta_lower = mu.box().side;
    return out;
  }

  std::vector<std::vector<std::pair<DyadicCube, double>>> occupied(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [q, s] : leaves[i]) occupied[i].emplace_back(q, s.value());

  std::vector<double> candidates;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (const auto& [p, pm] : occupied[i])
        for (const auto& [q, qm] : occupied[j]) {
          const double d = cube_distance(mu.box(), p, q);
          if (d > 0.0) candidates.push_back(d / 2.0);
        }
  std::sort(candidates.begin(), candidates.end(), std::greater<>());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  if (candidates.empty()) candidates.push_back(mu.box().side);  // no pair of occupied cubes at all

  const double budget = eps / static_cast<double>(n);
  for (double lower : candidates) {
    std::vector<std::vector<DyadicCube>> kept(n);
    std::vector<double> dropped(n, 0.0);
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      ExactSum drop;
      for (const auto& [q, m] : occupied[i]) {
        bool close = false;
        for (std::size_t j = 0; j < i && !close; ++j)
          for (const auto& p : kept[j])
            if (cube_distance(mu.box(), p, q) < 2.0 * lower) {
              close = true;
              break;
            }
        if (close) {
          drop.add(m);
        } else {
          kept[i].push_back(q);
        }
      }
      dropped[i] = drop.value();
      ok = dropped[i] <= budget;
    }
    if (!ok) continue;
    for (std::size_t i = 0; i < n; ++i) out.pieces.emplace_back(mu.dim(), std::move(kept[i]));
    out.dropped_mass = std::move(dropped);
    out.delta_lower = lower;
    return out;
  }
  throw InfeasibleCoverError("pieces cannot be separated within the mass budget");
}

namespace {

constexpr double kWeightQuantum = 0x1.0p-52;

void validate_schedule(const std::vector<ScheduleStep>& schedule, const RootBox& box, int L) {
  if (schedule.empty()) throw DomainError("schedule must not be empty");
  if (L < 0 || L > kMaxLevel) throw DomainError("level out of range");
  for (const auto& s : schedule) {
    if (!(s.c > 0.0) || !std::isfinite(s.c)) throw DomainError("schedule caps must be positive");
    if (!(s.eps > 0.0)) throw DomainError("schedule eps must be positive");
    if (!(s.delta >= cube_radius(box, L))) throw InfeasibleCoverError("schedule delta is below the leaf radius");
  }
}

double remainder_mass(const AtomicMeasure& mu, const std::vector<double>& assigned) {
  ExactSum s;
  for (std::size_t a = 0; a < mu.size(); ++a) s.add((1.0 - assigned[a]) * mu.atoms()[a].mass);
  return s.value();
}

}  // namespace

SeriesDecomposition series_decomposition(std::shared_ptr<const AtomicMeasure> mu, const GaugeFunction& g,
                                         const std::vector<ScheduleStep>& schedule, int L, bool strict) {
  validate_schedule(schedule, mu->box(), L);
  SeriesDecomposition out;
  out.schedule = schedule;
  out.max_level = L;
  double min_eps = schedule.front().eps;
  for (const auto& s : schedule) min_eps = std::min(min_eps, s.eps);

  const std::size_t n = mu->size();
  std::vector<double> assigned(n, 0.0);  // multiples of 2^-52, so 1 − assigned is exact
  double remaining = mu->total_mass();
  for (const auto& step : schedule) {
    if (remaining == 0.0) break;
    std::vector<double> rem_mass(n);
    for (std::size_t a = 0; a < n; ++a) rem_mass[a] = (1.0 - assigned[a]) * mu->atoms()[a].mass;
    const auto frac = capped_fractions(*mu, rem_mass, g, step.c, step.delta, L);
    std::vector<double> w(n);
    for (std::size_t a = 0; a < n; ++a) {
      w[a] = std::floor((1.0 - assigned[a]) * frac[a] / kWeightQuantum) * kWeightQuantum;
      assigned[a] += w[a];
    }
    WeightedRestriction nu(mu, std::move(w));
    auto cert = certify_caps(nu.as_measure(), g, step.c, step.delta, L);
    out.pieces.push_back(SeriesPiece{std::move(nu), step, cert, false});
    remaining = remainder_mass(*mu, assigned);
    if (remaining <= min_eps) break;
  }
  out.residual_mass = remaining;

  std::vector<double> rest(n);
  bool any = false;
  for (std::size_t a = 0; a < n; ++a) {
    rest[a] = 1.0 - assigned[a];
    any = any || rest[a] > 0.0;
  }
  if (strict && remaining > min_eps)
    throw IncompleteDecompositionError("schedule exhausted with remainder mass " + std::to_string(remaining),
                                       WeightedRestriction(mu, rest));
  if (any) {
    WeightedRestriction nu(mu, std::move(rest));
    const AtomicMeasure m = nu.as_measure();
    const double last_delta = out.pieces.empty() ? schedule.back().delta : out.pieces.back().step.delta;
    const auto report = density_sup(m, g, last_delta, 0, L);
    ScheduleStep achieved{report.sup, last_delta, remaining};
    auto cert = certify_caps(m, g, report.sup, last_delta, L);
    out.pieces.push_back(SeriesPiece{std::move(nu), achieved, cert, true});
  }
  return out;
}

std::vector<WeightedRestriction> approx_sequence(std::shared_ptr<const AtomicMeasure> mu, const GaugeFunction& g,
                                                 const std::vector<ScheduleStep>& schedule, int L) {
  for (std::size_t k = 1; k < schedule.size(); ++k)
    if (!(schedule[k].c < schedule[k - 1].c)) throw DomainError("approximation caps must be strictly decreasing");
  const auto series = series_decomposition(mu, g, schedule, L);
  std::vector<WeightedRestriction> seq;
  std::vector<double> cum(mu->size(), 0.0);
  std::size_t k = 0;
  for (std::size_t n = 0; n < schedule.size(); ++n) {
    if (k < series.pieces.size() && !series.pieces[k].remainder) {
      const auto& w = series.pieces[k].restriction.weights();
      for (std::size_t a = 0; a < cum.size(); ++a) cum[a] += w[a];
      ++k;
    }
    seq.emplace_back(mu, cum);
  }
  return seq;
}

}  // namespace gmt
