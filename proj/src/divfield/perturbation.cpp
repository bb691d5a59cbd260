#include "gmt/divfield/perturbation.hpp"

#include <algorithm>
#include <cmath>

#include "gmt/core/error.hpp"
#include "gmt/core/exact_sum.hpp"
#include "gmt/core/mollifier.hpp"
#include "gmt/divfield/mollify.hpp"
#include "gmt/divfield/newtonian.hpp"

namespace gmt {

namespace {

constexpr int kDefaultPieces = 12;

// Σ_a w_a m_a over a weight vector, one product per atom.
void add_products(ExactSum& sum, const AtomicMeasure& mu, const std::vector<double>& w) {
  for (std::size_t a = 0; a < mu.size(); ++a) sum.add(w[a] * mu.atoms()[a].mass);
}

const std::vector<double>* piece_weights(const SeriesDecomposition& s, std::size_t k) {
  return k < s.pieces.size() ? &s.pieces[k].restriction.weights() : nullptr;
}

AtomicMeasure weighted(const AtomicMeasure& mu, const std::vector<double>* w) {
  if (w == nullptr) return AtomicMeasure(mu.box(), {});
  return scaled(mu, *w);
}

double sup_difference(const GridField& a, const GridField& b) {
  double best = 0.0;
  const int nc = a.components();
  for (std::size_t c = 0; c < a.spec().cell_count(); ++c) {
    double n2 = 0.0;
    for (int k = 0; k < nc; ++k) {
      const double d = a.at(c, k) - b.at(c, k);
      n2 += d * d;
    }
    best = std::max(best, std::sqrt(n2));
  }
  return best;
}

}  // namespace

std::vector<ScheduleStep> default_perturbation_schedule(const RootBox& box, int L, double eps) {
  std::vector<ScheduleStep> out;
  for (int k = 0; k < kDefaultPieces; ++k)
    out.push_back({std::ldexp(1.0, k - 4), std::max(std::ldexp(cube_radius(box, 0), -k), cube_radius(box, L)),
                   std::ldexp(eps, -k - 1)});
  return out;
}

std::vector<ModulusSample> continuity_modulus(const GridField& V) {
  const auto& spec = V.spec();
  const int n = spec.dim();
  const int nc = V.components();
  const auto cells = spec.cells_per_axis();
  std::vector<ModulusSample> out;
  double running = 0.0;
  for (std::size_t d = 1; d < cells; d *= 2) {
    double osc = 0.0;
    for (std::size_t c = 0; c < spec.cell_count(); ++c) {
      const CubeIndex idx = spec.unflatten(c);
      for (int i = 0; i < n; ++i) {
        if (idx[i] + d >= cells) continue;
        CubeIndex j = idx;
        j[i] += static_cast<std::uint32_t>(d);
        const std::size_t o = spec.flatten(j);
        double n2 = 0.0;
        for (int k = 0; k < nc; ++k) {
          const double diff = V.at(o, k) - V.at(c, k);
          n2 += diff * diff;
        }
        osc = std::max(osc, std::sqrt(n2));
      }
    }
    running = std::max(running, osc);
    out.push_back({static_cast<double>(d) * spec.spacing(), running});
  }
  return out;
}

PerturbationResult l1_perturbation(const SignedAtomicMeasure& mu, double eps, const PerturbationOptions& options) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("eps must be positive");
  const GridSpec& spec = options.grid;
  validate_grid(spec);
  const int n = mu.dim();
  if (n < 2) throw DomainError("the perturbation pipeline needs N >= 2");
  if (spec.dim() != n) throw DomainError("grid and measure dimensions differ");
  for (const auto* part : {&mu.positive(), &mu.negative()})
    for (const auto& a : part->atoms())
      for (int i = 0; i < n; ++i)
        if (!(a.x[i] > spec.box.origin[i] && a.x[i] < spec.box.origin[i] + spec.box.side))
          throw DomainError("measure must lie in the open grid box");

  const int L = spec.level;
  const auto g = GaugeFunction::power(static_cast<double>(n - 1));
  const auto schedule = options.schedule.empty() ? default_perturbation_schedule(mu.box(), L, eps) : options.schedule;

  PerturbationResult out;
  out.eps = eps;
  out.alpha_budget = options.alpha_budget > 0.0 ? options.alpha_budget : eps;
  auto pos = std::make_shared<const AtomicMeasure>(mu.positive());
  auto neg = std::make_shared<const AtomicMeasure>(mu.negative());
  out.positive = series_decomposition(pos, g, schedule, L);
  out.negative = series_decomposition(neg, g, schedule, L);
  const std::size_t K = std::max(out.positive.pieces.size(), out.negative.pieces.size());

  // Tail masses for every cutoff; j is the first one within ε.
  std::vector<double> tail(K + 1, 0.0);
  for (std::size_t start = 0; start <= K; ++start) {
    ExactSum s;
    for (std::size_t k = start; k < K; ++k) {
      if (const auto* w = piece_weights(out.positive, k)) add_products(s, *pos, *w);
      if (const auto* w = piece_weights(out.negative, k)) add_products(s, *neg, *w);
    }
    tail[start] = s.value();
  }
  std::size_t first_tail = 0;
  while (tail[first_tail] > eps) ++first_tail;
  out.j = static_cast<int>(first_tail) - 1;
  out.tail_mass = tail[first_tail];

  // Head: one Newtonian field for Σ_{k≤j} ν_k.
  std::vector<double> head_pos(pos->size(), 0.0);
  std::vector<double> head_neg(neg->size(), 0.0);
  for (std::size_t k = 0; k < first_tail; ++k) {
    if (const auto* w = piece_weights(out.positive, k))
      for (std::size_t a = 0; a < w->size(); ++a) head_pos[a] += (*w)[a];
    if (const auto* w = piece_weights(out.negative, k))
      for (std::size_t a = 0; a < w->size(); ++a) head_neg[a] += (*w)[a];
  }
  out.V = newtonian_field(SignedAtomicMeasure(scaled(*pos, head_pos), scaled(*neg, head_neg)), spec).V;
  out.f = GridField::scalar(spec);

  const double delta_max = spec.box.side / 8.0;
  const double delta_min = min_resolvable_delta(spec);
  out.alpha_certified = true;
  ExactSum alpha_sum;
  for (std::size_t k = 0; k < K; ++k) {
    PerturbationPiece piece;
    piece.k = static_cast<int>(k);
    ExactSum m;
    if (const auto* w = piece_weights(out.positive, k)) add_products(m, *pos, *w);
    if (const auto* w = piece_weights(out.negative, k)) add_products(m, *neg, *w);
    piece.mass = m.value();
    piece.tail = k >= first_tail;
    if (piece.tail) {
      const SignedAtomicMeasure nu(weighted(*pos, piece_weights(out.positive, k)),
                                   weighted(*neg, piece_weights(out.negative, k)));
      const GridField W = newtonian_field(nu, spec).V;
      piece.alpha = std::ldexp(out.alpha_budget, -static_cast<int>(k) - 1);
      alpha_sum.add(piece.alpha);
      GridField smoothed;
      double delta = delta_max;
      if (delta < delta_min) throw ResolutionError("grid too coarse for any admissible mollifier");
      while (true) {
        smoothed = mollify_field(W, MollifierSpec(n, delta));
        piece.sup_error = sup_difference(W, smoothed);
        piece.delta = delta;
        if (piece.sup_error <= piece.alpha || delta / 2.0 < delta_min) break;
        delta /= 2.0;
      }
      piece.alpha_met = piece.sup_error <= piece.alpha;
      out.alpha_certified = out.alpha_certified && piece.alpha_met;
      out.V += W;
      out.V -= smoothed;
      out.f += mollify_measure(nu, MollifierSpec(n, piece.delta), spec);
    }
    out.pieces.push_back(piece);
  }
  out.alpha_sum = alpha_sum.value();
  out.f_l1 = out.f.l1_norm();
  out.modulus = continuity_modulus(out.V);
  return out;
}

}  // namespace gmt
