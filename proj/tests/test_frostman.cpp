#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <map>
#include <random>

#include "gmt/content/content.hpp"
#include "gmt/core/error.hpp"
#include "gmt/core/exact_sum.hpp"
#include "gmt/frostman/frostman.hpp"
#include "test_support.hpp"

using namespace gmt;

namespace {

using Quad = boost::multiprecision::cpp_bin_float_quad;

// Masses of every occupied cube of level ≤ L, binned from raw coordinates and
// summed in 113-bit arithmetic (exact for these atom counts).
std::vector<std::map<std::vector<long long>, Quad>> sweep_masses(const AtomicMeasure& mu, int L) {
  std::vector<std::map<std::vector<long long>, Quad>> out(static_cast<std::size_t>(L) + 1);
  for (const auto& a : mu.atoms())
    for (int l = 0; l <= L; ++l) {
      std::vector<long long> key;
      for (int i = 0; i < mu.dim(); ++i)
        key.push_back(static_cast<long long>(std::floor((a.x[i] - mu.box().origin[i]) / mu.box().side * std::ldexp(1.0, l))));
      out[static_cast<std::size_t>(l)][key] += a.mass;
    }
  return out;
}

double price_of(const Region& r, const RootBox& box, const GaugeFunction& g) {
  std::vector<double> p;
  for (const auto& q : r.cubes()) p.push_back(g(q.radius(box)));
  return exact_sum(p);
}

}  // namespace

TEST_CASE("Frostman examples") {
  const RootBox unit1{1, {0.0, 0.0, 0.0}, 1.0};
  const auto h = GaugeFunction::power(1.0);

  const Region single(1, {DyadicCube{1, 4, {5, 0, 0}}});
  const auto one = frostman_construct(single, unit1, h, 4);
  REQUIRE(one.measure.size() == 1);
  CHECK(one.measure.atoms()[0].mass == h(cube_radius(unit1, 4)));
  CHECK(one.measure.atoms()[0].x[0] == 5.5 / 16.0);

  const Region full(1, {DyadicCube{1, 0, {}}});
  const auto f = frostman_construct(full, unit1, h, 6);
  CHECK(f.total_mass == 0.5);
  CHECK(f.rescaled_cubes == 0);
  CHECK(f.saturated_cover == full);
  const auto sweep = sweep_masses(f.measure, 6);
  for (int l = 0; l <= 6; ++l) {
    CHECK(sweep[static_cast<std::size_t>(l)].size() == (std::size_t{1} << l));
    for (const auto& [key, m] : sweep[static_cast<std::size_t>(l)]) CHECK(m == Quad(std::ldexp(1.0, -l - 1)));
  }
}

TEST_CASE("Frostman measure on the corner Cantor iterate") {
  const RootBox unit2{2, {0.0, 0.0, 0.0}, 1.0};
  const auto h = GaugeFunction::power(1.0);
  const Region cantor = corner_cantor_region(2, 6);
  const int L = 12;
  const auto f = frostman_construct(cantor, unit2, h, L);
  CHECK(f.measure.size() == 4096);

  const auto sweep = sweep_masses(f.measure, L);
  for (int l = 0; l <= L; ++l)
    for (const auto& [key, m] : sweep[static_cast<std::size_t>(l)]) {
      const double cap = h(cube_radius(unit2, l));
      CHECK(m <= Quad(cap));
      if (l % 2 == 0) CHECK(m == Quad(cap));  // generation cubes are saturated
    }
  CHECK(f.total_mass == price_of(f.saturated_cover, unit2, h));
  CHECK(f.total_mass >= dyadic_content_value(cantor, unit2, h, kNoDeltaCap, L));
  CHECK(f.saturated_cover == Region(2, {DyadicCube{2, 0, {}}}));
}

TEST_CASE("property: Frostman invariants on random regions") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 120; ++trial) {
    const int dim = 1 + static_cast<int>(rng() % 3);
    const RootBox box{dim, {-0.5, 0.25, 1.0}, 0.5 + 2.0 * testing::uniform01(rng)};
    const int L = dim == 3 ? 4 : 6;
    const Region A = testing::random_region(rng, dim, L, 10);
    const GaugeFunction g = trial % 2 == 0 ? GaugeFunction::power(0.2 + 2.5 * testing::uniform01(rng), trial % 4 == 0)
                                           : GaugeFunction::power_log(0.3 + testing::uniform01(rng), 1.0);
    const auto f = frostman_construct(A, box, g, L);

    // Caps, checked with exact sums over the library's own cube assignment.
    for (int l = 0; l <= L; ++l) {
      std::map<std::uint64_t, ExactSum> bins;
      for (std::size_t a = 0; a < f.measure.size(); ++a) bins[leaf_of(f.measure, a, l).morton()].add(f.measure.atoms()[a].mass);
      for (const auto& [key, s] : bins) CHECK(s.value() <= g(cube_radius(box, l)));
    }
    // And against the independently binned sweep.
    const auto sweep = sweep_masses(f.measure, L);
    for (int l = 0; l <= L; ++l)
      for (const auto& [key, m] : sweep[static_cast<std::size_t>(l)])
        CHECK(m <= Quad(g(cube_radius(box, l))));

    const double price = price_of(f.saturated_cover, box, g);
    CHECK(std::fabs(f.total_mass - price) <= 1e-12 * price);
    CHECK(f.total_mass >= dyadic_content_value(A, box, g, kNoDeltaCap, L) * (1 - 1e-12));
    CHECK(f.total_mass == f.measure.total_mass());
    for (const auto& q : A.cubes()) {
      bool hit = f.saturated_cover.covers(q);
      for (const auto& s : f.saturated_cover.cubes()) hit = hit || q.contains(s);
      CHECK(hit);
    }
    for (std::size_t a = 0; a < f.measure.size(); ++a) CHECK(A.covers(leaf_of(f.measure, a, L)));
  }
}

TEST_CASE("Frostman output of a Besicovitch-admissible gauge has decaying codimension-one density") {
  const RootBox unit2{2, {0.0, 0.0, 0.0}, 1.0};
  const auto g = GaugeFunction::power_log(1.0, 1.0);
  CHECK(ratio_strictly_decreasing(g, 2, 2, 12));
  const auto f = frostman_construct(Region(2, {DyadicCube{2, 0, {}}}), unit2, g, 9);
  const auto rep = density_sup(f.measure, GaugeFunction::power(1.0), kNoDeltaCap, 2, 9);
  for (std::size_t k = 1; k < rep.levels.size(); ++k) CHECK(rep.levels[k].max_ratio < rep.levels[k - 1].max_ratio);
}

TEST_CASE("Frostman errors") {
  const RootBox unit1{1, {0.0, 0.0, 0.0}, 1.0};
  CHECK_THROWS_AS((void)frostman_construct(Region(1, {}), unit1, GaugeFunction::power(1.0), 3), DomainError);
  CHECK_THROWS_AS((void)frostman_construct(Region(1, {DyadicCube{1, 0, {}}}), unit1, GaugeFunction::power(400.0), 3),
                  DegenerateGaugeError);
  CHECK_THROWS_AS((void)frostman_construct(Region(1, {DyadicCube{1, 5, {}}}), unit1, GaugeFunction::power(1.0), 3),
                  DomainError);
}
