#include <doctest.h>

#include <cmath>
#include <random>

#include "gmt/content/content.hpp"
#include "gmt/core/cube_tree.hpp"
#include "gmt/core/error.hpp"
#include "gmt/core/exact_sum.hpp"
#include "oracles/cover_oracle.hpp"
#include "test_support.hpp"

using namespace gmt;

namespace {

const RootBox kUnit1{1, {0.0, 0.0, 0.0}, 1.0};
const RootBox kUnit2{2, {0.0, 0.0, 0.0}, 1.0};

GaugeFunction random_gauge(std::mt19937_64& rng) {
  switch (rng() % 3) {
    case 0:
      return GaugeFunction::power(0.3 + 2.0 * testing::uniform01(rng), rng() % 2 == 0);
    case 1:
      return GaugeFunction::power_log(0.5 + testing::uniform01(rng), 0.2 + testing::uniform01(rng));
    default: {
      std::vector<std::pair<double, double>> knots;
      double h = 0.0;
      for (int k = 1; k <= 6; ++k) {
        h += testing::uniform01(rng) * 0.3;
        knots.emplace_back(k / 6.0, h + 1e-3);
      }
      return GaugeFunction::table(knots);
    }
  }
}

double cover_price(const ContentResult& r, const RootBox& box, const GaugeFunction& g) {
  std::vector<double> prices;
  for (const auto& q : r.optimal_cover.cubes()) prices.push_back(g(q.radius(box)));
  return exact_sum(prices);
}

}  // namespace

TEST_CASE("dyadic_content examples") {
  const auto h = GaugeFunction::power(1.0, true);  // h(t) = 2t
  CHECK(dyadic_content(Region(1, {}), kUnit1, h, kNoDeltaCap, 5).value == 0.0);
  CHECK(dyadic_content(Region(1, {}), kUnit1, h, kNoDeltaCap, 5).optimal_cover.empty());

  const Region one(1, {DyadicCube{1, 2, {1, 0, 0}}});
  CHECK(dyadic_content(one, kUnit1, h, kNoDeltaCap, 2).value == 0.25);

  const Region root(1, {DyadicCube{1, 0, {}}});
  for (int l = 0; l <= 8; ++l) {
    const double delta = cube_radius(kUnit1, l);
    const auto r = dyadic_content(root, kUnit1, h, delta, 8);
    CHECK(r.value == 1.0);
    CHECK(r.delta_cap == delta);
    for (const auto& q : r.optimal_cover.cubes()) CHECK(q.radius(kUnit1) <= delta);
  }
}

TEST_CASE("dyadic_content rejects inadmissible caps and levels") {
  const auto h = GaugeFunction::power(1.0);
  const Region one(1, {DyadicCube{1, 2, {1, 0, 0}}});
  CHECK_THROWS_AS((void)dyadic_content(one, kUnit1, h, 0.01, 3), InfeasibleCoverError);
  CHECK_THROWS_AS((void)dyadic_content(one, kUnit1, h, 1.0, 1), DomainError);
  CHECK(dyadic_content(Region(1, {}), kUnit1, h, 0.01, 3).value == 0.0);
  CHECK_THROWS_AS((void)dyadic_content(Region(2, {DyadicCube{2, 0, {}}}), kUnit2, h, cube_radius(kUnit2, 14), 14, 1000),
                  ResolutionError);
}

TEST_CASE("content values equal the exact price of the optimal cover") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 1 + static_cast<int>(rng() % 3);
    const RootBox box{dim, {0.0, 0.0, 0.0}, 0.5 + testing::uniform01(rng)};
    const Region A = testing::random_region(rng, dim, 4, 6);
    const auto g = random_gauge(rng);
    const int L = 5;
    const double delta = cube_radius(box, static_cast<int>(rng() % (L + 1))) * (1.0 + 0.5 * testing::uniform01(rng));
    const auto r = dyadic_content(A, box, g, delta, L);
    CHECK(r.value == cover_price(r, box, g));
    CHECK(r.value == dyadic_content_value(A, box, g, delta, L));
    for (const auto& q : r.optimal_cover.cubes()) CHECK(q.radius(box) <= delta);
    for (const auto& q : A.cubes()) {
      // Every cube of A is covered: either inside a cover cube or tiled by finer ones.
      bool inside = r.optimal_cover.covers(q);
      if (!inside) {
        std::vector<double> vol;
        for (const auto& c : r.optimal_cover.cubes())
          if (q.contains(c)) vol.push_back(std::ldexp(1.0, -dim * c.level));
        inside = exact_sum(vol) == std::ldexp(1.0, -dim * q.level);
      }
      CHECK(inside);
    }
  }
}

TEST_CASE("property: DP matches the exhaustive cover oracle") {
  std::mt19937_64 rng(7);
  int done = 0;
  while (done < 150) {
    const int dim = 1 + static_cast<int>(rng() % 2);
    const int L = 1 + static_cast<int>(rng() % (dim == 1 ? 4 : 2));
    const Region A = testing::random_region(rng, dim, L, 4);
    if (oracle::spanning_cells(dim, oracle::refined_leaves(A, L)).size() > 16) continue;
    const RootBox box{dim, {0.0, 0.0, 0.0}, 1.0};
    const auto g = random_gauge(rng);
    const double delta = rng() % 4 == 0 ? kNoDeltaCap : cube_radius(box, static_cast<int>(rng() % (L + 1)));
    const double expected = oracle::exhaustive_content(A, box, g, delta, L);
    CHECK(std::fabs(dyadic_content(A, box, g, delta, L).value - expected) <= 1e-12 * std::max(1.0, expected));
    ++done;
  }
}

TEST_CASE("property: content is monotone and subadditive") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 150; ++trial) {
    const int dim = 1 + static_cast<int>(rng() % 3);
    const RootBox box{dim, {0.0, 0.0, 0.0}, 1.0};
    const int L = dim == 3 ? 4 : 6;
    const auto g = random_gauge(rng);
    const Region A = testing::random_region(rng, dim, L, 8);
    const Region B = testing::random_region(rng, dim, L, 8);
    const Region U = region_union(A, B);
    const double tol = 1e-12;
    const double cA = dyadic_content_value(A, box, g, kNoDeltaCap, L);
    const double cB = dyadic_content_value(B, box, g, kNoDeltaCap, L);
    const double cU = dyadic_content_value(U, box, g, kNoDeltaCap, L);
    CHECK(cU <= (cA + cB) * (1 + tol));
    CHECK(cA <= cU * (1 + tol));
    CHECK(cB <= cU * (1 + tol));

    double prev = 0.0;
    for (int l = L; l >= 0; --l) {
      const double c = dyadic_content_value(A, box, g, cube_radius(box, l), L);
      if (l < L) CHECK(c <= prev * (1 + tol));
      prev = c;
    }
  }
}

TEST_CASE("density_sup examples") {
  const auto h = GaugeFunction::power(1.0);
  const AtomicMeasure dirac(kUnit1, {{{0.3, 0, 0}, 1.0}});
  const auto rep = density_sup(dirac, h, kNoDeltaCap, 0, 4);
  REQUIRE(rep.levels.size() == 5);
  for (const auto& row : rep.levels) CHECK(row.max_ratio == std::ldexp(1.0, row.level + 1));
  CHECK(rep.sup == 32.0);
  CHECK(rep.levels.back().argmax == leaf_of(dirac, 0, 4));

  std::vector<Atom> atoms;
  for (int k = 0; k < 64; ++k) atoms.push_back({{(k + 0.5) / 64.0, 0, 0}, 1.0 / 64.0});
  const AtomicMeasure uniform(kUnit1, atoms);
  const auto half = GaugeFunction::power(0.5);
  const auto u = density_sup(uniform, half, 0.25, 0, 6);
  CHECK(u.levels.front().level == 1);
  CHECK(u.sup == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(density_sup(uniform, half, 0.25, 0, 6, true).sup == doctest::Approx(1.0).epsilon(1e-15));

  CHECK(density_sup(AtomicMeasure(kUnit1, {}), h, 1.0, 0, 4).sup == 0.0);
}

TEST_CASE("shifted grids catch mass split by a dyadic boundary") {
  const auto h = GaugeFunction::power(1.0);
  const AtomicMeasure mu(kUnit1, {{{0.49, 0, 0}, 1.0}, {{0.51, 0, 0}, 1.0}});
  const auto plain = density_sup(mu, h, 0.25, 2, 2);
  const auto shifted = density_sup(mu, h, 0.25, 2, 2, true);
  CHECK(plain.sup == 8.0);
  CHECK(shifted.sup == 16.0);
  CHECK(shifted.levels[0].shift_mask == 1);
}

TEST_CASE("concentration_profile examples") {
  const auto h = GaugeFunction::power(1.0);
  const AtomicMeasure dirac(kUnit1, {{{0.3, 0, 0}, 1.0}});
  const std::vector<double> budgets{0.0, 0.0624, 1.0 / 16.0, 0.5, 10.0};
  const auto p = concentration_profile(dirac, h, kNoDeltaCap, 3, budgets);
  CHECK(p.exact);
  CHECK(p.points[0].mass == 0.0);
  CHECK(p.points[1].mass == 0.0);
  CHECK(p.points[2].mass == 1.0);
  CHECK(p.points[4].mass == 1.0);
  CHECK(profile_modulus(p, 0.5) == 1.0 / 16.0);

  const auto h2 = GaugeFunction::power(1.0, true);
  const AtomicMeasure two(kUnit1, {{{0.2, 0, 0}, 3.0}, {{0.7, 0, 0}, 1.0}});
  const std::vector<double> b{0.5};
  const auto q = concentration_profile(two, h2, kNoDeltaCap, 1, b);
  CHECK(q.points[0].mass == 3.0);
  CHECK(q.points[0].mass == oracle::exhaustive_profile(two, h2, kNoDeltaCap, 1, 0.5));
  CHECK(profile_modulus(q, 4.0) == std::numeric_limits<double>::infinity());
}

TEST_CASE("property: exact profile matches brute force and the Lagrangian envelope dominates it") {
  std::mt19937_64 rng(31);
  int done = 0;
  while (done < 60) {
    const int dim = 1 + static_cast<int>(rng() % 2);
    const int L = 2 + static_cast<int>(rng() % 3);
    const auto mu = testing::random_measure(rng, dim, 1 + rng() % 5, testing::MassLattice::kContinuous);
    if (build_atom_tree(mu, L).tree.node_count() > 14) continue;
    const auto g = random_gauge(rng);
    const double delta = rng() % 3 == 0 ? kNoDeltaCap : cube_radius(mu.box(), 1 + static_cast<int>(rng() % L));
    std::vector<double> budgets;
    for (int k = 0; k < 12; ++k) budgets.push_back(testing::uniform01(rng) * 2.0 * g(cube_radius(mu.box(), 1)));
    const auto exact = concentration_profile(mu, g, delta, L, budgets, ProfileMethod::kExact);
    const auto lag = concentration_profile(mu, g, delta, L, budgets, ProfileMethod::kLagrangian);
    CHECK(exact.exact);
    CHECK_FALSE(lag.exact);
    for (std::size_t k = 0; k < budgets.size(); ++k) {
      const double brute = oracle::exhaustive_profile(mu, g, delta, L, budgets[k]);
      CHECK(exact.points[k].mass == doctest::Approx(brute).epsilon(1e-13));
      CHECK(lag.points[k].mass >= exact.points[k].mass * (1 - 1e-12));
    }
    for (const auto& v : lag.frontier)
      CHECK(profile_mass(exact, v.budget) == doctest::Approx(v.mass).epsilon(1e-12));
    for (std::size_t k = 1; k < exact.frontier.size(); ++k) {
      CHECK(exact.frontier[k].budget > exact.frontier[k - 1].budget);
      CHECK(exact.frontier[k].mass > exact.frontier[k - 1].mass);
    }
    ++done;
  }
}

TEST_CASE("property: profiles are nondecreasing from zero to the total mass") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 1 + static_cast<int>(rng() % 3);
    const auto mu = testing::random_measure(rng, dim, 20 + rng() % 80, testing::MassLattice::kDyadic);
    const auto g = random_gauge(rng);
    const int L = 6;
    std::vector<double> budgets{0.0};
    for (int k = 0; k < 30; ++k) budgets.push_back(budgets.back() + 0.02 * testing::uniform01(rng));
    budgets.push_back(1e9);
    const auto p = concentration_profile(mu, g, kNoDeltaCap, L, budgets);
    CHECK(p.points.front().mass == 0.0);
    CHECK(p.points.back().mass == mu.total_mass());
    for (std::size_t k = 1; k < p.points.size(); ++k) CHECK(p.points[k].mass >= p.points[k - 1].mass);
  }
}

TEST_CASE("profile moduli shrink the admissible mass") {
  const auto h = GaugeFunction::power(1.0);
  // A lattice sample of Lebesgue measure: small H^1-content forces small mass.
  std::vector<Atom> atoms;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) atoms.push_back({{(i + 0.5) / 64.0, (j + 0.5) / 64.0, 0}, 1.0 / 4096.0});
  const AtomicMeasure mu(kUnit2, atoms);
  const double delta = profile_delta(mu, h, 0.1, 0.01, 6);
  REQUIRE(delta > 0.0);
  const std::vector<double> b{0.1};
  CHECK(concentration_profile(mu, h, delta, 6, b).points[0].mass <= 0.01);
  CHECK(delta < cube_radius(kUnit2, 0));
  CHECK(concentration_profile(mu, h, 2 * delta, 6, b).points[0].mass > 0.01);
}
