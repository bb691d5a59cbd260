// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "gmt/cli/digest.hpp"
#include "gmt/cli/pipeline.hpp"
#include "gmt/content/content.hpp"
#include "gmt/core/exact_sum.hpp"
#include "gmt/core/io.hpp"
#include "gmt/decompose/hahn.hpp"
#include "gmt/decompose/restriction.hpp"
#include "gmt/decompose/series.hpp"
#include "gmt/divfield/charge.hpp"
#include "gmt/divfield/newtonian.hpp"
#include "gmt/divfield/perturbation.hpp"
#include "gmt/divfield/ualpha.hpp"
#include "gmt/frostman/frostman.hpp"
#include "oracles/cover_oracle.hpp"
#include "oracles/lp_oracle.hpp"
#include "oracles/ualpha_reference.hpp"
#include "test_support.hpp"

using namespace gmt;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;
using Quad = boost::multiprecision::cpp_bin_float_quad;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::shared_ptr<const AtomicMeasure> share(AtomicMeasure mu) {
  return std::make_shared<const AtomicMeasure>(std::move(mu));
}

// ---- 1 --------------------------------------------------------------------

Outcome content_exactness() {
  std::mt19937_64 rng(1);
  int done = 0;
  double worst = 0.0;
  double dp_seconds = 0.0;
  while (done < 200) {
    const int dim = 1 + static_cast<int>(rng() % 2);
    const int L = 1 + static_cast<int>(rng() % (dim == 1 ? 5 : 3));
    const Region A = testing::random_region(rng, dim, L, 5);
    if (oracle::spanning_cells(dim, oracle::refined_leaves(A, L)).size() > 20) continue;
    const RootBox box = testing::unit_box(dim);
    const auto g = rng() % 2 == 0 ? GaugeFunction::power(0.3 + 2.0 * testing::uniform01(rng))
                                  : GaugeFunction::power_log(0.5 + testing::uniform01(rng), 1.0);
    const double delta = rng() % 4 == 0 ? kNoDeltaCap : cube_radius(box, static_cast<int>(rng() % (L + 1)));
    const double expected = oracle::exhaustive_content(A, box, g, delta, L);
    const auto t0 = Clock::now();
    const double got = dyadic_content(A, box, g, delta, L).value;
    dp_seconds += seconds_since(t0);
    worst = std::max(worst, std::fabs(got - expected) / std::max(1.0, expected));
    ++done;
  }
  return {worst <= 1e-12 && dp_seconds < 5.0,
          fmt("200 regions, max |DP - oracle| = %.2e (tol 1e-12), DP time %.3f s (limit 5 s)", worst, dp_seconds)};
}

// ---- 2 --------------------------------------------------------------------

Outcome frostman_invariants() {
  const RootBox box = testing::unit_box(2);
  const auto h = GaugeFunction::power(1.0);
  const Region cantor = corner_cantor_region(2, 6);
  const int L = 12;
  const auto t0 = Clock::now();
  const auto f = frostman_construct(cantor, box, h, L);
  const double content = dyadic_content_value(cantor, box, h, kNoDeltaCap, L);
  const double elapsed = seconds_since(t0);

  // Every occupied cube of every level, binned from raw coordinates and summed
  // in 113-bit arithmetic; unoccupied cubes carry zero mass.
  std::size_t cubes = 0;
  bool caps = true;
  for (int l = 0; l <= L; ++l) {
    std::map<std::pair<long long, long long>, Quad> bins;
    for (const auto& a : f.measure.atoms())
      bins[{static_cast<long long>(std::floor(a.x[0] * std::ldexp(1.0, l))),
            static_cast<long long>(std::floor(a.x[1] * std::ldexp(1.0, l)))}] += a.mass;
    for (const auto& [key, m] : bins) caps = caps && m <= Quad(h(cube_radius(box, l)));
    cubes += bins.size();
  }
  std::vector<double> prices;
  for (const auto& q : f.saturated_cover.cubes()) prices.push_back(h(q.radius(box)));
  const double price = exact_sum(prices);
  const bool ok = caps && f.total_mass == price && f.total_mass >= content && elapsed < 1.0;
  return {ok, fmt("depth 6: %zu cubes swept, caps %s; mass %.17g, saturated price %.17g, content %.17g; %.3f s "
                  "(limit 1 s)",
                  cubes, caps ? "hold" : "VIOLATED", f.total_mass, price, content, elapsed)};
}

// ---- 3 --------------------------------------------------------------------

Outcome restriction_optimality() {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  bool monotone = true;
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 1 + static_cast<int>(rng() % 2);
    const auto mu = share(testing::random_measure(rng, dim, 1 + rng() % 12, testing::MassLattice::kContinuous));
    const int L = 1 + static_cast<int>(rng() % 3);
    const auto g = trial % 2 == 0 ? GaugeFunction::power(0.5 + testing::uniform01(rng))
                                  : GaugeFunction::power_log(1.0, 0.5 + testing::uniform01(rng));
    const double delta = cube_radius(mu->box(), static_cast<int>(rng() % (L + 1)));
    std::vector<double> cs;
    for (int k = 0; k < 5; ++k) cs.push_back(4.0 * testing::uniform01(rng));
    std::sort(cs.begin(), cs.end());
    double prev = 0.0;
    for (double c : cs) {
      const double got = max_restriction(mu, g, c, delta, L).total_mass();
      worst = std::max(worst, std::fabs(got - static_cast<double>(oracle::restriction_lp(*mu, g, c, delta, L))));
      monotone = monotone && got >= prev;
      prev = got;
    }
  }
  return {worst <= 1e-9 && monotone,
          fmt("100 instances x 5 caps, max |nu - LP| = %.2e (tol 1e-9), monotone in c: %s", worst,
              monotone ? "yes" : "NO")};
}

// ---- 4 --------------------------------------------------------------------

Outcome hahn_postconditions() {
  std::mt19937_64 rng(4);
  std::size_t subsets = 0;
  bool kept_ok = true;
  bool pieces_ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 1 + static_cast<int>(rng() % 2);
    const auto mu = share(testing::random_measure(rng, dim, 1 + rng() % 12, testing::MassLattice::kContinuous));
    const auto g = GaugeFunction::power(static_cast<double>(dim) - 0.5);
    const auto T = trial % 2 == 0 ? OuterMeasureOracle::counting(testing::uniform01(rng), mu->size())
                                  : OuterMeasureOracle::content_cap(mu, g, 4.0 * testing::uniform01(rng), kNoDeltaCap, 4);
    const auto r = greedy_hahn(*mu, T, 0.5, HahnSearch::kExhaustive);
    for (std::uint64_t s = 1; s < (std::uint64_t{1} << r.kept.size()); ++s) {
      std::vector<std::size_t> sub;
      ExactSum m;
      for (std::size_t i = 0; i < r.kept.size(); ++i)
        if ((s >> i) & 1U) {
          sub.push_back(r.kept[i]);
          m.add(mu->atoms()[r.kept[i]].mass);
        }
      kept_ok = kept_ok && m.value() <= T(sub);
      ++subsets;
    }
    for (const auto& p : r.pieces) {
      ExactSum m;
      for (auto a : p.atoms) m.add(mu->atoms()[a].mass);
      pieces_ok = pieces_ok && T(p.atoms) <= m.value();
    }
  }
  return {kept_ok && pieces_ok, fmt("100 instances, %zu subsets of E brute-forced: mu(S) <= T(S) %s, "
                                    "T(F_k) <= mu(F_k) %s",
                                    subsets, kept_ok ? "holds" : "FAILS", pieces_ok ? "holds" : "FAILS")};
}

// ---- 5 --------------------------------------------------------------------

Outcome series_conservation() {
  std::mt19937_64 rng(5);
  bool conserved = true;
  bool certified = true;
  bool approx_ok = true;
  std::size_t pieces = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int dim = 1 + static_cast<int>(rng() % 3);
    const auto mu = share(testing::random_measure(rng, dim, 5 + rng() % 60, testing::MassLattice::kContinuous));
    const int L = dim == 3 ? 4 : 6;
    const auto g = GaugeFunction::power(static_cast<double>(dim) - 0.5);
    std::vector<ScheduleStep> sched;
    double c = 1.0 + 4.0 * testing::uniform01(rng);
    for (int k = 0; k <= L; ++k) {
      sched.push_back({c, cube_radius(mu->box(), k), std::ldexp(0.1, -k)});
      c /= 1.5;
    }
    const auto s = series_decomposition(mu, g, sched, L);
    for (std::size_t a = 0; a < mu->size(); ++a) {
      std::vector<Quad> parts;
      Quad m = 0;
      for (const auto& p : s.pieces) m += Quad(p.restriction.weights()[a]) * Quad(mu->atoms()[a].mass);
      conserved = conserved && m == Quad(mu->atoms()[a].mass);
    }
    for (const auto& p : s.pieces) {
      const double sup = density_sup(p.restriction.as_measure(), g, p.step.delta, 0, L).sup;
      certified = certified && p.certificate.passed && sup <= p.step.c * (1.0 + kCapTolerance);
      ++pieces;
    }
    const auto seq = approx_sequence(mu, g, sched, L);
    for (std::size_t n = 1; n < seq.size(); ++n) {
      for (std::size_t a = 0; a < mu->size(); ++a) approx_ok = approx_ok && seq[n].weights()[a] >= seq[n - 1].weights()[a];
      approx_ok = approx_ok && tv_distance(*mu, seq[n]) <= tv_distance(*mu, seq[n - 1]);
    }
  }
  return {conserved && certified && approx_ok,
          fmt("60 measures, %zu pieces: atom-wise reconstruction %s, density_sup caps %s, approx_sequence %s", pieces,
              conserved ? "exact" : "INEXACT", certified ? "pass" : "FAIL", approx_ok ? "monotone" : "NOT MONOTONE")};
}

// ---- 6 --------------------------------------------------------------------

Outcome field_identities() {
  double worst_flux = 0.0;
  for (int dim : {2, 3}) {
    const RootBox box = testing::unit_box(dim);
    const GridSpec spec{box, dim == 2 ? 7 : 6};
    const std::vector<SignedAtomicMeasure> cases{
        SignedAtomicMeasure(AtomicMeasure(box, {{{0.47, 0.52, 0.51}, 1.0}})),
        SignedAtomicMeasure(AtomicMeasure(box, {{{0.45, 0.52, 0.5}, 1.0}, {{0.55, 0.47, 0.53}, 0.5}}),
                            AtomicMeasure(box, {{{0.5, 0.56, 0.44}, 0.25}}))};
    for (const auto& mu : cases) {
      const GridField V = newtonian_field(mu, spec).V;
      for (double r : {0.3, 0.35, 0.4}) {
        const double flux =
            sphere_flux([&](const Point& x) { return interpolate_vector(V, x); }, dim, {0.5, 0.5, 0.5}, r, 10000);
        worst_flux = std::max(worst_flux, std::fabs(flux / mu.total_signed_mass() - 1.0));
      }
    }
  }
  const RootBox unit2 = testing::unit_box(2);
  const SignedAtomicMeasure atom(AtomicMeasure(unit2, {{{0.5, 0.5, 0.0}, 1.0}}));
  std::vector<double> res;
  for (int L = 5; L <= 8; ++L) {
    const GridSpec spec{unit2, L};
    res.push_back(weak_div_residual(newtonian_field(atom, spec).V, atom, smooth_bump_field(spec, {0.5, 0.5, 0.0}, 0.35)));
  }
  double min_order = INFINITY;
  for (std::size_t k = 1; k < res.size(); ++k) min_order = std::min(min_order, std::log2(res[k - 1] / res[k]));
  const bool ok = worst_flux <= 0.005 && min_order >= 1.0 && res[2] <= 1e-3;
  return {ok, fmt("max Gauss flux error %.2e (tol 5e-3); residual L5..8 = %.2e %.2e %.2e %.2e, min order %.2f "
                  "(>= 1), L7 %.2e (<= 1e-3)",
                  worst_flux, res[0], res[1], res[2], res[3], min_order, res[2])};
}

// ---- 7 --------------------------------------------------------------------

Outcome perturbation_pipeline() {
  std::mt19937_64 rng(7);
  std::vector<Atom> atoms;
  for (int i = 0; i < 50; ++i)
    atoms.push_back({{0.25 + 0.5 * testing::uniform01(rng), 0.25 + 0.5 * testing::uniform01(rng), 0.0},
                     0.02 * (0.5 + testing::uniform01(rng))});
  const SignedAtomicMeasure mu(AtomicMeasure(testing::unit_box(2), atoms));
  PerturbationOptions opt;
  opt.grid = GridSpec{testing::unit_box(2), 7};
  const auto r = l1_perturbation(mu, 0.1, opt);
  const double rel = std::fabs(r.f_l1 - r.tail_mass) / r.tail_mass;
  const bool ok = r.tail_mass <= 0.1 && rel <= 0.01 && r.alpha_sum <= r.alpha_budget;
  return {ok, fmt("j = %d, tail_mass %.10g (<= 0.1), ||f||_1 %.10g (rel. diff %.2e, tol 1e-2), sum alpha_k %.3e "
                  "(budget %.3g)",
                  r.j, r.tail_mass, r.f_l1, rel, r.alpha_sum, r.alpha_budget)};
}

// ---- 8 --------------------------------------------------------------------

Outcome charge_tester() {
  const RootBox box = testing::unit_box(2);
  const Region K(2, {DyadicCube{2, 0, {}}});
  const SignedAtomicMeasure dirac(AtomicMeasure(box, {{{0.5, 0.5, 0.0}, 1.0}}));
  ChargeOptions d;
  d.eps = 0.5;
  d.trials = 1000;
  d.seed = 8;
  const auto refuted = charge_test(dirac, K, d);
  const bool dirac_ok = refuted.verdict == ChargeVerdict::kViolated && refuted.refutation_step >= 1 &&
                        refuted.refutation_step <= 20 && refuted.certificate && refuted.certificate->excess > 0.0;

  const GridSpec spec{box, 6};
  const GridField lebesgue(spec, FieldRank::kScalar, std::vector<double>(spec.cell_count(), 1.0));
  ChargeOptions u;
  u.eps = 0.0;
  u.trials = 10000;
  u.seed = 8;
  const auto uniform = charge_test(lebesgue, K, u);
  const bool uniform_ok = satisfied_at(uniform, 1.0) && uniform.evaluated >= 10000;
  return {dirac_ok && uniform_ok,
          fmt("Dirac (eps 0.5) refuted at ladder step %d (<= 20); Lebesgue on [0,1]^2: %zu test functions, "
              "C = 1 %+.1e (roundoff slack %.0e)",
              refuted.refutation_step, uniform.evaluated, uniform.C - 1.0, kChargeRoundoff)};
}

// ---- 9 --------------------------------------------------------------------

Outcome ualpha_trend() {
  const GridSpec spec{RootBox{2, {-0.125, -0.125, 0.0}, 0.25}, 10};
  std::vector<double> radii;
  for (int k = 3; k <= 9; ++k) radii.push_back(std::ldexp(1.0, -k));
  const auto hi = density_profile_plus(u_alpha_field(1.5, oracle::kUAlphaBumpRadius, spec).f_plus_average, radii, 1.0);
  const auto lo = density_profile_plus(u_alpha_field(0.5, oracle::kUAlphaBumpRadius, spec).f_plus_average, radii, 1.0);
  double worst = 0.0;
  bool no_decay = true;
  double grid_min = INFINITY;
  double oracle_min = INFINITY;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    worst = std::max(worst, std::fabs(hi[k].value / oracle::kUAlphaProfile15[k] - 1.0));
    if (k > 0) no_decay = no_decay && hi[k].value >= hi[k - 1].value;
    grid_min = std::min(grid_min, hi[k].value);
    oracle_min = std::min(oracle_min, oracle::kUAlphaProfile15[k]);
  }
  const double floor = 0.95 * oracle_min;
  const double oracle_factor = oracle::kUAlphaProfile05.back() / oracle::kUAlphaProfile05.front();
  const double grid_factor = lo.back().value / lo.front().value;
  const double factor_err = std::fabs(grid_factor / oracle_factor - 1.0);
  const bool ok = worst <= 0.05 && no_decay && grid_min >= floor && factor_err <= 0.05;
  return {ok, fmt("alpha 1.5: max rel. dev. from oracle %.2e (tol 5e-2), D nondecreasing as r -> 0: %s, min D %.4g "
                  ">= floor %.4g; alpha 0.5: decay factor %.5f vs oracle %.5f (rel. %.2e, tol 5e-2)",
                  worst, no_decay ? "yes" : "NO", grid_min, floor, grid_factor, oracle_factor, factor_err)};
}

// ---- 10 -------------------------------------------------------------------

int gmtkit(std::vector<std::string> args, std::string* log = nullptr) {
  args.insert(args.begin(), "gmtkit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (log) *log = out.str() + err.str();
  return code;
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

Outcome cli_determinism() {
  const fs::path dir = testing::scratch_dir("acceptance_cli");
  std::mt19937_64 rng(10);
  std::vector<Atom> atoms;
  for (int i = 0; i < 50; ++i)
    atoms.push_back({{0.25 + 0.5 * testing::uniform01(rng), 0.25 + 0.5 * testing::uniform01(rng), 0.0},
                     0.02 * (0.5 + testing::uniform01(rng))});
  const std::string mu50 = (dir / "mu50.json").string();
  io::write_json_file(mu50, io::to_json(AtomicMeasure(testing::unit_box(2), atoms)));
  const std::string mu10 = (dir / "mu10.json").string();
  io::write_json_file(mu10, io::to_json(testing::random_measure(rng, 2, 10, testing::MassLattice::kDyadic)));
  const std::string region = (dir / "region.json").string();
  write_text(region, R"({"dim":2,"cubes":[{"level":2,"index":[0,0]},{"level":3,"index":[5,6]},{"level":1,"index":[1,1]}]})");
  const GridSpec spec{testing::unit_box(2), 5};
  io::write_grid_field(dir / "one", GridField(spec, FieldRank::kScalar, std::vector<double>(spec.cell_count(), 1.0)));

  const std::vector<std::vector<std::string>> runs{
      {"content", "--region", region, "--gauge", "power:1"},
      {"density", "--measure", mu10, "--gauge", "power:1", "--max-level", "5", "--shifted"},
      {"profile", "--measure", mu10, "--gauge", "power:1", "--max-level", "3", "--budgets", "0.1", "1", "inf"},
      {"frostman", "--region", region, "--gauge", "power:1", "--depth", "6"},
      {"restrict", "--measure", mu10, "--gauge", "power:1", "--c", "0.5", "--level", "5"},
      {"calibrate", "--measure", mu10, "--gauge", "power:1", "--eps", "0.5", "--level", "5"},
      {"hahn", "--measure", mu10, "--gauge", "power:1", "--oracle", "content-cap:1,inf", "--level", "5"},
      {"series", "--measure", mu10, "--gauge", "power:1", "--level", "5", "--step", "2,inf,0.1", "--step",
       "1,0.2,0.001"},
      {"divsolve", "--measure", mu50, "--grid", "6"},
      {"perturb", "--measure", mu50, "--eps", "0.1", "--grid", "6"},
      {"--seed", "3", "charge-test", "--measure", mu10, "--eps", "0.5", "--trials", "200"},
      {"--seed", "3", "charge-test", "--field", (dir / "one.json").string(), "--trials", "200"},
      {"demo", "cantor", "--depth", "3"},
      {"demo", "ualpha", "--alpha", "1.5", "--grid", "8", "--radii", "0.125", "0.0625", "0.03125"},
  };
  std::size_t identical = 0, verified = 0, mutations = 0, caught = 0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    auto args = runs[k];
    const fs::path out = dir / ("run" + std::to_string(k));
    args.insert(args.begin(), {"--out", out.string(), "--csv"});
    const fs::path rp = out / "report.json";
    if (gmtkit(args) != 0) continue;
    const std::string first = cli::read_bytes(rp);
    if (gmtkit(args) != 0) continue;
    const std::string second = cli::read_bytes(rp);
    if (first == second) ++identical;
    if (gmtkit({"verify", rp.string()}) == 0) ++verified;

    const auto fresh = nlohmann::json::parse(first);
    for (std::size_t c = 0; c < fresh["certificates"].size(); ++c) {
      // Plain edit, then an edit that also recomputes the digest.
      auto edited = fresh;
      edited["certificates"][c]["passed"] = !edited["certificates"][c]["passed"].get<bool>();
      write_text(rp, edited.dump(2));
      mutations += 1;
      caught += gmtkit({"verify", rp.string()}) == 2;
      edited["digest"] = cli::report_digest(edited);
      write_text(rp, edited.dump(2));
      mutations += 1;
      caught += gmtkit({"verify", rp.string()}) == 2;
    }
    if (runs[k][0] == "perturb") {
      auto edited = fresh;
      edited["results"]["tail_mass"] = 0.0;
      write_text(rp, edited.dump(2));
      mutations += 1;
      caught += gmtkit({"verify", rp.string()}) == 2;
    }
    write_text(rp, first);
  }
  const bool ok = identical == runs.size() && verified == runs.size() && caught == mutations && mutations > 0;
  return {ok, fmt("%zu pipelines: %zu byte-identical reruns, %zu fresh reports verify 0, %zu/%zu mutated "
                  "certificates rejected with 2",
                  runs.size(), identical, verified, caught, mutations)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"content DP exactness", content_exactness},
      {"Frostman invariants", frostman_invariants},
      {"restriction optimality", restriction_optimality},
      {"Hahn postconditions", hahn_postconditions},
      {"series conservation and certificates", series_conservation},
      {"field identities", field_identities},
      {"L1 perturbation pipeline", perturbation_pipeline},
      {"charge tester", charge_tester},
      {"u_alpha positive-part trend", ualpha_trend},
      {"CLI determinism and verify", cli_determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s AC%zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
