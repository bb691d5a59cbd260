#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <memory>
#include <sstream>

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

namespace gmt::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---- parameters -----------------------------------------------------------

bool has(const RunConfig& c, const char* key) { return c.params.contains(key) && !c.params[key].is_null(); }

const json& param(const RunConfig& c, const char* key) {
  if (!has(c, key)) throw UsageError(std::string("missing parameter '") + key + "' for " + c.subcommand);
  return c.params[key];
}

double num(const RunConfig& c, const char* key) {
  try {
    return to_number(param(c, key));
  } catch (const FormatError&) {
    throw UsageError(std::string("parameter '") + key + "' must be a number");
  }
}

int integer(const RunConfig& c, const char* key) {
  const json& j = param(c, key);
  if (!j.is_number_integer()) throw UsageError(std::string("parameter '") + key + "' must be an integer");
  return j.get<int>();
}

std::string text(const RunConfig& c, const char* key) {
  const json& j = param(c, key);
  if (!j.is_string()) throw UsageError(std::string("parameter '") + key + "' must be a string");
  return j.get<std::string>();
}

bool flag(const RunConfig& c, const char* key) {
  const json& j = param(c, key);
  if (!j.is_boolean()) throw UsageError(std::string("parameter '") + key + "' must be true or false");
  return j.get<bool>();
}

std::vector<double> numbers(const RunConfig& c, const char* key) {
  const json& j = param(c, key);
  if (!j.is_array()) throw UsageError(std::string("parameter '") + key + "' must be a list");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(to_number(v));
  return out;
}

const GaugeFunction& gauge(const RunConfig& c) {
  if (!c.gauge) throw UsageError(c.subcommand + " needs --gauge");
  return *c.gauge;
}

int level(const RunConfig& c) {
  if (c.level < 0 || c.level > kMaxLevel) throw UsageError(c.subcommand + " needs a level in [0, 20]");
  return c.level;
}

// ---- inputs ---------------------------------------------------------------

struct RegionFile {
  Region region;
  RootBox box;
};

class Inputs {
 public:
  Inputs(const RunConfig& c, json& record) : c_(c), record_(record) {}

  [[nodiscard]] bool has(const std::string& role) const { return c_.inputs.contains(role); }

  json load_json(const std::string& role) {
    const std::string bytes = load(role);
    try {
      return json::parse(bytes);
    } catch (const json::parse_error& e) {
      throw FormatError("'" + path(role) + "' is not valid JSON: " + e.what());
    }
  }

  AtomicMeasure measure(const std::string& role = "measure") { return io::measure_from_json(load_json(role)); }
  SignedAtomicMeasure signed_measure(const std::string& role = "measure") {
    return io::any_measure_from_json(load_json(role));
  }

  /// {"dim": N, "box": {...} (default unit box), "cubes": [...]}.
  RegionFile region(const std::string& role, int expected_dim = 0) {
    const json j = load_json(role);
    if (!j.is_object() || !j.contains("cubes")) throw FormatError("region file needs a 'cubes' array");
    RootBox box;
    if (j.contains("box")) {
      box = io::box_from_json(j["box"]);
    } else {
      if (!j.contains("dim") || !j["dim"].is_number_integer()) throw FormatError("region file needs 'dim' or 'box'");
      box = RootBox{j["dim"].get<int>(), {0.0, 0.0, 0.0}, 1.0};
      validate_box(box);
    }
    if (j.contains("dim") && j["dim"] != box.dim) throw FormatError("region dim does not match its box");
    if (expected_dim != 0 && box.dim != expected_dim) throw UsageError("region and input dimensions differ");
    return {io::region_from_json(j["cubes"], box.dim), box};
  }

  GridField field(const std::string& role) {
    const std::filesystem::path header = path(role);
    const json h = load_json(role);
    if (!h.is_object() || !h.contains("data") || !h["data"].is_string()) throw FormatError("grid header needs 'data'");
    const auto data = header.parent_path() / h["data"].get<std::string>();
    record_[role]["data_sha256"] = sha256_hex(read_bytes(data));
    return io::read_grid_field(header);
  }

 private:
  std::string path(const std::string& role) const {
    const auto it = c_.inputs.find(role);
    if (it == c_.inputs.end()) throw UsageError(c_.subcommand + " needs an input '" + role + "'");
    return it->second;
  }

  std::string load(const std::string& role) {
    const std::string p = path(role);
    std::string bytes = read_bytes(p);
    record_[role] = json{{"path", p}, {"sha256", sha256_hex(bytes)}};
    return bytes;
  }

  const RunConfig& c_;
  json& record_;
};

// ---- output helpers -------------------------------------------------------

Certificate cert(std::string name, bool passed, json detail = json::object(), bool required = true) {
  return Certificate{std::move(name), passed, required, std::move(detail)};
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

void add_measure(RunOutput& out, const std::string& name, const AtomicMeasure& mu) {
  out.artifacts.push_back({name, json_text(io::to_json(mu))});
}

void add_field(RunOutput& out, const std::string& stem, const GridField& f) {
  out.artifacts.push_back({stem + ".json", json_text(io::grid_header(f, stem + ".bin"))});
  out.artifacts.push_back({stem + ".bin", io::encode_values(f)});
}

class Csv {
 public:
  explicit Csv(const std::string& header) { s_ << header << '\n'; }
  template <class... T>
  void row(const T&... v) {
    bool first = true;
    ((s_ << (first ? "" : ",") << std::setprecision(17) << v, first = false), ...);
    s_ << '\n';
  }
  [[nodiscard]] std::string str() const { return s_.str(); }

 private:
  std::ostringstream s_;
};

void add_csv(RunOutput& out, const RunConfig& c, const std::string& name, const Csv& csv) {
  if (c.csv) out.artifacts.push_back({name, csv.str()});
}

json weights_json(const std::vector<double>& w) { return json(w); }

double region_price(const Region& r, const RootBox& box, const GaugeFunction& g) {
  ExactSum s;
  for (const auto& q : r.cubes()) s.add(g(cube_radius(box, q.level)));
  return s.value();
}

bool relative_match(double a, double b, double tol) { return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b)); }

json cap_json(const CapCertificate& cc) {
  return json{{"cap", number(cc.cap)},
              {"delta", number(cc.delta)},
              {"levels", json::array({cc.coarsest_level, cc.finest_level})},
              {"worst_ratio", cc.worst_ratio},
              {"worst", io::to_json(cc.worst)},
              {"passed", cc.passed}};
}

// ---- pipelines ------------------------------------------------------------

void run_content(const RunConfig& c, Inputs& in, RunOutput& out) {
  const auto [A, box] = in.region("region");
  const auto& g = gauge(c);
  const double delta = num(c, "delta");
  const int L = c.level >= 0 ? level(c) : A.max_level();
  const auto res = dyadic_content(A, box, g, delta, L);
  const double by_value = dyadic_content_value(A, box, g, delta, L);
  out.results = json{{"value", res.value},
                     {"max_level", L},
                     {"delta", number(delta)},
                     {"cover_size", res.optimal_cover.size()},
                     {"optimal_cover", io::to_json(res.optimal_cover)}};

  bool covers = true;
  for (const auto& q : A.cubes()) covers = covers && res.optimal_cover.covers(q);
  for (const auto& q : res.optimal_cover.cubes()) covers = covers && cube_radius(box, q.level) <= delta;
  out.certificates.push_back(cert("cover-admissible", covers));
  const double price = region_price(res.optimal_cover, box, g);
  out.certificates.push_back(cert("cover-price", price == res.value, {{"price", price}}));
  out.certificates.push_back(
      cert("value-route-agreement", relative_match(by_value, res.value, 1e-12), {{"value_only", by_value}}));
}

void run_density(const RunConfig& c, Inputs& in, RunOutput& out) {
  const auto mu = in.measure();
  const auto rep = density_sup(mu, gauge(c), num(c, "delta"), integer(c, "min_level"), level(c), flag(c, "shifted"));
  json levels = json::array();
  Csv csv("level,radius,max_density");
  for (const auto& l : rep.levels) {
    levels.push_back(json{{"level", l.level},
                          {"radius", l.radius},
                          {"max_ratio", l.max_ratio},
                          {"argmax", io::to_json(l.argmax)},
                          {"shift_mask", l.shift_mask}});
    csv.row(l.level, l.radius, l.max_ratio);
  }
  out.results = json{{"levels", levels}, {"sup", rep.sup}};
  if (has(c, "bound")) {
    const double bound = num(c, "bound");
    out.certificates.push_back(cert("density-bound", rep.sup <= bound, {{"bound", number(bound)}}));
  }
  add_csv(out, c, "density.csv", csv);
}

ProfileMethod profile_method(const std::string& m) {
  if (m == "auto") return ProfileMethod::kAuto;
  if (m == "exact") return ProfileMethod::kExact;
  if (m == "lagrangian") return ProfileMethod::kLagrangian;
  throw UsageError("profile method must be auto, exact or lagrangian");
}

void run_profile(const RunConfig& c, Inputs& in, RunOutput& out) {
  const auto mu = in.measure();
  auto budgets = numbers(c, "budgets");
  std::sort(budgets.begin(), budgets.end());
  const auto p = concentration_profile(mu, gauge(c), num(c, "delta"), level(c), budgets, profile_method(text(c, "method")));
  json points = json::array();
  json frontier = json::array();
  Csv csv("budget,mass");
  bool monotone = true;
  double prev = 0.0;
  for (const auto& q : p.points) {
    points.push_back(json{{"budget", number(q.budget)}, {"mass", q.mass}});
    csv.row(q.budget, q.mass);
    monotone = monotone && q.mass >= prev && q.mass <= mu.total_mass();
    prev = q.mass;
  }
  for (const auto& q : p.frontier) frontier.push_back(json{{"budget", q.budget}, {"mass", q.mass}});
  out.results = json{{"points", points}, {"frontier", frontier}, {"exact", p.exact}, {"max_level", p.max_level}};
  if (has(c, "eps")) out.results["modulus"] = number(profile_modulus(p, num(c, "eps")));
  out.certificates.push_back(cert("profile-monotone", monotone));
  add_csv(out, c, "profile.csv", csv);
}

void frostman_certificates(const FrostmanResult& f, const Region& A, const RootBox& box, const GaugeFunction& g, int L,
                           RunOutput& out) {
  const auto caps = certify_caps(f.measure, g, 1.0, kInf, L);
  out.certificates.push_back(cert("cube-caps", caps.passed, cap_json(caps)));
  const double price = region_price(f.saturated_cover, box, g);
  out.certificates.push_back(cert("mass-equals-saturated-price",
                                  relative_match(price, f.total_mass, kSaturationTolerance),
                                  {{"price", price}, {"exact", price == f.total_mass}}));
  const double content = dyadic_content_value(A, box, g, kInf, L);
  out.certificates.push_back(cert("mass-dominates-content", f.total_mass >= content * (1.0 - kSaturationTolerance),
                                  {{"content", content}}));
}

json frostman_results(const FrostmanResult& f, int L) {
  return json{{"total_mass", f.total_mass},
              {"depth", L},
              {"atoms", f.measure.size()},
              {"saturated_cover_size", f.saturated_cover.size()},
              {"saturated_cover", io::to_json(f.saturated_cover)},
              {"rescaled_cubes", f.rescaled_cubes}};
}

void run_frostman(const RunConfig& c, Inputs& in, RunOutput& out) {
  const auto [A, box] = in.region("region");
  const auto& g = gauge(c);
  const int L = level(c);
  const auto f = frostman_construct(A, box, g, L);
  out.results = frostman_results(f, L);
  out.results["content"] = dyadic_content_value(A, box, g, kInf, L);
  frostman_certificates(f, A, box, g, L, out);
  add_measure(out, text(c, "measure_out"), f.measure);
}

void run_restrict(const RunConfig& c, Inputs& in, RunOutput& out) {
  auto mu = std::make_shared<const AtomicMeasure>(in.measure());
  const auto& g = gauge(c);
  const double cap = num(c, "c");
  const double delta = num(c, "delta");
  const int L = level(c);
  const auto nu = max_restriction(mu, g, cap, delta, L);
  out.results = json{{"total_mass", nu.total_mass()}, {"removed", tv_distance(*mu, nu)}, {"weights", nu.weights()}};
  const auto cc = certify_caps(nu.as_measure(), g, cap, delta, L);
  out.certificates.push_back(cert("cube-caps", cc.passed, cap_json(cc)));
  add_measure(out, "restriction.json", nu.as_measure());
}

void run_calibrate(const RunConfig& c, Inputs& in, RunOutput& out) {
  auto mu = std::make_shared<const AtomicMeasure>(in.measure());
  const auto& g = gauge(c);
  const double eps = num(c, "eps");
  const double delta = num(c, "delta");
  const int L = level(c);
  const auto cal = calibrate_restriction(mu, g, eps, delta, L);
  json trail = json::array();
  for (const auto& [cc, removed] : cal.trail) trail.push_back(json::array({cc, removed}));
  out.results = json{{"c", cal.c}, {"removed", cal.removed}, {"weights", cal.restriction.weights()}, {"trail", trail}};
  out.certificates.push_back(cert("removed-within-eps", cal.removed <= eps, {{"eps", eps}}));
  const auto cc = certify_caps(cal.restriction.as_measure(), g, cal.c, delta, L);
  out.certificates.push_back(cert("cube-caps", cc.passed, cap_json(cc)));
}

void run_hahn(const RunConfig& c, Inputs& in, RunOutput& out) {
  auto mu = std::make_shared<const AtomicMeasure>(in.measure());
  const auto& g = c.gauge ? *c.gauge : GaugeFunction::power(static_cast<double>(mu->dim()));
  const int L = level(c);
  const std::string search_name = text(c, "search");
  HahnSearch search;
  if (search_name == "exhaustive") {
    search = HahnSearch::kExhaustive;
  } else if (search_name == "cube") {
    search = HahnSearch::kCubeGenerated;
  } else {
    throw UsageError("hahn search must be exhaustive or cube");
  }
  const auto T = OuterMeasureOracle::parse(text(c, "oracle"), mu, g, L);
  const auto h = greedy_hahn(*mu, T, num(c, "theta"), search, L);
  json pieces = json::array();
  bool pieces_ok = true;
  for (const auto& p : h.pieces) {
    pieces.push_back(json{{"atoms", p.atoms}, {"outer", p.outer}, {"mass", p.mass}, {"sup_violation", p.sup_violation}});
    ExactSum m;
    for (auto a : p.atoms) m.add(mu->atoms()[a].mass);
    pieces_ok = pieces_ok && T(p.atoms) <= m.value();
  }
  out.results = json{{"kept", h.kept},
                     {"pieces", pieces},
                     {"theta", h.theta},
                     {"oracle", T.name()},
                     {"removed_outer", h.removed_outer},
                     {"removed_mass", h.removed_mass}};
  out.certificates.push_back(cert("kept-set-dominated", h.certified, {{"search", search_name}}));
  out.certificates.push_back(cert("removed-pieces-violate", pieces_ok));
}

json series_json(const SeriesDecomposition& s, const AtomicMeasure& mu, RunOutput& out, const std::string& prefix) {
  json pieces = json::array();
  bool caps_ok = true;
  for (const auto& p : s.pieces) {
    pieces.push_back(json{{"c", number(p.step.c)},
                          {"delta", number(p.step.delta)},
                          {"eps", number(p.step.eps)},
                          {"mass", p.restriction.total_mass()},
                          {"remainder", p.remainder},
                          {"certificate", cap_json(p.certificate)},
                          {"weights", weights_json(p.restriction.weights())}});
    caps_ok = caps_ok && p.certificate.passed;
  }
  bool conserved = true;
  for (std::size_t a = 0; a < mu.size(); ++a) {
    ExactSum w;
    for (const auto& p : s.pieces) w.add(p.restriction.weights()[a]);
    conserved = conserved && w.value() == 1.0;
  }
  out.certificates.push_back(cert(prefix + "piece-caps", caps_ok));
  out.certificates.push_back(cert(prefix + "conservation", conserved || mu.empty()));
  return json{{"pieces", pieces}, {"residual_mass", s.residual_mass}, {"max_level", s.max_level}};
}

void run_series(const RunConfig& c, Inputs& in, RunOutput& out) {
  auto mu = std::make_shared<const AtomicMeasure>(in.measure());
  const auto& g = gauge(c);
  const int L = level(c);
  if (c.schedule.empty()) throw UsageError("series needs a schedule (--step or --schedule-file)");
  const auto s = series_decomposition(mu, g, c.schedule, L);
  out.results = series_json(s, *mu, out, "");
  double min_eps = kInf;
  for (const auto& st : c.schedule) min_eps = std::min(min_eps, st.eps);
  out.certificates.push_back(cert("schedule-sufficient", s.residual_mass <= min_eps, {{"min_eps", number(min_eps)}}));
  Csv csv("k,c,delta,eps,mass");
  for (std::size_t k = 0; k < s.pieces.size(); ++k)
    csv.row(k, s.pieces[k].step.c, s.pieces[k].step.delta, s.pieces[k].step.eps, s.pieces[k].restriction.total_mass());
  add_csv(out, c, "series.csv", csv);

  bool decreasing = true;
  for (std::size_t k = 1; k < c.schedule.size(); ++k) decreasing = decreasing && c.schedule[k].c < c.schedule[k - 1].c;
  if (!decreasing) return;
  const auto seq = approx_sequence(mu, g, c.schedule, L);
  json tv = json::array();
  bool tv_ok = true;
  bool nondecreasing = true;
  for (std::size_t n = 0; n < seq.size(); ++n) {
    tv.push_back(tv_distance(*mu, seq[n]));
    if (n == 0) continue;
    tv_ok = tv_ok && tv_distance(*mu, seq[n]) <= tv_distance(*mu, seq[n - 1]);
    for (std::size_t a = 0; a < mu->size(); ++a)
      nondecreasing = nondecreasing && seq[n].weights()[a] >= seq[n - 1].weights()[a];
  }
  out.results["approx_tv"] = tv;
  out.certificates.push_back(cert("approx-nondecreasing", nondecreasing));
  out.certificates.push_back(cert("approx-tv-nonincreasing", tv_ok));
}

GridSpec measure_grid(const SignedAtomicMeasure& mu, int L) {
  GridSpec spec{mu.box(), L};
  validate_grid(spec);
  return spec;
}

void run_divsolve(const RunConfig& c, Inputs& in, RunOutput& out) {
  const auto mu = in.signed_measure();
  const GridSpec spec = measure_grid(mu, level(c));
  const auto nf = newtonian_field(mu, spec);
  json nudged = json::array();
  for (const auto& p : nf.nudged_atoms) nudged.push_back(std::vector<double>(p.begin(), p.begin() + mu.dim()));
  const int n = mu.dim();
  Point center{};
  for (int i = 0; i < n; ++i) center[i] = mu.box().origin[i] + 0.5 * mu.box().side;
  const int points = integer(c, "flux_points");
  json flux = json::array();
  const auto radii = numbers(c, "flux_radii");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double frac = radii[k];
    const double r = frac * mu.box().side;
    ExactSum enclosed;
    for (const auto* part : {&mu.positive(), &mu.negative()})
      for (const auto& a : part->atoms()) {
        double d2 = 0.0;
        for (int i = 0; i < n; ++i) d2 += (a.x[i] - center[i]) * (a.x[i] - center[i]);
        if (d2 < r * r) enclosed.add(part == &mu.positive() ? a.mass : -a.mass);
      }
    const double F = sphere_flux([&](const Point& x) { return interpolate_vector(nf.V, x); }, n, center, r, points);
    const double scale = std::max(std::fabs(enclosed.value()), 1e-3 * mu.total_variation());
    const double err = std::fabs(F - enclosed.value()) / scale;
    flux.push_back(json{{"radius", r}, {"flux", F}, {"enclosed", enclosed.value()}, {"relative_error", err}});
    out.certificates.push_back(cert("gauss-flux-" + std::to_string(k), err <= 0.005, {{"tolerance", 0.005}}));
  }
  out.results = json{{"grid_level", spec.level}, {"nudged_atoms", nudged}, {"sup_norm", nf.V.sup_norm()}, {"flux", flux}};
  add_field(out, "V", nf.V);
}

void run_perturb(const RunConfig& c, Inputs& in, RunOutput& out) {
  const auto mu = in.signed_measure();
  const double eps = num(c, "eps");
  PerturbationOptions opt;
  opt.grid = measure_grid(mu, level(c));
  opt.schedule = c.schedule;
  opt.alpha_budget = has(c, "alpha_budget") ? num(c, "alpha_budget") : 0.0;
  const auto r = l1_perturbation(mu, eps, opt);

  json pieces = json::array();
  for (const auto& p : r.pieces)
    pieces.push_back(json{{"k", p.k},
                          {"mass", p.mass},
                          {"tail", p.tail},
                          {"delta", p.delta},
                          {"alpha", p.alpha},
                          {"sup_error", p.sup_error},
                          {"alpha_met", p.alpha_met}});
  json modulus = json::array();
  Csv csv("distance,oscillation");
  bool monotone = true;
  for (std::size_t k = 0; k < r.modulus.size(); ++k) {
    modulus.push_back(json::array({r.modulus[k].distance, r.modulus[k].oscillation}));
    csv.row(r.modulus[k].distance, r.modulus[k].oscillation);
    if (k > 0) monotone = monotone && r.modulus[k].oscillation >= r.modulus[k - 1].oscillation;
  }
  out.results = json{{"eps", eps},
                     {"j", r.j},
                     {"tail_mass", r.tail_mass},
                     {"f_l1", r.f_l1},
                     {"alpha_budget", r.alpha_budget},
                     {"alpha_sum", r.alpha_sum},
                     {"alpha_certified", r.alpha_certified},
                     {"pieces", pieces},
                     {"modulus", modulus},
                     {"schedule", to_json(r.positive.schedule)},
                     {"positive", series_json(r.positive, mu.positive(), out, "positive-")},
                     {"negative", series_json(r.negative, mu.negative(), out, "negative-")}};
  out.certificates.push_back(cert("tail-within-eps", r.tail_mass <= eps));
  const bool l1_ok = r.tail_mass == 0.0 ? r.f_l1 == 0.0 : std::fabs(r.f_l1 - r.tail_mass) <= 0.01 * r.tail_mass;
  out.certificates.push_back(cert("f-l1-matches-tail", l1_ok, {{"tolerance", 0.01}}));
  out.certificates.push_back(cert("alpha-budget", r.alpha_sum <= r.alpha_budget));
  out.certificates.push_back(cert("modulus-monotone", monotone));
  // Atomic data keeps W_k singular at grid scale, so this one is informational.
  out.certificates.push_back(cert("alpha-per-piece", r.alpha_certified, json::object(), false));
  add_field(out, "V", r.V);
  add_field(out, "f", r.f);
  add_csv(out, c, "modulus.csv", csv);
}

json record_json(const TestFunctionRecord& r, int dim) {
  return json{{"center", std::vector<double>(r.phi.center.begin(), r.phi.center.begin() + dim)},
              {"width", r.phi.width},
              {"sign", r.phi.sign},
              {"integral", r.integral},
              {"l1", r.l1},
              {"grad_l1", r.grad_l1},
              {"sup", r.sup},
              {"excess", r.excess},
              {"ratio", r.ratio}};
}

template <class Input>
void charge_common(const RunConfig& c, const Input& input, const Region& K, int dim, RunOutput& out) {
  ChargeOptions o;
  o.eps = num(c, "eps");
  o.trials = static_cast<std::size_t>(integer(c, "trials"));
  o.seed = c.seed;
  o.ladder_steps = integer(c, "ladder_steps");
  o.strong = flag(c, "strong");
  const auto rep = charge_test(input, K, o);
  out.results = json{{"C", rep.C},
                     {"verdict", rep.verdict == ChargeVerdict::kViolated ? "violated" : "satisfied-on-family"},
                     {"family", rep.family},
                     {"evaluated", rep.evaluated},
                     {"worst", record_json(rep.worst, dim)},
                     {"refutation_step", rep.refutation_step},
                     {"certificate", rep.certificate ? record_json(*rep.certificate, dim) : json(nullptr)}};
  const auto replay = evaluate_test_function(input, rep.worst.phi, o.eps, o.strong);
  out.certificates.push_back(cert("worst-replay", replay.ratio == rep.worst.ratio && replay.excess == rep.worst.excess));
  if (rep.certificate) {
    const auto again = evaluate_test_function(input, rep.certificate->phi, o.eps, o.strong);
    out.certificates.push_back(
        cert("refutation-replay", again.excess == rep.certificate->excess && again.excess > 0.0));
  }
  if (has(c, "bound")) {
    const double bound = num(c, "bound");
    out.certificates.push_back(cert("charge-bound", satisfied_at(rep, bound), {{"bound", number(bound)}}));
  }
}

Region whole_box(int dim) { return Region(dim, {DyadicCube{dim, 0, {}}}); }

void run_charge(const RunConfig& c, Inputs& in, RunOutput& out) {
  const bool atomic = in.has("measure");
  if (atomic == in.has("field")) throw UsageError("charge-test needs exactly one of --measure and --field");
  if (atomic) {
    const auto mu = in.signed_measure();
    const Region K = in.has("K") ? in.region("K", mu.dim()).region : whole_box(mu.dim());
    charge_common(c, mu, K, mu.dim(), out);
  } else {
    const auto f = in.field("field");
    const Region K = in.has("K") ? in.region("K", f.spec().dim()).region : whole_box(f.spec().dim());
    charge_common(c, f, K, f.spec().dim(), out);
  }
}

void run_demo_cantor(const RunConfig& c, Inputs&, RunOutput& out) {
  const int generations = integer(c, "depth");
  if (generations < 0 || 2 * generations > kMaxLevel) throw UsageError("Cantor depth must be in [0, 10]");
  const RootBox box{2, {0.0, 0.0, 0.0}, 1.0};
  const GaugeFunction g = c.gauge ? *c.gauge : GaugeFunction::power(1.0);
  const Region A = corner_cantor_region(2, generations);
  const int L = 2 * generations;
  const auto f = frostman_construct(A, box, g, L);
  out.results = frostman_results(f, L);
  out.results["generations"] = generations;
  out.results["content"] = dyadic_content_value(A, box, g, kInf, L);
  frostman_certificates(f, A, box, g, L, out);
  const auto trend = density_sup(f.measure, g, kInf, 0, L);
  json levels = json::array();
  Csv csv("level,radius,max_density");
  for (const auto& l : trend.levels) {
    levels.push_back(json::array({l.level, l.radius, l.max_ratio}));
    csv.row(l.level, l.radius, l.max_ratio);
  }
  out.results["density_trend"] = levels;
  add_measure(out, "mu.json", f.measure);
  add_csv(out, c, "density.csv", csv);
}

void run_demo_ualpha(const RunConfig& c, Inputs&, RunOutput& out) {
  const double alpha = num(c, "alpha");
  const double R = num(c, "bump_radius");
  const double side = num(c, "box_side");
  const GridSpec spec{RootBox{2, {-side / 2, -side / 2, 0.0}, side}, level(c)};
  validate_grid(spec);
  const auto fields = u_alpha_field(alpha, R, spec);
  const auto profile = density_profile_plus(fields.f_plus_average, numbers(c, "radii"), 1.0);
  json D = json::array();
  Csv csv("r,D");
  for (const auto& s : profile) {
    D.push_back(json::array({s.radius, s.value}));
    csv.row(s.radius, s.value);
  }
  out.results = json{{"alpha", alpha},
                     {"bump_radius", R},
                     {"grid_level", spec.level},
                     {"grad_u_l1", fields.grad_u_l1},
                     {"f_l1", fields.f_average.l1_norm()},
                     {"f_plus_l1", fields.f_plus_average.l1_norm()},
                     {"profile", D}};
  const int trials = integer(c, "charge_trials");
  if (trials > 0) {
    ChargeOptions o;
    o.eps = num(c, "charge_eps");
    o.trials = static_cast<std::size_t>(trials);
    o.seed = c.seed;
    o.strong = true;
    const Region K = whole_box(2);
    json charge = json::object();
    for (const auto& [name, f] : {std::pair<const char*, const GridField*>{"f", &fields.f_average},
                                  std::pair<const char*, const GridField*>{"f_plus", &fields.f_plus_average}}) {
      const auto rep = charge_test(*f, K, o);
      charge[name] = json{{"C", rep.C},
                          {"verdict", rep.verdict == ChargeVerdict::kViolated ? "violated" : "satisfied-on-family"},
                          {"refutation_step", rep.refutation_step}};
    }
    out.results["strong_charge"] = charge;
  }
  if (flag(c, "write_fields")) {
    add_field(out, "f", fields.f_average);
    add_field(out, "f_plus", fields.f_plus_average);
  }
  add_csv(out, c, "profile.csv", csv);
}

}  // namespace

RunOutput run_pipeline(const RunConfig& config) {
  RunOutput out;
  Inputs in(config, out.inputs);
  const std::string& s = config.subcommand;
  if (s == "content") {
    run_content(config, in, out);
  } else if (s == "density") {
    run_density(config, in, out);
  } else if (s == "profile") {
    run_profile(config, in, out);
  } else if (s == "frostman") {
    run_frostman(config, in, out);
  } else if (s == "restrict") {
    run_restrict(config, in, out);
  } else if (s == "calibrate") {
    run_calibrate(config, in, out);
  } else if (s == "hahn") {
    run_hahn(config, in, out);
  } else if (s == "series") {
    run_series(config, in, out);
  } else if (s == "divsolve") {
    run_divsolve(config, in, out);
  } else if (s == "perturb") {
    run_perturb(config, in, out);
  } else if (s == "charge-test") {
    run_charge(config, in, out);
  } else if (s == "demo-cantor") {
    run_demo_cantor(config, in, out);
  } else if (s == "demo-ualpha") {
    run_demo_ualpha(config, in, out);
  } else {
    throw UsageError("unknown subcommand '" + s + "'");
  }
  return out;
}

}  // namespace gmt::cli
