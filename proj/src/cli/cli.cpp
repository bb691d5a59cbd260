#include <CLI11.hpp>
#include <cmath>
#include <functional>
#include <ostream>

#include "gmt/cli/pipeline.hpp"
#include "gmt/core/io.hpp"

namespace gmt::cli {

namespace {

// Raw option values; turned into a RunConfig after parsing.
struct Options {
  std::string out = ".";
  std::uint64_t seed = 0;
  bool strict = false;
  bool csv = false;

  std::string region, measure, field, K, gauge, report;
  std::string delta = "inf";
  std::string eps, c, bound, alpha_budget;
  int level = -1;
  int min_level = 0;
  bool shifted = false;
  std::vector<std::string> budgets;
  std::string method = "auto";
  std::string measure_out = "mu.json";
  std::string oracle;
  double theta = 0.5;
  std::string search = "exhaustive";
  std::vector<std::string> steps;
  std::string schedule_file;
  std::vector<double> flux_radii{0.3, 0.35, 0.4};
  int flux_points = 10000;
  int trials = 1000;
  int ladder_steps = 20;
  bool strong = false;
  int generations = 3;
  double alpha = 0.0;
  double bump_radius = 0.25;
  double box_side = 0.25;
  std::vector<double> radii;
  int charge_trials = 0;
  double charge_eps = 0.05;
  bool write_fields = false;
};

json optional_number(const std::string& s) { return s.empty() ? json(nullptr) : number(parse_number(s)); }

std::vector<ScheduleStep> schedule_of(const Options& o) {
  std::vector<ScheduleStep> out;
  if (!o.schedule_file.empty()) out = schedule_from_json(io::read_json_file(o.schedule_file));
  for (const auto& s : o.steps) out.push_back(parse_step(s));
  return out;
}

RunConfig base_config(const Options& o, const std::string& name) {
  RunConfig c;
  c.subcommand = name;
  c.out_dir = o.out;
  c.seed = o.seed;
  c.strict = o.strict;
  c.csv = o.csv;
  c.level = o.level;
  if (!o.gauge.empty()) c.gauge = parse_gauge(o.gauge);
  for (const auto& [role, path] : {std::pair{"region", &o.region}, std::pair{"measure", &o.measure},
                                   std::pair{"field", &o.field}, std::pair{"K", &o.K}})
    if (!path->empty()) c.inputs[role] = *path;
  return c;
}

RunConfig build(const Options& o, const std::string& name) {
  RunConfig c = base_config(o, name);
  json& p = c.params;
  if (name == "content") {
    p = {{"delta", number(parse_number(o.delta))}};
  } else if (name == "density") {
    p = {{"delta", number(parse_number(o.delta))},
         {"min_level", o.min_level},
         {"shifted", o.shifted},
         {"bound", optional_number(o.bound)}};
  } else if (name == "profile") {
    json budgets = json::array();
    for (const auto& b : o.budgets) budgets.push_back(number(parse_number(b)));
    p = {{"delta", number(parse_number(o.delta))},
         {"budgets", budgets},
         {"method", o.method},
         {"eps", optional_number(o.eps)}};
  } else if (name == "frostman") {
    if (o.measure_out.find('/') != std::string::npos) throw UsageError("--measure-out is a file name inside --out");
    p = {{"measure_out", o.measure_out}};
  } else if (name == "restrict") {
    p = {{"c", number(parse_number(o.c))}, {"delta", number(parse_number(o.delta))}};
  } else if (name == "calibrate") {
    p = {{"eps", number(parse_number(o.eps))}, {"delta", number(parse_number(o.delta))}};
  } else if (name == "hahn") {
    if (c.level < 0) c.level = 10;
    p = {{"oracle", o.oracle}, {"theta", o.theta}, {"search", o.search}};
  } else if (name == "series") {
    c.schedule = schedule_of(o);
  } else if (name == "divsolve") {
    p = {{"flux_radii", o.flux_radii}, {"flux_points", o.flux_points}};
  } else if (name == "perturb") {
    c.schedule = schedule_of(o);
    if (c.level < 0) c.level = 7;
    p = {{"eps", number(parse_number(o.eps))}, {"alpha_budget", optional_number(o.alpha_budget)}};
  } else if (name == "charge-test") {
    p = {{"eps", number(parse_number(o.eps.empty() ? "0" : o.eps))},
         {"trials", o.trials},
         {"ladder_steps", o.ladder_steps},
         {"strong", o.strong},
         {"bound", optional_number(o.bound)}};
  } else if (name == "demo-cantor") {
    p = {{"depth", o.generations}};
  } else if (name == "demo-ualpha") {
    if (c.level < 0) c.level = 10;
    std::vector<double> radii = o.radii;
    if (radii.empty())
      for (int k = 3; k <= 9; ++k) radii.push_back(std::ldexp(1.0, -k));
    p = {{"alpha", o.alpha},
         {"bump_radius", o.bump_radius},
         {"box_side", o.box_side},
         {"radii", radii},
         {"charge_trials", o.charge_trials},
         {"charge_eps", o.charge_eps},
         {"write_fields", o.write_fields}};
  }
  return c;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Dyadic geometric measure theory toolkit: contents, Frostman measures, "
               "decompositions and divergence fields with auditable reports.",
               "gmtkit"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--out", o.out, "Output directory")->capture_default_str();
  app.add_option("--seed", o.seed, "Seed of every random choice")->capture_default_str();
  app.add_flag("--strict", o.strict, "Exit 2 when a required certificate fails");
  app.add_flag("--csv", o.csv, "Also write CSV tables");

  auto gauge_opt = [&](CLI::App* s, bool required) {
    auto* opt = s->add_option("--gauge", o.gauge,
                              "Gauge: file.json, power:s, power-normalized:s, power-log:s,beta or table:t:h,...");
    if (required) opt->required();
  };
  auto measure_opt = [&](CLI::App* s) { s->add_option("--measure", o.measure, "Measure JSON")->required(); };
  auto schedule_opts = [&](CLI::App* s) {
    s->add_option("--step", o.steps, "Schedule step c,delta,eps (repeatable)");
    s->add_option("--schedule-file", o.schedule_file, "Schedule JSON [{c, delta, eps}, ...]");
  };

  std::string chosen;
  auto sub = [&](const std::string& name, const std::string& help) {
    auto* s = app.add_subcommand(name, help);
    s->callback([&chosen, name] { chosen = name; });
    return s;
  };

  auto* content = sub("content", "Dyadic Hausdorff content of a region");
  content->add_option("--region", o.region, "Region JSON")->required();
  gauge_opt(content, true);
  content->add_option("--delta", o.delta, "Radius cap or inf")->capture_default_str();
  content->add_option("--max-level", o.level, "Finest cover level (default: finest region level)");

  auto* density = sub("density", "Per-level maxima of mu(Q)/h(r_Q)");
  measure_opt(density);
  gauge_opt(density, true);
  density->add_option("--delta", o.delta, "Radius cap or inf")->capture_default_str();
  density->add_option("--min-level", o.min_level)->capture_default_str();
  density->add_option("--max-level", o.level)->required();
  density->add_flag("--shifted", o.shifted, "Scan the half-shifted grids too");
  density->add_option("--bound", o.bound, "Certify sup <= bound");

  auto* profile = sub("profile", "Concentration profile over price budgets");
  measure_opt(profile);
  gauge_opt(profile, true);
  profile->add_option("--delta", o.delta, "Radius cap or inf")->capture_default_str();
  profile->add_option("--max-level", o.level)->required();
  profile->add_option("--budgets", o.budgets, "Price budgets")->required();
  profile->add_option("--method", o.method)->check(CLI::IsMember({"auto", "exact", "lagrangian"}))->capture_default_str();
  profile->add_option("--eps", o.eps, "Also report the budget modulus at eps");

  auto* frostman = sub("frostman", "Dyadic Frostman measure on a region");
  frostman->add_option("--region", o.region, "Region JSON")->required();
  gauge_opt(frostman, true);
  frostman->add_option("--depth", o.level, "Leaf level L")->required();
  frostman->add_option("--measure-out", o.measure_out, "Measure file name inside --out")->capture_default_str();

  auto* restrict_cmd = sub("restrict", "Largest restriction under cube caps c*h(r_Q)");
  measure_opt(restrict_cmd);
  gauge_opt(restrict_cmd, true);
  restrict_cmd->add_option("--c", o.c, "Cap multiplier")->required();
  restrict_cmd->add_option("--delta", o.delta, "Radius cap or inf")->capture_default_str();
  restrict_cmd->add_option("--level", o.level)->required();

  auto* calibrate = sub("calibrate", "Smallest cap removing at most eps mass");
  measure_opt(calibrate);
  gauge_opt(calibrate, true);
  calibrate->add_option("--eps", o.eps)->required();
  calibrate->add_option("--delta", o.delta, "Radius cap or inf")->capture_default_str();
  calibrate->add_option("--level", o.level)->required();

  auto* hahn = sub("hahn", "Greedy Hahn-type splitting against an outer measure");
  measure_opt(hahn);
  gauge_opt(hahn, false);
  hahn->add_option("--oracle", o.oracle, "content-cap:c,delta | counting:k | zero")->required();
  hahn->add_option("--theta", o.theta)->capture_default_str();
  hahn->add_option("--search", o.search)->check(CLI::IsMember({"exhaustive", "cube"}))->capture_default_str();
  hahn->add_option("--level", o.level, "Cube depth (default 10)");

  auto* series = sub("series", "Series decomposition along a (c, delta, eps) schedule");
  measure_opt(series);
  gauge_opt(series, true);
  series->add_option("--level", o.level)->required();
  schedule_opts(series);

  auto* divsolve = sub("divsolve", "Newtonian field with div V = mu on a grid");
  measure_opt(divsolve);
  divsolve->add_option("--grid", o.level, "Grid level")->required();
  divsolve->add_option("--flux-radii", o.flux_radii, "Flux sphere radii as fractions of the box side")
      ->capture_default_str();
  divsolve->add_option("--flux-points", o.flux_points)->capture_default_str();

  auto* perturb = sub("perturb", "V and f with div V = mu - f and ||f||_1 <= eps");
  measure_opt(perturb);
  perturb->add_option("--eps", o.eps)->required();
  perturb->add_option("--grid", o.level, "Grid level (default 7)");
  perturb->add_option("--alpha-budget", o.alpha_budget, "Sum of the alpha_k (default eps)");
  schedule_opts(perturb);

  auto* charge = sub("charge-test", "Randomized charge test over spline bumps");
  auto* cm = charge->add_option("--measure", o.measure, "Measure JSON");
  auto* cf = charge->add_option("--field", o.field, "Scalar grid header JSON");
  cm->excludes(cf);
  charge->add_option("--region", o.K, "Region K (default: the root cube)");
  charge->add_option("--eps", o.eps)->default_str("0");
  charge->add_option("--trials", o.trials)->capture_default_str();
  charge->add_option("--ladder-steps", o.ladder_steps)->capture_default_str();
  charge->add_flag("--strong", o.strong, "Drop the eps*sup term");
  charge->add_option("--bound", o.bound, "Certify C <= bound");

  auto* demo = app.add_subcommand("demo", "Worked pipelines");
  demo->require_subcommand(1);
  auto* cantor = demo->add_subcommand("cantor", "Frostman measure and density trend on the corner Cantor set");
  cantor->callback([&chosen] { chosen = "demo-cantor"; });
  cantor->add_option("--depth", o.generations, "Cantor generations")->capture_default_str();
  gauge_opt(cantor, false);
  auto* ualpha = demo->add_subcommand("ualpha", "Positive-part density profile of div(u_alpha W)");
  ualpha->callback([&chosen] { chosen = "demo-ualpha"; });
  ualpha->add_option("--alpha", o.alpha)->required();
  ualpha->add_option("--bump-radius", o.bump_radius)->capture_default_str();
  ualpha->add_option("--box-side", o.box_side)->capture_default_str();
  ualpha->add_option("--grid", o.level, "Grid level (default 10)");
  ualpha->add_option("--radii", o.radii, "Decreasing radii (default 2^-3 ... 2^-9)");
  ualpha->add_option("--charge-trials", o.charge_trials, "Strong charge test of f and f+ (0: skip)")
      ->capture_default_str();
  ualpha->add_option("--charge-eps", o.charge_eps)->capture_default_str();
  ualpha->add_flag("--write-fields", o.write_fields);

  auto* verify_cmd = sub("verify", "Replay a report and compare");
  verify_cmd->add_option("report", o.report, "report.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (chosen == "verify") return verify(o.report, o.strict, out);
    return dispatch(build(o, chosen), out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
  } catch (const FormatError& e) {
    err << "input error: " << e.what() << '\n';
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitUsage;
}

}  // namespace gmt::cli
