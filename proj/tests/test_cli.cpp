#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "gmt/cli/config.hpp"
#include "gmt/cli/digest.hpp"
#include "gmt/cli/pipeline.hpp"
#include "gmt/core/io.hpp"
#include "test_support.hpp"

using namespace gmt;
using namespace gmt::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run gmtkit(std::vector<std::string> args) {
  args.insert(args.begin(), "gmtkit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

// Fixture files shared by the cases: a 50-atom measure, a 10-atom dyadic-mass
// measure and a small planar region.
struct Fixture {
  fs::path dir;
  fs::path mu50, mu10, region;

  explicit Fixture(const std::string& name) : dir(testing::scratch_dir(name)) {
    std::mt19937_64 rng(7);
    std::vector<Atom> atoms;
    for (int i = 0; i < 50; ++i)
      atoms.push_back({{0.25 + 0.5 * testing::uniform01(rng), 0.25 + 0.5 * testing::uniform01(rng), 0.0},
                       0.02 * (0.5 + testing::uniform01(rng))});
    mu50 = dir / "mu50.json";
    io::write_json_file(mu50, io::to_json(AtomicMeasure(testing::unit_box(2), atoms)));
    mu10 = dir / "mu10.json";
    io::write_json_file(mu10, io::to_json(testing::random_measure(rng, 2, 10, testing::MassLattice::kDyadic)));
    region = dir / "region.json";
    write_text(region, R"({"dim":2,"cubes":[{"level":2,"index":[0,0]},{"level":3,"index":[5,6]},{"level":1,"index":[1,1]}]})");
  }

  [[nodiscard]] std::string out(const std::string& name) const { return (dir / name).string(); }
};

json load(const fs::path& p) { return io::read_json_file(p); }

void save_redigested(const fs::path& p, json report) {
  report["digest"] = report_digest(report);
  write_text(p, report.dump(2) + "\n");
}

}  // namespace

TEST_CASE("SHA-256 test vectors") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("config parsing") {
  CHECK(parse_gauge("power:1.5") == GaugeFunction::power(1.5));
  CHECK(parse_gauge("power-normalized:2") == GaugeFunction::power(2.0, true));
  CHECK(parse_gauge("power-log:1,2") == GaugeFunction::power_log(1.0, 2.0));
  CHECK(parse_gauge("table:0.5:0.25,1:1") == GaugeFunction::table({{0.5, 0.25}, {1.0, 1.0}}));
  CHECK_THROWS_AS((void)parse_gauge("cubic:3"), UsageError);
  CHECK_THROWS_AS((void)parse_gauge("power:x"), UsageError);
  const auto s = parse_step("2,inf,0.1");
  CHECK(s.c == 2.0);
  CHECK(std::isinf(s.delta));
  CHECK_THROWS_AS((void)parse_step("1,2"), UsageError);

  RunConfig c;
  c.subcommand = "series";
  c.inputs["measure"] = "m.json";
  c.gauge = GaugeFunction::power_log(1.0, 1.0);
  c.schedule = {{2.0, std::numeric_limits<double>::infinity(), 0.1}, {0.5, 0.125, 0.01}};
  c.level = 6;
  c.seed = 0xFFFFFFFFFFFFFFFFULL;
  c.strict = true;
  c.params = {{"eps", number(0.25)}};
  const json j = to_json(c);
  const RunConfig back = config_from_json(json::parse(j.dump()));
  CHECK(to_json(back).dump() == j.dump());
  CHECK(back.seed == c.seed);
  CHECK(std::isinf(back.schedule[0].delta));
  CHECK_THROWS_AS((void)config_from_json(json{{"subcommand", "x"}}), FormatError);
}

TEST_CASE("every pipeline runs and verifies") {
  const Fixture fx("cli_all");
  const std::string mu10 = fx.mu10.string(), mu50 = fx.mu50.string(), region = fx.region.string();
  const std::vector<std::vector<std::string>> runs{
      {"content", "--region", region, "--gauge", "power:1"},
      {"--csv", "density", "--measure", mu10, "--gauge", "power:1", "--max-level", "5", "--shifted"},
      {"profile", "--measure", mu10, "--gauge", "power:1", "--max-level", "3", "--budgets", "0.1", "1", "inf"},
      {"frostman", "--region", region, "--gauge", "power:1", "--depth", "6"},
      {"restrict", "--measure", mu10, "--gauge", "power:1", "--c", "0.5", "--level", "5"},
      {"calibrate", "--measure", mu10, "--gauge", "power:1", "--eps", "0.5", "--level", "5"},
      {"hahn", "--measure", mu10, "--gauge", "power:1", "--oracle", "content-cap:1,inf", "--level", "5"},
      {"--csv", "series", "--measure", mu10, "--gauge", "power:1", "--level", "5", "--step", "2,inf,0.1", "--step",
       "1,0.2,0.001"},
      {"divsolve", "--measure", mu50, "--grid", "6"},
      {"--csv", "perturb", "--measure", mu50, "--eps", "0.1", "--grid", "6"},
      {"--seed", "42", "charge-test", "--measure", mu10, "--eps", "0.5", "--trials", "100"},
      {"--csv", "demo", "cantor", "--depth", "3"},
      {"--csv", "demo", "ualpha", "--alpha", "1.5", "--grid", "8", "--radii", "0.125", "0.0625", "0.03125"},
  };
  for (std::size_t k = 0; k < runs.size(); ++k) {
    auto args = runs[k];
    const std::string dir = fx.out("run" + std::to_string(k));
    args.insert(args.begin(), {"--out", dir});
    CAPTURE(args[2]);
    const auto r = gmtkit(args);
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const json report = load(fs::path(dir) / "report.json");
    CHECK(report["digest"] == report_digest(report));
    CHECK(fs::exists(fs::path(dir) / "timings.json"));
    for (const auto& [name, digest] : report["artifacts"].items())
      CHECK(sha256_hex(read_bytes(fs::path(dir) / name)) == digest.get<std::string>());
    const auto v = gmtkit({"verify", dir + "/report.json"});
    CHECK_MESSAGE(v.code == 0, v.out);
  }
}

TEST_CASE("reports are byte-identical across reruns and thread counts") {
  const Fixture fx("cli_determinism");
  const std::string dir = fx.out("perturb");
  const std::vector<std::string> args{"--out", dir, "--csv", "perturb", "--measure", fx.mu50.string(), "--eps", "0.1",
                                      "--grid", "7"};
  REQUIRE(gmtkit(args).code == 0);
  const std::string first = read_bytes(fs::path(dir) / "report.json");
  const std::string field = read_bytes(fs::path(dir) / "V.bin");
  ::setenv("GMTKIT_THREADS", "1", 1);
  REQUIRE(gmtkit(args).code == 0);
  ::unsetenv("GMTKIT_THREADS");
  CHECK(read_bytes(fs::path(dir) / "report.json") == first);
  CHECK(read_bytes(fs::path(dir) / "V.bin") == field);

  const std::string cdir = fx.out("charge");
  const std::vector<std::string> cargs{"--out", cdir, "--seed", "9", "charge-test", "--measure", fx.mu10.string(),
                                       "--trials", "300"};
  REQUIRE(gmtkit(cargs).code == 0);
  const std::string c1 = read_bytes(fs::path(cdir) / "report.json");
  REQUIRE(gmtkit(cargs).code == 0);
  CHECK(read_bytes(fs::path(cdir) / "report.json") == c1);
}

TEST_CASE("verify rejects tampering") {
  const Fixture fx("cli_verify");
  const std::string dir = fx.out("p");
  REQUIRE(gmtkit({"--out", dir, "perturb", "--measure", fx.mu50.string(), "--eps", "0.1", "--grid", "6"}).code == 0);
  const fs::path rp = fs::path(dir) / "report.json";
  const json fresh = load(rp);
  const std::string original = read_bytes(rp);

  SUBCASE("edited tail_mass: digest mismatch") {
    json r = fresh;
    r["results"]["tail_mass"] = r["results"]["tail_mass"].get<double>() * 0.5;
    write_text(rp, r.dump(2));
    const auto v = gmtkit({"verify", rp.string()});
    CHECK(v.code == 2);
    CHECK(v.out.find("digest mismatch") != std::string::npos);
  }
  SUBCASE("edited certificate with a recomputed digest: replay diff") {
    json r = fresh;
    r["certificates"][0]["passed"] = !r["certificates"][0]["passed"].get<bool>();
    save_redigested(rp, r);
    const auto v = gmtkit({"verify", rp.string()});
    CHECK(v.code == 2);
    CHECK(v.out.find("/certificates/0/passed") != std::string::npos);
  }
  SUBCASE("every certificate field mutated") {
    for (std::size_t k = 0; k < fresh["certificates"].size(); ++k) {
      json r = fresh;
      r["certificates"][k]["detail"]["forged"] = true;
      save_redigested(rp, r);
      CHECK(gmtkit({"verify", rp.string()}).code == 2);
      r = fresh;
      r["certificates"][k]["passed"] = !r["certificates"][k]["passed"].get<bool>();
      write_text(rp, r.dump(2));
      CHECK(gmtkit({"verify", rp.string()}).code == 2);
    }
  }
  SUBCASE("tampered artifact") {
    auto bytes = read_bytes(fs::path(dir) / "f.bin");
    bytes[8] = static_cast<char>(bytes[8] ^ 1);
    write_text(fs::path(dir) / "f.bin", bytes);
    const auto v = gmtkit({"verify", rp.string()});
    CHECK(v.code == 2);
    CHECK(v.out.find("f.bin") != std::string::npos);
  }
  SUBCASE("changed input") {
    auto mu = load(fx.mu50);
    mu["atoms"][0]["m"] = 0.5;
    io::write_json_file(fx.mu50, mu);
    const auto v = gmtkit({"verify", rp.string()});
    CHECK(v.code == 2);
    CHECK(v.out.find("input 'measure'") != std::string::npos);
  }
  SUBCASE("missing report") { CHECK(gmtkit({"verify", fx.out("nowhere.json")}).code == 1); }
  write_text(rp, original);
}

TEST_CASE("verify replays the seed of a charge test") {
  const Fixture fx("cli_seed");
  // On a uniform density the worst bump comes from the random family, not a ladder.
  const GridSpec spec{testing::unit_box(2), 5};
  io::write_grid_field(fx.dir / "one", GridField(spec, FieldRank::kScalar, std::vector<double>(spec.cell_count(), 1.0)));
  const std::string dir = fx.out("c");
  REQUIRE(gmtkit({"--out", dir, "--seed", "1", "charge-test", "--field", fx.out("one.json"), "--trials", "200",
                  "--bound", "1"})
              .code == 0);
  const fs::path rp = fs::path(dir) / "report.json";
  CHECK(gmtkit({"verify", rp.string()}).code == 0);
  // Results of seed 1 under a config claiming seed 2.
  json r = load(rp);
  r["config"]["seed"] = 2;
  save_redigested(rp, r);
  const auto v = gmtkit({"verify", rp.string()});
  CHECK(v.code == 2);
  CHECK(v.out.find("replay differs") != std::string::npos);
  CHECK(v.out.find("/results/worst") != std::string::npos);
}

TEST_CASE("exit codes") {
  const Fixture fx("cli_codes");
  CHECK(gmtkit({}).code == 1);
  CHECK(gmtkit({"bogus"}).code == 1);
  CHECK(gmtkit({"--out", fx.out("a"), "content", "--region", fx.out("missing.json"), "--gauge", "power:1"}).code == 1);
  write_text(fx.dir / "bad.json", "{not json");
  const auto bad = gmtkit({"--out", fx.out("b"), "content", "--region", fx.out("bad.json"), "--gauge", "power:1"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("not valid JSON") != std::string::npos);
  // Infeasible: no level-2 cube has radius below 0.01.
  const auto inf = gmtkit({"--out", fx.out("c"), "content", "--region", fx.region.string(), "--gauge", "power:1",
                           "--delta", "0.01", "--max-level", "2"});
  CHECK(inf.code == 1);
  CHECK(gmtkit({"--out", fx.out("d"), "content", "--region", fx.region.string(), "--gauge", "cubic:1"}).code == 1);
  CHECK(gmtkit({"--out", fx.out("e"), "series", "--measure", fx.mu10.string(), "--gauge", "power:1", "--level", "5"})
            .code == 1);

  // An insufficient schedule is a certificate failure: 0 normally, 2 with --strict.
  const std::vector<std::string> series{"series", "--measure", fx.mu10.string(), "--gauge", "power:1", "--level", "5",
                                        "--step", "0.5,inf,1e-9"};
  auto args = series;
  args.insert(args.begin(), {"--out", fx.out("f")});
  const auto lax = gmtkit(args);
  CHECK(lax.code == 0);
  CHECK(lax.out.find("FAILED schedule-sufficient") != std::string::npos);
  args.insert(args.begin(), "--strict");
  CHECK(gmtkit(args).code == 2);
  CHECK(gmtkit({"--strict", "verify", fx.out("f") + "/report.json"}).code == 2);
  CHECK(gmtkit({"verify", fx.out("f") + "/report.json"}).code == 0);
}

TEST_CASE("frostman writes its measure where asked") {
  const Fixture fx("cli_frostman");
  const std::string dir = fx.out("f");
  REQUIRE(gmtkit({"--out", dir, "frostman", "--region", fx.region.string(), "--gauge", "power:1", "--depth", "5",
                  "--measure-out", "nu.json"})
              .code == 0);
  const auto mu = io::measure_from_json(load(fs::path(dir) / "nu.json"));
  const json report = load(fs::path(dir) / "report.json");
  CHECK(mu.total_mass() == report["results"]["total_mass"].get<double>());
  CHECK(gmtkit({"--out", dir, "frostman", "--region", fx.region.string(), "--gauge", "power:1", "--depth", "5",
                "--measure-out", "../x.json"})
            .code == 1);
}
