#include "gmt/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "gmt/core/io.hpp"

namespace gmt::cli {

double parse_number(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw UsageError("'" + s + "' is not a number");
  return v;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T member(const json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("config is missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

json number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double to_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw FormatError("expected a number, got " + j.dump());
}

json to_json(const std::vector<ScheduleStep>& schedule) {
  json arr = json::array();
  for (const auto& s : schedule) arr.push_back(json{{"c", number(s.c)}, {"delta", number(s.delta)}, {"eps", number(s.eps)}});
  return arr;
}

std::vector<ScheduleStep> schedule_from_json(const json& j) {
  if (!j.is_array()) throw FormatError("schedule must be an array");
  std::vector<ScheduleStep> out;
  for (const auto& s : j) {
    if (!s.is_object() || !s.contains("c") || !s.contains("delta") || !s.contains("eps"))
      throw FormatError("schedule step needs c, delta and eps");
    out.push_back({to_number(s["c"]), to_number(s["delta"]), to_number(s["eps"])});
  }
  return out;
}

json to_json(const RunConfig& c) {
  json inputs = json::object();
  for (const auto& [role, path] : c.inputs) inputs[role] = path;
  return json{{"subcommand", c.subcommand},
              {"inputs", inputs},
              {"gauge", c.gauge ? io::to_json(*c.gauge) : json(nullptr)},
              {"schedule", to_json(c.schedule)},
              {"level", c.level},
              {"seed", c.seed},
              {"out_dir", c.out_dir},
              {"strict", c.strict},
              {"csv", c.csv},
              {"params", c.params}};
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("config must be an object");
  RunConfig c;
  c.subcommand = member<std::string>(j, "subcommand");
  const json inputs = member<json>(j, "inputs");
  if (!inputs.is_object()) throw FormatError("config inputs must be an object");
  for (const auto& [role, path] : inputs.items()) {
    if (!path.is_string()) throw FormatError("input path must be a string");
    c.inputs[role] = path.get<std::string>();
  }
  const json g = member<json>(j, "gauge");
  if (!g.is_null()) c.gauge = io::gauge_from_json(g);
  c.schedule = schedule_from_json(member<json>(j, "schedule"));
  c.level = member<int>(j, "level");
  c.seed = member<std::uint64_t>(j, "seed");
  c.out_dir = member<std::string>(j, "out_dir");
  c.strict = member<bool>(j, "strict");
  c.csv = member<bool>(j, "csv");
  c.params = member<json>(j, "params");
  if (!c.params.is_object()) throw FormatError("config params must be an object");
  return c;
}

GaugeFunction parse_gauge(const std::string& spec) {
  if (spec.size() > 5 && spec.ends_with(".json")) return io::gauge_from_json(io::read_json_file(spec));
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw UsageError("gauge '" + spec + "' is neither a .json file nor kind:params");
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (kind == "power") return GaugeFunction::power(parse_number(rest));
  if (kind == "power-normalized") return GaugeFunction::power(parse_number(rest), true);
  if (kind == "power-log") {
    const auto parts = split(rest, ',');
    if (parts.size() != 2) throw UsageError("power-log gauge needs s,beta");
    return GaugeFunction::power_log(parse_number(parts[0]), parse_number(parts[1]));
  }
  if (kind == "table") {
    std::vector<std::pair<double, double>> knots;
    for (const auto& knot : split(rest, ',')) {
      const auto th = split(knot, ':');
      if (th.size() != 2) throw UsageError("table knot must be t:h");
      knots.emplace_back(parse_number(th[0]), parse_number(th[1]));
    }
    return GaugeFunction::table(std::move(knots));
  }
  throw UsageError("unknown gauge kind '" + kind + "'");
}

ScheduleStep parse_step(const std::string& spec) {
  const auto parts = split(spec, ',');
  if (parts.size() != 3) throw UsageError("schedule step '" + spec + "' must be c,delta,eps");
  return {parse_number(parts[0]), parse_number(parts[1]), parse_number(parts[2])};
}

}  // namespace gmt::cli
