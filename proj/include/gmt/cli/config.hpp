#pragma once

#include <cstdint>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gmt/core/error.hpp"
#include "gmt/core/gauge.hpp"
#include "gmt/decompose/series.hpp"

namespace gmt::cli {

using nlohmann::json;

/// Bad command line or configuration; maps to exit status 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Everything a run depends on. Reports embed it verbatim, so `verify` can
/// replay the run without the original command line.
struct RunConfig {
  std::string subcommand;  ///< "content", ..., "demo-cantor", "demo-ualpha"
  std::map<std::string, std::string> inputs;  ///< role ("region", "measure", "field", "K") -> path
  std::optional<GaugeFunction> gauge;
  std::vector<ScheduleStep> schedule;
  int level = -1;  ///< dyadic depth or grid level; -1 lets the pipeline pick
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  bool strict = false;
  bool csv = false;
  json params = json::object();  ///< remaining numeric and string parameters, all explicit
};

[[nodiscard]] json to_json(const RunConfig& c);
/// Throws FormatError on a malformed config object.
[[nodiscard]] RunConfig config_from_json(const json& j);

/// JSON encoding of a double that keeps ±infinity as the strings "inf"/"-inf".
[[nodiscard]] json number(double x);
/// Inverse of number(); also accepts the strings "inf" and "infinity".
[[nodiscard]] double to_number(const json& j);

/// Decimal number or "inf"; throws UsageError otherwise.
[[nodiscard]] double parse_number(const std::string& s);

/// Gauge from a `.json` file or an inline form: "power:s", "power-normalized:s",
/// "power-log:s,beta", "table:t1:h1,t2:h2,...".
[[nodiscard]] GaugeFunction parse_gauge(const std::string& spec);
/// "c,delta,eps" with delta possibly "inf".
[[nodiscard]] ScheduleStep parse_step(const std::string& spec);
[[nodiscard]] std::vector<ScheduleStep> schedule_from_json(const json& j);
[[nodiscard]] json to_json(const std::vector<ScheduleStep>& schedule);

}  // namespace gmt::cli
