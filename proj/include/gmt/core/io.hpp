#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <variant>

#include "gmt/core/dyadic.hpp"
#include "gmt/core/gauge.hpp"
#include "gmt/core/grid_field.hpp"
#include "gmt/core/measure.hpp"

namespace gmt::io {

using nlohmann::json;

// Every from_json throws gmt::FormatError on schema violations; domain
// validation errors of the constructed objects propagate unchanged.

[[nodiscard]] json to_json(const GaugeFunction& g);
[[nodiscard]] GaugeFunction gauge_from_json(const json& j);

[[nodiscard]] json to_json(const RootBox& box);
[[nodiscard]] RootBox box_from_json(const json& j);

/// {"dim":N,"box":{"origin":[...],"side":S},"atoms":[{"x":[...],"m":...}]}
[[nodiscard]] json to_json(const AtomicMeasure& mu);
[[nodiscard]] AtomicMeasure measure_from_json(const json& j);

/// {"pos":<measure>,"neg":<measure>}
[[nodiscard]] json to_json(const SignedAtomicMeasure& mu);
[[nodiscard]] SignedAtomicMeasure signed_measure_from_json(const json& j);
/// Accepts either a plain measure (taken as the positive part) or a signed one.
[[nodiscard]] SignedAtomicMeasure any_measure_from_json(const json& j);

/// [{"level":l,"index":[...]}, ...]
[[nodiscard]] json to_json(const Region& r);
[[nodiscard]] Region region_from_json(const json& j, int dim);
[[nodiscard]] json to_json(const DyadicCube& q);

/// Sidecar header {"dim":N,"level":L,"rank":"scalar"|"vector","box":{...},"data":"<file>"}.
[[nodiscard]] json grid_header(const GridField& f, const std::string& data_file);

[[nodiscard]] json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

/// Writes `<stem>.json` (header) and `<stem>.bin` (little-endian doubles).
void write_grid_field(const std::filesystem::path& stem, const GridField& f);
/// Reads a grid field from its JSON header path.
[[nodiscard]] GridField read_grid_field(const std::filesystem::path& header_path);

/// Raw little-endian encoding of the values, as written to the `.bin` sidecar.
[[nodiscard]] std::string encode_values(const GridField& f);

}  // namespace gmt::io
