#include "gmt/core/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gmt/core/error.hpp"

namespace gmt::io {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j[key];
}

template <class T>
T get(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("field '") + key + "': " + e.what());
  }
}

Point point_from_json(const json& j, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) throw FormatError("coordinate array has wrong length");
  Point p{};
  for (int i = 0; i < dim; ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number()) throw FormatError("coordinate is not a number");
    p[i] = j[static_cast<std::size_t>(i)].get<double>();
  }
  return p;
}

json point_to_json(const Point& p, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(p[i]);
  return a;
}

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xFFU);
    return r;
  }
  return v;
}

}  // namespace

json to_json(const GaugeFunction& g) {
  if (const auto* p = std::get_if<PowerGauge>(&g.kind()))
    return json{{"type", "power"}, {"s", p->s}, {"normalized", p->normalized}};
  if (const auto* p = std::get_if<PowerLogGauge>(&g.kind()))
    return json{{"type", "power_log"}, {"s", p->s}, {"beta", p->beta}};
  const auto& t = std::get<TableGauge>(g.kind());
  json knots = json::array();
  for (const auto& [x, h] : t.knots) knots.push_back(json::array({x, h}));
  return json{{"type", "table"}, {"knots", knots}};
}

GaugeFunction gauge_from_json(const json& j) {
  const auto type = get<std::string>(j, "type");
  if (type == "power") {
    const bool normalized = j.contains("normalized") ? get<bool>(j, "normalized") : false;
    return GaugeFunction::power(get<double>(j, "s"), normalized);
  }
  if (type == "power_log") return GaugeFunction::power_log(get<double>(j, "s"), get<double>(j, "beta"));
  if (type == "table") {
    std::vector<std::pair<double, double>> knots;
    const auto& arr = field(j, "knots");
    if (!arr.is_array()) throw FormatError("table knots must be an array");
    for (const auto& k : arr) {
      if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number())
        throw FormatError("table knot must be a [t, h] pair");
      knots.emplace_back(k[0].get<double>(), k[1].get<double>());
    }
    return GaugeFunction::table(std::move(knots));
  }
  throw FormatError("unknown gauge type '" + type + "'");
}

json to_json(const RootBox& box) { return json{{"origin", point_to_json(box.origin, box.dim)}, {"side", box.side}}; }

RootBox box_from_json(const json& j) {
  RootBox box;
  const auto& origin = field(j, "origin");
  if (!origin.is_array()) throw FormatError("box origin must be an array");
  box.dim = static_cast<int>(origin.size());
  if (box.dim < 1 || box.dim > kMaxDim) throw FormatError("box dimension must be 1, 2 or 3");
  box.origin = point_from_json(origin, box.dim);
  box.side = get<double>(j, "side");
  validate_box(box);
  return box;
}

json to_json(const AtomicMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms()) atoms.push_back(json{{"x", point_to_json(a.x, mu.dim())}, {"m", a.mass}});
  return json{{"dim", mu.dim()}, {"box", to_json(mu.box())}, {"atoms", atoms}};
}

AtomicMeasure measure_from_json(const json& j) {
  const int dim = get<int>(j, "dim");
  RootBox box = box_from_json(field(j, "box"));
  if (box.dim != dim) throw FormatError("measure dim does not match its box");
  std::vector<Atom> atoms;
  const auto& arr = field(j, "atoms");
  if (!arr.is_array()) throw FormatError("atoms must be an array");
  for (const auto& a : arr) atoms.push_back(Atom{point_from_json(field(a, "x"), dim), get<double>(a, "m")});
  return AtomicMeasure(box, std::move(atoms));
}

json to_json(const SignedAtomicMeasure& mu) {
  return json{{"pos", to_json(mu.positive())}, {"neg", to_json(mu.negative())}};
}

SignedAtomicMeasure signed_measure_from_json(const json& j) {
  return SignedAtomicMeasure(measure_from_json(field(j, "pos")), measure_from_json(field(j, "neg")));
}

SignedAtomicMeasure any_measure_from_json(const json& j) {
  if (j.is_object() && j.contains("pos")) return signed_measure_from_json(j);
  return SignedAtomicMeasure(measure_from_json(j));
}

json to_json(const DyadicCube& q) {
  json idx = json::array();
  for (int i = 0; i < q.dim; ++i) idx.push_back(q.index[i]);
  return json{{"level", q.level}, {"index", idx}};
}

json to_json(const Region& r) {
  json arr = json::array();
  for (const auto& q : r.cubes()) arr.push_back(to_json(q));
  return arr;
}

Region region_from_json(const json& j, int dim) {
  if (!j.is_array()) throw FormatError("region must be a JSON array");
  std::vector<DyadicCube> cubes;
  for (const auto& c : j) {
    DyadicCube q{dim, get<int>(c, "level"), {}};
    const auto& idx = field(c, "index");
    if (!idx.is_array() || static_cast<int>(idx.size()) != dim) throw FormatError("cube index has wrong length");
    for (int i = 0; i < dim; ++i) {
      const auto v = idx[static_cast<std::size_t>(i)].is_number_integer() ? idx[static_cast<std::size_t>(i)].get<std::int64_t>() : -1;
      if (v < 0 || v > 0xFFFFFFFFLL) throw FormatError("cube index out of range");
      q.index[i] = static_cast<std::uint32_t>(v);
    }
    cubes.push_back(q);
  }
  return Region(dim, std::move(cubes));
}

json grid_header(const GridField& f, const std::string& data_file) {
  return json{{"dim", f.spec().dim()},
              {"level", f.spec().level},
              {"rank", f.rank() == FieldRank::kScalar ? "scalar" : "vector"},
              {"box", to_json(f.spec().box)},
              {"data", data_file}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

std::string encode_values(const GridField& f) {
  const auto vals = f.values();
  std::string bytes(vals.size() * 8, '\0');
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const std::uint64_t le = to_little_endian(std::bit_cast<std::uint64_t>(vals[i]));
    std::memcpy(bytes.data() + 8 * i, &le, 8);
  }
  return bytes;
}

void write_grid_field(const std::filesystem::path& stem, const GridField& f) {
  auto header_path = stem;
  header_path += ".json";
  auto data_path = stem;
  data_path += ".bin";
  write_json_file(header_path, grid_header(f, data_path.filename().string()));
  std::ofstream out(data_path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + data_path.string() + "'");
  const auto bytes = encode_values(f);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

GridField read_grid_field(const std::filesystem::path& header_path) {
  const json h = read_json_file(header_path);
  GridSpec spec;
  spec.level = get<int>(h, "level");
  const int dim = get<int>(h, "dim");
  if (h.contains("box")) {
    spec.box = box_from_json(field(h, "box"));
  } else {
    spec.box.dim = dim;
  }
  if (spec.box.dim != dim) throw FormatError("grid header dim does not match its box");
  const auto rank_name = get<std::string>(h, "rank");
  FieldRank rank;
  if (rank_name == "scalar") {
    rank = FieldRank::kScalar;
  } else if (rank_name == "vector") {
    rank = FieldRank::kVector;
  } else {
    throw FormatError("grid rank must be 'scalar' or 'vector'");
  }
  validate_grid(spec);
  const auto data_path = header_path.parent_path() / get<std::string>(h, "data");
  std::ifstream in(data_path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + data_path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  const std::size_t expected = spec.cell_count() * (rank == FieldRank::kScalar ? 1U : static_cast<std::size_t>(dim));
  if (bytes.size() != expected * 8) throw FormatError("grid data size does not match its header");
  std::vector<double> values(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    std::uint64_t le = 0;
    std::memcpy(&le, bytes.data() + 8 * i, 8);
    values[i] = std::bit_cast<double>(to_little_endian(le));
  }
  return GridField(spec, rank, std::move(values));
}

}  // namespace gmt::io
