#include <chrono>
#include <fstream>
#include <ostream>

#include "gmt/cli/digest.hpp"
#include "gmt/cli/pipeline.hpp"
#include "gmt/core/io.hpp"

namespace gmt::cli {

namespace {

constexpr const char* kTool = "gmtkit";
constexpr int kFormat = 1;
constexpr std::size_t kMaxDiffLines = 20;

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

bool all_required_passed(const RunOutput& out) {
  for (const auto& c : out.certificates)
    if (c.required && !c.passed) return false;
  return true;
}

std::string report_digest(const json& report) {
  json body = report;
  body.erase("digest");
  return sha256_hex(body.dump());
}

json make_report(const RunConfig& config, const RunOutput& out) {
  json certs = json::array();
  for (const auto& c : out.certificates)
    certs.push_back(json{{"name", c.name}, {"passed", c.passed}, {"required", c.required}, {"detail", c.detail}});
  json artifacts = json::object();
  for (const auto& a : out.artifacts) artifacts[a.name] = sha256_hex(a.bytes);
  json report{{"tool", kTool},
              {"format", kFormat},
              {"config", to_json(config)},
              {"inputs", out.inputs},
              {"results", out.results},
              {"certificates", certs},
              {"artifacts", artifacts},
              {"status", all_required_passed(out) ? "ok" : "certificate-failure"}};
  report["digest"] = report_digest(report);
  return report;
}

int dispatch(const RunConfig& config, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const RunOutput out = run_pipeline(config);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const json report = make_report(config, out);

  const std::filesystem::path dir(config.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw FormatError("cannot create '" + dir.string() + "': " + ec.message());
  for (const auto& a : out.artifacts) write_bytes(dir / a.name, a.bytes);
  write_bytes(dir / "report.json", report.dump(2) + "\n");
  io::write_json_file(dir / "timings.json", json{{"subcommand", config.subcommand}, {"pipeline_seconds", seconds}});

  std::size_t failed = 0;
  for (const auto& c : out.certificates) {
    if (c.passed) continue;
    log << (c.required ? "FAILED " : "note: unmet ") << c.name << '\n';
    if (c.required) ++failed;
  }
  log << config.subcommand << ": " << out.certificates.size() << " certificates, " << failed << " failed; report "
      << (dir / "report.json").string() << '\n';
  return config.strict && failed > 0 ? kExitCertificate : kExitOk;
}

int verify(const std::filesystem::path& report_path, bool strict, std::ostream& log) {
  json stored;
  RunConfig config;
  try {
    stored = io::read_json_file(report_path);
    if (!stored.is_object() || stored.value("tool", "") != kTool || stored.value("format", 0) != kFormat) {
      log << "not a " << kTool << " report of format " << kFormat << '\n';
      return kExitCertificate;
    }
    if (!stored.contains("digest") || stored["digest"] != report_digest(stored)) {
      log << "digest mismatch: report was modified\n";
      return kExitCertificate;
    }
    config = config_from_json(stored.at("config"));
  } catch (const Error& e) {
    log << e.what() << '\n';
    return kExitUsage;
  }

  RunOutput fresh;
  try {
    fresh = run_pipeline(config);
  } catch (const FormatError& e) {
    log << "cannot replay: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    log << "replay failed: " << e.what() << '\n';
    return kExitCertificate;
  }

  const json replay = make_report(config, fresh);
  for (const auto& [role, rec] : stored["inputs"].items())
    if (!replay["inputs"].contains(role) || replay["inputs"][role] != rec) {
      log << "input '" << role << "' differs from the recorded digest\n";
      return kExitCertificate;
    }
  if (replay.dump() != stored.dump()) {
    log << "replay differs from the report:\n";
    std::size_t shown = 0;
    for (const auto& op : json::diff(stored, replay)) {
      if (shown++ == kMaxDiffLines) {
        log << "  ...\n";
        break;
      }
      const std::string path = op.value("path", "");
      if (path == "/digest") continue;
      log << "  " << op.value("op", "") << ' ' << path;
      if (op.contains("value")) log << " -> " << op["value"].dump();
      log << '\n';
    }
    return kExitCertificate;
  }

  const auto dir = report_path.parent_path();
  for (const auto& [name, digest] : stored["artifacts"].items()) {
    const auto p = dir / name;
    if (!std::filesystem::exists(p)) {
      log << "artifact '" << name << "' is missing\n";
      return kExitUsage;
    }
    if (sha256_hex(read_bytes(p)) != digest.get<std::string>()) {
      log << "artifact '" << name << "' does not match its digest\n";
      return kExitCertificate;
    }
  }

  const bool ok = all_required_passed(fresh);
  log << "verified " << config.subcommand << ": " << fresh.certificates.size() << " certificates replayed, status "
      << (ok ? "ok" : "certificate-failure") << '\n';
  return strict && !ok ? kExitCertificate : kExitOk;
}

}  // namespace gmt::cli
