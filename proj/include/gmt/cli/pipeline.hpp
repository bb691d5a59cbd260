#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gmt/cli/config.hpp"

namespace gmt::cli {

/// A checked claim of a run. Optional certificates are informational: they
/// are reported but never turn a run into a certificate failure.
struct Certificate {
  std::string name;
  bool passed = false;
  bool required = true;
  json detail = json::object();
};

/// A file written next to report.json.
struct Artifact {
  std::string name;
  std::string bytes;
};

struct RunOutput {
  json inputs = json::object();  ///< role -> {path, sha256}
  json results = json::object();
  std::vector<Certificate> certificates;
  std::vector<Artifact> artifacts;
};

/// Runs a pipeline in memory. Deterministic in the config and input bytes.
/// Throws UsageError / gmt::Error on bad parameters or inputs.
[[nodiscard]] RunOutput run_pipeline(const RunConfig& config);

/// report.json content: config, input digests, results, certificates,
/// artifact digests, status and a SHA-256 digest of all of the above.
[[nodiscard]] json make_report(const RunConfig& config, const RunOutput& out);
/// Digest over the report without its "digest" member.
[[nodiscard]] std::string report_digest(const json& report);
[[nodiscard]] bool all_required_passed(const RunOutput& out);

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCertificate = 2;

/// Runs the pipeline and writes report.json, timings.json and the artifacts
/// into config.out_dir. Returns 2 on a failed required certificate in strict
/// mode, 0 otherwise; errors propagate.
int dispatch(const RunConfig& config, std::ostream& log);

/// Replays the run embedded in a report and compares it byte for byte, along
/// with input and artifact digests. 0 on agreement, 2 on any mismatch (or a
/// failed certificate when strict), 1 if the report or inputs are unreadable.
int verify(const std::filesystem::path& report_path, bool strict, std::ostream& log);

/// Command-line entry point of gmtkit.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gmt::cli
