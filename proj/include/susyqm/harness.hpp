#pragma once

// Run configuration, command dispatch and persisted reports. A run writes
// JSON reports, CSV tables, the resolved config and finally the manifest.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace susyqm {

inline constexpr int kReportSchemaVersion = 1;

enum ExitCode : int { kExitPass = 0, kExitInvariant = 1, kExitUsage = 2, kExitNumerics = 3 };

/// Schema violation; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::vector<std::string>& command_names();

struct RunConfig {
  std::string command;
  std::string model = "quadratic";  // full | fiber | quadratic (spectrum)
  std::optional<double> t;
  std::optional<double> k;
  std::array<double, 5> x{2.0, 0.0, 0.0, 0.0, 0.0};
  std::optional<int> cutoff;
  std::optional<int> plane_cutoff;         // own cutoff of the (q1,q2) plane for K_t
  std::vector<double> frequencies;         // empty = auto; one value or nine
  std::string parameter = "t";             // scan: t | k | x
  std::vector<double> grid;                // empty = command default
  int count = 4;
  int block = 2;
  double tol = 1e-8;
  int max_restarts = 500;
  int points = 40;                         // gauge-laplacian-check, per family
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "susyqm-out";
  bool quick = false;
  int workers = 1;
};

/// Reads an object of known keys (unknown keys, wrong types and missing
/// required fields throw ConfigError). Keys absent from `j` keep `base`.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base);
nlohmann::json to_json(const RunConfig& config);

/// Worker count from SUSYQM_WORKERS (default 1).
int workers_from_env();

struct CheckResult {
  std::string name;
  std::string status;  // pass | fail | not_converged | skipped
  std::string summary;
  double seconds = 0.0;
  double budget_seconds = 0.0;  // 0 = none
};

struct RunManifest {
  nlohmann::json config;
  std::string version;
  double seconds = 0.0;
  std::vector<CheckResult> checks;
  std::vector<std::string> artifacts;  // relative to the output directory
  int exit_code = kExitPass;
};

nlohmann::json to_json(const RunManifest& manifest);

/// Exit code of a set of checks: 3 if any solve did not converge, else 1 if
/// any invariant failed, else 0.
int exit_code_for(const std::vector<CheckResult>& checks);

/// Validate the config for its command, execute it and persist the results.
/// Throws ConfigError before any work if the config is invalid.
RunManifest run(const RunConfig& config);

/// Report files of a run directory (everything except the manifest), sorted.
std::vector<std::filesystem::path> report_files(const std::filesystem::path& dir);

}  // namespace susyqm
