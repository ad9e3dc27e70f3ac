#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <iterator>

#include "susyqm/harness.hpp"

using namespace susyqm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("susyqm-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string config_error(const nlohmann::json& j, const std::string& command) {
  try {
    RunConfig c = config_from_json(j, RunConfig{});
    c.command = command;
    c.out_dir = scratch("invalid");
    run(c);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config errors name the field") {
  CHECK(config_error({{"model", "quadratic"}, {"t", 2.0}}, "spectrum").find("'cutoff'") != std::string::npos);
  CHECK(config_error({{"cutoff", "4"}}, "spectrum").find("'cutoff'") != std::string::npos);
  CHECK(config_error({{"cutof", 4}}, "spectrum").find("'cutof'") != std::string::npos);
  CHECK(config_error({{"grid", {4, 2}}}, "scan").find("'grid'") != std::string::npos);
  CHECK(config_error({{"parameter", "q"}}, "scan").find("'parameter'") != std::string::npos);
  CHECK(config_error({{"model", "full"}, {"cutoff", 2}}, "spectrum").find("'t'/'k'") != std::string::npos);
  CHECK(config_error({{"frequencies", "fast"}}, "landscape").find("'frequencies'") != std::string::npos);
  CHECK(config_error(nlohmann::json::array(), "landscape").find("object") != std::string::npos);
  CHECK(config_error(nlohmann::json::object(), "no-such-command").find("'command'") != std::string::npos);
  CHECK_FALSE(fs::exists(scratch("invalid") / "manifest.json"));
}

TEST_CASE("config round trip keeps explicit defaults") {
  RunConfig c = config_from_json({{"t", 4.0}, {"cutoff", 3}, {"grid", {2, 4, 8}}, {"seed", 9}}, RunConfig{});
  c.command = "scan";
  const nlohmann::json j = to_json(c);
  CHECK(j["frequencies"] == "auto");
  CHECK(j["tol"] == 1e-8);
  CHECK(j["schema_version"] == kReportSchemaVersion);
  nlohmann::json back = j;
  back.erase("workers");
  const RunConfig d = config_from_json(back, RunConfig{});
  CHECK(to_json(d) == j);
}

TEST_CASE("exit code policy") {
  CHECK(exit_code_for({{"a", "pass", "", 0, 0}, {"b", "skipped", "", 0, 0}}) == kExitPass);
  CHECK(exit_code_for({{"a", "fail", "", 0, 0}, {"b", "pass", "", 0, 0}}) == kExitInvariant);
  CHECK(exit_code_for({{"a", "fail", "", 0, 0}, {"b", "not_converged", "", 0, 0}}) == kExitNumerics);
}

TEST_CASE("a run persists reports, tables and a manifest listing them") {
  RunConfig c;
  c.command = "gauge-laplacian-check";
  c.points = 5;
  c.out_dir = scratch("run-a");
  const RunManifest m = run(c);
  CHECK(m.checks.size() == 1);
  CHECK(m.checks[0].status == "fail");  // 15 points are below the 100 required
  CHECK(m.exit_code == kExitInvariant);
  REQUIRE(fs::exists(c.out_dir / "manifest.json"));
  const auto manifest = nlohmann::json::parse(slurp(c.out_dir / "manifest.json"));
  CHECK(manifest["exit_code"] == kExitInvariant);
  CHECK(manifest["config"]["points"] == 5);
  for (const auto& a : manifest["artifacts"]) CHECK(fs::exists(c.out_dir / a.get<std::string>()));
  const std::string csv = slurp(c.out_dir / "gauge-laplacian.csv");
  CHECK(csv.rfind("family,points,rejected", 0) == 0);

  RunConfig d = c;
  d.out_dir = scratch("run-b");
  run(d);
  const auto ra = report_files(c.out_dir);
  const auto rb = report_files(d.out_dir);
  REQUIRE(ra.size() == rb.size());
  CHECK(ra.size() == 3);
  for (std::size_t i = 0; i < ra.size(); ++i) CHECK(slurp(ra[i]) == slurp(rb[i]));
}

TEST_CASE("verify-algebra passes") {
  RunConfig c;
  c.command = "verify-algebra";
  c.out_dir = scratch("algebra");
  const RunManifest m = run(c);
  CHECK(m.exit_code == kExitPass);
  for (const auto& r : m.checks) CHECK(r.status == "pass");
}
