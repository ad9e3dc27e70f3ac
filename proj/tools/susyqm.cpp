// susyqm command-line front end. Each subcommand reads an optional JSON
// config, applies the flags on top and writes reports to --out-dir.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "susyqm/harness.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool quick = false;
  std::string parameter;
  std::vector<double> grid;
};

void print_manifest(const susyqm::RunManifest& m) {
  std::size_t width = 0;
  for (const auto& c : m.checks) width = std::max(width, c.name.size());
  for (const auto& c : m.checks) {
    std::printf("%-*s  %-13s %8.2fs  %s\n", static_cast<int>(width), c.name.c_str(), c.status.c_str(),
                c.seconds, c.summary.c_str());
  }
  std::printf("exit code %d, %.1fs, reports in %s\n", m.exit_code, m.seconds,
              m.config["out_dir"].get<std::string>().c_str());
}

int execute(const std::string& command, const Flags& f) {
  try {
    susyqm::RunConfig c;
    nlohmann::json j = nlohmann::json::object();
    if (!f.config.empty()) {
      std::ifstream in(f.config);
      if (!in) throw susyqm::ConfigError("--config: cannot open " + f.config);
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw susyqm::ConfigError(std::string("--config: ") + e.what());
      }
    }
    if (j.is_object() && j.contains("command") && j["command"] != command)
      throw susyqm::ConfigError("config field 'command': file is for '" + j["command"].dump() + "'");
    c = susyqm::config_from_json(j, c);
    c.command = command;
    if (f.seed) c.seed = *f.seed;
    if (!f.out_dir.empty()) c.out_dir = f.out_dir;
    if (f.quick) c.quick = true;
    if (!f.parameter.empty()) c.parameter = f.parameter;
    if (!f.grid.empty()) c.grid = f.grid;
    c.workers = susyqm::workers_from_env();
    const susyqm::RunManifest m = susyqm::run(c);
    print_manifest(m);
    return m.exit_code;
  } catch (const susyqm::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return susyqm::kExitUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"susyqm: spectral and algebraic checks for a supersymmetric matrix model"};
  app.require_subcommand(1);
  Flags f;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"verify-algebra", "exact superalgebra, deformation and gamma-matrix identities"},
      {"fermion-report", "bilinear ground energies and the fermion Hamiltonian at the valley"},
      {"landscape", "zero set, completed square and Hessian of the potential"},
      {"spectrum", "lowest eigenpairs of a model operator (needs --config)"},
      {"scan", "parameter scan over t, k or |x|"},
      {"fiber-scan", "fiber lower bound and H0_x ground space"},
      {"decay-check", "decay-rate fit of the near-zero state of H_k"},
      {"gauge-laplacian-check", "gauge-fixed Laplacian identity on test families"},
      {"reproduce-all", "run every acceptance check"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--out-dir", f.out_dir, "output directory");
    sub->add_flag("--quick", f.quick, "skip the largest cutoffs");
    if (name == "scan") {
      sub->add_option("--parameter", f.parameter, "t, k or x")->check(CLI::IsMember({"t", "k", "x"}));
      sub->add_option("--grid", f.grid, "ascending grid values")->delimiter(',');
    }
    if (name == "fiber-scan") sub->add_option("--grid", f.grid, "ascending |x| values")->delimiter(',');
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : susyqm::kExitUsage;
  }
  for (CLI::App* sub : app.get_subcommands()) return execute(sub->get_name(), f);
  return susyqm::kExitUsage;
}
