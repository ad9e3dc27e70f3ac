// Acceptance runner: executes reproduce-all twice with the same seed, prints
// one line per criterion (1-11 from the first run, 12 from the comparison)
// and exits nonzero if any criterion fails or exceeds its runtime budget.

#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include "CLI11.hpp"
#include "susyqm/harness.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

susyqm::RunManifest reproduce(const fs::path& dir, std::uint64_t seed) {
  fs::remove_all(dir);
  susyqm::RunConfig c;
  c.command = "reproduce-all";
  c.seed = seed;
  c.out_dir = dir;
  c.workers = susyqm::workers_from_env();
  return susyqm::run(c);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string out = "acceptance-out";
  std::uint64_t seed = 1;
  app.add_option("--out-dir", out, "working directory for the two runs");
  app.add_option("--seed", seed, "seed shared by both runs");
  CLI11_PARSE(app, argc, argv);

  const fs::path base(out);
  const susyqm::RunManifest first = reproduce(base / "run1", seed);
  bool all = true;
  for (const auto& c : first.checks) {
    const bool in_time = c.budget_seconds <= 0.0 || c.seconds <= c.budget_seconds;
    const bool ok = c.status == "pass" && in_time;
    all &= ok;
    std::printf("%-36s %s  [%s, %.2fs of %.0fs]  %s\n", c.name.c_str(), ok ? "PASS" : "FAIL",
                c.status.c_str(), c.seconds, c.budget_seconds, c.summary.c_str());
    std::fflush(stdout);
  }

  const susyqm::RunManifest second = reproduce(base / "run2", seed);
  const auto a = susyqm::report_files(base / "run1");
  const auto b = susyqm::report_files(base / "run2");
  std::string detail;
  bool same = a.size() == b.size() && !a.empty();
  for (std::size_t i = 0; same && i < a.size(); ++i) {
    if (a[i].filename() != b[i].filename()) {
      same = false;
      detail = "file sets differ";
    } else if (slurp(a[i]) != slurp(b[i])) {
      same = false;
      detail = a[i].filename().string() + " differs";
    }
  }
  if (same) detail = std::to_string(a.size()) + " report files byte-identical";
  if (a.size() != b.size()) detail = "file counts differ";
  all &= same;
  std::printf("%-36s %s  [seed %llu, %.0fs second run]  %s\n", "criterion 12: determinism", same ? "PASS" : "FAIL",
              static_cast<unsigned long long>(seed), second.seconds, detail.c_str());
  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all ? 0 : 1;
}
