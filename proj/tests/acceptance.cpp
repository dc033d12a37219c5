// Acceptance runner: one PASS/FAIL line per criterion 1-10. Criteria 1-9
// run in-process; 10 drives the knds binary end to end.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "knds/acceptance.hpp"

namespace fs = std::filesystem;
using namespace knds;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Run {
  int code;
  double seconds;
};

Run run_verify(const std::string& bin, std::uint64_t seed, const fs::path& out) {
  const std::string cmd = fmt::format("'{}' verify --rng-seed {} --out '{}' 2>/dev/null", bin, seed, out.string());
  const auto t0 = std::chrono::steady_clock::now();
  const int st = std::system(cmd.c_str());
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, s};
}

CriterionResult end_to_end(const std::string& bin, std::uint64_t seed) {
  CriterionResult r{10, "end-to-end verify", false, "", 0, 900, {}};
  if (bin.empty() || !fs::exists(bin)) {
    r.detail = "knds binary not found (pass --knds PATH)";
    return r;
  }
  const fs::path dir = fs::temp_directory_path() / fmt::format("knds-accept-{}", ::getpid());
  fs::create_directories(dir);
  const auto a = run_verify(bin, seed, dir / "a.txt"), b = run_verify(bin, seed, dir / "b.txt");
  const std::string ra = slurp(dir / "a.txt"), rb = slurp(dir / "b.txt");
  fs::remove_all(dir);
  const bool same = !ra.empty() && ra == rb;
  const double worst = std::max(a.seconds, b.seconds);
  r.seconds = a.seconds + b.seconds;
  r.pass = a.code == 0 && b.code == 0 && same && worst < r.limit_seconds;
  r.detail = fmt::format("two runs of knds verify --rng-seed {}: exit {} and {}, reports {} ({} bytes), slower run {:.1f} s of {:.0f} s",
                         seed, a.code, b.code, same ? "byte-identical" : "DIFFER", ra.size(), worst, r.limit_seconds);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria 1-10"};
  std::string bin;
  AcceptanceOptions opt;
  app.add_option("--knds", bin, "path to the knds binary (criterion 10)");
  app.add_option("--rng-seed", opt.rng_seed, "seed for random draws");
  app.add_option("--jobs", opt.jobs, "worker threads")->check(CLI::Range(1, 1024));
  CLI11_PARSE(app, argc, argv);

  bool all = true;
  for (int id = 1; id <= 9; ++id) {
    const auto r = run_criterion(id, opt);
    all = all && r.pass;
    std::cout << format_line(r) << fmt::format("  [{:.2f} s]", r.seconds) << std::endl;
  }
  const auto r = end_to_end(bin, opt.rng_seed);
  all = all && r.pass;
  std::cout << format_line(r) << std::endl;
  std::cout << (all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL") << std::endl;
  return all ? 0 : 1;
}
