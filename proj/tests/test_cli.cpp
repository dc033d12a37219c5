#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "knds/perturbation.hpp"

#ifndef KNDS_BIN
#error "KNDS_BIN must name the knds executable"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace knds;

namespace {

struct Result {
  int code;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("knds-cli-" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d / name;
}

Result run_knds(const std::string& args, const std::string& env = "") {
  const fs::path o = scratch("stdout"), e = scratch("stderr");
  const std::string cmd = env + " '" KNDS_BIN "' " + args + " >'" + o.string() + "' 2>'" + e.string() + "'";
  const int st = std::system(cmd.c_str());
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, slurp(o), slurp(e)};
}

// RFC-4180 reader for the CSV bodies; '#' lines before the header are the preamble
struct Csv {
  std::vector<std::string> preamble, header;
  std::vector<std::vector<std::string>> rows;
  int col(const std::string& name) const {
    for (size_t k = 0; k < header.size(); ++k)
      if (header[k] == name) return int(k);
    FAIL("no column " << name);
    return -1;
  }
};

Csv parse_csv(const std::string& s) {
  Csv c;
  size_t i = 0;
  while (i < s.size() && s[i] == '#') {
    const size_t e = s.find("\r\n", i);
    c.preamble.push_back(s.substr(i, e - i));
    i = e + 2;
  }
  std::vector<std::vector<std::string>> recs;
  std::vector<std::string> rec;
  std::string cell;
  bool quoted = false, bare_lf = false;
  for (; i < s.size(); ++i) {
    const char ch = s[i];
    if (quoted) {
      if (ch == '"' && i + 1 < s.size() && s[i + 1] == '"') cell += '"', ++i;
      else if (ch == '"') quoted = false;
      else cell += ch;
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      rec.push_back(cell), cell.clear();
    } else if (ch == '\r' && i + 1 < s.size() && s[i + 1] == '\n') {
      rec.push_back(cell), cell.clear();
      recs.push_back(rec), rec.clear();
      ++i;
    } else {
      bare_lf = bare_lf || ch == '\n';
      cell += ch;
    }
  }
  REQUIRE_MESSAGE(!bare_lf, "bare LF in CSV");
  REQUIRE(rec.empty());
  REQUIRE(cell.empty());
  REQUIRE(!recs.empty());
  c.header = recs.front();
  c.rows.assign(recs.begin() + 1, recs.end());
  size_t ragged = 0;
  for (const auto& r : c.rows) ragged += r.size() != c.header.size();
  REQUIRE(ragged == 0);
  return c;
}

double num(const std::string& s) { return std::stod(s); }

}  // namespace

TEST_CASE("classify: boundaries on the default grid") {
  const auto r = run_knds("classify");
  REQUIRE(r.code == 0);
  const auto c = parse_csv(r.out);
  REQUIRE(c.rows.size() == 200u * 200u);
  CHECK(c.preamble.size() == 3);
  CHECK(c.preamble[0] == "# knds 0.1.0 classify");
  const int L = c.col("lambda"), Q = c.col("Q"), V = c.col("verdict"), RM = c.col("r_minus"), KP = c.col("kappa_plus");
  const double cell = 0.25 / 200;
  // Lambda outer, Q inner; Q = 0 is column 0, Q = 1 column 100
  auto flip = [&](int j) {
    for (int i = 1; i < 200; ++i)
      if (c.rows[(i - 1) * 200 + j][V] == "nondegenerate" && c.rows[i * 200 + j][V] == "degenerate") return num(c.rows[i * 200 + j][L]);
    return -1.0;
  };
  CHECK(num(c.rows[100][Q]) == 1.0);
  CHECK(std::abs(flip(0) - 1.0 / 9.0) <= cell);
  CHECK(std::abs(flip(100) - 0.1875) <= cell);
  for (const auto& row : c.rows) {
    const bool nd = row[V] == "nondegenerate";
    CHECK(row[RM].empty() == !nd);
    CHECK(row[KP].empty() == !nd);
  }
}

TEST_CASE("classify: empty grid is header only") {
  const auto r = run_knds("classify --grid 0");
  REQUIRE(r.code == 0);
  const auto c = parse_csv(r.out);
  CHECK(c.rows.empty());
  CHECK(c.header.front() == "lambda");
  CHECK(c.header.back() == "provenance");
}

TEST_CASE("csv dialect: CRLF records and 17 significant digits") {
  const auto r = run_knds("potentials --grid 4");
  REQUIRE(r.code == 0);
  const auto c = parse_csv(r.out);
  const std::string& x = c.rows[0][c.col("V_plus")];
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", num(x));
  CHECK(x == buf);
  CHECK(c.preamble[1].rfind("# config_hash ", 0) == 0);
}

TEST_CASE("potentials: positive tilde potentials and Q = 0 decoupling") {
  {
    const auto r = run_knds("potentials --sector scalar --l 2");
    REQUIRE(r.code == 0);
    const auto c = parse_csv(r.out);
    REQUIRE(c.rows.size() == 512);
    for (const auto& row : c.rows) {
      CHECK(num(row[c.col("Vt_plus")]) > 0.0);
      CHECK(num(row[c.col("Vt_minus")]) > 0.0);
    }
  }
  const auto r = run_knds("potentials --sector scalar --l 3 --charge-e 0 --lambda 0.05 --grid 64");
  REQUIRE(r.code == 0);
  const auto c = parse_csv(r.out);
  const BlackHoleParams p(0.05, 1.0, 0.0);
  const auto h = horizons(p);
  for (const auto& row : c.rows) {
    const double x = num(row[c.col("r")]);
    CHECK(x > h.r_minus);
    CHECK(x < h.r_plus);
    const double vp = num(row[c.col("V_plus")]), vm = num(row[c.col("V_minus")]);
    // Psi+ is the pure Maxwell field, Psi- the pure gravitational one
    CHECK(std::abs(vp - num(row[c.col("V_maxwell")])) <= 1e-14 * std::abs(vp));
    const double vg = potential_scalar_coupled(p, 3, x).V_Phi;
    CHECK(std::abs(vm - vg) <= 1e-12 * std::abs(vg));
  }
}

TEST_CASE("potentials: usage and domain errors") {
  auto r = run_knds("potentials --sector scalar --l 0");
  CHECK(r.code == 2);
  auto e = json::parse(r.err);
  CHECK(e["error"]["kind"] == "UsageError");
  CHECK(e["error"]["exit_code"] == 2);
  CHECK(r.out.empty());

  r = run_knds("potentials --lambda 0.5");
  CHECK(r.code == 3);
  CHECK(json::parse(r.err)["error"]["kind"] == "DegenerateError");

  r = run_knds("potentials --branch damping");
  CHECK(r.code == 2);
  r = run_knds("potentials --spin 0.1");
  CHECK(r.code == 2);
  r = run_knds("potentials --mass nope");
  CHECK(r.code == 2);
  r = run_knds("potentials --format xml");
  CHECK(r.code == 2);
  r = run_knds("");
  CHECK(r.code == 2);
  CHECK(json::parse(r.err)["error"]["kind"] == "UsageError");
  r = run_knds("classify --out /nonexistent-dir/x.csv");
  CHECK(r.code == 5);
  CHECK(json::parse(r.err)["error"]["kind"] == "IoError");
  r = run_knds("classify --config /nonexistent-dir/c.json");
  CHECK(r.code == 5);
  r = run_knds("classify --grid 2", "KNDS_SPECTRAL_JOBS=zero");
  CHECK(r.code == 2);
}

TEST_CASE("damping: slope column near -1") {
  const auto r = run_knds("damping");
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  REQUIRE(j["rows"].size() == 3);
  for (const auto& row : j["rows"]) {
    CHECK(row["slope"].get<double>() >= -1.15);
    CHECK(row["slope"].get<double>() <= -0.85);
  }
  CHECK(std::abs(j["horizon_integral"].get<double>() / j["horizon_integral_reference"].get<double>() - 1.0) < 1e-8);
  CHECK(j["config_hash"].get<std::string>().size() == 16);
  CHECK(j["knds_version"] == "0.1.0");
}

TEST_CASE("subpr: 1000 draws, no mismatch rows") {
  const auto r = run_knds("subpr --draws 1000");
  REQUIRE(r.code == 0);
  const auto c = parse_csv(r.out);
  REQUIRE(c.rows.size() == 3000);
  int bad = 0;
  for (const auto& row : c.rows) bad += row[c.col("status")] != "ok";
  CHECK(bad == 0);
}

TEST_CASE("qnm-scan: stable default scan and the l = 0 control") {
  auto r = run_knds("qnm-scan --l 2");
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["stable"] == true);
  CHECK(j["reports"].size() == 5);
  r = run_knds("qnm-scan --sector spherical --l 0 --branch wave --window=-0.02,0.02,-0.02,0.02");
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  CHECK(j["reports"][0]["winding"] == 1);
  CHECK(j["stable"] == false);
  r = run_knds("qnm-scan --format csv");
  CHECK(r.code == 2);
}

TEST_CASE("initdata: zero seed returns the background") {
  const auto r = run_knds("initdata --seed-kind zero --grid 64");
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  for (double x : j["solution"]["psi"].get<std::vector<double>>()) CHECK(x == 0.0);
  CHECK(j["solution"]["iterations"] == 0);
  const auto b = json::parse(run_knds("initdata --seed-kind mixed --seed-amp 1e-3").out);
  CHECK(b["solution"]["iterations"].get<int>() > 0);
  double worst = 0;
  for (auto& [k, v] : b["solution"]["residuals"]["interior"].items()) worst = std::max(worst, v.get<double>());
  CHECK(worst < 1e-8);
  CHECK(std::abs(b["charges"]["Qe"].get<double>() - 0.501) < 1e-8);
}

TEST_CASE("config file values are overridden by flags") {
  const fs::path cfg = scratch("cfg.json");
  std::ofstream(cfg) << R"({"lambda": 0.03, "l": 4, "grid": 8, "format": "json"})";
  auto j = json::parse(run_knds("potentials --config '" + cfg.string() + "' --lambda 0.04").out);
  CHECK(j["config"]["lambda"] == 0.04);
  CHECK(j["config"]["l"] == 4);
  CHECK(j["rows"].size() == 8);
  std::ofstream(cfg) << R"({"no-such-key": 1})";
  CHECK(run_knds("potentials --config '" + cfg.string() + "'").code == 2);
}

TEST_CASE("outputs are byte-deterministic") {
  const fs::path a = scratch("a"), b = scratch("b");
  for (const std::string cmd : {"qnm-scan --l 2", "classify --grid 40", "subpr --draws 50", "initdata"}) {
    REQUIRE(run_knds(cmd + " --jobs 1 --out '" + a.string() + "'").code == 0);
    REQUIRE(run_knds(cmd + " --out '" + b.string() + "'", "KNDS_SPECTRAL_JOBS=4").code == 0);
    CHECK_MESSAGE(slurp(a) == slurp(b), cmd);
  }
  // a different seed changes the random draws and the config hash
  REQUIRE(run_knds("subpr --draws 5 --rng-seed 1 --out '" + a.string() + "'").code == 0);
  REQUIRE(run_knds("subpr --draws 5 --rng-seed 2 --out '" + b.string() + "'").code == 0);
  CHECK(slurp(a) != slurp(b));
  fs::remove_all(a.parent_path());
}
