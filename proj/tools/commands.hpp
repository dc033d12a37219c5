#pragma once
// Subcommands of the knds binary. Each takes the fully resolved run
// configuration and returns the bytes to write plus an exit code.
#include <string>

#include <json.hpp>

#include "knds/resonance.hpp"
#include "knds/spacetime.hpp"

namespace knds::cli {

using ojson = nlohmann::ordered_json;

struct RunConfig {
  std::string command;
  ojson values;  // resolved option values; embedded in every output
  std::string format;  // csv | json | text (verify only)
  std::string out;     // empty: stdout
  int jobs = 1;

  // every key is present after resolution; null means "command default"
  bool has(const std::string& key) const { return values.contains(key) && !values.at(key).is_null(); }
  double num(const std::string& key) const;
  int integer(const std::string& key) const;
  std::string str(const std::string& key) const;
  std::vector<double> list(const std::string& key) const;

  BlackHoleParams params() const;  // validated; nonzero spin only where a command allows it
  std::string hash() const;        // FNV-1a over the canonical dump of command + values
};

struct Output {
  std::string bytes;
  int code = 0;
};

Output cmd_classify(const RunConfig& c);
Output cmd_potentials(const RunConfig& c);
Output cmd_qnm_scan(const RunConfig& c);
Output cmd_damping(const RunConfig& c);
Output cmd_subpr(const RunConfig& c);
Output cmd_initdata(const RunConfig& c);
Output cmd_verify(const RunConfig& c);

// RFC-4180 cell quoting; reals with 17 significant digits
std::string csv_cell(const std::string& s);
std::string csv_real(double x);

}  // namespace knds::cli
