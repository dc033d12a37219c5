#pragma once
// The identity suite behind `knds verify`: acceptance criteria 1-9 run
// in-process, each reporting one deterministic pass/fail line.
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace knds {

struct AcceptanceOptions {
  std::uint64_t rng_seed = 20240611;
  int jobs = 1;
  std::vector<int> only;  // empty: all of 1..9
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;       // deterministic summary of the measured quantities
  double seconds = 0.0;     // wall time, not part of the deterministic report
  double limit_seconds = 0; // runtime bound from the criterion
  nlohmann::ordered_json metrics;
};

CriterionResult run_criterion(int id, const AcceptanceOptions& opt);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

// "PASS  3  positivity lemmas: ..." per line; identical for identical options
std::string format_line(const CriterionResult& r);
std::string format_report(const std::vector<CriterionResult>& rs);

const char* version();

}  // namespace knds
