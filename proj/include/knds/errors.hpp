#pragma once
#include <stdexcept>
#include <string>

namespace knds {

// Every library failure derives from Error and carries a stable kind
// string plus the CLI exit code it maps to.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& what, int exit_code)
      : std::runtime_error(what), kind_(std::move(kind)), code_(exit_code) {}
  const std::string& kind() const { return kind_; }
  int exit_code() const { return code_; }

private:
  std::string kind_;
  int code_;
};

namespace exit_code {
inline constexpr int ok = 0, usage = 2, domain = 3, numerical = 4, io = 5;
}

#define KNDS_ERROR(Name, code)                                                   \
  struct Name : Error {                                                          \
    explicit Name(const std::string& w) : Error(#Name, w, code) {}               \
  };

KNDS_ERROR(DomainError, exit_code::domain)
KNDS_ERROR(DegenerateError, exit_code::domain)
KNDS_ERROR(UsageError, exit_code::usage)
KNDS_ERROR(IoError, exit_code::io)
KNDS_ERROR(NumericalError, exit_code::numerical)
KNDS_ERROR(SpinTooLarge, exit_code::numerical)
KNDS_ERROR(InternalInvariantError, exit_code::numerical)
KNDS_ERROR(PoleError, exit_code::numerical)
KNDS_ERROR(DegenerateReductionError, exit_code::numerical)
KNDS_ERROR(IndicialDegeneracy, exit_code::numerical)
KNDS_ERROR(ContourResolutionError, exit_code::numerical)
KNDS_ERROR(ContinuationError, exit_code::numerical)
KNDS_ERROR(LemmaMismatchError, exit_code::numerical)
KNDS_ERROR(NoConvergence, exit_code::numerical)
KNDS_ERROR(ConformalFactorCollapse, exit_code::numerical)

#undef KNDS_ERROR

}  // namespace knds
