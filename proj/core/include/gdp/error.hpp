#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gdp {

enum class Errc {
  InvalidArgument,
  NotOnSphere,
  DuplicateFeature,
  DimensionMismatch,
  RankOutOfRange,
  NormBudgetExceeded,
  OddWidth,
  StartDegreeTooLarge,
  ConvergenceFailure,
  NumericalDivergence,
  Config,
  Io,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it to a process exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Exit statuses of the gdp_sphere tool: 0 success, 2 configuration error,
/// 3 numerical divergence, 4 IO error.
int exit_code_for(Errc code) noexcept;

}  // namespace gdp
