#include "gdp/error.hpp"

namespace gdp {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NotOnSphere: return "NotOnSphere";
    case Errc::DuplicateFeature: return "DuplicateFeature";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::RankOutOfRange: return "RankOutOfRange";
    case Errc::NormBudgetExceeded: return "NormBudgetExceeded";
    case Errc::OddWidth: return "OddWidth";
    case Errc::StartDegreeTooLarge: return "StartDegreeTooLarge";
    case Errc::ConvergenceFailure: return "ConvergenceFailure";
    case Errc::NumericalDivergence: return "NumericalDivergence";
    case Errc::Config: return "ConfigError";
    case Errc::Io: return "IoError";
  }
  return "Unknown";
}

int exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::NumericalDivergence:
    case Errc::ConvergenceFailure:
      return 3;
    case Errc::Io:
      return 4;
    default:
      return 2;
  }
}

}  // namespace gdp
