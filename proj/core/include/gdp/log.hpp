#pragma once

#include <functional>
#include <string>

namespace gdp {

using WarningHandler = std::function<void(const std::string&)>;

/// Installs the sink for non-fatal diagnostics; returns the previous one.
/// The default writes "warning: <msg>" to stderr.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);

}  // namespace gdp
