#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace gdp::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal log-log line chart. Non-positive points are skipped.
std::string loglog_plot(const std::vector<Series>& series, const std::string& title,
                        const std::string& x_label, const std::string& y_label);

/// Throws Errc::Io on write failure.
void write_loglog_plot(const std::filesystem::path& path, const std::vector<Series>& series,
                       const std::string& title, const std::string& x_label,
                       const std::string& y_label);

}  // namespace gdp::svg
