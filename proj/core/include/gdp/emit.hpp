#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace gdp::emit {

using Cell = std::variant<std::int64_t, std::uint64_t, double, bool, std::string>;

enum class Format { Csv, Json };

/// Record table with a fixed column order. Doubles are written with 12
/// significant digits; JSON output is an array of flat objects.
class Table {
 public:
  explicit Table(std::vector<std::string> columns);

  /// Throws Errc::InvalidArgument when the row width differs from the header.
  void add_row(std::vector<Cell> row);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }
  bool empty() const noexcept { return rows_.empty(); }

  void write_csv(std::ostream& os) const;
  void write_json(std::ostream& os) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

/// "%.12g" formatting used by every emitter.
std::string format_double(double v);

/// Writes the table to `path`; throws Errc::Io with the path on failure.
void write(const Table& table, const std::filesystem::path& path, Format format);

}  // namespace gdp::emit
