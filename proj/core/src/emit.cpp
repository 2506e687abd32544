#include "gdp/emit.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gdp/error.hpp"

namespace gdp::emit {

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return csv_escape(v);
        } else {
          return std::to_string(v);
        }
      },
      c);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    throw Error(Errc::InvalidArgument, "row has " + std::to_string(row.size()) +
                                           " cells, table has " +
                                           std::to_string(columns_.size()) + " columns");
  }
  rows_.push_back(std::move(row));
}

void Table::write_csv(std::ostream& os) const {
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    os << (j ? "," : "") << csv_escape(columns_[j]);
  }
  os << '\n';
  for (const auto& row : rows_) {
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << csv_cell(row[j]);
    os << '\n';
  }
}

void Table::write_json(std::ostream& os) const {
  // Doubles go through format_double so JSON and CSV agree digit for digit.
  os << '[';
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    os << (i ? ",\n " : "\n ") << '{';
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      os << (j ? ", " : "") << nlohmann::json(columns_[j]).dump() << ": ";
      std::visit(
          [&os](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              if (std::isfinite(v)) {
                os << format_double(v);
              } else {
                os << "null";
              }
            } else {
              os << nlohmann::json(v).dump();
            }
          },
          rows_[i][j]);
    }
    os << '}';
  }
  os << (rows_.empty() ? "]\n" : "\n]\n");
}

void write(const Table& table, const std::filesystem::path& path, Format format) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  if (format == Format::Csv) {
    table.write_csv(os);
  } else {
    table.write_json(os);
  }
  os.flush();
  if (!os) throw Error(Errc::Io, "write to " + path.string() + " failed");
}

}  // namespace gdp::emit
