#include "gdp/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "gdp/emit.hpp"
#include "gdp/error.hpp"

namespace gdp::svg {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string loglog_plot(const std::vector<Series>& series, const std::string& title,
                        const std::string& x_label, const std::string& y_label) {
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (s.x[i] <= 0 || s.y[i] <= 0) continue;
      x_lo = std::min(x_lo, std::log10(s.x[i]));
      x_hi = std::max(x_hi, std::log10(s.x[i]));
      y_lo = std::min(y_lo, std::log10(s.y[i]));
      y_hi = std::max(y_hi, std::log10(s.y[i]));
    }
  }
  if (!std::isfinite(x_lo)) x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  if (x_hi - x_lo < 1e-12) x_lo -= 0.5, x_hi += 0.5;
  if (y_hi - y_lo < 1e-12) y_lo -= 0.5, y_hi += 0.5;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double lx) { return kLeft + pw * (lx - x_lo) / (x_hi - x_lo); };
  auto py = [&](double ly) { return kTop + ph * (1.0 - (ly - y_lo) / (y_hi - y_lo)); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(title) << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = static_cast<int>(std::ceil(x_lo)); k <= static_cast<int>(std::floor(x_hi)); ++k) {
    os << "<text x=\"" << px(k) << "\" y=\"" << kTop + ph + 18
       << "\" text-anchor=\"middle\">1e" << k << "</text>\n";
  }
  for (int k = static_cast<int>(std::ceil(y_lo)); k <= static_cast<int>(std::floor(y_hi)); ++k) {
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(k) + 4 << "\" text-anchor=\"end\">1e" << k
       << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10
     << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << kTop + ph / 2 << ")\">" << escape(y_label) << "</text>\n";
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kColors[si % std::size(kColors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (s.x[i] <= 0 || s.y[i] <= 0) continue;
      os << emit::format_double(px(std::log10(s.x[i]))) << ','
         << emit::format_double(py(std::log10(s.y[i]))) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 16 + 16 * si << "\" fill=\"" << color
       << "\">" << escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_loglog_plot(const std::filesystem::path& path, const std::vector<Series>& series,
                       const std::string& title, const std::string& x_label,
                       const std::string& y_label) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  os << loglog_plot(series, title, x_label, y_label);
  if (!os) throw Error(Errc::Io, "write to " + path.string() + " failed");
}

}  // namespace gdp::svg
