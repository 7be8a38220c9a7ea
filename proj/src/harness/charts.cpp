#include "romassim/harness/charts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "romassim/error.hpp"

namespace romassim::harness {

namespace {

constexpr double kWidth = 720, kHeight = 440, kLeft = 80, kRight = 170, kTop = 40, kBottom = 60;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;

  double map(double v, double a, double b) const {
    const double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
    return a + t * (b - a);
  }
};

Axis make_axis(double lo, double hi, bool log) {
  Axis ax;
  ax.log = log;
  if (!std::isfinite(lo) || !std::isfinite(hi)) lo = hi = log ? 1.0 : 0.0;
  if (log) {
    ax.lo = std::floor(std::log10(lo));
    ax.hi = std::ceil(std::log10(hi));
    if (ax.hi <= ax.lo) ax.hi = ax.lo + 1;
  } else {
    const double pad = hi > lo ? 0.05 * (hi - lo) : std::max(1e-12, 0.05 * std::abs(lo) + 1e-12);
    ax.lo = lo - pad;
    ax.hi = hi + pad;
  }
  return ax;
}

void header(std::ostringstream& s, const ChartLabels& labels) {
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(labels.title) << "</text>\n";
  s << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
    << escape(labels.x) << "</text>\n";
  s << "<text transform=\"translate(18," << (kTop + kHeight - kBottom) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(labels.y) << "</text>\n";
  s << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight << "\" height=\""
    << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";
}

void y_ticks(std::ostringstream& s, const Axis& ay) {
  const double y0 = kHeight - kBottom, y1 = kTop;
  if (ay.log) {
    for (double e = ay.lo; e <= ay.hi + 1e-9; e += 1.0) {
      const double y = ay.map(std::pow(10.0, e), y0, y1);
      s << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << num(y) << "\" x2=\"" << kWidth - kRight << "\" y2=\"" << num(y)
        << "\" stroke=\"#ddd\"/>\n";
      s << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">1e" << num(e) << "</text>\n";
    }
  } else {
    for (int k = 0; k <= 5; ++k) {
      const double v = ay.lo + (ay.hi - ay.lo) * k / 5.0;
      const double y = ay.map(v, y0, y1);
      s << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << num(y) << "\" x2=\"" << kWidth - kRight << "\" y2=\"" << num(y)
        << "\" stroke=\"#ddd\"/>\n";
      s << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
    }
  }
}

void legend(std::ostringstream& s, const std::vector<Series>& series) {
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double y = kTop + 10 + 18.0 * static_cast<double>(k);
    s << "<rect x=\"" << kWidth - kRight + 12 << "\" y=\"" << num(y - 9) << "\" width=\"12\" height=\"10\" fill=\""
      << kColors[k % 8] << "\"/>\n";
    s << "<text x=\"" << kWidth - kRight + 30 << "\" y=\"" << num(y) << "\">" << escape(series[k].name) << "</text>\n";
  }
}

void save(const std::filesystem::path& path, const std::ostringstream& s) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << s.str();
}

}  // namespace

void write_line_chart(const std::filesystem::path& path, const ChartLabels& labels, const std::vector<Series>& series,
                      bool log_y) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& sr : series)
    for (std::size_t i = 0; i < std::min(sr.x.size(), sr.y.size()); ++i) {
      if (log_y && !(sr.y[i] > 0.0)) continue;
      xlo = std::min(xlo, sr.x[i]);
      xhi = std::max(xhi, sr.x[i]);
      ylo = std::min(ylo, sr.y[i]);
      yhi = std::max(yhi, sr.y[i]);
    }
  const Axis ax = make_axis(xlo, xhi, false), ay = make_axis(ylo, yhi, log_y);
  std::ostringstream s;
  header(s, labels);
  y_ticks(s, ay);
  for (int k = 0; k <= 5; ++k) {
    const double v = ax.lo + (ax.hi - ax.lo) * k / 5.0;
    s << "<text x=\"" << num(ax.map(v, kLeft, kWidth - kRight)) << "\" y=\"" << kHeight - kBottom + 16
      << "\" text-anchor=\"middle\">" << num(v) << "</text>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    std::string pts;
    const auto& sr = series[k];
    for (std::size_t i = 0; i < std::min(sr.x.size(), sr.y.size()); ++i) {
      if (log_y && !(sr.y[i] > 0.0)) continue;
      pts += num(ax.map(sr.x[i], kLeft, kWidth - kRight)) + "," + num(ay.map(sr.y[i], kHeight - kBottom, kTop)) + " ";
    }
    s << "<polyline fill=\"none\" stroke-width=\"1.8\" stroke=\"" << kColors[k % 8] << "\" points=\"" << pts << "\"/>\n";
  }
  legend(s, series);
  s << "</svg>\n";
  save(path, s);
}

void write_bar_chart(const std::filesystem::path& path, const ChartLabels& labels,
                     const std::vector<std::string>& categories, const std::vector<Series>& series, bool log_y) {
  double ylo = std::numeric_limits<double>::infinity(), yhi = -ylo;
  for (const auto& sr : series)
    for (double v : sr.y) {
      if (log_y && !(v > 0.0)) continue;
      ylo = std::min(ylo, v);
      yhi = std::max(yhi, v);
    }
  if (!log_y) ylo = std::min(ylo, 0.0);
  const Axis ay = make_axis(ylo, yhi, log_y);
  std::ostringstream s;
  header(s, labels);
  y_ticks(s, ay);
  const double plot_w = kWidth - kLeft - kRight;
  const double group_w = plot_w / static_cast<double>(std::max<std::size_t>(1, categories.size()));
  const double bar_w = 0.8 * group_w / static_cast<double>(std::max<std::size_t>(1, series.size()));
  const double base = log_y ? kHeight - kBottom : ay.map(0.0, kHeight - kBottom, kTop);
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double gx = kLeft + group_w * static_cast<double>(c);
    s << "<text x=\"" << num(gx + group_w / 2) << "\" y=\"" << kHeight - kBottom + 16 << "\" text-anchor=\"middle\">"
      << escape(categories[c]) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
      if (c >= series[k].y.size()) continue;
      const double v = series[k].y[c];
      if (log_y && !(v > 0.0)) continue;
      const double top = ay.map(v, kHeight - kBottom, kTop);
      const double x = gx + 0.1 * group_w + bar_w * static_cast<double>(k);
      s << "<rect x=\"" << num(x) << "\" y=\"" << num(std::min(top, base)) << "\" width=\"" << num(bar_w)
        << "\" height=\"" << num(std::abs(base - top)) << "\" fill=\"" << kColors[k % 8] << "\"/>\n";
    }
  }
  legend(s, series);
  s << "</svg>\n";
  save(path, s);
}

}  // namespace romassim::harness
