#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace romassim::harness {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartLabels {
  std::string title;
  std::string x;
  std::string y;
};

/// Static SVG line chart. With log_y non-positive values are skipped.
void write_line_chart(const std::filesystem::path& path, const ChartLabels& labels, const std::vector<Series>& series,
                      bool log_y);

/// Grouped bars: one group per category, one bar per series (series.y[i]
/// belongs to categories[i]; series.x is ignored).
void write_bar_chart(const std::filesystem::path& path, const ChartLabels& labels,
                     const std::vector<std::string>& categories, const std::vector<Series>& series, bool log_y);

}  // namespace romassim::harness
