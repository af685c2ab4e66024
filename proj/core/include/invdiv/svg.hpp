#pragma once

#include <string>
#include <vector>

namespace invdiv {

// Static SVG documents with fixed-precision coordinates, so equal inputs
// give equal bytes.

struct BoxSeries {
  std::string label;
  std::vector<double> values;  // non-finite entries are skipped
};

// One box per series: quartiles, median line, whiskers to the most extreme
// values within 1.5 IQR, and outliers as dots. A dashed line marks y = 0.
std::string box_plot_svg(const std::vector<BoxSeries>& series, const std::string& title,
                         const std::string& y_label);

struct HeatmapCell {
  std::string text;
  int category = 0;  // index into the legend
};

struct HeatmapLegend {
  std::string label;
  std::string color;  // any SVG color
};

// cells[r][c] drawn as a grid under the given row and column labels.
std::string heatmap_svg(const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels,
                        const std::vector<std::vector<HeatmapCell>>& cells,
                        const std::vector<HeatmapLegend>& legend, const std::string& title);

// Escapes &, <, >, " and ' for text and attribute content.
std::string xml_escape(const std::string& s);

}  // namespace invdiv
