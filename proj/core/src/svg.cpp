#include "invdiv/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "invdiv/errors.hpp"

namespace invdiv {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

std::string fx(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string header(double width, double height) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fx(width) + "\" height=\"" +
         fx(height) + "\" viewBox=\"0 0 " + fx(width) + " " + fx(height) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n"
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle",
                 const std::string& extra = "") {
  return "<text x=\"" + fx(x) + "\" y=\"" + fx(y) + "\" text-anchor=\"" + anchor + "\"" + extra +
         ">" + xml_escape(s) + "</text>\n";
}

std::string line(double x1, double y1, double x2, double y2, const std::string& extra = "") {
  return "<line x1=\"" + fx(x1) + "\" y1=\"" + fx(y1) + "\" x2=\"" + fx(x2) + "\" y2=\"" +
         fx(y2) + "\" stroke=\"black\"" + extra + "/>\n";
}

// Linear-interpolated quantile of sorted data.
double quantile(const std::vector<double>& v, double p) {
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (pos - static_cast<double>(i)) * (v[i + 1] - v[i]);
}

}  // namespace

std::string box_plot_svg(const std::vector<BoxSeries>& series, const std::string& title,
                         const std::string& y_label) {
  if (series.empty()) throw DomainError("box_plot_svg: no series");
  std::vector<std::vector<double>> sorted;
  double lo = 0.0, hi = 0.0;
  for (const auto& s : series) {
    std::vector<double> v;
    for (double x : s.values)
      if (std::isfinite(x)) v.push_back(x);
    std::sort(v.begin(), v.end());
    if (!v.empty()) {
      lo = std::min(lo, v.front());
      hi = std::max(hi, v.back());
    }
    sorted.push_back(std::move(v));
  }
  if (hi - lo <= 0.0) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  const double left = 80.0, top = 50.0, plot_h = 320.0, slot = 110.0;
  const double plot_w = slot * static_cast<double>(series.size());
  const double width = left + plot_w + 30.0, height = top + plot_h + 70.0;
  auto ymap = [&](double y) { return top + plot_h * (hi - y) / (hi - lo); };

  std::string out = header(width, height);
  out += text(width / 2.0, 25.0, title, "middle", " font-size=\"15\"");
  out += text(20.0, top + plot_h / 2.0, y_label, "middle",
              " transform=\"rotate(-90 20.00 " + fx(top + plot_h / 2.0) + ")\"");
  out += "<rect x=\"" + fx(left) + "\" y=\"" + fx(top) + "\" width=\"" + fx(plot_w) +
         "\" height=\"" + fx(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    out += line(left - 5.0, ymap(v), left, ymap(v));
    out += text(left - 8.0, ymap(v) + 4.0, tick_label(v), "end");
  }
  if (lo < 0.0 && hi > 0.0)
    out += line(left, ymap(0.0), left + plot_w, ymap(0.0),
                " stroke-dasharray=\"4 3\" stroke-opacity=\"0.6\"");

  for (std::size_t i = 0; i < series.size(); ++i) {
    const double cx = left + slot * (static_cast<double>(i) + 0.5);
    out += text(cx, top + plot_h + 20.0, series[i].label);
    const auto& v = sorted[i];
    out += text(cx, top + plot_h + 36.0, "n=" + std::to_string(v.size()), "middle",
                " font-size=\"10\"");
    if (v.empty()) continue;
    const double q1 = quantile(v, 0.25), med = quantile(v, 0.5), q3 = quantile(v, 0.75);
    const double iqr = q3 - q1;
    double wlo = q1, whi = q3;
    for (double x : v)
      if (x >= q1 - 1.5 * iqr) { wlo = x; break; }
    for (auto it = v.rbegin(); it != v.rend(); ++it)
      if (*it <= q3 + 1.5 * iqr) { whi = *it; break; }
    const double half = 25.0;
    out += line(cx, ymap(whi), cx, ymap(q3));
    out += line(cx, ymap(q1), cx, ymap(wlo));
    out += line(cx - half / 2.0, ymap(whi), cx + half / 2.0, ymap(whi));
    out += line(cx - half / 2.0, ymap(wlo), cx + half / 2.0, ymap(wlo));
    out += "<rect x=\"" + fx(cx - half) + "\" y=\"" + fx(ymap(q3)) + "\" width=\"" +
           fx(2.0 * half) + "\" height=\"" + fx(std::max(ymap(q1) - ymap(q3), 0.5)) +
           "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
    out += line(cx - half, ymap(med), cx + half, ymap(med), " stroke-width=\"2\"");
    for (double x : v)
      if (x < wlo || x > whi)
        out += "<circle cx=\"" + fx(cx) + "\" cy=\"" + fx(ymap(x)) +
               "\" r=\"2\" fill=\"none\" stroke=\"#555555\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string heatmap_svg(const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels,
                        const std::vector<std::vector<HeatmapCell>>& cells,
                        const std::vector<HeatmapLegend>& legend, const std::string& title) {
  if (cells.size() != row_labels.size()) throw DimensionError("heatmap_svg: row count mismatch");
  for (const auto& r : cells)
    if (r.size() != col_labels.size()) throw DimensionError("heatmap_svg: column count mismatch");

  const double left = 170.0, top = 80.0, cw = 110.0, ch = 28.0;
  const double width = left + cw * static_cast<double>(col_labels.size()) + 20.0;
  const double height = top + ch * static_cast<double>(row_labels.size()) + 50.0;
  std::string out = header(width, height);
  out += text(width / 2.0, 25.0, title, "middle", " font-size=\"15\"");
  for (std::size_t c = 0; c < col_labels.size(); ++c)
    out += text(left + cw * (static_cast<double>(c) + 0.5), top - 10.0, col_labels[c]);
  for (std::size_t r = 0; r < row_labels.size(); ++r) {
    const double y = top + ch * static_cast<double>(r);
    out += text(left - 8.0, y + ch / 2.0 + 4.0, row_labels[r], "end");
    for (std::size_t c = 0; c < col_labels.size(); ++c) {
      const HeatmapCell& cell = cells[r][c];
      const std::string color =
          cell.category >= 0 && static_cast<std::size_t>(cell.category) < legend.size()
              ? legend[static_cast<std::size_t>(cell.category)].color
              : "white";
      const double x = left + cw * static_cast<double>(c);
      out += "<rect x=\"" + fx(x) + "\" y=\"" + fx(y) + "\" width=\"" + fx(cw) + "\" height=\"" +
             fx(ch) + "\" fill=\"" + xml_escape(color) + "\" stroke=\"white\"/>\n";
      out += text(x + cw / 2.0, y + ch / 2.0 + 4.0, cell.text, "middle", " font-size=\"11\"");
    }
  }
  double lx = left;
  const double ly = top + ch * static_cast<double>(row_labels.size()) + 25.0;
  for (const auto& item : legend) {
    out += "<rect x=\"" + fx(lx) + "\" y=\"" + fx(ly - 10.0) + "\" width=\"12\" height=\"12\" fill=\"" +
           xml_escape(item.color) + "\"/>\n";
    out += text(lx + 16.0, ly, item.label, "start");
    lx += 30.0 + 7.0 * static_cast<double>(item.label.size());
  }
  out += "</svg>\n";
  return out;
}

}  // namespace invdiv
