#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "mmdr/experiments.hpp"
#include "mmdr/grid.hpp"
#include "mmdr/io_util.hpp"

namespace mmdr {

enum class PlotKind { kHeatmap, kLineWithErrorbars, kSpectrum, kHistogram };

/// Rendering instructions shared by all figure styles.  Panel layout 0x0
/// means: choose a near-square grid that fits every panel.
struct PlotSpec {
  PlotKind kind = PlotKind::kHeatmap;
  std::string title;
  std::string x_label, y_label;
  std::string x_axis = "gamma_shared";  ///< heatmap x / curves sweep axis
  std::string y_axis = "gamma_self";    ///< heatmap y
  double color_min = 0.0, color_max = 1.0;
  int panel_rows = 0, panel_cols = 0;
  int bins = 60;
  bool log_x = true;     ///< curves only
  bool x_over_t = true;  ///< curves: plot (axis value / T) instead of the value

  void validate() const {
    if (!std::isfinite(color_min) || !std::isfinite(color_max) ||
        !(color_max > color_min))
      throw InvalidParameterError("color scale bounds must be finite with min < max");
    if (bins < 1) throw InvalidParameterError("histogram needs at least 1 bin");
    if (panel_rows < 0 || panel_cols < 0)
      throw InvalidParameterError("panel layout must be non-negative");
  }
};

namespace detail {

inline std::string fmt2(double v) { return strfmt("%.2f", v); }

/// Short human-readable tick label.
inline std::string fmtg(double v) { return strfmt("%.4g", v); }

inline std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

/// Piecewise-linear approximation of the viridis colormap.
inline std::string viridis(double t) {
  static const int anchors[9][3] = {{68, 1, 84},    {72, 40, 120},
                                    {62, 74, 137},  {49, 104, 142},
                                    {38, 130, 142}, {31, 158, 137},
                                    {53, 183, 121}, {109, 205, 89},
                                    {253, 231, 37}};
  t = std::min(std::max(t, 0.0), 1.0);
  const double pos = t * 8.0;
  const int lo = std::min(static_cast<int>(pos), 7);
  const double f = pos - lo;
  int rgb[3];
  for (int ch = 0; ch < 3; ++ch)
    rgb[ch] = static_cast<int>(
        std::lround(anchors[lo][ch] + f * (anchors[lo + 1][ch] - anchors[lo][ch])));
  return strfmt("#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
}

inline std::string method_color(const std::string& method) {
  if (method == "pca") return "#1f77b4";
  if (method == "pls") return "#2ca02c";
  if (method == "cca") return "#d62728";
  if (method == "rcca") return "#9467bd";
  if (method == "noise") return "#7f7f7f";
  return "#8c564b";
}

/// Minimal deterministic SVG assembler; every coordinate goes through %.2f
/// so identical inputs produce identical bytes.
class SvgCanvas {
 public:
  SvgCanvas(double width, double height) : width_(width), height_(height) {
    body_ += "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" "
             "patternUnits=\"userSpaceOnUse\"><rect width=\"6\" height=\"6\" "
             "fill=\"#e8e8e8\"/><path d=\"M0,6 L6,0\" stroke=\"#888888\" "
             "stroke-width=\"1\"/></pattern></defs>\n";
    body_ += "<rect x=\"0\" y=\"0\" width=\"" + fmt2(width) + "\" height=\"" +
             fmt2(height) + "\" fill=\"#ffffff\"/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& cls = "", const std::string& stroke = "") {
    body_ += "<rect x=\"" + fmt2(x) + "\" y=\"" + fmt2(y) + "\" width=\"" +
             fmt2(w) + "\" height=\"" + fmt2(h) + "\" fill=\"" + fill + "\"";
    if (!cls.empty()) body_ += " class=\"" + cls + "\"";
    if (!stroke.empty()) body_ += " stroke=\"" + stroke + "\" stroke-width=\"0.5\"";
    body_ += "/>\n";
  }

  void line(double x1, double y1, double x2, double y2,
            const std::string& stroke, double width = 1.0) {
    body_ += "<line x1=\"" + fmt2(x1) + "\" y1=\"" + fmt2(y1) + "\" x2=\"" +
             fmt2(x2) + "\" y2=\"" + fmt2(y2) + "\" stroke=\"" + stroke +
             "\" stroke-width=\"" + fmt2(width) + "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts,
                const std::string& stroke, double width = 1.5) {
    if (pts.size() < 2) return;
    body_ += "<polyline fill=\"none\" stroke=\"" + stroke +
             "\" stroke-width=\"" + fmt2(width) + "\" points=\"";
    for (size_t i = 0; i < pts.size(); ++i) {
      if (i) body_ += ' ';
      body_ += fmt2(pts[i].first) + "," + fmt2(pts[i].second);
    }
    body_ += "\"/>\n";
  }

  void circle(double x, double y, double r, const std::string& fill) {
    body_ += "<circle cx=\"" + fmt2(x) + "\" cy=\"" + fmt2(y) + "\" r=\"" +
             fmt2(r) + "\" fill=\"" + fill + "\"/>\n";
  }

  void text(double x, double y, const std::string& s, double size = 11.0,
            const std::string& anchor = "start",
            const std::string& fill = "#000000",
            const std::string& cls = "") {
    body_ += "<text x=\"" + fmt2(x) + "\" y=\"" + fmt2(y) +
             "\" font-family=\"Helvetica,Arial,sans-serif\" font-size=\"" +
             fmt2(size) + "\" text-anchor=\"" + anchor + "\" fill=\"" + fill +
             "\"";
    if (!cls.empty()) body_ += " class=\"" + cls + "\"";
    body_ += ">" + xml_escape(s) + "</text>\n";
  }

  std::string finish() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt2(width_) +
           "\" height=\"" + fmt2(height_) + "\" viewBox=\"0 0 " + fmt2(width_) +
           " " + fmt2(height_) + "\">\n" + body_ + "</svg>\n";
  }

 private:
  double width_, height_;
  std::string body_;
};

/// Evenly spaced "nice" ticks covering [lo, hi].
inline std::vector<double> linear_ticks(double lo, double hi, int target = 5) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  std::vector<double> ticks;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step)
    ticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return ticks;
}

/// 1-2-5 ticks per decade inside [lo, hi] for log axes.
inline std::vector<double> log_ticks(double lo, double hi) {
  std::vector<double> ticks;
  const int d0 = static_cast<int>(std::floor(std::log10(lo))) - 1;
  const int d1 = static_cast<int>(std::ceil(std::log10(hi))) + 1;
  for (int d = d0; d <= d1; ++d)
    for (double m : {1.0, 2.0, 5.0}) {
      const double v = m * std::pow(10.0, d);
      if (v >= lo * 0.999 && v <= hi * 1.001) ticks.push_back(v);
    }
  return ticks;
}

inline double cell_axis_value(const CellStat& c, const std::string& axis) {
  if (axis == "t") return c.t;
  if (axis == "k") return c.k;
  if (axis == "m_self") return c.m_self;
  if (axis == "gamma_self") return c.gamma_self;
  if (axis == "gamma_shared") return c.gamma_shared;
  throw InvalidParameterError(strfmt("unknown plot axis '%s'", axis.c_str()));
}

inline const AxisDef* find_axis(const GridResult& grid, const std::string& name) {
  for (const AxisDef& a : grid.axes)
    if (a.name == name) return &a;
  return nullptr;
}

}  // namespace detail

/// One colored panel per (method, k, T, m_self) plus chance-level panels per
/// distinct (T, k); cells with no completed trial are hatched, values above
/// the color ceiling get an overflow marker.
inline void render_heatmap(const GridResult& grid, const PlotSpec& spec,
                           const std::filesystem::path& path) {
  using detail::fmt2;
  spec.validate();
  if (grid.cells.empty()) throw InvalidParameterError("nothing to plot");
  const AxisDef* ax = detail::find_axis(grid, spec.x_axis);
  const AxisDef* ay = detail::find_axis(grid, spec.y_axis);
  if (!ax || !ay)
    throw InvalidParameterError(strfmt("grid has no axes named '%s' and '%s'",
                                       spec.x_axis.c_str(), spec.y_axis.c_str()));
  const auto& xv = ax->values;
  const auto& yv = ay->values;
  auto index_of = [](const std::vector<double>& vals, double v) {
    for (size_t i = 0; i < vals.size(); ++i)
      if (vals[i] == v) return static_cast<int>(i);
    return -1;
  };

  // Panels keyed by (method, k, t, m_self), in sorted-cell order; chance
  // panels appended per distinct (k, t).
  using PanelKey = std::tuple<std::string, int, int, int>;
  std::vector<PanelKey> panel_order;
  std::map<PanelKey, std::vector<const CellStat*>> panels;
  bool noise_only = true;
  for (const CellStat& c : grid.cells) {
    PanelKey key{c.method, c.k, c.t, c.m_self};
    if (!panels.count(key)) panel_order.push_back(key);
    panels[key].push_back(&c);
    if (c.method != "noise") noise_only = false;
  }
  std::vector<std::pair<PanelKey, bool>> layout_panels;  // key, is_floor_panel
  for (const auto& key : panel_order) layout_panels.push_back({key, false});
  if (!noise_only) {
    std::set<std::pair<int, int>> floor_keys;  // (k, t)
    for (const auto& key : panel_order) {
      const auto [m, k, t, ms] = key;
      if (floor_keys.insert({k, t}).second)
        layout_panels.push_back({PanelKey{"noise", k, t, ms}, true});
    }
  }

  const int n_panels = static_cast<int>(layout_panels.size());
  int cols = spec.panel_cols, rows = spec.panel_rows;
  if (cols <= 0 && rows <= 0) {
    cols = n_panels <= 3 ? n_panels : (n_panels + 1) / 2;
    rows = (n_panels + cols - 1) / cols;
  } else if (cols <= 0) {
    cols = (n_panels + rows - 1) / rows;
  } else if (rows <= 0) {
    rows = (n_panels + cols - 1) / cols;
  }
  if (rows * cols < n_panels)
    throw InvalidParameterError(
        strfmt("panel layout %dx%d cannot hold %d panels", rows, cols, n_panels));

  const double cell_w = std::max(18.0, 180.0 / static_cast<double>(xv.size()));
  const double cell_h = std::max(18.0, 180.0 / static_cast<double>(yv.size()));
  const double pw = cell_w * static_cast<double>(xv.size());
  const double ph = cell_h * static_cast<double>(yv.size());
  const double margin_l = 70.0, margin_t = 56.0, gap_x = 56.0, gap_y = 64.0;
  const double bar_w = 16.0, bar_gap = 34.0;
  const double width = margin_l + cols * (pw + gap_x) + bar_w + bar_gap + 40.0;
  const double height = margin_t + rows * (ph + gap_y) + 24.0;

  detail::SvgCanvas svg(width, height);
  if (!spec.title.empty())
    svg.text(width / 2.0, 22.0, spec.title, 15.0, "middle");

  for (int pi = 0; pi < n_panels; ++pi) {
    const auto& [key, is_floor] = layout_panels[static_cast<size_t>(pi)];
    const auto& [method, kk, tt, ms] = key;
    const double px = margin_l + (pi % cols) * (pw + gap_x);
    const double py = margin_t + (pi / cols) * (ph + gap_y);

    std::string label = method + strfmt(" (k=%d", kk);
    const AxisDef* at = detail::find_axis(grid, "t");
    if (at && at->values.size() > 1) label += strfmt(", T=%d", tt);
    label += ")";
    svg.text(px + pw / 2.0, py - 8.0, label, 12.0, "middle");

    // Source cells for this panel: its own for method panels, the matching
    // (k, T) cells of any method for the chance panel (they share the floor).
    std::vector<const CellStat*> source;
    if (is_floor) {
      for (const CellStat& c : grid.cells)
        if (c.k == kk && c.t == tt) source.push_back(&c);
    } else {
      source = panels[key];
    }

    std::vector<std::vector<const CellStat*>> at_pos(xv.size() * yv.size());
    for (const CellStat* c : source) {
      const int xi = index_of(xv, detail::cell_axis_value(*c, spec.x_axis));
      const int yi = index_of(yv, detail::cell_axis_value(*c, spec.y_axis));
      if (xi >= 0 && yi >= 0)
        at_pos[static_cast<size_t>(yi) * xv.size() + static_cast<size_t>(xi)]
            .push_back(c);
    }
    for (size_t yi = 0; yi < yv.size(); ++yi)
      for (size_t xi = 0; xi < xv.size(); ++xi) {
        const auto& cs = at_pos[yi * xv.size() + xi];
        if (cs.empty()) continue;
        // y axis grows upward: last row at the top
        const double cx = px + static_cast<double>(xi) * cell_w;
        const double cy = py + ph - static_cast<double>(yi + 1) * cell_h;
        const std::string cls = is_floor ? "floorcell" : "cell";
        double value = 0.0;
        int n_ok = 0;
        for (const CellStat* c : cs) {
          if (c->n_ok > 0) {
            value += is_floor ? c->mean_rc0 : c->mean_rc_prime;
            ++n_ok;
          }
        }
        if (n_ok == 0) {
          svg.rect(cx, cy, cell_w, cell_h, "url(#hatch)", cls + " degenerate",
                   "#ffffff");
          continue;
        }
        value /= n_ok;
        const double t01 =
            (value - spec.color_min) / (spec.color_max - spec.color_min);
        svg.rect(cx, cy, cell_w, cell_h, detail::viridis(t01), cls, "#ffffff");
        if (value > spec.color_max)
          svg.text(cx + cell_w / 2.0, cy + cell_h / 2.0 + 4.0, "+", 12.0,
                   "middle", "#ffffff", "overflow");
      }

    for (size_t xi = 0; xi < xv.size(); ++xi)
      svg.text(px + (static_cast<double>(xi) + 0.5) * cell_w, py + ph + 14.0,
               detail::fmtg(xv[xi]), 9.0, "middle");
    for (size_t yi = 0; yi < yv.size(); ++yi)
      svg.text(px - 6.0, py + ph - (static_cast<double>(yi) + 0.5) * cell_h + 3.0,
               detail::fmtg(yv[yi]), 9.0, "end");
    svg.text(px + pw / 2.0, py + ph + 30.0,
             spec.x_label.empty() ? spec.x_axis : spec.x_label, 11.0, "middle");
    svg.text(px - 48.0, py + ph / 2.0,
             spec.y_label.empty() ? spec.y_axis : spec.y_label, 11.0, "middle");
  }

  // Shared color bar with numeric ticks.
  const double bx = margin_l + cols * (pw + gap_x) + bar_gap - gap_x + 20.0;
  const double by = margin_t, bh = ph;
  const int steps = 32;
  for (int i = 0; i < steps; ++i) {
    const double f0 = static_cast<double>(i) / steps;
    const double f1 = static_cast<double>(i + 1) / steps;
    svg.rect(bx, by + bh * (1.0 - f1), bar_w, bh * (f1 - f0) + 0.5,
             detail::viridis(f0));
  }
  for (int i = 0; i <= 4; ++i) {
    const double f = i / 4.0;
    const double v = spec.color_min + f * (spec.color_max - spec.color_min);
    svg.text(bx + bar_w + 4.0, by + bh * (1.0 - f) + 4.0, detail::fmtg(v), 9.0);
  }

  write_file_atomic(path, svg.finish());
}

/// One polyline per (method and fixed coordinates) against the sweep axis,
/// with symmetric one-standard-deviation error bars and a legend.
inline void render_curves(const GridResult& grid, const PlotSpec& spec,
                          const std::filesystem::path& path) {
  spec.validate();
  struct Point {
    double x, y, err;
  };
  // Curve identity: everything that is not the sweep axis.
  using CurveKey = std::tuple<std::string, int, int, int, double, double>;
  std::vector<CurveKey> order;
  std::map<CurveKey, std::vector<Point>> curves;
  std::set<int> ts, ks;
  for (const CellStat& c : grid.cells) {
    ts.insert(c.t);
    ks.insert(c.k);
  }
  const bool many_t = ts.size() > 1 && spec.x_axis != "t";
  const bool many_k = ks.size() > 1 && spec.x_axis != "k";
  for (const CellStat& c : grid.cells) {
    if (c.n_ok == 0) continue;
    double x = detail::cell_axis_value(c, spec.x_axis);
    if (spec.x_over_t) x /= static_cast<double>(c.t);
    CurveKey key{c.method, spec.x_axis == "t" ? 0 : c.t,
                 spec.x_axis == "k" ? 0 : c.k,
                 spec.x_axis == "m_self" ? 0 : c.m_self, c.gamma_self,
                 c.gamma_shared};
    if (!curves.count(key)) order.push_back(key);
    curves[key].push_back({x, c.mean_rc_prime, c.std_rc_prime});
  }
  if (curves.empty()) throw InvalidParameterError("nothing to plot");

  double x_lo = 1e300, x_hi = -1e300, y_lo = 0.0, y_hi = -1e300;
  for (auto& [key, pts] : curves) {
    std::sort(pts.begin(), pts.end(),
              [](const Point& a, const Point& b) { return a.x < b.x; });
    for (const Point& p : pts) {
      x_lo = std::min(x_lo, p.x);
      x_hi = std::max(x_hi, p.x);
      y_lo = std::min(y_lo, p.y - p.err);
      y_hi = std::max(y_hi, p.y + p.err);
    }
  }
  if (!(x_hi > x_lo)) {
    x_lo *= 0.9;
    x_hi = x_lo <= 0 ? x_hi + 1.0 : x_hi * 1.1 / 0.9;
  }
  const double y_pad = 0.05 * std::max(y_hi - y_lo, 1e-12);
  y_lo -= y_pad;
  y_hi += y_pad;

  const double margin_l = 64.0, margin_r = 160.0, margin_t = 46.0,
               margin_b = 56.0;
  const double plot_w = 460.0, plot_h = 320.0;
  const double width = margin_l + plot_w + margin_r;
  const double height = margin_t + plot_h + margin_b;
  const bool logx = spec.log_x && x_lo > 0.0;
  auto x_pos = [&](double v) {
    const double f = logx ? (std::log10(v) - std::log10(x_lo)) /
                                (std::log10(x_hi) - std::log10(x_lo))
                          : (v - x_lo) / (x_hi - x_lo);
    return margin_l + f * plot_w;
  };
  auto y_pos = [&](double v) {
    return margin_t + plot_h * (1.0 - (v - y_lo) / (y_hi - y_lo));
  };

  detail::SvgCanvas svg(width, height);
  if (!spec.title.empty())
    svg.text(width / 2.0, 20.0, spec.title, 15.0, "middle");
  svg.rect(margin_l, margin_t, plot_w, plot_h, "none", "", "#000000");

  const auto xticks = logx ? detail::log_ticks(x_lo, x_hi)
                           : detail::linear_ticks(x_lo, x_hi);
  for (double v : xticks) {
    const double x = x_pos(v);
    svg.line(x, margin_t + plot_h, x, margin_t + plot_h + 4.0, "#000000");
    svg.line(x, margin_t, x, margin_t + plot_h, "#eeeeee", 0.5);
    svg.text(x, margin_t + plot_h + 16.0, detail::fmtg(v), 9.0, "middle");
  }
  for (double v : detail::linear_ticks(y_lo, y_hi)) {
    const double y = y_pos(v);
    svg.line(margin_l - 4.0, y, margin_l, y, "#000000");
    svg.line(margin_l, y, margin_l + plot_w, y, "#eeeeee", 0.5);
    svg.text(margin_l - 7.0, y + 3.0, detail::fmtg(v), 9.0, "end");
  }
  svg.text(margin_l + plot_w / 2.0, height - 14.0,
           spec.x_label.empty() ? spec.x_axis : spec.x_label, 12.0, "middle");
  svg.text(16.0, margin_t + plot_h / 2.0,
           spec.y_label.empty() ? "score" : spec.y_label, 12.0, "middle");

  double legend_y = margin_t + 8.0;
  for (const CurveKey& key : order) {
    const auto& [method, t, kdim, ms, gs, gh] = key;
    const auto& pts = curves[key];
    const std::string color = detail::method_color(method);
    std::vector<std::pair<double, double>> line_pts;
    for (const Point& p : pts) {
      const double x = x_pos(p.x), y = y_pos(p.y);
      line_pts.push_back({x, y});
      svg.line(x, y_pos(p.y - p.err), x, y_pos(p.y + p.err), color, 1.0);
      svg.line(x - 3.0, y_pos(p.y - p.err), x + 3.0, y_pos(p.y - p.err), color, 1.0);
      svg.line(x - 3.0, y_pos(p.y + p.err), x + 3.0, y_pos(p.y + p.err), color, 1.0);
      svg.circle(x, y, 2.2, color);
    }
    svg.polyline(line_pts, color);
    std::string label = method;
    if (many_t) label += strfmt(" T=%d", t);
    if (many_k) label += strfmt(" k=%d", kdim);
    const double lx = margin_l + plot_w + 14.0;
    svg.line(lx, legend_y, lx + 18.0, legend_y, color, 2.0);
    svg.text(lx + 24.0, legend_y + 4.0, label, 11.0, "start", "#000000", "legend");
    legend_y += 18.0;
  }

  write_file_atomic(path, svg.finish());
}

/// Descending singular values on a log scale, one series per block.
inline void render_spectrum(const SpectrumResult& result, const PlotSpec& spec,
                            const std::filesystem::path& path) {
  spec.validate();
  struct Series {
    const char* name;
    const Vector* values;
    const char* color;
  };
  const std::vector<Series> series = {{"C_XX", &result.s_xx, "#1f77b4"},
                                      {"C_XY", &result.s_xy, "#d62728"}};
  double y_lo = 1e300, y_hi = -1e300;
  int n_max = 0;
  for (const Series& s : series) {
    n_max = std::max(n_max, static_cast<int>(s.values->size()));
    for (Eigen::Index i = 0; i < s.values->size(); ++i) {
      const double v = (*s.values)[i];
      if (v > 1e-300) {
        y_lo = std::min(y_lo, v);
        y_hi = std::max(y_hi, v);
      }
    }
  }
  if (n_max == 0 || y_hi <= 0.0) throw InvalidParameterError("nothing to plot");
  y_lo = std::min(y_lo, y_hi / 10.0);

  const double margin_l = 70.0, margin_r = 110.0, margin_t = 46.0, margin_b = 52.0;
  const double plot_w = 440.0, plot_h = 300.0;
  const double width = margin_l + plot_w + margin_r;
  const double height = margin_t + plot_h + margin_b;
  auto x_pos = [&](double i) {
    return margin_l + plot_w * (n_max > 1 ? i / (n_max - 1.0) : 0.5);
  };
  auto y_pos = [&](double v) {
    const double f = (std::log10(v) - std::log10(y_lo)) /
                     (std::log10(y_hi) - std::log10(y_lo));
    return margin_t + plot_h * (1.0 - f);
  };

  detail::SvgCanvas svg(width, height);
  if (!spec.title.empty())
    svg.text(width / 2.0, 20.0, spec.title, 15.0, "middle");
  svg.rect(margin_l, margin_t, plot_w, plot_h, "none", "", "#000000");
  for (double v : detail::log_ticks(y_lo, y_hi)) {
    const double y = y_pos(v);
    svg.line(margin_l - 4.0, y, margin_l, y, "#000000");
    svg.line(margin_l, y, margin_l + plot_w, y, "#eeeeee", 0.5);
    svg.text(margin_l - 7.0, y + 3.0, strfmt("%.3g", v), 9.0, "end");
  }
  for (double v : detail::linear_ticks(1.0, n_max)) {
    if (v < 1.0 || v != std::floor(v)) continue;
    const double x = x_pos(v - 1.0);
    svg.line(x, margin_t + plot_h, x, margin_t + plot_h + 4.0, "#000000");
    svg.text(x, margin_t + plot_h + 16.0, strfmt("%.0f", v), 9.0, "middle");
  }
  svg.text(margin_l + plot_w / 2.0, height - 12.0,
           spec.x_label.empty() ? "singular value order" : spec.x_label, 12.0,
           "middle");
  svg.text(18.0, margin_t + plot_h / 2.0,
           spec.y_label.empty() ? "singular value" : spec.y_label, 12.0,
           "middle");

  double legend_y = margin_t + 8.0;
  for (const Series& s : series) {
    std::vector<std::pair<double, double>> pts;
    for (Eigen::Index i = 0; i < s.values->size(); ++i) {
      const double v = (*s.values)[i];
      if (v <= 1e-300) continue;
      pts.push_back({x_pos(static_cast<double>(i)), y_pos(v)});
      svg.circle(pts.back().first, pts.back().second, 2.0, s.color);
    }
    svg.polyline(pts, s.color, 1.2);
    const double lx = margin_l + plot_w + 14.0;
    svg.line(lx, legend_y, lx + 18.0, legend_y, s.color, 2.0);
    svg.text(lx + 24.0, legend_y + 4.0, s.name, 11.0, "start", "#000000", "legend");
    legend_y += 18.0;
  }

  write_file_atomic(path, svg.finish());
}

/// Equal-width bin counts of raw values, e.g. cross-view correlations.
inline void render_histogram(const std::vector<double>& values,
                             const PlotSpec& spec,
                             const std::filesystem::path& path) {
  spec.validate();
  if (values.empty()) throw InvalidParameterError("nothing to plot");
  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  std::vector<std::int64_t> counts(static_cast<size_t>(spec.bins), 0);
  for (double v : values) {
    int b = static_cast<int>((v - lo) / (hi - lo) * spec.bins);
    b = std::min(std::max(b, 0), spec.bins - 1);
    ++counts[static_cast<size_t>(b)];
  }
  const std::int64_t peak = *std::max_element(counts.begin(), counts.end());

  const double margin_l = 64.0, margin_r = 24.0, margin_t = 46.0, margin_b = 52.0;
  const double plot_w = 460.0, plot_h = 280.0;
  const double width = margin_l + plot_w + margin_r;
  const double height = margin_t + plot_h + margin_b;
  detail::SvgCanvas svg(width, height);
  if (!spec.title.empty())
    svg.text(width / 2.0, 20.0, spec.title, 15.0, "middle");
  svg.rect(margin_l, margin_t, plot_w, plot_h, "none", "", "#000000");
  const double bw = plot_w / spec.bins;
  for (int b = 0; b < spec.bins; ++b) {
    const double h =
        plot_h * static_cast<double>(counts[static_cast<size_t>(b)]) /
        static_cast<double>(peak);
    if (h <= 0.0) continue;
    svg.rect(margin_l + b * bw, margin_t + plot_h - h, bw, h, "#4c79a6", "bar");
  }
  for (double v : detail::linear_ticks(lo, hi)) {
    const double x = margin_l + plot_w * (v - lo) / (hi - lo);
    svg.line(x, margin_t + plot_h, x, margin_t + plot_h + 4.0, "#000000");
    svg.text(x, margin_t + plot_h + 16.0, detail::fmtg(v), 9.0, "middle");
  }
  svg.text(margin_l + plot_w / 2.0, height - 12.0,
           spec.x_label.empty() ? "value" : spec.x_label, 12.0, "middle");
  svg.text(18.0, margin_t + plot_h / 2.0,
           spec.y_label.empty() ? "count" : spec.y_label, 12.0, "middle");
  write_file_atomic(path, svg.finish());
}

}  // namespace mmdr
