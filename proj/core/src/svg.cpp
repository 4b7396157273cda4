// Copyright 2026 The prnn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "prnn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "prnn/errors.hpp"

namespace prnn::svg {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 440;
constexpr double kLeft = 80;
constexpr double kRight = 170;
constexpr double kTop = 40;
constexpr double kBottom = 60;
constexpr int kTicks = 5;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

const char* color(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (hi <= lo) {
      const double d = lo == 0.0 ? 1.0 : std::abs(lo) * 0.05;
      lo -= d;
      hi += d;
    }
  }
};

class Canvas {
 public:
  Canvas(std::string_view title) {
    out_ += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
            num(kWidth) + "\" height=\"" + num(kHeight) +
            "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
    out_ += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    text(kWidth / 2, 24, title, "middle", 16);
  }

  void text(double x, double y, std::string_view s, const char* anchor,
            int size = 12, bool vertical = false) {
    out_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) +
            "\" font-family=\"sans-serif\" font-size=\"" +
            std::to_string(size) + "\" text-anchor=\"" + anchor + "\"";
    if (vertical) {
      out_ += " transform=\"rotate(-90 " + num(x) + " " + num(y) + ")\"";
    }
    out_ += ">" + escape(s) + "</text>\n";
  }
  void line(double x1, double y1, double x2, double y2, const char* stroke) {
    out_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" +
            num(x2) + "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke +
            "\"/>\n";
  }
  void rect(double x, double y, double w, double h, const char* fill) {
    out_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" +
            num(w) + "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"/>\n";
  }
  void raw(const std::string& s) { out_ += s; }

  std::string finish() {
    out_ += "</svg>\n";
    return std::move(out_);
  }

 private:
  std::string out_;
};

constexpr double plot_w() { return kWidth - kLeft - kRight; }
constexpr double plot_h() { return kHeight - kTop - kBottom; }

void axes(Canvas& c, const Range& xr, const Range* yr_for_x_ticks,
          const Range& yr, std::string_view x_label, std::string_view y_label) {
  const double x0 = kLeft;
  const double y0 = kTop + plot_h();
  c.line(x0, kTop, x0, y0, "black");
  c.line(x0, y0, x0 + plot_w(), y0, "black");
  for (int i = 0; i <= kTicks; ++i) {
    const double f = static_cast<double>(i) / kTicks;
    const double y = y0 - f * plot_h();
    c.line(x0 - 4, y, x0, y, "black");
    c.text(x0 - 6, y + 4, tick_label(yr.lo + f * (yr.hi - yr.lo)), "end", 10);
    if (yr_for_x_ticks) {
      const double x = x0 + f * plot_w();
      c.line(x, y0, x, y0 + 4, "black");
      c.text(x, y0 + 16, tick_label(xr.lo + f * (xr.hi - xr.lo)), "middle",
             10);
    }
  }
  c.text(x0 + plot_w() / 2, kHeight - 16, x_label, "middle");
  c.text(20, kTop + plot_h() / 2, y_label, "middle", 12, true);
}

void legend(Canvas& c, const std::vector<std::string>& names) {
  const double x = kWidth - kRight + 16;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double y = kTop + 10 + 18.0 * static_cast<double>(i);
    c.rect(x, y - 8, 12, 10, color(i));
    c.text(x + 18, y + 1, names[i], "start", 11);
  }
}

}  // namespace

std::string escape(std::string_view text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out.push_back(ch);
    }
  }
  return out;
}

std::string line_chart(std::string_view title, std::string_view x_label,
                       std::string_view y_label,
                       const std::vector<Series>& series) {
  Range xr, yr;
  std::size_t points = 0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) {
      throw ParameterError("series '" + s.name + "' has mismatched x/y");
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xr.add(s.x[i]);
      yr.add(s.y[i]);
      ++points;
    }
  }
  if (points == 0) throw ParameterError("line chart has no finite points");
  xr.pad();
  yr.pad();

  Canvas c(title);
  axes(c, xr, &yr, yr, x_label, y_label);
  std::vector<std::string> names;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    names.push_back(s.name);
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      const double px = kLeft + (s.x[i] - xr.lo) / (xr.hi - xr.lo) * plot_w();
      const double py =
          kTop + plot_h() - (s.y[i] - yr.lo) / (yr.hi - yr.lo) * plot_h();
      if (!pts.empty()) pts += ' ';
      pts += num(px) + "," + num(py);
    }
    if (pts.empty()) continue;
    c.raw("<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" +
          std::string(color(k)) + "\" points=\"" + pts + "\"/>\n");
  }
  legend(c, names);
  return c.finish();
}

std::string bar_chart(std::string_view title, std::string_view y_label,
                      const std::vector<std::string>& series_names,
                      const std::vector<BarGroup>& groups) {
  if (groups.empty() || series_names.empty()) {
    throw ParameterError("bar chart needs at least one group and series");
  }
  Range yr;
  yr.add(0.0);
  for (const auto& g : groups) {
    if (g.values.size() != series_names.size()) {
      throw ParameterError("bar group '" + g.label + "' has " +
                           std::to_string(g.values.size()) + " values, want " +
                           std::to_string(series_names.size()));
    }
    for (double v : g.values) {
      if (std::isfinite(v)) yr.add(v);
    }
  }
  yr.pad();

  Canvas c(title);
  axes(c, yr, nullptr, yr, "", y_label);
  const double group_w = plot_w() / static_cast<double>(groups.size());
  const double bar_w =
      group_w * 0.8 / static_cast<double>(series_names.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double gx = kLeft + group_w * static_cast<double>(g) + group_w * 0.1;
    for (std::size_t k = 0; k < series_names.size(); ++k) {
      const double v = groups[g].values[k];
      if (!std::isfinite(v)) continue;
      const double h = (v - yr.lo) / (yr.hi - yr.lo) * plot_h();
      c.rect(gx + bar_w * static_cast<double>(k), kTop + plot_h() - h, bar_w,
             h, color(k));
    }
    c.text(gx + group_w * 0.4, kTop + plot_h() + 16, groups[g].label,
           "middle", 10);
  }
  legend(c, series_names);
  return c.finish();
}

}  // namespace prnn::svg
