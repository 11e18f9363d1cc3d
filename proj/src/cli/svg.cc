// Copyright 2026 The ilfo Authors
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

#include "ilfo/cli/svg.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace ilfo::cli {
namespace {

constexpr double kWidth = 720.0;
constexpr double kPanelHeight = 240.0;
constexpr double kMarginLeft = 80.0;
constexpr double kMarginRight = 80.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;
constexpr double kGap = 30.0;

constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                   "#9467bd", "#8c564b"};

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string Tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void Include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Guarantees a finite, non-empty interval.
  void Finish() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  }
  double Map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

std::string Text(double x, double y, const std::string& s, const char* anchor = "middle",
                 int size = 12) {
  return "<text x=\"" + Num(x) + "\" y=\"" + Num(y) + "\" font-size=\"" +
         std::to_string(size) + "\" text-anchor=\"" + anchor + "\">" + Escape(s) +
         "</text>\n";
}

std::string Line(double x1, double y1, double x2, double y2, const char* stroke = "#333") {
  return "<line x1=\"" + Num(x1) + "\" y1=\"" + Num(y1) + "\" x2=\"" + Num(x2) + "\" y2=\"" +
         Num(y2) + "\" stroke=\"" + stroke + "\"/>\n";
}

std::string Header(double height, const std::string& title) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + Num(kWidth) +
         "\" height=\"" + Num(height) + "\" viewBox=\"0 0 " + Num(kWidth) + " " +
         Num(height) + "\" font-family=\"sans-serif\">\n"
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
         Text(kWidth / 2, 24, title, "middle", 16);
}

}  // namespace

std::string LinePlotSvg(const std::string& title, const std::string& x_label,
                        const std::vector<Panel>& panels) {
  const double height = kMarginTop + kMarginBottom +
                        static_cast<double>(panels.size()) * (kPanelHeight + kGap);
  std::string svg = Header(height, title);
  const double x0 = kMarginLeft;
  const double x1 = kWidth - kMarginRight - 100.0;

  Range xr;
  for (const auto& p : panels) {
    for (const auto& s : p.series) {
      for (const auto& [x, y] : s.points) {
        if (std::isfinite(y)) xr.Include(x);
      }
    }
  }
  xr.Finish();

  int color = 0;
  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const Panel& panel = panels[pi];
    const double top = kMarginTop + static_cast<double>(pi) * (kPanelHeight + kGap);
    const double bottom = top + kPanelHeight;
    auto transform = [&](double y) { return panel.log_y ? std::log10(y) : y; };
    Range yr;
    for (const auto& s : panel.series) {
      for (const auto& pt : s.points) {
        if (!panel.log_y || pt.second > 0.0) yr.Include(transform(pt.second));
      }
    }
    yr.Finish();

    svg += "<g>\n";
    svg += Line(x0, bottom, x1, bottom) + Line(x0, top, x0, bottom);
    for (int t = 0; t <= 4; ++t) {
      const double v = yr.lo + (yr.hi - yr.lo) * t / 4.0;
      const double y = yr.Map(v, bottom, top);
      svg += Line(x0 - 4, y, x0, y);
      svg += Text(x0 - 6, y + 4, panel.log_y ? "1e" + Tick(v) : Tick(v), "end", 10);
    }
    for (int t = 0; t <= 4; ++t) {
      const double v = xr.lo + (xr.hi - xr.lo) * t / 4.0;
      const double x = xr.Map(v, x0, x1);
      svg += Line(x, bottom, x, bottom + 4) + Text(x, bottom + 16, Tick(v), "middle", 10);
    }
    svg += "<text x=\"16\" y=\"" + Num((top + bottom) / 2) +
           "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           Num((top + bottom) / 2) + ")\">" + Escape(panel.y_label) + "</text>\n";

    for (std::size_t si = 0; si < panel.series.size(); ++si, ++color) {
      const Series& s = panel.series[si];
      const char* c = kColors[color % std::size(kColors)];
      std::string pts;
      for (const auto& [x, y] : s.points) {
        if (!std::isfinite(y) || (panel.log_y && y <= 0.0)) continue;
        if (!pts.empty()) pts += ' ';
        pts += Num(xr.Map(x, x0, x1)) + "," + Num(yr.Map(transform(y), bottom, top));
      }
      svg += "<polyline fill=\"none\" stroke=\"" + std::string(c) +
             "\" stroke-width=\"1.5\" points=\"" + pts + "\"><title>" + Escape(s.name) +
             "</title></polyline>\n";
      const double ly = top + 14.0 + 16.0 * static_cast<double>(si);
      svg += Line(x1 + 10, ly - 4, x1 + 26, ly - 4, c);
      svg += Text(x1 + 30, ly, s.name, "start", 11);
    }
    svg += "</g>\n";
  }
  svg += Text((x0 + x1) / 2, height - 12, x_label);
  svg += "</svg>\n";
  return svg;
}

std::string GroupedBarSvg(const std::string& title, const std::string& left_label,
                          const std::string& right_label, const std::vector<BarGroup>& groups) {
  const double height = kMarginTop + kPanelHeight + kMarginBottom + 20.0;
  std::string svg = Header(height, title);
  const double x0 = kMarginLeft;
  const double x1 = kWidth - kMarginRight;
  const double top = kMarginTop + 10.0;
  const double bottom = top + kPanelHeight;

  Range lr, rr;
  lr.Include(0.0);
  rr.Include(0.0);
  for (const auto& g : groups) {
    lr.Include(g.left - g.left_error);
    lr.Include(g.left + g.left_error);
    rr.Include(g.right);
  }
  lr.Finish();
  rr.Finish();

  svg += Line(x0, bottom, x1, bottom) + Line(x0, top, x0, bottom) + Line(x1, top, x1, bottom);
  for (int t = 0; t <= 4; ++t) {
    const double lv = lr.lo + (lr.hi - lr.lo) * t / 4.0;
    const double rv = rr.lo + (rr.hi - rr.lo) * t / 4.0;
    svg += Text(x0 - 6, lr.Map(lv, bottom, top) + 4, Tick(lv), "end", 10);
    svg += Text(x1 + 6, rr.Map(rv, bottom, top) + 4, Tick(rv), "start", 10);
  }
  svg += Text(x0, top - 8, left_label, "middle", 11);
  svg += Text(x1, top - 8, right_label, "middle", 11);

  const double slot = groups.empty() ? 1.0 : (x1 - x0) / static_cast<double>(groups.size());
  const double bar = slot * 0.3;
  auto rect = [&](double x, double y_a, double y_b, const char* fill) {
    const double y = std::min(y_a, y_b);
    return "<rect x=\"" + Num(x) + "\" y=\"" + Num(y) + "\" width=\"" + Num(bar) +
           "\" height=\"" + Num(std::fabs(y_b - y_a)) + "\" fill=\"" + fill + "\"/>\n";
  };
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const BarGroup& g = groups[i];
    const double cx = x0 + slot * (static_cast<double>(i) + 0.5);
    const double lx = cx - bar;
    svg += rect(lx, lr.Map(0.0, bottom, top), lr.Map(g.left, bottom, top), kColors[0]);
    if (g.left_error > 0.0) {
      const double ex = lx + bar / 2;
      svg += Line(ex, lr.Map(g.left - g.left_error, bottom, top), ex,
                  lr.Map(g.left + g.left_error, bottom, top));
    }
    svg += rect(cx, rr.Map(0.0, bottom, top), rr.Map(g.right, bottom, top), kColors[1]);
    svg += Text(cx, bottom + 16, g.label, "middle", 11);
  }
  svg += Text(x0 + 60, height - 10, left_label, "start", 11);
  svg += "<rect x=\"" + Num(x0 + 44) + "\" y=\"" + Num(height - 20) +
         "\" width=\"12\" height=\"12\" fill=\"" + kColors[0] + "\"/>\n";
  svg += Text(x0 + 260, height - 10, right_label, "start", 11);
  svg += "<rect x=\"" + Num(x0 + 244) + "\" y=\"" + Num(height - 20) +
         "\" width=\"12\" height=\"12\" fill=\"" + kColors[1] + "\"/>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace ilfo::cli
