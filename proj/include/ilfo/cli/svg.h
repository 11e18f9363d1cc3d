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

#ifndef ILFO_CLI_SVG_H_
#define ILFO_CLI_SVG_H_

#include <string>
#include <utility>
#include <vector>

namespace ilfo::cli {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;  // non-finite y values are skipped
};

struct Panel {
  std::string y_label;
  bool log_y = false;
  std::vector<Series> series;
};

// Panels stacked vertically over a shared x axis.
std::string LinePlotSvg(const std::string& title, const std::string& x_label,
                        const std::vector<Panel>& panels);

struct BarGroup {
  std::string label;
  double left = 0.0;        // value on the left axis
  double left_error = 0.0;  // symmetric error bar, 0 for none
  double right = 0.0;       // value on the right axis
};

// Two bars per group, each against its own y axis.
std::string GroupedBarSvg(const std::string& title, const std::string& left_label,
                          const std::string& right_label, const std::vector<BarGroup>& groups);

}  // namespace ilfo::cli

#endif  // ILFO_CLI_SVG_H_
