// SPDX-License-Identifier: Apache-2.0
//
// Minimal CSV -> SVG line plot used by the `plot` subcommand. Presentation
// only: CSV files remain the source of truth.
#pragma once

#include <string>
#include <vector>

namespace wdmcli {

struct PlotSeries {
  std::string name;
  std::vector<double> x, y;
};

// Renders series as polylines with axes and a small legend.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<PlotSeries>& series, const std::string& x_label,
                    const std::string& y_label);

// Loads a wdmopt CSV (optional "# wdmopt ..." first line, then a header row).
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  int column_index(const std::string& name) const;
};
CsvTable load_csv(const std::string& path);

}  // namespace wdmcli
