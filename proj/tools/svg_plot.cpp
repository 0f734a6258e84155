// SPDX-License-Identifier: Apache-2.0
#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wdmcli {

int CsvTable::column_index(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable load_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open CSV: " + path);
  CsvTable t;
  std::string line;
  bool have_header = false;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ',') out.push_back(cur), cur.clear();
      else if (c != '\r') cur.push_back(c);
    }
    out.push_back(cur);
    return out;
  };
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!have_header) {
      t.columns = split(line);
      have_header = true;
    } else {
      t.rows.push_back(split(line));
    }
  }
  if (!have_header) throw std::runtime_error(path + ": no header row");
  return t;
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<PlotSeries>& series, const std::string& x_label,
                    const std::string& y_label) {
  const int width = 720, height = 480;
  const int ml = 70, mr = 20, mt = 40, mb = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
  auto py = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write SVG: " + path);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
     << "' viewBox='0 0 " << width << " " << height << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << width / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title
     << "</text>\n";

  // axes with 5 ticks each
  os << "<g stroke='#444' stroke-width='1'>";
  os << "<line x1='" << ml << "' y1='" << height - mb << "' x2='" << width - mr << "' y2='"
     << height - mb << "'/>";
  os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << height - mb << "'/>";
  os << "</g>\n";
  os << "<g font-size='11' fill='#222'>\n";
  for (int i = 0; i <= 5; ++i) {
    double xv = xmin + (xmax - xmin) * i / 5.0;
    double yv = ymin + (ymax - ymin) * i / 5.0;
    std::ostringstream xs, ys;
    xs.precision(4);
    ys.precision(4);
    xs << xv;
    ys << yv;
    os << "<text x='" << px(xv) << "' y='" << height - mb + 16 << "' text-anchor='middle'>"
       << xs.str() << "</text>\n";
    os << "<text x='" << ml - 6 << "' y='" << py(yv) + 4 << "' text-anchor='end'>" << ys.str()
       << "</text>\n";
    os << "<line x1='" << px(xv) << "' y1='" << height - mb << "' x2='" << px(xv) << "' y2='"
       << height - mb + 4 << "' stroke='#444'/>\n";
    os << "<line x1='" << ml - 4 << "' y1='" << py(yv) << "' x2='" << ml << "' y2='" << py(yv)
       << "' stroke='#444'/>\n";
  }
  os << "<text x='" << (ml + width - mr) / 2 << "' y='" << height - 12
     << "' text-anchor='middle'>" << x_label << "</text>\n";
  os << "<text x='16' y='" << (mt + height - mb) / 2
     << "' text-anchor='middle' transform='rotate(-90 16 " << (mt + height - mb) / 2 << ")'>"
     << y_label << "</text>\n";
  os << "</g>\n";

  for (size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = colors[si % 8];
    os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.6' points='";
    for (size_t i = 0; i < s.x.size(); ++i) os << px(s.x[i]) << "," << py(s.y[i]) << " ";
    os << "'/>\n";
    os << "<text x='" << width - mr - 6 << "' y='" << mt + 16 * (si + 1)
       << "' text-anchor='end' font-size='12' fill='" << color << "'>" << s.name << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace wdmcli
