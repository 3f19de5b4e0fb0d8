#pragma once

#include <string>
#include <vector>

#include "hydrolim/diagnostics.hpp"
#include "hydrolim/microsim.hpp"

namespace hydrolim::io {

// All emitters format floats with "%.12g" and fixed orderings, so identical
// inputs produce identical bytes.
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);
void ensure_directory(const std::string& path);

// Field CSV: '# key=value' metadata lines, then 'time,x,value' rows.
std::string field_csv(const GridField& f,
                      const std::vector<std::pair<std::string, std::string>>& meta);

// Snapshot dump: one line per observation time,
//   <time> <first_bit> <run length> <run length> ...
// run lengths alternate starting from the value of site 0.
std::string trajectory_rle(const Trajectory& traj);

struct Series {
  std::string label;
  std::string color = "#1f77b4";
  std::vector<double> x, y;
};

// Minimal static SVG line plot; log axes switch to log10 coordinates.
std::string line_plot_svg(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel,
                          const std::vector<Series>& series, bool logx = false,
                          bool logy = false);

}  // namespace hydrolim::io
