#include "hydrolim/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace hydrolim::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw std::runtime_error("cannot create directory " + path + ": " + ec.message());
}

std::string field_csv(const GridField& f,
                      const std::vector<std::pair<std::string, std::string>>& meta) {
  std::string out;
  for (const auto& [k, v] : meta) out += "# " + k + "=" + v + "\n";
  out += "time,x,value\n";
  for (std::size_t r = 0; r < f.times.size(); ++r) {
    const std::string ts = format_double(f.times[r]);
    for (int j = 0; j < f.n; ++j) {
      out += ts;
      out += ',';
      out += format_double(f.cell_center(j));
      out += ',';
      out += format_double(f.values(static_cast<Eigen::Index>(r), j));
      out += '\n';
    }
  }
  return out;
}

std::string trajectory_rle(const Trajectory& traj) {
  std::string out;
  for (std::size_t r = 0; r < traj.times.size(); ++r) {
    out += format_double(traj.times[r]);
    const auto& occ = traj.snapshots[r].occ;
    out += ' ';
    out += occ.empty() ? '0' : static_cast<char>('0' + occ[0]);
    int run = 0;
    std::uint8_t cur = occ.empty() ? 0 : occ[0];
    for (auto b : occ) {
      if (b == cur) {
        ++run;
      } else {
        out += ' ' + std::to_string(run);
        cur = b;
        run = 1;
      }
    }
    if (run > 0) out += ' ' + std::to_string(run);
    out += '\n';
  }
  return out;
}

namespace {

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;
  double pix0 = 0, pix1 = 1;

  double map(double v) const {
    double t = log ? std::log10(v) : v;
    double a = log ? std::log10(lo) : lo;
    double b = log ? std::log10(hi) : hi;
    if (b <= a) b = a + 1;
    return pix0 + (t - a) / (b - a) * (pix1 - pix0);
  }
};

std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string line_plot_svg(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel,
                          const std::vector<Series>& series, bool logx, bool logy) {
  const int W = 860, H = 540, ML = 80, MR = 30, MT = 50, MB = 60;
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (logx && !(s.x[i] > 0)) continue;
      if (logy && !(s.y[i] > 0)) continue;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  if (xlo > xhi) { xlo = 0; xhi = 1; }
  if (ylo > yhi) { ylo = 0; yhi = 1; }
  if (!logy) {
    const double pad = 0.05 * std::max(yhi - ylo, 1e-12);
    ylo -= pad;
    yhi += pad;
  }
  Axis ax{xlo, xhi, logx, ML, static_cast<double>(W - MR)};
  Axis ay{ylo, yhi, logy, static_cast<double>(H - MB), static_cast<double>(MT)};

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(W) +
         "\" height=\"" + std::to_string(H) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + std::to_string(W / 2) + "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" +
         svg_escape(title) + "</text>\n";
  // frame
  out += "<rect x=\"" + std::to_string(ML) + "\" y=\"" + std::to_string(MT) + "\" width=\"" +
         std::to_string(W - ML - MR) + "\" height=\"" + std::to_string(H - MT - MB) +
         "\" fill=\"none\" stroke=\"#333\"/>\n";
  // axis ticks (5 per axis)
  for (int k = 0; k <= 4; ++k) {
    const double fx = xlo + (xhi - xlo) * k / 4.0;
    const double fy = ylo + (yhi - ylo) * k / 4.0;
    const double vx = logx ? xlo * std::pow(xhi / xlo, k / 4.0) : fx;
    const double vy = logy ? ylo * std::pow(yhi / ylo, k / 4.0) : fy;
    out += "<text x=\"" + format_double(ax.map(vx)) + "\" y=\"" + std::to_string(H - MB + 18) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + format_double(vx) + "</text>\n";
    out += "<text x=\"" + std::to_string(ML - 8) + "\" y=\"" + format_double(ay.map(vy) + 4) +
           "\" text-anchor=\"end\" font-size=\"11\">" + format_double(vy) + "</text>\n";
  }
  out += "<text x=\"" + std::to_string(W / 2) + "\" y=\"" + std::to_string(H - 15) +
         "\" text-anchor=\"middle\" font-size=\"13\">" + svg_escape(xlabel) + "</text>\n";
  out += "<text x=\"20\" y=\"" + std::to_string(H / 2) +
         "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20 " +
         std::to_string(H / 2) + ")\">" + svg_escape(ylabel) + "</text>\n";

  int legend_y = MT + 16;
  for (const auto& s : series) {
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (logx && !(s.x[i] > 0)) continue;
      if (logy && !(s.y[i] > 0)) continue;
      pts += format_double(ax.map(s.x[i])) + "," + format_double(ay.map(s.y[i])) + " ";
    }
    out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"" +
           pts + "\"/>\n";
    if (!s.label.empty()) {
      out += "<text x=\"" + std::to_string(W - MR - 220) + "\" y=\"" + std::to_string(legend_y) +
             "\" font-size=\"12\" fill=\"" + s.color + "\">" + svg_escape(s.label) + "</text>\n";
      legend_y += 16;
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace hydrolim::io
