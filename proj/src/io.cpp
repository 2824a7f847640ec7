#include "fracgl/io.hpp"

#include "fracgl/params.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace fracgl {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace

void write_svg_plot(std::ostream& os, const std::vector<PlotSeries>& series, const PlotOptions& opt) {
  const double left = 70, right = 20, top = 40, bottom = 50;
  const double pw = opt.width - left - right, ph = opt.height - top - bottom;
  auto ty = [&](double y) { return opt.log_y ? std::log10(std::max(y, 1e-300)) : y; };
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (double x : s.x) xmin = std::min(xmin, x), xmax = std::max(xmax, x);
    for (double y : s.y) ymin = std::min(ymin, ty(y)), ymax = std::max(ymax, ty(y));
  }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (ymax - ty(y)) / (ymax - ymin) * ph; };
  auto py_raw = [&](double v) { return top + (ymax - v) / (ymax - ymin) * ph; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << opt.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(opt.title)
     << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0, yv = ymin + (ymax - ymin) * i / 5.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << py_raw(yv) + 4 << "\" text-anchor=\"end\">"
       << (opt.log_y ? "1e" + fmt(yv) : fmt(yv)) << "</text>\n";
    os << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << py_raw(yv) << "\" y2=\"" << py_raw(yv)
       << "\" stroke=\"#ddd\"/>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << opt.height - 10 << "\" text-anchor=\"middle\">" << escape(opt.x_label)
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << top + ph / 2
     << ")\">" << escape(opt.y_label) << "</text>\n";
  int row = 0;
  for (const auto& s : series) {
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    os << "\"/>\n";
    const double ly = top + 14 + 16 * row++;
    os << "<line x1=\"" << left + 10 << "\" x2=\"" << left + 30 << "\" y1=\"" << ly << "\" y2=\"" << ly << "\" stroke=\""
       << s.color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << left + 36 << "\" y=\"" << ly + 4 << "\">" << escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
}

void ensure_writable_directory(const std::string& path) {
  if (path.empty()) throw DomainError("output directory is empty");
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec || !std::filesystem::is_directory(path)) throw DomainError("cannot create output directory " + path);
  const auto probe = std::filesystem::path(path) / ".write_probe";
  std::ofstream f(probe);
  if (!f) throw DomainError("output directory is not writable: " + path);
  f.close();
  std::filesystem::remove(probe, ec);
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path);
  if (!f) throw DomainError("cannot write " + path);
  f << contents;
}

}  // namespace fracgl
