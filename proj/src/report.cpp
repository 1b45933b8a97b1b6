#include "gmfc/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace gmfc {

std::string format_double(double v) {
  char buf[40];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

void write_artifact_header(std::ostream& out, const std::string& kind,
                           const std::string& config_line,
                           std::uint64_t seed) {
  out << "# gmfc " << kind << " artifact\n";
  out << "# config: " << config_line << "\n";
  out << "# seed: " << seed << "\n";
}

std::string read_embedded_config(std::istream& in) {
  std::string line;
  const std::string prefix = "# config: ";
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
    if (!line.empty() && line[0] != '#' && line.rfind("<!--", 0) != 0) break;
  }
  return "";
}

namespace {

double nice_log_tick(double v) { return std::pow(10.0, std::floor(std::log10(v))); }

}  // namespace

void write_loglog_svg(std::ostream& out, const SvgSeries& series, double slope,
                      const std::string& x_label, const std::string& y_label,
                      const std::string& comment) {
  const int width = 640, height = 480;
  const int left = 70, right = 20, top = 30, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double x_min = series.x.front(), x_max = series.x.front();
  double y_min = series.y.front(), y_max = series.y.front();
  for (std::size_t i = 0; i < series.x.size(); ++i) {
    x_min = std::min(x_min, series.x[i]);
    x_max = std::max(x_max, series.x[i]);
    double lo = series.y[i], hi = series.y[i];
    if (!series.y_err.empty()) {
      lo = std::max(series.y[i] - series.y_err[i], series.y[i] * 0.1);
      hi = series.y[i] + series.y_err[i];
    }
    y_min = std::min(y_min, lo);
    y_max = std::max(y_max, hi);
  }
  // pad a half-decade-ish margin
  x_min /= 1.3; x_max *= 1.3;
  y_min /= 1.5; y_max *= 1.5;

  auto sx = [&](double v) {
    return left + plot_w * (std::log(v) - std::log(x_min)) /
                      (std::log(x_max) - std::log(x_min));
  };
  auto sy = [&](double v) {
    return top + plot_h * (1.0 - (std::log(v) - std::log(y_min)) /
                                     (std::log(y_max) - std::log(y_min)));
  };
  auto num = [](double v) { return format_double(v); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  if (!comment.empty()) out << "<!-- " << comment << " -->\n";
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";

  // frame
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  // decade gridlines and tick labels
  for (double tick = nice_log_tick(x_min); tick <= x_max; tick *= 10.0) {
    if (tick < x_min) continue;
    const double px = sx(tick);
    out << "<line x1=\"" << num(px) << "\" y1=\"" << top << "\" x2=\""
        << num(px) << "\" y2=\"" << top + plot_h
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << num(px) << "\" y=\"" << top + plot_h + 18
        << "\" font-size=\"12\" text-anchor=\"middle\">" << num(tick)
        << "</text>\n";
  }
  for (double tick = nice_log_tick(y_min); tick <= y_max; tick *= 10.0) {
    if (tick < y_min) continue;
    const double py = sy(tick);
    out << "<line x1=\"" << left << "\" y1=\"" << num(py) << "\" x2=\""
        << left + plot_w << "\" y2=\"" << num(py)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << num(py + 4)
        << "\" font-size=\"12\" text-anchor=\"end\">" << num(tick)
        << "</text>\n";
  }

  // fitted power law through the geometric mean point
  {
    double mean_lx = 0.0, mean_ly = 0.0;
    for (std::size_t i = 0; i < series.x.size(); ++i) {
      mean_lx += std::log(series.x[i]);
      mean_ly += std::log(series.y[i]);
    }
    mean_lx /= series.x.size();
    mean_ly /= series.y.size();
    const double y0 = std::exp(mean_ly + slope * (std::log(x_min * 1.3) - mean_lx));
    const double y1 = std::exp(mean_ly + slope * (std::log(x_max / 1.3) - mean_lx));
    out << "<line x1=\"" << num(sx(x_min * 1.3)) << "\" y1=\"" << num(sy(y0))
        << "\" x2=\"" << num(sx(x_max / 1.3)) << "\" y2=\"" << num(sy(y1))
        << "\" stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>\n";
  }

  // error bars, then points
  for (std::size_t i = 0; i < series.x.size(); ++i) {
    const double px = sx(series.x[i]);
    if (!series.y_err.empty() && series.y_err[i] > 0.0) {
      const double lo = std::max(series.y[i] - series.y_err[i], y_min);
      const double hi = series.y[i] + series.y_err[i];
      out << "<line x1=\"" << num(px) << "\" y1=\"" << num(sy(lo))
          << "\" x2=\"" << num(px) << "\" y2=\"" << num(sy(hi))
          << "\" stroke=\"#1f77b4\" stroke-width=\"1\"/>\n";
      out << "<line x1=\"" << num(px - 4) << "\" y1=\"" << num(sy(lo))
          << "\" x2=\"" << num(px + 4) << "\" y2=\"" << num(sy(lo))
          << "\" stroke=\"#1f77b4\" stroke-width=\"1\"/>\n";
      out << "<line x1=\"" << num(px - 4) << "\" y1=\"" << num(sy(hi))
          << "\" x2=\"" << num(px + 4) << "\" y2=\"" << num(sy(hi))
          << "\" stroke=\"#1f77b4\" stroke-width=\"1\"/>\n";
    }
    out << "<circle cx=\"" << num(px) << "\" cy=\"" << num(sy(series.y[i]))
        << "\" r=\"3.5\" fill=\"#1f77b4\"/>\n";
  }

  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
      << "\" font-size=\"14\" text-anchor=\"middle\">" << x_label
      << "</text>\n";
  out << "<text x=\"18\" y=\"" << top + plot_h / 2
      << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << top + plot_h / 2 << ")\">" << y_label << "</text>\n";
  out << "<text x=\"" << left + 10 << "\" y=\"" << top + 18
      << "\" font-size=\"13\" fill=\"#d62728\">fitted slope = "
      << num(std::round(slope * 1000.0) / 1000.0) << "</text>\n";
  out << "</svg>\n";
}

}  // namespace gmfc
