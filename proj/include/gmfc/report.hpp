#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gmfc/nagent.hpp"

namespace gmfc {

/// Shortest decimal string that round-trips the double exactly.
std::string format_double(double v);

/// Header comment block every CSV artifact starts with: the resolved config
/// on one line and the master seed. SVG artifacts embed the same pair in an
/// XML comment.
void write_artifact_header(std::ostream& out, const std::string& kind,
                           const std::string& config_line, std::uint64_t seed);

/// Extracts the "# config: ..." payload from an artifact written by
/// write_artifact_header; empty string when absent.
std::string read_embedded_config(std::istream& in);

struct SvgSeries {
  std::vector<double> x;       // positive (log axis)
  std::vector<double> y;       // positive (log axis)
  std::vector<double> y_err;   // half-width of the error bar, may be empty
};

/// Log-log scatter with error bars and the fitted power law, annotated with
/// the slope. Self-contained SVG, no plotting dependency.
void write_loglog_svg(std::ostream& out, const SvgSeries& series, double slope,
                      const std::string& x_label, const std::string& y_label,
                      const std::string& comment);

}  // namespace gmfc
