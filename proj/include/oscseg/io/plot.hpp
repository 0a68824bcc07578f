#pragma once

#include "oscseg/io/report.hpp"

#include <string>

namespace oscseg::io {

struct PlotOptions {
  int width = 960;
  int panel_height = 250;
};

/// One panel per series: observed and fitted lines with change point markers,
/// and below them the selected frequencies of each segment as horizontal bars
/// whose opacity follows the amplitude. Output depends only on the report.
std::string render_svg(const Json& report, const PlotOptions& opts = {});

}  // namespace oscseg::io
