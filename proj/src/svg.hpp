// Self-contained SVG line plots: axes, tick labels, legend, optional log-y.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace stochlr::io {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct SvgOptions {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  bool log_y = false;
};

// Throws std::invalid_argument for an empty series list, mismatched x/y
// lengths, or nonpositive values under log-y; IoError for unwritable paths.
void emit_svg(const std::vector<Series>& series, const std::filesystem::path& path,
              const SvgOptions& options = {});

}  // namespace stochlr::io
