#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "errors.hpp"

namespace stochlr::io {

namespace {

constexpr double kWidth = 860.0;
constexpr double kHeight = 540.0;
constexpr double kMarginLeft = 80.0;
constexpr double kMarginRight = 190.0;
constexpr double kMarginTop = 50.0;
constexpr double kMarginBottom = 60.0;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                          "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78"};

std::string escape_xml(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string format_tick(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.4g", value);
  return buffer;
}

}  // namespace

void emit_svg(const std::vector<Series>& series, const std::filesystem::path& path,
              const SvgOptions& options) {
  if (series.empty()) {
    throw std::invalid_argument("emit_svg: needs at least one series");
  }
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  double y_min = x_min;
  double y_max = -x_min;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) {
      throw std::invalid_argument("emit_svg: series '" + s.label + "' has mismatched x/y lengths");
    }
    if (s.x.empty()) {
      throw std::invalid_argument("emit_svg: series '" + s.label + "' is empty");
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double y = s.y[i];
      if (options.log_y) {
        if (!(y > 0.0)) {
          throw std::invalid_argument("emit_svg: log-y needs positive values, series '" +
                                      s.label + "'");
        }
        y = std::log10(y);
      }
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (x_max == x_min) {
    x_max = x_min + 1.0;
  }
  if (y_max == y_min) {
    y_max = y_min + 1.0;
  }

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto map_x = [&](double x) { return kMarginLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto map_y = [&](double y) {
    if (options.log_y) {
      y = std::log10(y);
    }
    return kMarginTop + plot_h - (y - y_min) / (y_max - y_min) * plot_h;
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open file for writing: " + path.string());
  }
  char buffer[256];
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  std::snprintf(buffer, sizeof buffer,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
                "viewBox=\"0 0 %g %g\">\n",
                kWidth, kHeight, kWidth, kHeight);
  out << buffer;
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    std::snprintf(buffer, sizeof buffer,
                  "<text x=\"%g\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\" "
                  "text-anchor=\"middle\">",
                  kMarginLeft + plot_w / 2);
    out << buffer << escape_xml(options.title) << "</text>\n";
  }

  // Axes.
  std::snprintf(buffer, sizeof buffer,
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", kMarginLeft,
                kMarginTop + plot_h, kMarginLeft + plot_w, kMarginTop + plot_h);
  out << buffer;
  std::snprintf(buffer, sizeof buffer,
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", kMarginLeft,
                kMarginTop, kMarginLeft, kMarginTop + plot_h);
  out << buffer;

  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = x_min + (x_max - x_min) * i / kTicks;
    const double px = map_x(fx);
    std::snprintf(buffer, sizeof buffer,
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", px,
                  kMarginTop + plot_h, px, kMarginTop + plot_h + 5);
    out << buffer;
    std::snprintf(buffer, sizeof buffer,
                  "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"11\" "
                  "text-anchor=\"middle\">%s</text>\n",
                  px, kMarginTop + plot_h + 20, format_tick(fx).c_str());
    out << buffer;

    const double plot_y = y_min + (y_max - y_min) * i / kTicks;
    const double py = kMarginTop + plot_h - (plot_y - y_min) / (y_max - y_min) * plot_h;
    std::snprintf(buffer, sizeof buffer,
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                  kMarginLeft - 5, py, kMarginLeft, py);
    out << buffer;
    const double tick_value = options.log_y ? std::pow(10.0, plot_y) : plot_y;
    std::snprintf(buffer, sizeof buffer,
                  "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"11\" "
                  "text-anchor=\"end\">%s</text>\n",
                  kMarginLeft - 8, py + 4, format_tick(tick_value).c_str());
    out << buffer;
  }

  std::snprintf(buffer, sizeof buffer,
                "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"13\" "
                "text-anchor=\"middle\">",
                kMarginLeft + plot_w / 2, kHeight - 15.0);
  out << buffer << escape_xml(options.x_label) << "</text>\n";
  std::snprintf(buffer, sizeof buffer,
                "<text x=\"20\" y=\"%g\" font-family=\"sans-serif\" font-size=\"13\" "
                "text-anchor=\"middle\" transform=\"rotate(-90 20 %g)\">",
                kMarginTop + plot_h / 2, kMarginTop + plot_h / 2);
  out << buffer << escape_xml(options.y_label + (options.log_y ? " (log scale)" : "")) <<
      "</text>\n";

  // Series polylines.
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof kPalette / sizeof kPalette[0])];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      std::snprintf(buffer, sizeof buffer, "%.2f,%.2f ", map_x(series[s].x[i]),
                    map_y(series[s].y[i]));
      out << buffer;
    }
    out << "\"/>\n";
  }

  // Legend.
  const double legend_x = kMarginLeft + plot_w + 15.0;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double ly = kMarginTop + 14.0 + 18.0 * static_cast<double>(s);
    const char* color = kPalette[s % (sizeof kPalette / sizeof kPalette[0])];
    std::snprintf(buffer, sizeof buffer,
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"%s\" "
                  "stroke-width=\"2\"/>\n",
                  legend_x, ly, legend_x + 22.0, ly, color);
    out << buffer;
    std::snprintf(buffer, sizeof buffer,
                  "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"11\">",
                  legend_x + 28.0, ly + 4.0);
    out << buffer << escape_xml(series[s].label) << "</text>\n";
  }

  out << "</svg>\n";
  if (!out) {
    throw IoError("failed writing file: " + path.string());
  }
}

}  // namespace stochlr::io
