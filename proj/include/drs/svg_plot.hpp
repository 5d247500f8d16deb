/**
 * @file svg_plot.hpp
 * @brief Minimal SVG line charts for percentile bands.
 */

#pragma once

#include <string>
#include <vector>

namespace drs {

struct BandSeries
{
    std::string label;
    std::string color;  ///< any SVG colour, e.g. "#1f77b4"
    std::vector<double> lower, median, upper;
};

struct PlotSpec
{
    std::string title;
    std::string x_label = "t [s]";
    std::string y_label;
    int width = 720;
    int height = 420;
};

/// Renders each series as a shaded lower/upper band with its median on top.
/// All series share the x values; non-finite samples are skipped.
std::string render_band_plot(const PlotSpec& spec, const std::vector<double>& x, const std::vector<BandSeries>& series);

}  // namespace drs
