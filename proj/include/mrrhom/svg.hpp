#ifndef MRRHOM_SVG_HPP
#define MRRHOM_SVG_HPP

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrrhom/contour.hpp"
#include "mrrhom/homm.hpp"

namespace mrrhom
{

// Data-to-pixel mapping of a plot panel. y grows upwards in data space.
// Emitted on the panel group as data-* attributes so readers can invert it.
struct PlotFrame
{
    double left = 80.0;
    double top = 40.0;
    double width = 560.0;
    double height = 420.0;
    double x_min = 0.0;
    double x_max = 1.0;
    double y_min = 0.0;
    double y_max = 1.0;

    double px(double x) const { return left + width * (x - x_min) / (x_max - x_min); }
    double py(double y) const { return top + height * (1.0 - (y - y_min) / (y_max - y_min)); }
    double x_at(double px_value) const { return x_min + (px_value - left) * (x_max - x_min) / width; }
    double y_at(double py_value) const { return y_min + (1.0 - (py_value - top) / height) * (y_max - y_min); }
};

struct LineSeries
{
    std::string label;
    std::string colour;
    std::vector<double> x;
    std::vector<double> y;
};

struct LinePlot
{
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<LineSeries> series;
    // defaults to the data range
    std::optional<std::array<double, 2>> y_range;
};

std::string render_line_plot(const LinePlot& plot);

// Fill bands for coincidence probabilities: [0, 1e-3), [1e-3, 0.05),
// [0.05, 0.25), [0.25, 0.5), [0.5, 1].
inline constexpr std::array<double, 6> kBandEdges = {0.0, 1e-3, 0.05, 0.25, 0.5, 1.0};
inline constexpr std::array<std::string_view, 5> kBandColours = {"#08306b", "#2171b5", "#6baed6", "#c6dbef",
                                                                 "#f7fbff"};
inline constexpr std::string_view kMissingColour = "#bdbdbd";

std::size_t band_index(double probability) noexcept;

struct ContourPlot
{
    std::string title;
    const ProbabilityGrid* grid = nullptr;
    std::vector<ContourSet> contours;
    std::optional<HommCurve> homm;
};

// x axis = tau, y axis = theta. Band cells become <rect class="band">,
// contour lines <polyline class="contour" data-level=...> (the 1e-3 level in
// red), and the HOMM curve <polyline class="homm">. A converged point with no
// converged neighbour becomes <circle class="homm-point">.
std::string render_contour_plot(const ContourPlot& plot);

PlotFrame contour_frame(const ProbabilityGrid& grid);

} // namespace mrrhom

#endif // MRRHOM_SVG_HPP
