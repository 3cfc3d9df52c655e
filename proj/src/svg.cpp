#include "mrrhom/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "mrrhom/errors.hpp"

namespace mrrhom
{

namespace
{

constexpr double kCanvasWidth = 720.0;
constexpr double kCanvasHeight = 520.0;
constexpr std::size_t kTicks = 5;

std::string fixed(double v, int decimals = 3)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, decimals);
    return std::string(buf.data(), res.ptr);
}

std::string general(double v, int digits)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, digits);
    return std::string(buf.data(), res.ptr);
}

std::string escape(std::string_view text)
{
    std::string out;
    for (char c : text)
    {
        switch (c)
        {
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '&':
                out += "&amp;";
                break;
            case '"':
                out += "&quot;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

void open_svg(std::ostringstream& os, std::string_view title)
{
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(kCanvasWidth, 0) << "\" height=\""
       << fixed(kCanvasHeight, 0) << "\" viewBox=\"0 0 " << fixed(kCanvasWidth, 0) << ' ' << fixed(kCanvasHeight, 0)
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << fixed(kCanvasWidth / 2.0, 1) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
       << escape(title) << "</text>\n";
}

void open_frame(std::ostringstream& os, const PlotFrame& f)
{
    os << "<g class=\"frame\" data-left=\"" << general(f.left, 17) << "\" data-top=\"" << general(f.top, 17)
       << "\" data-width=\"" << general(f.width, 17) << "\" data-height=\"" << general(f.height, 17)
       << "\" data-x-min=\"" << general(f.x_min, 17) << "\" data-x-max=\"" << general(f.x_max, 17)
       << "\" data-y-min=\"" << general(f.y_min, 17) << "\" data-y-max=\"" << general(f.y_max, 17) << "\">\n";
}

void axes(std::ostringstream& os, const PlotFrame& f, std::string_view x_label, std::string_view y_label)
{
    os << "<rect class=\"axes\" x=\"" << fixed(f.left) << "\" y=\"" << fixed(f.top) << "\" width=\"" << fixed(f.width)
       << "\" height=\"" << fixed(f.height) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (std::size_t k = 0; k < kTicks; ++k)
    {
        const double s = static_cast<double>(k) / static_cast<double>(kTicks - 1);
        const double x = f.x_min + s * (f.x_max - f.x_min);
        const double y = f.y_min + s * (f.y_max - f.y_min);
        const double px = f.px(x);
        const double py = f.py(y);
        const double bottom = f.top + f.height;
        os << "<line x1=\"" << fixed(px) << "\" y1=\"" << fixed(bottom) << "\" x2=\"" << fixed(px) << "\" y2=\""
           << fixed(bottom + 5.0) << "\" stroke=\"black\"/>\n"
           << "<text x=\"" << fixed(px) << "\" y=\"" << fixed(bottom + 18.0) << "\" text-anchor=\"middle\">"
           << general(x, 4) << "</text>\n"
           << "<line x1=\"" << fixed(f.left - 5.0) << "\" y1=\"" << fixed(py) << "\" x2=\"" << fixed(f.left)
           << "\" y2=\"" << fixed(py) << "\" stroke=\"black\"/>\n"
           << "<text x=\"" << fixed(f.left - 8.0) << "\" y=\"" << fixed(py + 4.0) << "\" text-anchor=\"end\">"
           << general(y, 4) << "</text>\n";
    }
    os << "<text x=\"" << fixed(f.left + f.width / 2.0) << "\" y=\"" << fixed(f.top + f.height + 38.0)
       << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n"
       << "<text transform=\"translate(" << fixed(f.left - 55.0) << ' ' << fixed(f.top + f.height / 2.0)
       << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";
}

void polyline(std::ostringstream& os,
              const PlotFrame& f,
              const std::vector<ContourPoint>& pts,
              std::string_view attributes)
{
    os << "<polyline " << attributes << " fill=\"none\" points=\"";
    for (std::size_t k = 0; k < pts.size(); ++k)
    {
        os << (k ? " " : "") << fixed(f.px(pts[k].tau)) << ',' << fixed(f.py(pts[k].theta));
    }
    os << "\"/>\n";
}

// Cell k of an axis spans the midpoints to its neighbours, clipped to the ends.
std::pair<double, double> cell_span(const std::vector<double>& axis, std::size_t k)
{
    const double lo = k == 0 ? axis.front() : 0.5 * (axis[k - 1] + axis[k]);
    const double hi = k + 1 == axis.size() ? axis.back() : 0.5 * (axis[k] + axis[k + 1]);
    return {lo, hi};
}

} // namespace

std::size_t band_index(double probability) noexcept
{
    for (std::size_t k = 1; k + 1 < kBandEdges.size(); ++k)
    {
        if (probability < kBandEdges[k])
        {
            return k - 1;
        }
    }
    return kBandColours.size() - 1;
}

std::string render_line_plot(const LinePlot& plot)
{
    double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
    for (const LineSeries& s : plot.series)
    {
        if (s.x.size() != s.y.size())
        {
            throw DomainError("line series '" + s.label + "' has mismatched x and y");
        }
        for (std::size_t k = 0; k < s.x.size(); ++k)
        {
            if (std::isfinite(s.x[k]) && std::isfinite(s.y[k]))
            {
                x_lo = std::min(x_lo, s.x[k]);
                x_hi = std::max(x_hi, s.x[k]);
                y_lo = std::min(y_lo, s.y[k]);
                y_hi = std::max(y_hi, s.y[k]);
            }
        }
    }
    if (!(x_lo < x_hi))
    {
        x_lo = 0.0;
        x_hi = 1.0;
    }
    if (plot.y_range)
    {
        y_lo = (*plot.y_range)[0];
        y_hi = (*plot.y_range)[1];
    }
    if (!(y_lo < y_hi))
    {
        y_lo = std::isfinite(y_lo) ? y_lo - 0.5 : 0.0;
        y_hi = y_lo + 1.0;
    }

    PlotFrame f;
    f.x_min = x_lo;
    f.x_max = x_hi;
    f.y_min = y_lo;
    f.y_max = y_hi;

    std::ostringstream os;
    open_svg(os, plot.title);
    open_frame(os, f);
    axes(os, f, plot.x_label, plot.y_label);
    for (const LineSeries& s : plot.series)
    {
        os << "<polyline class=\"series\" data-label=\"" << escape(s.label) << "\" stroke=\"" << escape(s.colour)
           << "\" stroke-width=\"1.5\" fill=\"none\" points=\"";
        bool first = true;
        for (std::size_t k = 0; k < s.x.size(); ++k)
        {
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k]))
            {
                continue;
            }
            os << (first ? "" : " ") << fixed(f.px(s.x[k])) << ',' << fixed(f.py(s.y[k]));
            first = false;
        }
        os << "\"/>\n";
    }
    os << "</g>\n";

    double legend_y = f.top + 14.0;
    for (const LineSeries& s : plot.series)
    {
        const double x = f.left + f.width + 8.0;
        os << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(legend_y - 4.0) << "\" x2=\"" << fixed(x + 18.0)
           << "\" y2=\"" << fixed(legend_y - 4.0) << "\" stroke=\"" << escape(s.colour) << "\" stroke-width=\"2\"/>\n"
           << "<text x=\"" << fixed(x + 22.0) << "\" y=\"" << fixed(legend_y) << "\">" << escape(s.label)
           << "</text>\n";
        legend_y += 16.0;
    }
    os << "</svg>\n";
    return os.str();
}

PlotFrame contour_frame(const ProbabilityGrid& grid)
{
    PlotFrame f;
    f.x_min = grid.tau_axis.front();
    f.x_max = grid.tau_axis.back();
    f.y_min = grid.theta_axis.front();
    f.y_max = grid.theta_axis.back();
    return f;
}

std::string render_contour_plot(const ContourPlot& plot)
{
    if (plot.grid == nullptr || plot.grid->tau_axis.size() < 2 || plot.grid->theta_axis.size() < 2)
    {
        throw DomainError("contour plot needs a grid with at least 2 x 2 points");
    }
    const ProbabilityGrid& g = *plot.grid;
    const PlotFrame f = contour_frame(g);

    std::ostringstream os;
    open_svg(os, plot.title);
    open_frame(os, f);

    const std::size_t rows = g.theta_axis.size();
    const std::size_t cols = g.tau_axis.size();
    auto colour_of = [&](std::size_t i, std::size_t j) -> std::string_view {
        const double v = g.at(i, j);
        return std::isnan(v) ? kMissingColour : kBandColours[band_index(v)];
    };
    for (std::size_t i = 0; i < rows; ++i)
    {
        const auto [y_lo, y_hi] = cell_span(g.theta_axis, i);
        std::size_t j = 0;
        while (j < cols)
        {
            const std::string_view colour = colour_of(i, j);
            std::size_t end = j + 1;
            while (end < cols && colour_of(i, end) == colour)
            {
                ++end;
            }
            const double x0 = cell_span(g.tau_axis, j).first;
            const double x1 = cell_span(g.tau_axis, end - 1).second;
            os << "<rect class=\"band\" x=\"" << fixed(f.px(x0)) << "\" y=\"" << fixed(f.py(y_hi)) << "\" width=\""
               << fixed(f.px(x1) - f.px(x0)) << "\" height=\"" << fixed(f.py(y_lo) - f.py(y_hi)) << "\" fill=\""
               << colour << "\" stroke=\"none\"/>\n";
            j = end;
        }
    }

    for (const ContourSet& set : plot.contours)
    {
        const bool highlight = std::abs(set.level - 1e-3) < 1e-15;
        const std::string attributes = std::string("class=\"contour\" data-level=\"") + general(set.level, 17) +
                                       "\" stroke=\"" + (highlight ? "#d62728" : "#ffffff") + "\" stroke-width=\"" +
                                       (highlight ? "2" : "1") + "\"";
        for (const Polyline& line : set.polylines)
        {
            polyline(os, f, line.points, attributes);
        }
    }

    if (plot.homm)
    {
        std::vector<ContourPoint> run;
        auto flush = [&] {
            if (run.size() >= 2)
            {
                polyline(os, f, run, "class=\"homm\" stroke=\"black\" stroke-width=\"2\"");
            }
            else if (run.size() == 1)
            {
                os << "<circle class=\"homm-point\" cx=\"" << fixed(f.px(run[0].tau)) << "\" cy=\""
                   << fixed(f.py(run[0].theta)) << "\" r=\"3\" fill=\"black\"/>\n";
            }
            run.clear();
        };
        for (const HommPoint& p : plot.homm->points)
        {
            if (p.converged)
            {
                run.push_back(ContourPoint{p.tau, p.theta});
            }
            else
            {
                flush();
            }
        }
        flush();
    }

    axes(os, f, "tau", "theta (rad)");
    os << "</g>\n";

    const double x = f.left + f.width + 12.0;
    for (std::size_t k = 0; k < kBandColours.size(); ++k)
    {
        const double y = f.top + 20.0 * static_cast<double>(k);
        os << "<rect class=\"legend\" x=\"" << fixed(x) << "\" y=\"" << fixed(y) << "\" width=\"14\" height=\"14\" fill=\""
           << kBandColours[k] << "\" stroke=\"black\"/>\n"
           << "<text x=\"" << fixed(x + 18.0) << "\" y=\"" << fixed(y + 11.0) << "\">" << general(kBandEdges[k], 3)
           << "-" << general(kBandEdges[k + 1], 3) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace mrrhom
