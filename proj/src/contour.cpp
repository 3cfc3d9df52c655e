#include "mrrhom/contour.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "mrrhom/errors.hpp"

namespace mrrhom
{

namespace
{

using EdgeId = std::size_t;

struct Field
{
    std::span<const double> tau;
    std::span<const double> theta;
    std::span<const double> values;
    double level;

    std::size_t cols() const { return tau.size(); }
    double at(std::size_t i, std::size_t j) const { return values[i * cols() + j]; }

    // Horizontal edges join (i, j)-(i, j+1); vertical edges join (i, j)-(i+1, j).
    EdgeId horizontal(std::size_t i, std::size_t j) const { return 2 * (i * cols() + j); }
    EdgeId vertical(std::size_t i, std::size_t j) const { return 2 * (i * cols() + j) + 1; }

    ContourPoint crossing(EdgeId id) const
    {
        const std::size_t cell = id / 2;
        const std::size_t i = cell / cols();
        const std::size_t j = cell % cols();
        const bool is_vertical = (id % 2) == 1;
        const std::size_t i2 = is_vertical ? i + 1 : i;
        const std::size_t j2 = is_vertical ? j : j + 1;
        const double v0 = at(i, j);
        const double v1 = at(i2, j2);
        const double t = (v1 == v0) ? 0.5 : (level - v0) / (v1 - v0);
        return ContourPoint{tau[j] + t * (tau[j2] - tau[j]), theta[i] + t * (theta[i2] - theta[i])};
    }
};

} // namespace

std::vector<Polyline> marching_squares(std::span<const double> tau_axis,
                                       std::span<const double> theta_axis,
                                       std::span<const double> values,
                                       double level)
{
    if (values.size() != tau_axis.size() * theta_axis.size())
    {
        throw DomainError("marching_squares: value count does not match the axes");
    }
    const Field f{tau_axis, theta_axis, values, level};
    const std::size_t rows = theta_axis.size();
    const std::size_t cols = tau_axis.size();

    std::map<EdgeId, std::vector<EdgeId>> links;
    auto segment = [&](EdgeId u, EdgeId v) {
        links[u].push_back(v);
        links[v].push_back(u);
    };

    for (std::size_t i = 0; i + 1 < rows; ++i)
    {
        for (std::size_t j = 0; j + 1 < cols; ++j)
        {
            const double bl = f.at(i, j), br = f.at(i, j + 1), tr = f.at(i + 1, j + 1), tl = f.at(i + 1, j);
            if (std::isnan(bl) || std::isnan(br) || std::isnan(tr) || std::isnan(tl))
            {
                continue;
            }
            const int code = (bl < level ? 1 : 0) | (br < level ? 2 : 0) | (tr < level ? 4 : 0) | (tl < level ? 8 : 0);
            const EdgeId bottom = f.horizontal(i, j);
            const EdgeId top = f.horizontal(i + 1, j);
            const EdgeId left = f.vertical(i, j);
            const EdgeId right = f.vertical(i, j + 1);
            const bool centre_inside = 0.25 * (bl + br + tr + tl) < level;
            switch (code)
            {
                case 0:
                case 15:
                    break;
                case 1:
                case 14:
                    segment(left, bottom);
                    break;
                case 2:
                case 13:
                    segment(bottom, right);
                    break;
                case 3:
                case 12:
                    segment(left, right);
                    break;
                case 4:
                case 11:
                    segment(right, top);
                    break;
                case 6:
                case 9:
                    segment(bottom, top);
                    break;
                case 7:
                case 8:
                    segment(left, top);
                    break;
                case 5: // bl and tr inside
                    if (centre_inside)
                    {
                        segment(bottom, right);
                        segment(top, left);
                    }
                    else
                    {
                        segment(left, bottom);
                        segment(right, top);
                    }
                    break;
                case 10: // br and tl inside
                    if (centre_inside)
                    {
                        segment(left, bottom);
                        segment(right, top);
                    }
                    else
                    {
                        segment(bottom, right);
                        segment(top, left);
                    }
                    break;
                default:
                    break;
            }
        }
    }

    std::vector<Polyline> lines;
    std::map<EdgeId, bool> used;
    auto walk = [&](EdgeId start) {
        Polyline line;
        EdgeId previous = start;
        EdgeId current = start;
        line.points.push_back(f.crossing(start));
        used[start] = true;
        while (true)
        {
            const auto& next = links[current];
            EdgeId step = current;
            bool advanced = false;
            for (EdgeId candidate : next)
            {
                if (candidate == start && candidate != previous && line.points.size() > 2)
                {
                    line.points.push_back(line.points.front());
                    line.closed = true;
                    return line;
                }
                if (!used[candidate])
                {
                    step = candidate;
                    advanced = true;
                    break;
                }
            }
            if (!advanced)
            {
                return line;
            }
            used[step] = true;
            line.points.push_back(f.crossing(step));
            previous = current;
            current = step;
        }
    };

    // open chains first (they start at an edge with one neighbour), then loops
    for (const auto& [edge, neighbours] : links)
    {
        if (neighbours.size() == 1 && !used[edge])
        {
            lines.push_back(walk(edge));
        }
    }
    for (const auto& [edge, neighbours] : links)
    {
        if (!used[edge])
        {
            lines.push_back(walk(edge));
        }
    }
    return lines;
}

std::vector<ContourSet> extract_contours(const ProbabilityGrid& grid, std::span<const double> levels)
{
    std::vector<ContourSet> sets;
    sets.reserve(levels.size());
    for (double level : levels)
    {
        if (!(level > 0.0 && level < 1.0))
        {
            throw DomainError("contour levels must lie in (0, 1)");
        }
        sets.push_back(ContourSet{level, marching_squares(grid.tau_axis, grid.theta_axis, grid.values, level)});
    }
    return sets;
}

bool encloses(const Polyline& line, ContourPoint p)
{
    const auto& pts = line.points;
    if (pts.size() < 3)
    {
        return false;
    }
    bool inside = false;
    const std::size_t n = pts.size();
    for (std::size_t k = 0, prev = n - 1; k < n; prev = k++)
    {
        const ContourPoint& a = pts[k];
        const ContourPoint& b = pts[prev];
        if ((a.theta > p.theta) != (b.theta > p.theta))
        {
            const double tau_at = a.tau + (p.theta - a.theta) * (b.tau - a.tau) / (b.theta - a.theta);
            if (p.tau < tau_at)
            {
                inside = !inside;
            }
        }
    }
    return inside;
}

std::vector<double> theta_crossings(const Polyline& line, double tau)
{
    std::vector<double> thetas;
    const auto& pts = line.points;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k)
    {
        const ContourPoint& a = pts[k];
        const ContourPoint& b = pts[k + 1];
        const double lo = std::min(a.tau, b.tau);
        const double hi = std::max(a.tau, b.tau);
        if (tau >= lo && tau < hi)
        {
            const double t = (tau - a.tau) / (b.tau - a.tau);
            thetas.push_back(a.theta + t * (b.theta - a.theta));
        }
    }
    std::sort(thetas.begin(), thetas.end());
    return thetas;
}

} // namespace mrrhom
