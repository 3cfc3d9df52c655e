#ifndef MRRHOM_CONTOUR_HPP
#define MRRHOM_CONTOUR_HPP

#include <span>
#include <vector>

#include "mrrhom/homm.hpp"

namespace mrrhom
{

struct ContourPoint
{
    double tau = 0.0;
    double theta = 0.0;
};

struct Polyline
{
    std::vector<ContourPoint> points;
    // closed polylines repeat their first point at the end
    bool closed = false;
};

struct ContourSet
{
    double level = 0.0;
    std::vector<Polyline> polylines;
};

// Marching squares over a (tau, theta) field. `values` is row-major with
// rows along theta. Corners below `level` are inside; saddles are resolved
// with the cell-centre average. Cells with a NaN corner are skipped.
std::vector<Polyline> marching_squares(std::span<const double> tau_axis,
                                       std::span<const double> theta_axis,
                                       std::span<const double> values,
                                       double level);

// Throws DomainError unless every level lies in (0, 1).
std::vector<ContourSet> extract_contours(const ProbabilityGrid& grid, std::span<const double> levels);

// Even-odd test; open polylines are closed with the chord between their ends.
bool encloses(const Polyline& line, ContourPoint p);

// Theta values where the polyline crosses the vertical line tau = const, ascending.
std::vector<double> theta_crossings(const Polyline& line, double tau);

} // namespace mrrhom

#endif // MRRHOM_CONTOUR_HPP
