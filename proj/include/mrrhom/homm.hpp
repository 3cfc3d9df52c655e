#ifndef MRRHOM_HOMM_HPP
#define MRRHOM_HOMM_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "mrrhom/network.hpp"
#include "mrrhom/ports.hpp"

namespace mrrhom
{

// A HOMM point needs the coincidence probability below this ...
inline constexpr double kHommResidual = 1e-10;
// ... while the detected pair still sees photons with at least this probability.
inline constexpr double kDetectionFloor = 1e-3;
// Coarse-scan dips below this are refined even when they are not the global minimum.
inline constexpr double kDipCandidate = 1e-4;
// Slice entries with {1,1} below this are flagged in alternate-I/O studies.
inline constexpr double kDipFlag = 1e-6;

std::vector<double> linspace(double lo, double hi, std::size_t count);

// 201 points over [0.005, 0.995] and [0, 2 pi].
std::vector<double> default_tau_axis();
std::vector<double> default_theta_axis();

// Coincidence probability P_{1,1|1,1} over (theta, tau). The chain acts as a
// template: see ChainSpec::tuned.
struct ProbabilityGrid
{
    std::vector<double> tau_axis;
    std::vector<double> theta_axis;
    // row-major, row = theta index, column = tau index; NaN where the cell
    // could not be evaluated
    std::vector<double> values;
    ChainSpec chain;
    PortPair in_ports;
    PortPair out_ports;
    std::size_t failed_cells = 0;

    double at(std::size_t theta_index, std::size_t tau_index) const
    {
        return values[theta_index * tau_axis.size() + tau_index];
    }
};

// Rows are evaluated on up to `threads` workers; the result does not depend on
// the thread count. Throws DomainError for empty or unsorted axes.
ProbabilityGrid probability_grid(const ChainSpec& chain,
                                 PortPair in_ports,
                                 PortPair out_ports,
                                 std::span<const double> tau_axis,
                                 std::span<const double> theta_axis,
                                 unsigned threads = 1);

struct SliceRow
{
    double tau = 0.0;
    double total = 0.0;    // all two-photon outputs on all four ports
    double detected = 0.0; // both photons on the detected pair
    double p11 = 0.0;
    double p20 = 0.0;
    double p02 = 0.0;
};

struct SliceTable
{
    double theta = 0.0;
    PortPair in_ports;
    PortPair out_ports;
    std::vector<SliceRow> rows;
};

SliceTable probability_slice(const ChainSpec& chain,
                             PortPair in_ports,
                             PortPair out_ports,
                             double theta,
                             std::span<const double> tau_axis);

struct TauBracket
{
    double lo = 0.0;
    double hi = 1.0;
};

struct HommPoint
{
    double theta = 0.0;
    double tau = 0.0;
    double residual = 0.0; // P_{1,1} at tau
    double detected = 0.0; // detected-pair total at tau
    bool converged = false;
};

struct HommSearchOptions
{
    std::size_t coarse_points = 401;
    double tau_tolerance = 1e-8;
};

// Every refined dip of P_{1,1}(tau) inside the bracket, ascending in tau. A
// dip is converged when its residual is below kHommResidual and the detected
// pair still sees at least kDetectionFloor. Throws DomainError for an empty
// or out-of-range bracket.
std::vector<HommPoint> find_homm_roots(const ChainSpec& chain,
                                       double theta,
                                       PortPair in_ports,
                                       PortPair out_ports,
                                       TauBracket bracket = {},
                                       const HommSearchOptions& options = {});

// First converged root by tau; otherwise the best non-trivial dip (or the
// overall minimum) with converged = false.
HommPoint find_homm_tau(const ChainSpec& chain,
                        double theta,
                        PortPair in_ports,
                        PortPair out_ports,
                        TauBracket bracket = {},
                        const HommSearchOptions& options = {});

struct HommCurve
{
    // one point per theta of the axis; gaps have converged = false
    std::vector<HommPoint> points;

    std::size_t converged_count() const;
};

// Follows the root across theta, warm-starting each search near the previous
// converged tau and falling back to the full bracket.
HommCurve trace_homm_curve(const ChainSpec& chain,
                           std::span<const double> theta_axis,
                           PortPair in_ports,
                           PortPair out_ports,
                           TauBracket bracket = {},
                           const HommSearchOptions& options = {});

struct AltIoEntry
{
    double gamma = 1.0;
    SliceTable slice;
    // slice taus where {1,1} < kDipFlag
    std::vector<double> flagged_taus;
    // refined non-trivial dips (detected >= kDetectionFloor), ascending in tau
    std::vector<HommPoint> dips;
};

// Sets every ring's gamma to each listed value and records the theta slice.
std::vector<AltIoEntry> alternate_io_study(const ChainSpec& chain,
                                           PortPair in_ports,
                                           PortPair out_ports,
                                           std::span<const double> gammas,
                                           double theta,
                                           std::span<const double> tau_axis);

} // namespace mrrhom

#endif // MRRHOM_HOMM_HPP
