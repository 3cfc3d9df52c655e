#include "mrrhom/homm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <thread>

#include "mrrhom/errors.hpp"
#include "mrrhom/fock.hpp"

namespace mrrhom
{

namespace
{

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Half-width of the warm-start window used when following a curve.
constexpr double kWarmWindow = 0.05;
constexpr std::size_t kWarmPoints = 81;

void require_sorted(std::span<const double> axis, const char* name)
{
    if (axis.empty())
    {
        throw DomainError(std::string(name) + " axis is empty");
    }
    for (std::size_t i = 1; i < axis.size(); ++i)
    {
        if (!(axis[i] > axis[i - 1]))
        {
            throw DomainError(std::string(name) + " axis must be strictly increasing");
        }
    }
}

double coincidence_at(const ChainSpec& chain, double tau, double theta, PortPair in, PortPair out)
{
    return coincidence_probability(compose_chain(chain.tuned(tau, theta)), in, out);
}

// Same as coincidence_at, but a failed evaluation counts as "no dip here".
double safe_coincidence(const ChainSpec& chain, double tau, double theta, PortPair in, PortPair out)
{
    try
    {
        return coincidence_at(chain, tau, theta, in, out);
    }
    catch (const std::runtime_error&)
    {
        return kInf;
    }
}

double detected_total(const ChainSpec& chain, double tau, double theta, PortPair in, PortPair out)
{
    const ScatteringMatrix s = compose_chain(chain.tuned(tau, theta));
    return output_distribution(s, FockState::from_pair(in), out).detected->total;
}

template <typename F>
std::pair<double, double> golden_section(F&& f, double lo, double hi, double tol)
{
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > tol)
    {
        if (f1 <= f2)
        {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
        else
        {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

void validate_bracket(TauBracket b)
{
    if (!(b.lo >= 0.0 && b.hi <= 1.0 && b.lo < b.hi))
    {
        throw DomainError("tau bracket must satisfy 0 <= lo < hi <= 1");
    }
}

} // namespace

std::vector<double> linspace(double lo, double hi, std::size_t count)
{
    if (count < 2)
    {
        throw DomainError("linspace needs at least two points");
    }
    std::vector<double> v(count);
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
    {
        v[i] = lo + step * static_cast<double>(i);
    }
    v.back() = hi;
    return v;
}

std::vector<double> default_tau_axis() { return linspace(0.005, 0.995, 201); }

std::vector<double> default_theta_axis() { return linspace(0.0, 2.0 * std::numbers::pi, 201); }

ProbabilityGrid probability_grid(const ChainSpec& chain,
                                 PortPair in_ports,
                                 PortPair out_ports,
                                 std::span<const double> tau_axis,
                                 std::span<const double> theta_axis,
                                 unsigned threads)
{
    require_sorted(tau_axis, "tau");
    require_sorted(theta_axis, "theta");
    if (!in_ports.distinct() || !out_ports.distinct())
    {
        throw DomainError("probability_grid: port pairs must be distinct");
    }

    ProbabilityGrid grid{std::vector<double>(tau_axis.begin(), tau_axis.end()),
                         std::vector<double>(theta_axis.begin(), theta_axis.end()),
                         std::vector<double>(tau_axis.size() * theta_axis.size(), kNaN),
                         chain,
                         in_ports,
                         out_ports,
                         0};

    const std::size_t rows = theta_axis.size();
    const std::size_t cols = tau_axis.size();
    std::vector<std::size_t> failures(rows, 0);
    std::atomic<std::size_t> next_row{0};

    auto worker = [&] {
        for (std::size_t i = next_row++; i < rows; i = next_row++)
        {
            for (std::size_t j = 0; j < cols; ++j)
            {
                try
                {
                    grid.values[i * cols + j] = coincidence_at(chain, tau_axis[j], theta_axis[i], in_ports, out_ports);
                }
                catch (const std::runtime_error&)
                {
                    ++failures[i];
                }
            }
        }
    };

    const unsigned workers = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::max<std::size_t>(rows, 1)));
    if (workers == 1)
    {
        worker();
    }
    else
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t)
        {
            pool.emplace_back(worker);
        }
    }
    for (std::size_t f : failures)
    {
        grid.failed_cells += f;
    }
    return grid;
}

SliceTable probability_slice(const ChainSpec& chain,
                             PortPair in_ports,
                             PortPair out_ports,
                             double theta,
                             std::span<const double> tau_axis)
{
    require_sorted(tau_axis, "tau");
    if (!in_ports.distinct() || !out_ports.distinct())
    {
        throw DomainError("probability_slice: port pairs must be distinct");
    }
    SliceTable table{theta, in_ports, out_ports, {}};
    table.rows.reserve(tau_axis.size());
    const FockState input = FockState::from_pair(in_ports);
    for (double tau : tau_axis)
    {
        const ScatteringMatrix s = compose_chain(chain.tuned(tau, theta));
        const OutputDistribution dist = output_distribution(s, input, out_ports);
        const DetectedSums& d = *dist.detected;
        table.rows.push_back(SliceRow{tau, dist.accounted(), d.total, d.p11(), d.p20(), d.p02()});
    }
    return table;
}

std::vector<HommPoint> find_homm_roots(const ChainSpec& chain,
                                       double theta,
                                       PortPair in_ports,
                                       PortPair out_ports,
                                       TauBracket bracket,
                                       const HommSearchOptions& options)
{
    validate_bracket(bracket);
    if (!in_ports.distinct() || !out_ports.distinct())
    {
        throw DomainError("find_homm_roots: port pairs must be distinct");
    }
    auto p = [&](double tau) { return safe_coincidence(chain, tau, theta, in_ports, out_ports); };

    const std::vector<double> xs = linspace(bracket.lo, bracket.hi, std::max<std::size_t>(options.coarse_points, 3));
    std::vector<double> vs(xs.size());
    std::transform(xs.begin(), xs.end(), vs.begin(), p);

    const std::size_t n = xs.size();
    std::vector<std::size_t> seeds;
    for (std::size_t i = 1; i + 1 < n; ++i)
    {
        const bool local_min = vs[i] <= vs[i - 1] && vs[i] <= vs[i + 1] && (vs[i] < vs[i - 1] || vs[i] < vs[i + 1]);
        if (local_min && vs[i] < kDipCandidate)
        {
            seeds.push_back(i);
        }
    }
    const auto global = static_cast<std::size_t>(std::distance(vs.begin(), std::min_element(vs.begin(), vs.end())));
    if (std::find(seeds.begin(), seeds.end(), global) == seeds.end())
    {
        seeds.push_back(global);
    }

    std::vector<HommPoint> found;
    for (std::size_t i : seeds)
    {
        const double lo = xs[i == 0 ? 0 : i - 1];
        const double hi = xs[i + 1 == n ? n - 1 : i + 1];
        auto [tau, value] = golden_section(p, lo, hi, options.tau_tolerance);
        if (vs[i] < value)
        {
            tau = xs[i];
            value = vs[i];
        }
        HommPoint point{theta, tau, value, 0.0, false};
        try
        {
            point.detected = detected_total(chain, tau, theta, in_ports, out_ports);
        }
        catch (const std::runtime_error&)
        {
            point.detected = 0.0;
        }
        point.converged = point.residual < kHommResidual && point.detected > kDetectionFloor;
        found.push_back(point);
    }

    std::sort(found.begin(), found.end(), [](const HommPoint& a, const HommPoint& b) { return a.tau < b.tau; });
    std::vector<HommPoint> unique;
    for (const HommPoint& pt : found)
    {
        if (!unique.empty() && std::abs(pt.tau - unique.back().tau) < 10.0 * options.tau_tolerance)
        {
            if (pt.residual < unique.back().residual)
            {
                unique.back() = pt;
            }
            continue;
        }
        unique.push_back(pt);
    }
    return unique;
}

HommPoint find_homm_tau(const ChainSpec& chain,
                        double theta,
                        PortPair in_ports,
                        PortPair out_ports,
                        TauBracket bracket,
                        const HommSearchOptions& options)
{
    const std::vector<HommPoint> roots = find_homm_roots(chain, theta, in_ports, out_ports, bracket, options);
    for (const HommPoint& r : roots)
    {
        if (r.converged)
        {
            return r;
        }
    }
    const HommPoint* best = nullptr;
    for (const HommPoint& r : roots)
    {
        if (r.detected > kDetectionFloor && (best == nullptr || r.residual < best->residual))
        {
            best = &r;
        }
    }
    if (best == nullptr)
    {
        best = &*std::min_element(roots.begin(), roots.end(), [](const HommPoint& a, const HommPoint& b) {
            return a.residual < b.residual;
        });
    }
    return *best;
}

std::size_t HommCurve::converged_count() const
{
    return static_cast<std::size_t>(
        std::count_if(points.begin(), points.end(), [](const HommPoint& p) { return p.converged; }));
}

HommCurve trace_homm_curve(const ChainSpec& chain,
                           std::span<const double> theta_axis,
                           PortPair in_ports,
                           PortPair out_ports,
                           TauBracket bracket,
                           const HommSearchOptions& options)
{
    require_sorted(theta_axis, "theta");
    validate_bracket(bracket);

    auto nearest_converged = [](const std::vector<HommPoint>& roots, double target) -> const HommPoint* {
        const HommPoint* best = nullptr;
        for (const HommPoint& r : roots)
        {
            if (r.converged && (best == nullptr || std::abs(r.tau - target) < std::abs(best->tau - target)))
            {
                best = &r;
            }
        }
        return best;
    };

    HommCurve curve;
    curve.points.reserve(theta_axis.size());
    double previous = kNaN;
    for (double theta : theta_axis)
    {
        std::optional<HommPoint> chosen;
        if (!std::isnan(previous))
        {
            const TauBracket window{std::max(bracket.lo, previous - kWarmWindow),
                                    std::min(bracket.hi, previous + kWarmWindow)};
            HommSearchOptions warm = options;
            warm.coarse_points = kWarmPoints;
            const auto roots = find_homm_roots(chain, theta, in_ports, out_ports, window, warm);
            if (const HommPoint* r = nearest_converged(roots, previous))
            {
                chosen = *r;
            }
        }
        if (!chosen)
        {
            const auto roots = find_homm_roots(chain, theta, in_ports, out_ports, bracket, options);
            const double target = std::isnan(previous) ? 0.5 * (bracket.lo + bracket.hi) : previous;
            if (const HommPoint* r = nearest_converged(roots, target))
            {
                chosen = *r;
            }
            else
            {
                chosen = find_homm_tau(chain, theta, in_ports, out_ports, bracket, options);
            }
        }
        previous = chosen->converged ? chosen->tau : kNaN;
        curve.points.push_back(*chosen);
    }
    return curve;
}

std::vector<AltIoEntry> alternate_io_study(const ChainSpec& chain,
                                           PortPair in_ports,
                                           PortPair out_ports,
                                           std::span<const double> gammas,
                                           double theta,
                                           std::span<const double> tau_axis)
{
    const bool supported = (in_ports == kAB && (out_ports == kCD || out_ports == kAB)) ||
                           (in_ports == kAD && out_ports == kAD) || (in_ports == kCD && out_ports == kCD);
    if (!supported)
    {
        throw DomainError("alternate_io_study supports AB->CD, AD->AD, AB->AB and CD->CD, got " + to_string(in_ports) +
                          "->" + to_string(out_ports));
    }
    require_sorted(tau_axis, "tau");

    std::vector<AltIoEntry> study;
    study.reserve(gammas.size());
    for (double gamma : gammas)
    {
        std::vector<RingParams> rings;
        for (const RingParams& r : chain.rings())
        {
            rings.push_back(r.with_gamma(gamma));
        }
        const ChainSpec with_gamma{std::move(rings), chain.bus_phase()};

        AltIoEntry entry{gamma, probability_slice(with_gamma, in_ports, out_ports, theta, tau_axis), {}, {}};
        for (const SliceRow& row : entry.slice.rows)
        {
            if (row.p11 < kDipFlag)
            {
                entry.flagged_taus.push_back(row.tau);
            }
        }
        const TauBracket range{tau_axis.front(), tau_axis.back()};
        for (const HommPoint& dip : find_homm_roots(with_gamma, theta, in_ports, out_ports, range))
        {
            if (dip.detected > kDetectionFloor)
            {
                entry.dips.push_back(dip);
            }
        }
        study.push_back(std::move(entry));
    }
    return study;
}

} // namespace mrrhom
