#include "mrrhom/ring.hpp"

#include <cmath>
#include <sstream>

#include "mrrhom/errors.hpp"

namespace mrrhom
{

namespace
{

using Matrix8c = Eigen::Matrix<Complex, 8, 8>;
using Vector8c = Eigen::Matrix<Complex, 8, 1>;

// Unknown layout of the interior system.
enum Slot : int
{
    kCcw0 = 0,
    kCcwHalfMinus,
    kCcwHalfPlus,
    kCcwL,
    kCw0,
    kCwHalfMinus,
    kCwHalfPlus,
    kCwL
};

constexpr double kMinRcond = 1e-14;

void require_unit_interval(double value, const char* name)
{
    if (!(value >= 0.0 && value <= 1.0))
    {
        std::ostringstream msg;
        msg << name << " must lie in [0, 1], got " << value;
        throw DomainError(msg.str());
    }
}

std::string describe(const RingParams& p)
{
    std::ostringstream os;
    os.precision(17);
    os << "(tau=" << p.tau() << ", theta=" << p.theta() << ", gamma=" << p.gamma()
       << ", alpha=" << p.alpha() << ")";
    return os.str();
}

// Each coupler maps (bus in, ring arriving) -> (bus out, ring leaving); each
// backscatter splitter maps (ccw arriving, cw arriving) -> (ccw leaving, cw
// leaving) after half a round trip.
Matrix8c interior_system(const RingParams& params)
{
    const Matrix2c coupler = coupler_matrix(params.tau());
    const Matrix2c splitter = backscatter_matrix(params.gamma());
    const Complex half_trip = std::sqrt(params.alpha()) * std::polar(1.0, 0.5 * params.theta());

    // Row k is the equation defining slot k, so the identity diagonal holds
    // every left-hand side.
    Matrix8c m = Matrix8c::Identity();

    // bottom ccw (a, ccw_L) -> (a_out, ccw_0); top ccw (b, ccw_half_minus) -> (b_out, ccw_half_plus)
    // bottom cw (c, cw_0) -> (c_out, cw_L);    top cw (d, cw_half_plus) -> (d_out, cw_half_minus)
    m(kCcw0, kCcwL) = -coupler(1, 1);
    m(kCcwHalfPlus, kCcwHalfMinus) = -coupler(1, 1);
    m(kCwL, kCw0) = -coupler(1, 1);
    m(kCwHalfMinus, kCwHalfPlus) = -coupler(1, 1);

    // left splitter: (ccw_half_plus, cw_L) -> (ccw_L, cw_half_plus)
    m(kCcwL, kCcwHalfPlus) = -half_trip * splitter(0, 0);
    m(kCcwL, kCwL) = -half_trip * splitter(0, 1);
    m(kCwHalfPlus, kCcwHalfPlus) = -half_trip * splitter(1, 0);
    m(kCwHalfPlus, kCwL) = -half_trip * splitter(1, 1);

    // right splitter: (ccw_0, cw_half_minus) -> (ccw_half_minus, cw_0)
    m(kCcwHalfMinus, kCcw0) = -half_trip * splitter(0, 0);
    m(kCcwHalfMinus, kCwHalfMinus) = -half_trip * splitter(0, 1);
    m(kCw0, kCcw0) = -half_trip * splitter(1, 0);
    m(kCw0, kCwHalfMinus) = -half_trip * splitter(1, 1);
    return m;
}

Vector8c interior_rhs(const RingParams& params, const std::array<Complex, kPortCount>& in)
{
    const Complex into_ring = coupler_matrix(params.tau())(1, 0);
    Vector8c rhs = Vector8c::Zero();
    rhs(kCcw0) = into_ring * in[index(Port::a)];
    rhs(kCcwHalfPlus) = into_ring * in[index(Port::b)];
    rhs(kCwL) = into_ring * in[index(Port::c)];
    rhs(kCwHalfMinus) = into_ring * in[index(Port::d)];
    return rhs;
}

InteriorState unpack(const Vector8c& x)
{
    return InteriorState{x(kCcw0), x(kCcwHalfMinus), x(kCcwHalfPlus), x(kCcwL),
                         x(kCw0),  x(kCwHalfMinus),  x(kCwHalfPlus),  x(kCwL)};
}

// Factorizes the interior system once; solve() can then serve many inputs.
class InteriorSolver
{
public:
    explicit InteriorSolver(const RingParams& params) : params_(params)
    {
        // With kappa = 0 no light reaches the ring. The closed loop can be
        // exactly resonant there, so skip the solve and keep the ring dark.
        if (params.kappa() == 0.0)
        {
            dark_ = true;
            return;
        }
        lu_.compute(interior_system(params));
        const double rcond = lu_.rcond();
        if (!(rcond >= kMinRcond))
        {
            std::ostringstream msg;
            msg << "interior system singular (rcond=" << rcond << ") at " << describe(params);
            throw SolverError(msg.str());
        }
    }

    InteriorState solve(const std::array<Complex, kPortCount>& inputs) const
    {
        if (dark_)
        {
            return InteriorState{};
        }
        const Vector8c x = lu_.solve(interior_rhs(params_, inputs));
        if (!x.allFinite())
        {
            throw SolverError("interior solve produced non-finite amplitudes at " + describe(params_));
        }
        return unpack(x);
    }

private:
    RingParams params_;
    bool dark_ = false;
    Eigen::PartialPivLU<Matrix8c> lu_;
};

} // namespace

RingParams::RingParams(double tau, double theta, double gamma, double alpha)
    : tau_(tau), theta_(theta), gamma_(gamma), alpha_(alpha)
{
    require_unit_interval(tau, "tau");
    require_unit_interval(gamma, "gamma");
    if (!(alpha > 0.0 && alpha <= 1.0))
    {
        std::ostringstream msg;
        msg << "alpha must lie in (0, 1], got " << alpha;
        throw DomainError(msg.str());
    }
    if (!std::isfinite(theta))
    {
        throw DomainError("theta must be finite");
    }
}

double RingParams::kappa() const noexcept { return std::sqrt(1.0 - tau_ * tau_); }

Matrix2c ScatteringMatrix::block(PortPair outs, PortPair ins) const
{
    Matrix2c b;
    b << (*this)(outs.first, ins.first), (*this)(outs.first, ins.second),
        (*this)(outs.second, ins.first), (*this)(outs.second, ins.second);
    return b;
}

double ScatteringMatrix::unitarity_defect() const
{
    return (m_.adjoint() * m_ - Matrix4c::Identity()).cwiseAbs().maxCoeff();
}

double ScatteringMatrix::max_singular_value() const
{
    Eigen::JacobiSVD<Matrix4c> svd(m_);
    return svd.singularValues()(0);
}

Matrix2c coupler_matrix(double tau)
{
    require_unit_interval(tau, "tau");
    const double kappa = std::sqrt(1.0 - tau * tau);
    Matrix2c m;
    m << tau, kappa, -kappa, tau;
    return m;
}

Matrix2c backscatter_matrix(double gamma)
{
    require_unit_interval(gamma, "gamma");
    const double t = std::sqrt(gamma);
    const double r = std::sqrt(1.0 - gamma);
    Matrix2c m;
    m << t, r, -r, t;
    return m;
}

InteriorState solve_interior(const RingParams& params, const std::array<Complex, kPortCount>& inputs)
{
    return InteriorSolver(params).solve(inputs);
}

std::array<Complex, kPortCount> exterior_outputs(const RingParams& params,
                                                 const std::array<Complex, kPortCount>& in,
                                                 const InteriorState& r)
{
    const Matrix2c c = coupler_matrix(params.tau());
    return {c(0, 0) * in[index(Port::a)] + c(0, 1) * r.ccw_L,
            c(0, 0) * in[index(Port::b)] + c(0, 1) * r.ccw_half_minus,
            c(0, 0) * in[index(Port::c)] + c(0, 1) * r.cw_0,
            c(0, 0) * in[index(Port::d)] + c(0, 1) * r.cw_half_plus};
}

ScatteringMatrix build_scattering(const RingParams& params)
{
    const InteriorSolver solver(params);
    Matrix4c s;
    for (Port in : kAllPorts)
    {
        std::array<Complex, kPortCount> unit{};
        unit[index(in)] = 1.0;
        const auto out = exterior_outputs(params, unit, solver.solve(unit));
        for (Port p : kAllPorts)
        {
            s(index(p), index(in)) = out[index(p)];
        }
    }
    return ScatteringMatrix{s};
}

std::vector<std::pair<double, double>> transmission_spectrum(const RingParams& params,
                                                             Port in_port,
                                                             Port out_port,
                                                             std::span<const double> theta_grid)
{
    if (theta_grid.empty())
    {
        throw DomainError("transmission_spectrum: theta grid is empty");
    }
    std::vector<std::pair<double, double>> spectrum;
    spectrum.reserve(theta_grid.size());
    for (double theta : theta_grid)
    {
        const ScatteringMatrix s = build_scattering(params.with_theta(theta));
        spectrum.emplace_back(theta, std::norm(s(out_port, in_port)));
    }
    return spectrum;
}

} // namespace mrrhom
