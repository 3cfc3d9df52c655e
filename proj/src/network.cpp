#include "mrrhom/network.hpp"

#include <cmath>
#include <sstream>

#include "mrrhom/errors.hpp"

namespace mrrhom
{

namespace
{

constexpr std::array<int, 2> kRight = {static_cast<int>(Port::a), static_cast<int>(Port::d)};
constexpr std::array<int, 2> kLeft = {static_cast<int>(Port::b), static_cast<int>(Port::c)};

constexpr double kMinFeedbackRcond = 1e-13;

Matrix2c sub(const Matrix4c& m, const std::array<int, 2>& rows, const std::array<int, 2>& cols)
{
    Matrix2c b;
    for (int i = 0; i < 2; ++i)
    {
        for (int j = 0; j < 2; ++j)
        {
            b(i, j) = m(rows[i], cols[j]);
        }
    }
    return b;
}

void put(Matrix4c& m, const std::array<int, 2>& rows, const std::array<int, 2>& cols, const Matrix2c& b)
{
    for (int i = 0; i < 2; ++i)
    {
        for (int j = 0; j < 2; ++j)
        {
            m(rows[i], cols[j]) = b(i, j);
        }
    }
}

Matrix2c feedback_inverse(const Matrix2c& loop)
{
    Eigen::PartialPivLU<Matrix2c> lu(Matrix2c::Identity() - loop);
    const double rcond = lu.rcond();
    if (!(rcond >= kMinFeedbackRcond))
    {
        const double cond = rcond > 0.0 ? 1.0 / rcond : INFINITY;
        std::ostringstream msg;
        msg << "star product feedback block is singular (condition number " << cond << ")";
        throw CompositionError(msg.str(), cond);
    }
    return lu.inverse();
}

// Dense linear system assembled one defining equation at a time:
//   x[target] - sum coef * x[j] = constant
class ChainSystem
{
public:
    explicit ChainSystem(int unknowns)
        : m_(Eigen::MatrixXcd::Identity(unknowns, unknowns)), rhs_(Eigen::VectorXcd::Zero(unknowns))
    {
    }

    void add(int target, int source, Complex coef) { m_(target, source) -= coef; }
    void add_constant(int target, Complex value) { rhs_(target) += value; }

    Eigen::VectorXcd solve() const
    {
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m_);
        if (!(lu.rcond() >= 1e-14))
        {
            throw SolverError("chain oracle: boundary system is singular");
        }
        return lu.solve(rhs_);
    }

private:
    Eigen::MatrixXcd m_;
    Eigen::VectorXcd rhs_;
};

// A ring input is either an exterior amplitude or exp(i phase) times a bus unknown.
struct Feed
{
    int unknown = -1;
    Complex value = 0.0;
};

} // namespace

ChainSpec::ChainSpec(std::vector<RingParams> rings, double bus_phase) : rings_(std::move(rings)), bus_phase_(bus_phase)
{
    if (rings_.empty())
    {
        throw DomainError("a chain needs at least one ring");
    }
    if (!std::isfinite(bus_phase_))
    {
        throw DomainError("bus_phase must be finite");
    }
}

ChainSpec ChainSpec::tuned(double tau, double theta) const
{
    std::vector<RingParams> rings;
    rings.reserve(rings_.size());
    for (const RingParams& r : rings_)
    {
        rings.emplace_back(tau, theta + r.theta(), r.gamma(), r.alpha());
    }
    return ChainSpec{std::move(rings), bus_phase_};
}

ScatteringMatrix bus_propagation(double phase)
{
    return ScatteringMatrix{Matrix4c::Identity() * std::polar(1.0, phase)};
}

ScatteringMatrix compose_pair(const ScatteringMatrix& left, const ScatteringMatrix& right)
{
    const Matrix4c& s1 = left.matrix();
    const Matrix4c& s2 = right.matrix();

    // forward transmission / reflection back from the right / reflection
    // back from the left / backward transmission
    const Matrix2c t1f = sub(s1, kRight, kRight);
    const Matrix2c r1r = sub(s1, kRight, kLeft);
    const Matrix2c r1l = sub(s1, kLeft, kRight);
    const Matrix2c t1b = sub(s1, kLeft, kLeft);
    const Matrix2c t2f = sub(s2, kRight, kRight);
    const Matrix2c r2r = sub(s2, kRight, kLeft);
    const Matrix2c r2l = sub(s2, kLeft, kRight);
    const Matrix2c t2b = sub(s2, kLeft, kLeft);

    const Matrix2c forward_loop = feedback_inverse(r1r * r2l);
    const Matrix2c backward_loop = feedback_inverse(r2l * r1r);

    Matrix4c out;
    put(out, kRight, kRight, t2f * forward_loop * t1f);
    put(out, kRight, kLeft, r2r + t2f * forward_loop * r1r * t2b);
    put(out, kLeft, kRight, r1l + t1b * r2l * forward_loop * t1f);
    put(out, kLeft, kLeft, t1b * backward_loop * t2b);
    return ScatteringMatrix{out};
}

ScatteringMatrix compose_chain(const ChainSpec& spec)
{
    const auto& rings = spec.rings();
    ScatteringMatrix acc = build_scattering(rings.front());
    const ScatteringMatrix bus = bus_propagation(spec.bus_phase());
    for (std::size_t k = 1; k < rings.size(); ++k)
    {
        if (spec.bus_phase() != 0.0)
        {
            acc = compose_pair(acc, bus);
        }
        acc = compose_pair(acc, build_scattering(rings[k]));
    }
    return acc;
}

ScatteringMatrix chain_oracle(const ChainSpec& spec)
{
    const int n = static_cast<int>(spec.size());
    if (n > 3)
    {
        throw DomainError("chain_oracle supports at most three rings");
    }
    const int interior = 8 * n;
    const int unknowns = interior + 4 * (n - 1);
    // bus unknowns of segment s (between ring s and s+1): a and d emitted by
    // ring s heading right, b and c emitted by ring s+1 heading left
    auto bus_a = [&](int s) { return interior + 4 * s + 0; };
    auto bus_d = [&](int s) { return interior + 4 * s + 1; };
    auto bus_b = [&](int s) { return interior + 4 * s + 2; };
    auto bus_c = [&](int s) { return interior + 4 * s + 3; };
    const Complex hop = std::polar(1.0, spec.bus_phase());

    Matrix4c result;
    for (Port excited : kAllPorts)
    {
        ChainSystem sys(unknowns);
        auto exterior = [&](Port p) { return Feed{-1, p == excited ? Complex{1.0} : Complex{0.0}}; };
        auto feed = [&](int target, const Feed& f, Complex coef) {
            if (f.unknown >= 0)
            {
                sys.add(target, f.unknown, coef * f.value);
            }
            else
            {
                sys.add_constant(target, coef * f.value);
            }
        };

        for (int k = 0; k < n; ++k)
        {
            const RingParams& r = spec.rings()[static_cast<std::size_t>(k)];
            const double tau = r.tau();
            const double kappa = std::sqrt(1.0 - tau * tau);
            const double st = std::sqrt(r.gamma());
            const double sr = std::sqrt(1.0 - r.gamma());
            const Complex p = std::sqrt(r.alpha()) * std::exp(Complex{0.0, 0.5 * r.theta()});

            const int base = 8 * k;
            const int ccw0 = base + 0, ccw_hm = base + 1, ccw_hp = base + 2, ccw_l = base + 3;
            const int cw0 = base + 4, cw_hm = base + 5, cw_hp = base + 6, cw_l = base + 7;

            const Feed a_in = k == 0 ? exterior(Port::a) : Feed{bus_a(k - 1), hop};
            const Feed d_in = k == 0 ? exterior(Port::d) : Feed{bus_d(k - 1), hop};
            const Feed b_in = k == n - 1 ? exterior(Port::b) : Feed{bus_b(k), hop};
            const Feed c_in = k == n - 1 ? exterior(Port::c) : Feed{bus_c(k), hop};

            // couplers
            feed(ccw0, a_in, -kappa);
            sys.add(ccw0, ccw_l, tau);
            feed(ccw_hp, b_in, -kappa);
            sys.add(ccw_hp, ccw_hm, tau);
            feed(cw_l, c_in, -kappa);
            sys.add(cw_l, cw0, tau);
            feed(cw_hm, d_in, -kappa);
            sys.add(cw_hm, cw_hp, tau);

            // half trips through the backscatter splitters
            sys.add(ccw_l, ccw_hp, st * p);
            sys.add(ccw_l, cw_l, sr * p);
            sys.add(cw_hp, cw_l, st * p);
            sys.add(cw_hp, ccw_hp, -sr * p);
            sys.add(ccw_hm, ccw0, st * p);
            sys.add(ccw_hm, cw_hm, sr * p);
            sys.add(cw0, cw_hm, st * p);
            sys.add(cw0, ccw0, -sr * p);

            // what this ring sends onto the inner bus segments
            if (k < n - 1)
            {
                feed(bus_a(k), a_in, tau);
                sys.add(bus_a(k), ccw_l, kappa);
                feed(bus_d(k), d_in, tau);
                sys.add(bus_d(k), cw_hp, kappa);
            }
            if (k > 0)
            {
                feed(bus_b(k - 1), b_in, tau);
                sys.add(bus_b(k - 1), ccw_hm, kappa);
                feed(bus_c(k - 1), c_in, tau);
                sys.add(bus_c(k - 1), cw0, kappa);
            }
        }

        const Eigen::VectorXcd x = sys.solve();
        auto emitted = [&](int k, Port p, const Feed& in) {
            const RingParams& r = spec.rings()[static_cast<std::size_t>(k)];
            const double tau = r.tau();
            const double kappa = std::sqrt(1.0 - tau * tau);
            const Complex in_value = in.unknown >= 0 ? in.value * x(in.unknown) : in.value;
            const int base = 8 * k;
            const int slot = p == Port::a ? base + 3 : p == Port::b ? base + 1 : p == Port::c ? base + 4 : base + 6;
            return tau * in_value + kappa * x(slot);
        };
        const int last = n - 1;
        const Feed a_last = last == 0 ? exterior(Port::a) : Feed{bus_a(last - 1), hop};
        const Feed d_last = last == 0 ? exterior(Port::d) : Feed{bus_d(last - 1), hop};
        const Feed b_first = n == 1 ? exterior(Port::b) : Feed{bus_b(0), hop};
        const Feed c_first = n == 1 ? exterior(Port::c) : Feed{bus_c(0), hop};

        const auto col = static_cast<Eigen::Index>(index(excited));
        result(static_cast<Eigen::Index>(index(Port::a)), col) = emitted(last, Port::a, a_last);
        result(static_cast<Eigen::Index>(index(Port::d)), col) = emitted(last, Port::d, d_last);
        result(static_cast<Eigen::Index>(index(Port::b)), col) = emitted(0, Port::b, b_first);
        result(static_cast<Eigen::Index>(index(Port::c)), col) = emitted(0, Port::c, c_first);
    }
    return ScatteringMatrix{result};
}

} // namespace mrrhom
