#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mrrhom/errors.hpp"
#include "mrrhom/network.hpp"
#include "support/oracles.hpp"

using namespace mrrhom;
using std::numbers::pi;

namespace
{

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

RingParams random_ring(std::mt19937_64& rng, bool backscatter, bool lossy)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
    const double tau = std::uniform_real_distribution<double>(0.05, 0.98)(rng);
    const double gamma = backscatter ? unit(rng) : 1.0;
    const double alpha = lossy ? std::uniform_real_distribution<double>(0.6, 1.0)(rng) : 1.0;
    return RingParams{tau, phase(rng), gamma, alpha};
}

ChainSpec random_chain(std::mt19937_64& rng, std::size_t n, bool backscatter, bool lossy, bool bus)
{
    std::vector<RingParams> rings;
    for (std::size_t k = 0; k < n; ++k)
    {
        rings.push_back(random_ring(rng, backscatter, lossy));
    }
    const double phase = bus ? std::uniform_real_distribution<double>(-pi, pi)(rng) : 0.0;
    return ChainSpec{rings, phase};
}

// (a, b) block in the oracle's two-port layout: [[a->a, b->a], [a->b, b->b]].
Eigen::Matrix2cd ab_block(const ScatteringMatrix& s) { return s.block(kAB, kAB); }

} // namespace

TEST_CASE("chain specification")
{
    CHECK_THROWS_AS(ChainSpec({}), DomainError);
    CHECK_THROWS_AS(ChainSpec({RingParams{0.5, 0.0}}, INFINITY), DomainError);

    const ChainSpec spec{{RingParams{0.5, 0.0, 0.9}, RingParams{0.7, pi / 4.0, 1.0, 0.8}}, 0.3};
    const ChainSpec tuned = spec.tuned(0.6, 1.0);
    REQUIRE(tuned.size() == 2);
    CHECK(tuned.rings()[0] == RingParams{0.6, 1.0, 0.9});
    CHECK(tuned.rings()[1] == RingParams{0.6, 1.0 + pi / 4.0, 1.0, 0.8});
    CHECK(tuned.bus_phase() == 0.3);
}

TEST_CASE("identity is neutral under composition")
{
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 50; ++trial)
    {
        const ScatteringMatrix s = build_scattering(random_ring(rng, true, trial % 2 == 0));
        CHECK(max_abs(compose_pair(ScatteringMatrix::identity(), s).matrix() - s.matrix()) < 1e-14);
        CHECK(max_abs(compose_pair(s, ScatteringMatrix::identity()).matrix() - s.matrix()) < 1e-14);
    }
}

TEST_CASE("bus propagation")
{
    const ScatteringMatrix bus = bus_propagation(0.7);
    CHECK(max_abs(bus.matrix() - std::exp(Complex{0.0, 0.7}) * Matrix4c::Identity()) < 1e-15);
    CHECK(max_abs(bus_propagation(0.0).matrix() - Matrix4c::Identity()) == 0.0);
}

TEST_CASE("without backscattering the ab block cascades like a two-port")
{
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 200; ++trial)
    {
        const ScatteringMatrix left = build_scattering(random_ring(rng, false, trial % 3 == 0));
        const ScatteringMatrix right = build_scattering(random_ring(rng, false, trial % 3 == 1));
        const ScatteringMatrix both = compose_pair(left, right);
        const Eigen::Matrix2cd expected = oracle::two_port_cascade(ab_block(left), ab_block(right));
        REQUIRE(max_abs(ab_block(both) - expected) < 1e-12);
        REQUIRE(max_abs(both.block(kAB, kCD)) < 1e-15);
        REQUIRE(max_abs(both.block(kCD, kAB)) < 1e-15);
    }
}

TEST_CASE("composition preserves unitarity and passivity")
{
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 300; ++trial)
    {
        const bool lossy = trial % 2 == 1;
        const std::size_t n = 1 + static_cast<std::size_t>(trial) % 4;
        const ScatteringMatrix s = compose_chain(random_chain(rng, n, true, lossy, trial % 5 == 0));
        if (lossy)
        {
            REQUIRE(s.max_singular_value() <= 1.0 + 1e-12);
        }
        else
        {
            REQUIRE(s.unitarity_defect() < 1e-12);
        }
    }
}

TEST_CASE("composition is associative")
{
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 100; ++trial)
    {
        const ScatteringMatrix x = build_scattering(random_ring(rng, true, trial % 2 == 0));
        const ScatteringMatrix y = build_scattering(random_ring(rng, true, false));
        const ScatteringMatrix z = build_scattering(random_ring(rng, true, trial % 3 == 0));
        const Matrix4c left_first = compose_pair(compose_pair(x, y), z).matrix();
        const Matrix4c right_first = compose_pair(x, compose_pair(y, z)).matrix();
        REQUIRE(max_abs(left_first - right_first) < 1e-12);
    }
}

TEST_CASE("star products agree with the direct whole-chain solve")
{
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 200; ++trial)
    {
        const std::size_t n = 1 + static_cast<std::size_t>(trial) % 3;
        const ChainSpec spec = random_chain(rng, n, trial % 4 != 0, trial % 3 == 0, trial % 5 == 0);
        const Matrix4c composed = compose_chain(spec).matrix();
        const Matrix4c direct = chain_oracle(spec).matrix();
        REQUIRE(max_abs(composed - direct) < 1e-10);
    }
}

TEST_CASE("single-ring chain is the ring itself")
{
    const RingParams p{0.45, 2.0, 0.8, 0.95};
    CHECK(max_abs(compose_chain(ChainSpec{{p}}).matrix() - build_scattering(p).matrix()) == 0.0);
    CHECK(max_abs(compose_chain(ChainSpec{{p}, 1.3}).matrix() - build_scattering(p).matrix()) == 0.0);
}

TEST_CASE("identical rings keep the two circulation families equivalent")
{
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 100; ++trial)
    {
        const RingParams p = random_ring(rng, true, trial % 2 == 0);
        const std::size_t n = 2 + static_cast<std::size_t>(trial) % 3;
        const ScatteringMatrix s = compose_chain(ChainSpec{std::vector<RingParams>(n, p)});
        REQUIRE(max_abs(s.block(kAB, kAB) - s.block(kCD, kCD)) < 1e-12);
    }
}

TEST_CASE("bus phase only matters between rings")
{
    const RingParams p{0.6, 1.1, 0.9};
    const RingParams q{0.7, 2.3, 0.95};
    const ScatteringMatrix plain = compose_chain(ChainSpec{{p, q}});
    const ScatteringMatrix shifted = compose_chain(ChainSpec{{p, q}, 0.4});
    CHECK(max_abs(plain.matrix() - shifted.matrix()) > 1e-3);
    const ScatteringMatrix manual = compose_pair(compose_pair(build_scattering(p), bus_propagation(0.4)),
                                                 build_scattering(q));
    CHECK(max_abs(manual.matrix() - shifted.matrix()) < 1e-14);
    CHECK(max_abs(compose_chain(ChainSpec{{p, q}, 2.0 * pi}).matrix() - plain.matrix()) < 1e-12);
}

TEST_CASE("direct solve is limited to small chains")
{
    const RingParams p{0.5, 1.0};
    CHECK_NOTHROW(chain_oracle(ChainSpec{{p, p, p}}));
    CHECK_THROWS_AS(chain_oracle(ChainSpec{{p, p, p, p}}), DomainError);
}

TEST_CASE("singular feedback is reported")
{
    // two perfect mirrors facing each other with a lossless cavity
    Matrix4c mirror = Matrix4c::Zero();
    mirror(index(Port::b), index(Port::a)) = 1.0;
    mirror(index(Port::a), index(Port::b)) = 1.0;
    mirror(index(Port::c), index(Port::d)) = 1.0;
    mirror(index(Port::d), index(Port::c)) = 1.0;
    const ScatteringMatrix m{mirror};
    CHECK_THROWS_AS(compose_pair(m, m), CompositionError);
    try
    {
        compose_pair(m, m);
    }
    catch (const CompositionError& e)
    {
        CHECK(e.condition_number() > 1e13);
    }
}
