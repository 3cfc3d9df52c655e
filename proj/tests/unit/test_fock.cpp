#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mrrhom/errors.hpp"
#include "mrrhom/fock.hpp"
#include "mrrhom/ring.hpp"
#include "support/oracles.hpp"

using namespace mrrhom;

namespace
{

// Beam splitter between ports a and b, identity on c and d.
ScatteringMatrix splitter(double tau)
{
    Matrix4c m = Matrix4c::Identity();
    const double kappa = std::sqrt(1.0 - tau * tau);
    m(0, 0) = tau;
    m(1, 1) = tau;
    m(1, 0) = kappa;
    m(0, 1) = -kappa;
    return ScatteringMatrix{m};
}

Eigen::MatrixXcd random_square(std::mt19937_64& rng, int n)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
    {
        for (int j = 0; j < n; ++j)
        {
            m(i, j) = Complex{u(rng), u(rng)};
        }
    }
    return m;
}

} // namespace

TEST_CASE("fock state basics")
{
    const FockState s{1, 0, 2, 0};
    CHECK(s.total() == 3);
    CHECK(s[Port::c] == 2);
    CHECK(s.to_string() == "|1,0,2,0>");
    CHECK(FockState::from_pair(kAB) == FockState{1, 1, 0, 0});
    CHECK(FockState::from_pair(PortPair{Port::d, Port::d}) == FockState{0, 0, 0, 2});
    CHECK_THROWS_AS(FockState(-1, 0, 0, 0), DomainError);

    CHECK(fock_basis(0).size() == 1);
    CHECK(fock_basis(1).size() == 4);
    CHECK(fock_basis(2).size() == 10);
    CHECK(fock_basis(3).size() == 20);
    const auto basis = fock_basis(2);
    CHECK(std::is_sorted(basis.begin(), basis.end()));
    for (const FockState& s2 : basis)
    {
        CHECK(s2.total() == 2);
    }
}

TEST_CASE("permanent examples")
{
    Eigen::MatrixXcd m(2, 2);
    m << 1.0, 2.0, 3.0, 4.0;
    CHECK(std::abs(permanent(m) - Complex{10.0}) < 1e-14);

    Eigen::MatrixXcd ones = Eigen::MatrixXcd::Ones(3, 3);
    CHECK(std::abs(permanent(ones) - Complex{6.0}) < 1e-13);

    Eigen::MatrixXcd one(1, 1);
    one << Complex{0.3, -0.7};
    CHECK(std::abs(permanent(one) - Complex{0.3, -0.7}) == 0.0);

    CHECK(std::abs(permanent(Eigen::MatrixXcd::Identity(5, 5)) - Complex{1.0}) < 1e-14);

    CHECK_THROWS_AS(permanent(Eigen::MatrixXcd(0, 0)), DomainError);
    CHECK_THROWS_AS(permanent(Eigen::MatrixXcd::Ones(2, 3)), DomainError);
}

TEST_CASE("permanent agrees with the permutation sum")
{
    std::mt19937_64 rng(19);
    for (int n = 1; n <= 7; ++n)
    {
        for (int trial = 0; trial < 20; ++trial)
        {
            const Eigen::MatrixXcd m = random_square(rng, n);
            const Complex fast = permanent(m);
            const Complex slow = oracle::naive_permanent(m);
            REQUIRE(std::abs(fast - slow) <= 1e-12 * std::max(1.0, std::abs(slow)));
        }
    }
}

TEST_CASE("permanent is invariant under transposition and row swaps")
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 50; ++trial)
    {
        Eigen::MatrixXcd m = random_square(rng, 4);
        const Complex p = permanent(m);
        CHECK(std::abs(permanent(m.transpose()) - p) < 1e-12);
        m.row(0).swap(m.row(2));
        CHECK(std::abs(permanent(m) - p) < 1e-12);
    }
}

TEST_CASE("transition amplitudes on a beam splitter")
{
    const double tau = 0.8;
    const double kappa = 0.6;
    const ScatteringMatrix s = splitter(tau);
    const FockState in{1, 1, 0, 0};

    CHECK(std::abs(transition_amplitude(s, in, FockState{1, 1, 0, 0}) - Complex{tau * tau - kappa * kappa}) < 1e-15);
    // two photons in a: sqrt(2) * S(a,a) * S(a,b)
    CHECK(std::abs(transition_amplitude(s, in, FockState{2, 0, 0, 0}) - Complex{std::sqrt(2.0) * tau * -kappa}) <
          1e-15);
    CHECK(std::abs(transition_amplitude(s, in, FockState{0, 2, 0, 0}) - Complex{std::sqrt(2.0) * kappa * tau}) <
          1e-15);
    CHECK(std::abs(transition_amplitude(s, in, FockState{0, 0, 1, 1})) == 0.0);

    CHECK_THROWS_AS(transition_amplitude(s, in, FockState{1, 0, 0, 0}), DomainError);
}

TEST_CASE("balanced splitter suppresses coincidences")
{
    for (double tau : {0.0, 0.2, 0.5, 1.0 / std::sqrt(2.0), 0.9, 1.0})
    {
        const double expected = std::pow(2.0 * tau * tau - 1.0, 2);
        CHECK(coincidence_probability(splitter(tau), kAB, kAB) == doctest::Approx(expected).epsilon(1e-14));
    }
    CHECK(coincidence_probability(splitter(1.0 / std::sqrt(2.0)), kAB, kAB) < 1e-30);

    const OutputDistribution dist = output_distribution(splitter(1.0 / std::sqrt(2.0)), FockState{1, 1, 0, 0}, kAB);
    REQUIRE(dist.detected.has_value());
    CHECK(dist.detected->p11() < 1e-30);
    CHECK(dist.detected->p20() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(dist.detected->p02() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(dist.detected->total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("amplitudes match the creation-operator expansion")
{
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 100; ++trial)
    {
        const Matrix4c m = trial % 2 == 0 ? oracle::random_unitary(rng) : oracle::random_matrix(rng);
        const ScatteringMatrix s{m};
        for (int photons = 1; photons <= 3; ++photons)
        {
            const auto basis = fock_basis(photons);
            const FockState& in = basis[static_cast<std::size_t>(trial) % basis.size()];
            const auto expected = oracle::fock_amplitudes(m, in.occupations());
            for (const FockState& out : basis)
            {
                const auto it = expected.find(out.occupations());
                const Complex want = it == expected.end() ? Complex{} : it->second;
                REQUIRE(std::abs(transition_amplitude(s, in, out) - want) < 1e-12);
            }
        }
    }
}

TEST_CASE("unitary transforms conserve probability")
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 1000; ++trial)
    {
        const ScatteringMatrix s{oracle::random_unitary(rng)};
        const int photons = 1 + trial % 4;
        const auto basis = fock_basis(photons);
        const FockState& in = basis[static_cast<std::size_t>(trial) % basis.size()];
        const OutputDistribution dist = output_distribution(s, in);
        REQUIRE(dist.accounted() == doctest::Approx(1.0).epsilon(1e-12));
        REQUIRE(dist.lost < 1e-12);
    }
}

TEST_CASE("exchange symmetry of the coincidence amplitude")
{
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 100; ++trial)
    {
        const ScatteringMatrix s{oracle::random_matrix(rng)};
        const PortPair in{Port::a, Port::c};
        const PortPair out{Port::b, Port::d};
        const double p = coincidence_probability(s, in, out);
        CHECK(coincidence_probability(s, PortPair{in.second, in.first}, out) == doctest::Approx(p).epsilon(1e-13));
        CHECK(coincidence_probability(s, in, PortPair{out.second, out.first}) == doctest::Approx(p).epsilon(1e-13));
        const double via_fock = std::norm(transition_amplitude(s, FockState::from_pair(in), FockState::from_pair(out)));
        CHECK(via_fock == doctest::Approx(p).epsilon(1e-12));
    }
    CHECK_THROWS_AS(coincidence_probability(ScatteringMatrix{}, PortPair{Port::a, Port::a}, kAB), DomainError);
    CHECK_THROWS_AS(coincidence_probability(ScatteringMatrix{}, kAB, PortPair{Port::c, Port::c}), DomainError);
}

TEST_CASE("lossy transforms report the missing probability")
{
    const ScatteringMatrix s{0.9 * Matrix4c::Identity()};
    const OutputDistribution dist = output_distribution(s, FockState{1, 1, 0, 0}, kAB);
    CHECK(dist.probability(FockState{1, 1, 0, 0}) == doctest::Approx(std::pow(0.81, 2)).epsilon(1e-14));
    CHECK(dist.lost == doctest::Approx(1.0 - std::pow(0.81, 2)).epsilon(1e-13));
    CHECK(dist.accounted() + dist.lost == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(dist.probability(FockState{0, 0, 2, 0}) == 0.0);

    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 100; ++trial)
    {
        const RingParams p{std::uniform_real_distribution<double>(0.0, 1.0)(rng),
                           std::uniform_real_distribution<double>(0.0, 6.3)(rng),
                           std::uniform_real_distribution<double>(0.0, 1.0)(rng),
                           std::uniform_real_distribution<double>(0.5, 1.0)(rng)};
        const OutputDistribution d = output_distribution(build_scattering(p), FockState{1, 1, 0, 0}, kAB);
        REQUIRE(d.accounted() <= 1.0 + 1e-12);
        REQUIRE(d.lost >= 0.0);
        REQUIRE(d.accounted() + d.lost == doctest::Approx(1.0).epsilon(1e-12));
        REQUIRE(d.detected->total <= d.accounted() + 1e-12);
        REQUIRE(d.detected->p11() + d.detected->p20() + d.detected->p02() ==
                doctest::Approx(d.detected->total).epsilon(1e-12));
    }
}

TEST_CASE("distribution argument checks")
{
    CHECK_THROWS_AS(output_distribution(ScatteringMatrix{}, FockState{1, 1, 0, 0}, PortPair{Port::b, Port::b}),
                    DomainError);
    CHECK_THROWS_AS(output_distribution(ScatteringMatrix{}, FockState{kMaxPhotons + 1, 0, 0, 0}), DomainError);
}
