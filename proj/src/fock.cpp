#include "mrrhom/fock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>

#include "mrrhom/errors.hpp"

namespace mrrhom
{

namespace
{

double factorial(int n)
{
    double f = 1.0;
    for (int k = 2; k <= n; ++k)
    {
        f *= k;
    }
    return f;
}

void enumerate(int remaining, std::size_t port, std::array<int, kPortCount>& current, std::vector<FockState>& out)
{
    if (port + 1 == kPortCount)
    {
        current[port] = remaining;
        out.emplace_back(current);
        return;
    }
    for (int k = 0; k <= remaining; ++k)
    {
        current[port] = k;
        enumerate(remaining - k, port + 1, current, out);
    }
}

} // namespace

FockState::FockState(int a, int b, int c, int d) : FockState(std::array<int, kPortCount>{a, b, c, d}) {}

FockState::FockState(const std::array<int, kPortCount>& occupations) : n_(occupations)
{
    for (int k : n_)
    {
        if (k < 0)
        {
            throw DomainError("Fock occupations must be non-negative");
        }
    }
}

FockState FockState::from_pair(PortPair ports)
{
    std::array<int, kPortCount> n{};
    ++n[index(ports.first)];
    ++n[index(ports.second)];
    return FockState{n};
}

int FockState::total() const noexcept { return std::accumulate(n_.begin(), n_.end(), 0); }

std::string FockState::to_string() const
{
    std::ostringstream os;
    os << '|' << n_[0] << ',' << n_[1] << ',' << n_[2] << ',' << n_[3] << '>';
    return os.str();
}

std::vector<FockState> fock_basis(int photons)
{
    if (photons < 0 || photons > kMaxPhotons)
    {
        throw DomainError("photon number must lie in [0, " + std::to_string(kMaxPhotons) + "]");
    }
    std::vector<FockState> basis;
    std::array<int, kPortCount> current{};
    enumerate(photons, 0, current, basis);
    std::sort(basis.begin(), basis.end());
    return basis;
}

double OutputDistribution::probability(const FockState& s) const
{
    const auto it = entries.find(s);
    return it == entries.end() ? 0.0 : it->second;
}

double OutputDistribution::accounted() const
{
    double sum = 0.0;
    for (const auto& [state, p] : entries)
    {
        sum += p;
    }
    return sum;
}

Complex permanent(const Eigen::MatrixXcd& m)
{
    const Eigen::Index n = m.rows();
    if (n == 0 || m.cols() != n)
    {
        throw DomainError("permanent requires a non-empty square matrix");
    }
    if (n > 30)
    {
        throw DomainError("permanent: matrix too large for exact summation");
    }
    if (n == 1)
    {
        return m(0, 0);
    }

    // Ryser: perm(M) = (-1)^n sum_{S} (-1)^{|S|} prod_i sum_{j in S} m_ij,
    // walking subsets in Gray-code order so each step adds or drops one column.
    Eigen::VectorXcd row_sums = Eigen::VectorXcd::Zero(n);
    Complex total = 0.0;
    std::uint64_t gray = 0;
    const std::uint64_t subsets = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < subsets; ++k)
    {
        const std::uint64_t next = k ^ (k >> 1);
        const std::uint64_t flipped = next ^ gray;
        const int column = std::countr_zero(flipped);
        if (next & flipped)
        {
            row_sums += m.col(column);
        }
        else
        {
            row_sums -= m.col(column);
        }
        gray = next;
        Complex product = row_sums.prod();
        const bool odd = (std::popcount(gray) & 1) != 0;
        total += odd ? -product : product;
    }
    return (n % 2 == 0) ? total : -total;
}

Complex transition_amplitude(const ScatteringMatrix& s, const FockState& input, const FockState& output)
{
    const int n = input.total();
    if (output.total() != n)
    {
        throw DomainError("transition_amplitude: photon number mismatch " + input.to_string() + " -> " +
                          output.to_string());
    }
    if (n > kMaxPhotons)
    {
        throw DomainError("transition_amplitude: more than " + std::to_string(kMaxPhotons) + " photons");
    }
    if (n == 0)
    {
        return 1.0;
    }

    // Row i of S^T is the input port, column j the output port: (S^T)_{ij} = S(j, i).
    std::vector<Port> rows;
    std::vector<Port> cols;
    double norm = 1.0;
    for (Port p : kAllPorts)
    {
        rows.insert(rows.end(), input[p], p);
        cols.insert(cols.end(), output[p], p);
        norm *= factorial(input[p]) * factorial(output[p]);
    }
    Eigen::MatrixXcd sub(n, n);
    for (int i = 0; i < n; ++i)
    {
        for (int j = 0; j < n; ++j)
        {
            sub(i, j) = s(cols[j], rows[i]);
        }
    }
    return permanent(sub) / std::sqrt(norm);
}

OutputDistribution output_distribution(const ScatteringMatrix& s, const FockState& input, std::optional<PortPair> detected)
{
    const int n = input.total();
    if (n > kMaxPhotons)
    {
        throw DomainError("output_distribution: more than " + std::to_string(kMaxPhotons) + " photons");
    }
    if (detected && !detected->distinct())
    {
        throw DomainError("output_distribution: detected ports must be distinct");
    }

    OutputDistribution dist;
    for (const FockState& out : fock_basis(n))
    {
        dist.entries.emplace(out, std::norm(transition_amplitude(s, input, out)));
    }
    dist.lost = std::max(0.0, 1.0 - dist.accounted());

    if (detected)
    {
        DetectedSums sums{*detected, 0.0, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0)};
        for (int k = 0; k <= n; ++k)
        {
            std::array<int, kPortCount> occ{};
            occ[index(detected->first)] = k;
            occ[index(detected->second)] = n - k;
            const double p = dist.probability(FockState{occ});
            sums.split[static_cast<std::size_t>(k)] = p;
            sums.total += p;
        }
        dist.detected = std::move(sums);
    }
    return dist;
}

double coincidence_probability(const ScatteringMatrix& s, PortPair in_ports, PortPair out_ports)
{
    if (!in_ports.distinct() || !out_ports.distinct())
    {
        throw DomainError("coincidence_probability: port pairs must be distinct, got " + to_string(in_ports) +
                          " -> " + to_string(out_ports));
    }
    // perm of [[S(o1,i1), S(o2,i1)], [S(o1,i2), S(o2,i2)]]
    const Complex amp = s(out_ports.first, in_ports.first) * s(out_ports.second, in_ports.second) +
                        s(out_ports.second, in_ports.first) * s(out_ports.first, in_ports.second);
    return std::norm(amp);
}

} // namespace mrrhom
