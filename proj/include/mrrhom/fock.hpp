#ifndef MRRHOM_FOCK_HPP
#define MRRHOM_FOCK_HPP

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mrrhom/ports.hpp"
#include "mrrhom/ring.hpp"

namespace mrrhom
{

// Largest photon number accepted by the Fock-space routines.
inline constexpr int kMaxPhotons = 8;

// Photon occupation numbers over (a, b, c, d).
class FockState
{
public:
    FockState() = default;
    FockState(int a, int b, int c, int d);
    explicit FockState(const std::array<int, kPortCount>& occupations);

    // One photon on each port of the pair (two on one port if they coincide).
    static FockState from_pair(PortPair ports);

    int operator[](Port p) const noexcept { return n_[index(p)]; }
    const std::array<int, kPortCount>& occupations() const noexcept { return n_; }
    int total() const noexcept;

    // "|1,1,0,0>"
    std::string to_string() const;

    auto operator<=>(const FockState&) const = default;

private:
    std::array<int, kPortCount> n_{};
};

// Every state with `photons` photons spread over the four ports, ascending.
std::vector<FockState> fock_basis(int photons);

// Probability mass restricted to a detected port pair. split[k] is the
// probability of k photons on pair.first and n - k on pair.second with
// nothing elsewhere.
struct DetectedSums
{
    PortPair ports;
    double total = 0.0;
    std::vector<double> split;

    // Two-photon names: {1,1}, {2,0}, {0,2}. Zero when not a two-photon input.
    double p11() const { return split.size() == 3 ? split[1] : 0.0; }
    double p20() const { return split.size() == 3 ? split[2] : 0.0; }
    double p02() const { return split.size() == 3 ? split[0] : 0.0; }
};

struct OutputDistribution
{
    std::map<FockState, double> entries;
    // Probability not carried by any listed output; nonzero only with loss.
    double lost = 0.0;
    std::optional<DetectedSums> detected;

    double probability(const FockState& s) const;
    double accounted() const;
};

// Exact permanent (Ryser with Gray-code updates). Throws DomainError for an
// empty or non-square matrix.
Complex permanent(const Eigen::MatrixXcd& m);

// <output| U |input> for the multimode linear transform S, using the
// transposed matrix (creation operators of the inputs expanded over the
// outputs) and the usual 1/sqrt(prod n_k! prod m_j!) normalization.
Complex transition_amplitude(const ScatteringMatrix& s, const FockState& input, const FockState& output);

OutputDistribution output_distribution(const ScatteringMatrix& s,
                                       const FockState& input,
                                       std::optional<PortPair> detected = std::nullopt);

// |perm|^2 of the 2x2 block of S^T selected by in_ports x out_ports.
double coincidence_probability(const ScatteringMatrix& s, PortPair in_ports, PortPair out_ports);

} // namespace mrrhom

#endif // MRRHOM_FOCK_HPP
