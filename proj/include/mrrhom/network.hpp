#ifndef MRRHOM_NETWORK_HPP
#define MRRHOM_NETWORK_HPP

#include <vector>

#include "mrrhom/ring.hpp"

namespace mrrhom
{

// Rings side by side between the same two buses, position 0 leftmost.
// bus_phase is accumulated by every mode on each bus segment between
// neighbouring rings.
class ChainSpec
{
public:
    // Throws DomainError for an empty ring list or a non-finite bus phase.
    explicit ChainSpec(std::vector<RingParams> rings, double bus_phase = 0.0);

    const std::vector<RingParams>& rings() const noexcept { return rings_; }
    std::size_t size() const noexcept { return rings_.size(); }
    double bus_phase() const noexcept { return bus_phase_; }

    // Every ring gets coupler `tau`; ring k gets round-trip phase
    // theta + rings()[k].theta(), so stored phases act as per-ring offsets.
    ChainSpec tuned(double tau, double theta) const;

    bool operator==(const ChainSpec&) const = default;

private:
    std::vector<RingParams> rings_;
    double bus_phase_ = 0.0;
};

// Pure propagation along a bus segment: every mode picks up exp(i phase).
ScatteringMatrix bus_propagation(double phase);

// Redheffer star product, `left` device followed by `right`. Right-movers
// {a, d} leave `left` into `right`; left-movers {b, c} leave `right` into
// `left`. Throws CompositionError when the feedback block is singular.
ScatteringMatrix compose_pair(const ScatteringMatrix& left, const ScatteringMatrix& right);

ScatteringMatrix compose_chain(const ChainSpec& spec);

// Direct solve of the whole chain's boundary equations (all interior modes
// plus every inter-ring bus amplitude) for N <= 3. Independent of
// compose_pair and build_scattering; meant for verification.
ScatteringMatrix chain_oracle(const ChainSpec& spec);

} // namespace mrrhom

#endif // MRRHOM_NETWORK_HPP
