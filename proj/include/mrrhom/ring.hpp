#ifndef MRRHOM_RING_HPP
#define MRRHOM_RING_HPP

#include <array>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mrrhom/ports.hpp"

namespace mrrhom
{

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;

// Physical knobs of one double-bus ring with identical couplers.
//
// tau   : coupler transmission amplitude, 0 <= tau <= 1
// theta : round-trip phase in radians, any real (used unwrapped)
// gamma : transmission probability of each internal backscatter splitter, 0 <= gamma <= 1
// alpha : round-trip amplitude retention, 0 < alpha <= 1
class RingParams
{
public:
    // Throws DomainError when a value is out of range or not finite.
    RingParams(double tau, double theta, double gamma = 1.0, double alpha = 1.0);

    double tau() const noexcept { return tau_; }
    double theta() const noexcept { return theta_; }
    double gamma() const noexcept { return gamma_; }
    double alpha() const noexcept { return alpha_; }

    // Cross-coupling amplitude sqrt(1 - tau^2), recomputed on every call.
    double kappa() const noexcept;

    RingParams with_tau(double tau) const { return {tau, theta_, gamma_, alpha_}; }
    RingParams with_theta(double theta) const { return {tau_, theta, gamma_, alpha_}; }
    RingParams with_gamma(double gamma) const { return {tau_, theta_, gamma, alpha_}; }
    RingParams with_alpha(double alpha) const { return {tau_, theta_, gamma_, alpha}; }

    bool operator==(const RingParams&) const = default;

private:
    double tau_;
    double theta_;
    double gamma_;
    double alpha_;
};

// 4x4 scattering matrix over (a, b, c, d). Entry (out, in) is the amplitude
// for an excitation on input port `in` to leave through output port `out`.
class ScatteringMatrix
{
public:
    ScatteringMatrix() : m_(Matrix4c::Identity()) {}
    explicit ScatteringMatrix(const Matrix4c& m) : m_(m) {}

    static ScatteringMatrix identity() { return ScatteringMatrix{}; }

    Complex operator()(Port out, Port in) const { return m_(index(out), index(in)); }
    Complex& operator()(Port out, Port in) { return m_(index(out), index(in)); }

    const Matrix4c& matrix() const noexcept { return m_; }

    // Rows `outs`, columns `ins`.
    Matrix2c block(PortPair outs, PortPair ins) const;

    // max |(S^dagger S - I)_{ij}|
    double unitarity_defect() const;
    double max_singular_value() const;

private:
    Matrix4c m_;
};

// Interior field amplitudes of one ring for a single excitation.
// ccw modes travel with increasing z, cw modes with decreasing z; z = 0 at the
// bottom coupler, z = L/2 at the top coupler.
struct InteriorState
{
    Complex ccw_0;          // leaving the bottom coupler
    Complex ccw_half_minus; // arriving at the top coupler
    Complex ccw_half_plus;  // leaving the top coupler
    Complex ccw_L;          // arriving at the bottom coupler
    Complex cw_0;           // arriving at the bottom coupler
    Complex cw_half_minus;  // leaving the top coupler
    Complex cw_half_plus;   // arriving at the top coupler
    Complex cw_L;           // leaving the bottom coupler
};

// ((tau, kappa), (-kappa, tau)); throws DomainError unless 0 <= tau <= 1.
Matrix2c coupler_matrix(double tau);

// ((sqrt(g), sqrt(1-g)), (-sqrt(1-g), sqrt(g))); throws DomainError unless 0 <= g <= 1.
Matrix2c backscatter_matrix(double gamma);

// Solves the eight interior boundary equations for the given exterior input
// amplitudes (order a, b, c, d). Throws SolverError if the system is singular.
InteriorState solve_interior(const RingParams& params, const std::array<Complex, kPortCount>& inputs);

// Exterior output amplitudes (a, b, c, d) for given inputs and solved interior.
std::array<Complex, kPortCount> exterior_outputs(const RingParams& params,
                                                 const std::array<Complex, kPortCount>& inputs,
                                                 const InteriorState& interior);

ScatteringMatrix build_scattering(const RingParams& params);

// |S(out, in)|^2 at each theta of the grid, with the other ring knobs fixed.
std::vector<std::pair<double, double>> transmission_spectrum(const RingParams& params,
                                                             Port in_port,
                                                             Port out_port,
                                                             std::span<const double> theta_grid);

} // namespace mrrhom

#endif // MRRHOM_RING_HPP
