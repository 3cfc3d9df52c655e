#ifndef MRRHOM_CONFIG_HPP
#define MRRHOM_CONFIG_HPP

#include <cstddef>
#include <filesystem>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mrrhom/fock.hpp"
#include "mrrhom/network.hpp"
#include "mrrhom/ports.hpp"

namespace mrrhom
{

enum class Mode
{
    spectrum,
    slice,
    grid,
    contour,
    homm_curve,
    distribution,
    alt_io
};

// "spectrum", "slice", "grid", "contour", "homm-curve", "distribution", "alt-io"
std::string_view mode_name(Mode mode) noexcept;
std::optional<Mode> parse_mode(std::string_view text) noexcept;

// Thrown for malformed or invalid experiment documents. `key` is the dotted
// path of the offending entry; `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error
{
public:
    ConfigError(const std::string& key, std::size_t line, const std::string& message);

    const std::string& key() const noexcept { return key_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string key_;
    std::size_t line_;
};

struct AxisSpec
{
    double min = 0.0;
    double max = 1.0;
    std::size_t count = 2;

    std::vector<double> values() const;
    bool operator==(const AxisSpec&) const = default;
};

struct ExperimentConfig
{
    Mode mode = Mode::grid;
    // Ring phases are offsets added to whatever theta the mode selects. Sweep
    // modes (slice, grid, contour, homm-curve, alt-io) override every ring's tau.
    ChainSpec chain{{RingParams{0.5, 0.0}}};
    // spectrum uses only .first of each pair
    PortPair input = kAB;
    PortPair output = kAB;
    AxisSpec tau_axis{0.005, 0.995, 201};
    AxisSpec theta_axis{0.0, 2.0 * std::numbers::pi, 201};
    double slice_theta = std::numbers::pi;
    std::vector<double> levels{0.001, 0.05};
    std::vector<double> gammas{1.0, 0.75, 0.5, 0.25};
    // distribution input; defaults to one photon on each input port
    std::optional<FockState> input_state;
    std::filesystem::path output_directory = "mrrhom-out";
    bool plots = true;
    unsigned threads = 1;

    bool operator==(const ExperimentConfig&) const = default;
};

// A finite number, or a multiple of pi written as "pi", "-pi/2", "0.25pi", "3*pi/4".
std::optional<double> parse_phase(std::string_view text);

// YAML (or JSON) document -> validated config with defaults applied.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Throws ConfigError when the config breaks an invariant.
void validate_config(const ExperimentConfig& cfg);

// JSON rendering that parse_config reads back to an equal config.
std::string config_to_json(const ExperimentConfig& cfg, int indent = 2);

// Command-line overrides. Ring knobs apply to every ring of the chain.
struct ConfigOverrides
{
    std::optional<Mode> mode;
    std::optional<double> tau;
    std::optional<double> theta;
    std::optional<double> gamma;
    std::optional<double> alpha;
    std::optional<double> bus_phase;
    std::optional<std::string> input;
    std::optional<std::string> output;
    std::optional<double> tau_min, tau_max;
    std::optional<std::size_t> tau_count;
    std::optional<double> theta_min, theta_max;
    std::optional<std::size_t> theta_count;
    std::optional<double> slice_theta;
    std::optional<std::vector<double>> levels;
    std::optional<std::vector<double>> gammas;
    std::optional<std::filesystem::path> output_directory;
    std::optional<bool> plots;
    std::optional<unsigned> threads;
};

// Applies the overrides and re-validates.
ExperimentConfig apply_overrides(ExperimentConfig cfg, const ConfigOverrides& overrides);

} // namespace mrrhom

#endif // MRRHOM_CONFIG_HPP
