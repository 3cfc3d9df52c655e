#ifndef MRRHOM_EXPERIMENT_HPP
#define MRRHOM_EXPERIMENT_HPP

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mrrhom/config.hpp"

namespace mrrhom
{

inline constexpr std::string_view kVersion = "1.0.0";

// Runs with at least this fraction of failed cells are reported as failures.
inline constexpr double kMaxFailedFraction = 1e-3;

class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct ArtifactFile
{
    std::string path; // relative to the output directory
    std::string sha256;
};

struct RunReport
{
    std::filesystem::path directory;
    std::vector<ArtifactFile> files; // data and plots; the manifest itself is not listed
    std::size_t failed_cells = 0;
    std::size_t total_cells = 0;
    double runtime_seconds = 0.0;

    bool ok() const noexcept;
};

// 17 significant digits, '.' decimal point, "nan"/"inf"/"-inf" for non-finite.
std::string format_double(double v);

// Writes the mode's CSV files, the SVG plots (when enabled) and manifest.json
// into cfg.output_directory. Throws IoError when a file cannot be written.
RunReport run_experiment(const ExperimentConfig& cfg);

} // namespace mrrhom

#endif // MRRHOM_EXPERIMENT_HPP
