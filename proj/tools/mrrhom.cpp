// mrrhom: two-photon interference in double-bus microring chains.
//
//   mrrhom grid --config configs/single_ring_gamma_0.99.yaml --threads 4
//   mrrhom slice --tau 0.4142 --slice-theta pi --output-dir out/slice

#include <iostream>

#include <CLI11.hpp>

#include "mrrhom/config.hpp"
#include "mrrhom/experiment.hpp"

namespace
{

struct Options
{
    std::string config;
    std::string tau, theta, gamma, alpha, bus_phase, slice_theta;
    std::string theta_min, theta_max;
    std::optional<double> tau_min, tau_max;
    std::optional<std::size_t> tau_count, theta_count;
    std::optional<std::string> input, output;
    std::optional<std::vector<double>> levels, gammas;
    std::optional<std::string> output_dir;
    bool no_plots = false;
    std::optional<unsigned> threads;
};

std::optional<double> phase_flag(const std::string& text, const std::string& key)
{
    if (text.empty())
    {
        return std::nullopt;
    }
    const std::optional<double> v = mrrhom::parse_phase(text);
    if (!v)
    {
        throw mrrhom::ConfigError(key, 0, "expected a number or a multiple of pi, got '" + text + "'");
    }
    return v;
}

std::optional<double> number_flag(const std::string& text, const std::string& key)
{
    if (text.empty())
    {
        return std::nullopt;
    }
    try
    {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size())
        {
            throw std::invalid_argument(text);
        }
        return v;
    }
    catch (const std::exception&)
    {
        throw mrrhom::ConfigError(key, 0, "expected a number, got '" + text + "'");
    }
}

void add_options(CLI::App& cmd, Options& o)
{
    cmd.add_option("-c,--config", o.config, "YAML experiment document")->check(CLI::ExistingFile);
    cmd.add_option("--tau", o.tau, "coupler transmission for every ring");
    cmd.add_option("--theta", o.theta, "round-trip phase offset for every ring (number or e.g. pi/4)");
    cmd.add_option("--gamma", o.gamma, "backscatter splitter transmission for every ring");
    cmd.add_option("--alpha", o.alpha, "round-trip amplitude retention for every ring");
    cmd.add_option("--bus-phase", o.bus_phase, "bus phase between neighbouring rings");
    cmd.add_option("--in", o.input, "input ports, e.g. AB (one letter for spectrum)");
    cmd.add_option("--out", o.output, "output ports, e.g. CD (one letter for spectrum)");
    cmd.add_option("--tau-min", o.tau_min);
    cmd.add_option("--tau-max", o.tau_max);
    cmd.add_option("--tau-count", o.tau_count);
    cmd.add_option("--theta-min", o.theta_min);
    cmd.add_option("--theta-max", o.theta_max);
    cmd.add_option("--theta-count", o.theta_count);
    cmd.add_option("--slice-theta", o.slice_theta, "theta for slice and alt-io");
    cmd.add_option("--levels", o.levels, "contour levels in (0, 1), ascending")->expected(1, -1);
    cmd.add_option("--gammas", o.gammas, "gamma values for alt-io")->expected(1, -1);
    cmd.add_option("-o,--output-dir", o.output_dir, "output directory");
    cmd.add_flag("--no-plots", o.no_plots, "skip SVG output");
    cmd.add_option("-j,--threads", o.threads, "worker threads for grids")->check(CLI::Range(1u, 4096u));
}

int run(mrrhom::Mode mode, const Options& o)
{
    mrrhom::ExperimentConfig cfg;
    if (!o.config.empty())
    {
        cfg = mrrhom::load_config(o.config);
    }
    else if (o.tau.empty() && (mode == mrrhom::Mode::spectrum || mode == mrrhom::Mode::distribution))
    {
        throw mrrhom::ConfigError("--tau", 0, "--tau is required without --config");
    }

    mrrhom::ConfigOverrides ov;
    ov.mode = mode;
    ov.tau = number_flag(o.tau, "--tau");
    ov.theta = phase_flag(o.theta, "--theta");
    ov.gamma = number_flag(o.gamma, "--gamma");
    ov.alpha = number_flag(o.alpha, "--alpha");
    ov.bus_phase = phase_flag(o.bus_phase, "--bus-phase");
    ov.slice_theta = phase_flag(o.slice_theta, "--slice-theta");
    ov.theta_min = phase_flag(o.theta_min, "--theta-min");
    ov.theta_max = phase_flag(o.theta_max, "--theta-max");
    ov.input = o.input;
    ov.output = o.output;
    if (mode == mrrhom::Mode::spectrum && o.config.empty())
    {
        ov.input = o.input.value_or("a");
        ov.output = o.output.value_or("a");
    }
    ov.tau_min = o.tau_min;
    ov.tau_max = o.tau_max;
    ov.tau_count = o.tau_count;
    ov.theta_count = o.theta_count;
    ov.levels = o.levels;
    ov.gammas = o.gammas;
    if (o.output_dir)
    {
        ov.output_directory = *o.output_dir;
    }
    if (o.no_plots)
    {
        ov.plots = false;
    }
    ov.threads = o.threads;
    cfg = mrrhom::apply_overrides(cfg, ov);

    const mrrhom::RunReport report = mrrhom::run_experiment(cfg);
    std::cout << mrrhom::mode_name(cfg.mode) << ": wrote " << report.files.size() << " files to "
              << report.directory.string() << " in " << report.runtime_seconds << " s\n";
    for (const auto& f : report.files)
    {
        std::cout << "  " << f.path << "  " << f.sha256 << '\n';
    }
    if (!report.ok())
    {
        std::cerr << "error: " << report.failed_cells << " of " << report.total_cells << " cells failed\n";
        return 3;
    }
    if (report.failed_cells > 0)
    {
        std::cerr << "warning: " << report.failed_cells << " of " << report.total_cells << " cells failed\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-photon interference in double-bus microring resonator chains"};
    app.set_version_flag("--version", std::string(mrrhom::kVersion));
    app.require_subcommand(1);

    constexpr std::array modes = {mrrhom::Mode::spectrum,   mrrhom::Mode::slice,        mrrhom::Mode::grid,
                                  mrrhom::Mode::contour,    mrrhom::Mode::homm_curve,   mrrhom::Mode::distribution,
                                  mrrhom::Mode::alt_io};
    constexpr std::array<std::string_view, 7> help = {
        "transmission |S(out,in)|^2 versus theta",
        "two-photon probabilities versus tau at fixed theta",
        "{1,1} coincidence probability over (tau, theta)",
        "grid plus contour lines and the HOMM curve",
        "HOMM tau(theta) curve",
        "full output distribution for one device setting",
        "slices for several backscatter strengths",
    };

    Options options;
    std::optional<mrrhom::Mode> chosen;
    for (std::size_t k = 0; k < modes.size(); ++k)
    {
        CLI::App* cmd = app.add_subcommand(std::string(mrrhom::mode_name(modes[k])), std::string(help[k]));
        add_options(*cmd, options);
        const mrrhom::Mode mode = modes[k];
        cmd->callback([&chosen, mode] { chosen = mode; });
    }

    CLI11_PARSE(app, argc, argv);
    try
    {
        return run(*chosen, options);
    }
    catch (const mrrhom::ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
