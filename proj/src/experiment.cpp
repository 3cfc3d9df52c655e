#include "mrrhom/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mrrhom/checksum.hpp"
#include "mrrhom/contour.hpp"
#include "mrrhom/fock.hpp"
#include "mrrhom/homm.hpp"
#include "mrrhom/svg.hpp"

namespace mrrhom
{

namespace
{

constexpr std::array<std::string_view, 6> kSeriesColours = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                            "#8c564b"};

class Writer
{
public:
    explicit Writer(std::filesystem::path dir) : dir_(std::move(dir))
    {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec || !std::filesystem::is_directory(dir_))
        {
            throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
        }
    }

    void write(const std::string& name, const std::string& content, bool listed = true)
    {
        const std::filesystem::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.close();
        if (!out)
        {
            throw IoError("cannot write " + path.string());
        }
        if (listed)
        {
            files_.push_back(ArtifactFile{name, sha256_hex(content)});
        }
    }

    const std::vector<ArtifactFile>& files() const noexcept { return files_; }

private:
    std::filesystem::path dir_;
    std::vector<ArtifactFile> files_;
};

class Csv
{
public:
    explicit Csv(std::string_view header) { text_ << header << '\n'; }

    template <typename... Fields>
    void row(const Fields&... fields)
    {
        bool first = true;
        ((text_ << (first ? "" : ",") << cell(fields), first = false), ...);
        text_ << '\n';
    }

    std::string str() const { return text_.str(); }

private:
    static std::string cell(double v) { return format_double(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(bool v) { return v ? "1" : "0"; }
    static std::string cell(const std::string& v) { return v; }

    std::ostringstream text_;
};

// Ring phases become offsets on top of `theta`; couplers stay as configured.
ChainSpec shifted(const ChainSpec& chain, double theta)
{
    std::vector<RingParams> rings;
    rings.reserve(chain.size());
    for (const RingParams& r : chain.rings())
    {
        rings.push_back(r.with_theta(theta + r.theta()));
    }
    return ChainSpec{std::move(rings), chain.bus_phase()};
}

std::string pair_label(const ExperimentConfig& cfg)
{
    return to_string(cfg.input) + " -> " + to_string(cfg.output);
}

void run_spectrum(const ExperimentConfig& cfg, Writer& w, RunReport& report)
{
    const std::vector<double> theta = cfg.theta_axis.values();
    const Port in = cfg.input.first;
    const Port out = cfg.output.first;
    Csv csv("theta,probability");
    LineSeries series{std::string("|S(") + port_letter(out) + "," + port_letter(in) + ")|^2",
                      std::string(kSeriesColours[0]),
                      theta,
                      {}};
    for (double t : theta)
    {
        double p = std::nan("");
        try
        {
            p = std::norm(compose_chain(shifted(cfg.chain, t))(out, in));
        }
        catch (const std::runtime_error&)
        {
            ++report.failed_cells;
        }
        csv.row(t, p);
        series.y.push_back(p);
    }
    report.total_cells = theta.size();
    w.write("spectrum.csv", csv.str());
    if (cfg.plots)
    {
        const LinePlot plot{"Transmission spectrum", "theta (rad)", "probability", {series}, std::array{0.0, 1.0}};
        w.write("spectrum.svg", render_line_plot(plot));
    }
}

void slice_series(const SliceTable& table, std::vector<LineSeries>& out, const std::string& suffix, bool all)
{
    LineSeries total{"total" + suffix, std::string(kSeriesColours[0]), {}, {}};
    LineSeries detected{"detected" + suffix, std::string(kSeriesColours[1]), {}, {}};
    LineSeries p11{"{1,1}" + suffix, std::string(kSeriesColours[2]), {}, {}};
    LineSeries p20{"{2,0}" + suffix, std::string(kSeriesColours[3]), {}, {}};
    LineSeries p02{"{0,2}" + suffix, std::string(kSeriesColours[4]), {}, {}};
    for (const SliceRow& r : table.rows)
    {
        for (LineSeries* s : {&total, &detected, &p11, &p20, &p02})
        {
            s->x.push_back(r.tau);
        }
        total.y.push_back(r.total);
        detected.y.push_back(r.detected);
        p11.y.push_back(r.p11);
        p20.y.push_back(r.p20);
        p02.y.push_back(r.p02);
    }
    if (all)
    {
        out.push_back(std::move(total));
        out.push_back(std::move(detected));
        out.push_back(std::move(p11));
        out.push_back(std::move(p20));
        out.push_back(std::move(p02));
    }
    else
    {
        out.push_back(std::move(p11));
    }
}

void run_slice(const ExperimentConfig& cfg, Writer& w, RunReport& report)
{
    const std::vector<double> tau = cfg.tau_axis.values();
    const SliceTable table = probability_slice(cfg.chain, cfg.input, cfg.output, cfg.slice_theta, tau);
    Csv csv("tau,total,detected,p11,p20,p02");
    for (const SliceRow& r : table.rows)
    {
        csv.row(r.tau, r.total, r.detected, r.p11, r.p20, r.p02);
    }
    report.total_cells = tau.size();
    w.write("slice.csv", csv.str());
    if (cfg.plots)
    {
        LinePlot plot{"Probability slice " + pair_label(cfg) + " at theta = " + format_double(cfg.slice_theta),
                      "tau",
                      "probability",
                      {},
                      std::array{0.0, 1.0}};
        slice_series(table, plot.series, "", true);
        w.write("slice.svg", render_line_plot(plot));
    }
}

std::string grid_csv(const ProbabilityGrid& grid)
{
    Csv csv("theta,tau,p11");
    for (std::size_t i = 0; i < grid.theta_axis.size(); ++i)
    {
        for (std::size_t j = 0; j < grid.tau_axis.size(); ++j)
        {
            csv.row(grid.theta_axis[i], grid.tau_axis[j], grid.at(i, j));
        }
    }
    return csv.str();
}

std::string homm_csv(const HommCurve& curve)
{
    Csv csv("theta,tau,residual,converged");
    for (const HommPoint& p : curve.points)
    {
        csv.row(p.theta, p.tau, p.residual, p.converged);
    }
    return csv.str();
}

HommCurve trace(const ExperimentConfig& cfg, const std::vector<double>& theta)
{
    return trace_homm_curve(cfg.chain, theta, cfg.input, cfg.output, TauBracket{cfg.tau_axis.min, cfg.tau_axis.max});
}

void run_grid(const ExperimentConfig& cfg, Writer& w, RunReport& report, bool with_contours)
{
    const std::vector<double> tau = cfg.tau_axis.values();
    const std::vector<double> theta = cfg.theta_axis.values();
    const ProbabilityGrid grid = probability_grid(cfg.chain, cfg.input, cfg.output, tau, theta, cfg.threads);
    report.failed_cells = grid.failed_cells;
    report.total_cells = grid.values.size();
    w.write("grid.csv", grid_csv(grid));

    if (!with_contours && !cfg.plots)
    {
        return;
    }
    std::vector<ContourSet> contours = extract_contours(grid, cfg.levels);
    HommCurve curve = trace(cfg, theta);
    if (with_contours)
    {
        Csv csv("level,polyline,closed,point,tau,theta");
        for (const ContourSet& set : contours)
        {
            for (std::size_t k = 0; k < set.polylines.size(); ++k)
            {
                const Polyline& line = set.polylines[k];
                for (std::size_t n = 0; n < line.points.size(); ++n)
                {
                    csv.row(set.level, k, line.closed, n, line.points[n].tau, line.points[n].theta);
                }
            }
        }
        w.write("contours.csv", csv.str());
        w.write("homm_curve.csv", homm_csv(curve));
    }
    if (cfg.plots)
    {
        const ContourPlot plot{"Coincidence probability " + pair_label(cfg), &grid, std::move(contours), std::move(curve)};
        w.write(with_contours ? "contour.svg" : "grid.svg", render_contour_plot(plot));
    }
}

void run_homm_curve(const ExperimentConfig& cfg, Writer& w, RunReport& report)
{
    const std::vector<double> theta = cfg.theta_axis.values();
    const HommCurve curve = trace(cfg, theta);
    report.total_cells = theta.size();
    w.write("homm_curve.csv", homm_csv(curve));
    if (cfg.plots)
    {
        // converged stretches only, as separate series so gaps stay open
        LinePlot plot{"HOMM curve " + pair_label(cfg), "theta (rad)", "tau", {}, std::array{0.0, 1.0}};
        LineSeries run{"tau", std::string(kSeriesColours[0]), {}, {}};
        for (const HommPoint& p : curve.points)
        {
            if (p.converged)
            {
                run.x.push_back(p.theta);
                run.y.push_back(p.tau);
            }
            else if (!run.x.empty())
            {
                plot.series.push_back(run);
                run.x.clear();
                run.y.clear();
            }
        }
        if (!run.x.empty())
        {
            plot.series.push_back(run);
        }
        w.write("homm_curve.svg", render_line_plot(plot));
    }
}

void run_distribution(const ExperimentConfig& cfg, Writer& w, RunReport& report)
{
    const FockState input = cfg.input_state.value_or(FockState::from_pair(cfg.input));
    const std::optional<PortPair> detected =
        cfg.output.distinct() ? std::optional<PortPair>{cfg.output} : std::optional<PortPair>{};
    const OutputDistribution dist = output_distribution(compose_chain(cfg.chain), input, detected);
    Csv csv("n_a,n_b,n_c,n_d,probability");
    for (const auto& [state, p] : dist.entries)
    {
        const auto& n = state.occupations();
        csv.row(n[0], n[1], n[2], n[3], p);
    }
    report.total_cells = dist.entries.size();
    w.write("distribution.csv", csv.str());

    Csv summary("quantity,value");
    summary.row(std::string("accounted"), dist.accounted());
    summary.row(std::string("lost"), dist.lost);
    if (dist.detected)
    {
        summary.row(std::string("detected_total"), dist.detected->total);
        for (std::size_t k = 0; k < dist.detected->split.size(); ++k)
        {
            summary.row("detected_split_" + std::to_string(k), dist.detected->split[k]);
        }
    }
    w.write("distribution_summary.csv", summary.str());
}

void run_alt_io(const ExperimentConfig& cfg, Writer& w, RunReport& report)
{
    const std::vector<double> tau = cfg.tau_axis.values();
    const auto study = alternate_io_study(cfg.chain, cfg.input, cfg.output, cfg.gammas, cfg.slice_theta, tau);
    Csv rows("gamma,tau,total,detected,p11,p20,p02");
    Csv dips("gamma,tau,residual,detected,converged");
    LinePlot p11_plot{"{1,1} probability " + pair_label(cfg) + " at theta = " + format_double(cfg.slice_theta),
                      "tau",
                      "probability",
                      {},
                      std::array{0.0, 1.0}};
    LinePlot detected_plot{"Detected-pair total " + pair_label(cfg), "tau", "probability", {}, std::array{0.0, 1.0}};
    for (std::size_t k = 0; k < study.size(); ++k)
    {
        const AltIoEntry& e = study[k];
        for (const SliceRow& r : e.slice.rows)
        {
            rows.row(e.gamma, r.tau, r.total, r.detected, r.p11, r.p20, r.p02);
        }
        for (const HommPoint& d : e.dips)
        {
            dips.row(e.gamma, d.tau, d.residual, d.detected, d.converged);
        }
        const std::string colour(kSeriesColours[k % kSeriesColours.size()]);
        LineSeries p11{"gamma = " + format_double(e.gamma), colour, {}, {}};
        LineSeries det{"gamma = " + format_double(e.gamma), colour, {}, {}};
        for (const SliceRow& r : e.slice.rows)
        {
            p11.x.push_back(r.tau);
            p11.y.push_back(r.p11);
            det.x.push_back(r.tau);
            det.y.push_back(r.detected);
        }
        p11_plot.series.push_back(std::move(p11));
        detected_plot.series.push_back(std::move(det));
    }
    report.total_cells = tau.size() * study.size();
    w.write("alt_io.csv", rows.str());
    w.write("alt_io_dips.csv", dips.str());
    if (cfg.plots)
    {
        w.write("alt_io.svg", render_line_plot(p11_plot));
        w.write("alt_io_detected.svg", render_line_plot(detected_plot));
    }
}

} // namespace

bool RunReport::ok() const noexcept
{
    return total_cells == 0 ||
           static_cast<double>(failed_cells) < kMaxFailedFraction * static_cast<double>(total_cells);
}

std::string format_double(double v)
{
    if (std::isnan(v))
    {
        return "nan";
    }
    if (std::isinf(v))
    {
        return v > 0 ? "inf" : "-inf";
    }
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

RunReport run_experiment(const ExperimentConfig& cfg)
{
    validate_config(cfg);
    const auto start = std::chrono::steady_clock::now();
    Writer w(cfg.output_directory);
    RunReport report;
    report.directory = cfg.output_directory;

    switch (cfg.mode)
    {
        case Mode::spectrum:
            run_spectrum(cfg, w, report);
            break;
        case Mode::slice:
            run_slice(cfg, w, report);
            break;
        case Mode::grid:
            run_grid(cfg, w, report, false);
            break;
        case Mode::contour:
            run_grid(cfg, w, report, true);
            break;
        case Mode::homm_curve:
            run_homm_curve(cfg, w, report);
            break;
        case Mode::distribution:
            run_distribution(cfg, w, report);
            break;
        case Mode::alt_io:
            run_alt_io(cfg, w, report);
            break;
    }

    report.files = w.files();
    report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    nlohmann::ordered_json manifest;
    manifest["config"] = nlohmann::ordered_json::parse(config_to_json(cfg));
    manifest["version"] = kVersion;
    manifest["runtime_seconds"] = report.runtime_seconds;
    manifest["files"] = nlohmann::ordered_json::array();
    for (const ArtifactFile& f : report.files)
    {
        manifest["files"].push_back({{"path", f.path}, {"sha256", f.sha256}});
    }
    manifest["failed_cells"] = report.failed_cells;
    manifest["total_cells"] = report.total_cells;
    w.write("manifest.json", manifest.dump(2) + "\n", false);
    return report;
}

} // namespace mrrhom
