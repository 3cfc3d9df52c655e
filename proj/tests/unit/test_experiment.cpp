#include <doctest.h>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "mrrhom/checksum.hpp"
#include "mrrhom/experiment.hpp"
#include "mrrhom/homm.hpp"
#include "mrrhom/svg.hpp"

using namespace mrrhom;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace
{

fs::path scratch(const std::string& name)
{
    static const fs::path root = [] {
        std::random_device rd;
        const fs::path p = fs::temp_directory_path() / ("mrrhom-test-" + std::to_string(rd()));
        fs::create_directories(p);
        return p;
    }();
    const fs::path dir = root / name;
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Table
{
    std::string header;
    std::vector<std::vector<std::string>> rows;

    double number(std::size_t row, std::size_t col) const
    {
        const std::string& cell = rows[row][col];
        if (cell == "nan")
        {
            return std::nan("");
        }
        double v = 0.0;
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        REQUIRE(res.ec == std::errc{});
        REQUIRE(res.ptr == cell.data() + cell.size());
        return v;
    }
};

Table read_csv(const fs::path& p)
{
    std::istringstream in(slurp(p));
    Table t;
    std::getline(in, t.header);
    std::string line;
    while (std::getline(in, line))
    {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
        {
            cells.push_back(cell);
        }
        t.rows.push_back(cells);
    }
    return t;
}

ExperimentConfig config(const std::string& yaml, const fs::path& dir)
{
    ExperimentConfig cfg = parse_config(yaml);
    cfg.output_directory = dir;
    return cfg;
}

} // namespace

TEST_CASE("number formatting is exact and locale-free")
{
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5e-12) == "-2.4999999999999998e-12");
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(INFINITY) == "inf");
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int k = 0; k < 1000; ++k)
    {
        const double v = std::pow(10.0, u(rng)) * (k % 2 ? 1.0 : -1.0);
        const std::string text = format_double(v);
        double back = 0.0;
        std::from_chars(text.data(), text.data() + text.size(), back);
        REQUIRE(back == v);
    }
}

TEST_CASE("sha-256")
{
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("spectrum with weak backscattering shows two dips")
{
    const fs::path dir = scratch("spectrum");
    const ExperimentConfig cfg = config(R"(
mode: spectrum
chain: {rings: [{tau: 0.95, gamma: 0.99}]}
ports: {input: a, output: a}
axes: {theta: {min: -0.6, max: 0.6, count: 241}}
)",
                                        dir);
    const RunReport report = run_experiment(cfg);
    CHECK(report.ok());
    const Table t = read_csv(dir / "spectrum.csv");
    CHECK(t.header == "theta,probability");
    REQUIRE(t.rows.size() == 241);

    std::vector<double> minima;
    for (std::size_t k = 1; k + 1 < t.rows.size(); ++k)
    {
        const double p = t.number(k, 1);
        if (p < t.number(k - 1, 1) && p < t.number(k + 1, 1) && std::abs(t.number(k, 0)) < 0.5)
        {
            minima.push_back(t.number(k, 0));
        }
    }
    REQUIRE(minima.size() == 2);
    CHECK(minima[0] == doctest::Approx(-minima[1]).epsilon(1e-9));

    // exact agreement with the library
    const std::vector<double> theta = cfg.theta_axis.values();
    const auto spec = transmission_spectrum(cfg.chain.rings()[0], Port::a, Port::a, theta);
    for (std::size_t k = 0; k < theta.size(); ++k)
    {
        REQUIRE(t.number(k, 0) == spec[k].first);
        REQUIRE(t.number(k, 1) == spec[k].second);
    }
    CHECK(fs::exists(dir / "spectrum.svg"));
}

TEST_CASE("slice output")
{
    const fs::path dir = scratch("slice");
    const ExperimentConfig cfg = config(R"(
mode: slice
chain: {rings: [{tau: 0.5, gamma: 1}]}
axes: {tau: {min: 0.005, max: 0.995, count: 101}}
slice: {theta: pi}
)",
                                        dir);
    run_experiment(cfg);
    const Table t = read_csv(dir / "slice.csv");
    CHECK(t.header == "tau,total,detected,p11,p20,p02");
    REQUIRE(t.rows.size() == 101);
    const SliceTable lib = probability_slice(cfg.chain, kAB, kAB, pi, cfg.tau_axis.values());
    for (std::size_t k = 0; k < t.rows.size(); ++k)
    {
        CHECK(std::abs(t.number(k, 1) - 1.0) <= 1e-10);
        const SliceRow& r = lib.rows[k];
        REQUIRE(t.number(k, 0) == r.tau);
        REQUIRE(t.number(k, 1) == r.total);
        REQUIRE(t.number(k, 2) == r.detected);
        REQUIRE(t.number(k, 3) == r.p11);
        REQUIRE(t.number(k, 4) == r.p20);
        REQUIRE(t.number(k, 5) == r.p02);
    }
    const std::string svg = slurp(dir / "slice.svg");
    CHECK(svg.find("class=\"series\"") != std::string::npos);
}

TEST_CASE("homm curve contains the single-ring root")
{
    const fs::path dir = scratch("homm");
    const ExperimentConfig cfg = config("mode: homm-curve\nchain: {rings: [{tau: 0.5}]}\n", dir);
    run_experiment(cfg);
    const Table t = read_csv(dir / "homm_curve.csv");
    CHECK(t.header == "theta,tau,residual,converged");
    REQUIRE(t.rows.size() == 201);
    bool found = false;
    for (std::size_t k = 0; k < t.rows.size(); ++k)
    {
        if (std::abs(t.number(k, 0) - pi) < 1e-12)
        {
            found = true;
            CHECK(t.number(k, 1) == doctest::Approx(0.4142).epsilon(1e-3 / 0.4142));
            CHECK(t.rows[k][3] == "1");
        }
    }
    CHECK(found);
}

TEST_CASE("grid and contour outputs")
{
    const fs::path a = scratch("contour-a");
    const fs::path b = scratch("contour-b");
    const std::string doc = R"(
mode: contour
chain: {rings: [{tau: 0.5}]}
axes:
  tau: {min: 0.005, max: 0.995, count: 41}
  theta: {min: 0, max: 2pi, count: 45}
)";
    ExperimentConfig cfg = config(doc, a);
    const RunReport first = run_experiment(cfg);
    cfg.output_directory = b;
    cfg.threads = 3;
    const RunReport second = run_experiment(cfg);

    SUBCASE("determinism across runs and thread counts")
    {
        REQUIRE(first.files.size() == second.files.size());
        for (std::size_t k = 0; k < first.files.size(); ++k)
        {
            CHECK(first.files[k].path == second.files[k].path);
            CHECK(slurp(a / first.files[k].path) == slurp(b / second.files[k].path));
        }
    }

    SUBCASE("grid csv equals the library grid")
    {
        const Table t = read_csv(a / "grid.csv");
        CHECK(t.header == "theta,tau,p11");
        const ProbabilityGrid grid =
            probability_grid(cfg.chain, kAB, kAB, cfg.tau_axis.values(), cfg.theta_axis.values());
        REQUIRE(t.rows.size() == grid.values.size());
        for (std::size_t k = 0; k < t.rows.size(); ++k)
        {
            REQUIRE(t.number(k, 0) == grid.theta_axis[k / grid.tau_axis.size()]);
            REQUIRE(t.number(k, 1) == grid.tau_axis[k % grid.tau_axis.size()]);
            REQUIRE(t.number(k, 2) == grid.values[k]);
        }
    }

    SUBCASE("manifest")
    {
        const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
        for (const char* key : {"config", "version", "runtime_seconds", "files"})
        {
            CHECK(manifest.contains(key));
        }
        CHECK(manifest["version"] == std::string(kVersion));
        CHECK(manifest["failed_cells"] == 0);
        ExperimentConfig expected = cfg;
        expected.output_directory = a;
        expected.threads = 1;
        CHECK(parse_config(manifest["config"].dump()) == expected);
        std::vector<std::string> names;
        for (const auto& f : manifest["files"])
        {
            names.push_back(f["path"]);
            CHECK(sha256_file(a / f["path"].get<std::string>()) == f["sha256"].get<std::string>());
        }
        CHECK(names == std::vector<std::string>{"grid.csv", "contours.csv", "homm_curve.csv", "contour.svg"});
    }

    SUBCASE("svg carries contour levels and the homm overlay")
    {
        const std::string svg = slurp(a / "contour.svg");
        CHECK(svg.find("data-level=\"0.001\"") != std::string::npos);
        CHECK(svg.find("data-level=\"0.050000000000000003\"") != std::string::npos);
        CHECK(svg.find("stroke=\"#d62728\"") != std::string::npos);
        CHECK(svg.find("class=\"band\"") != std::string::npos);

        std::smatch m;
        REQUIRE(std::regex_search(svg, m, std::regex(R"re(<g class="frame" data-left="([^"]+)" data-top="([^"]+)" data-width="([^"]+)" data-height="([^"]+)" data-x-min="([^"]+)" data-x-max="([^"]+)" data-y-min="([^"]+)" data-y-max="([^"]+)">)re")));
        PlotFrame f;
        f.left = std::stod(m[1]);
        f.top = std::stod(m[2]);
        f.width = std::stod(m[3]);
        f.height = std::stod(m[4]);
        f.x_min = std::stod(m[5]);
        f.x_max = std::stod(m[6]);
        f.y_min = std::stod(m[7]);
        f.y_max = std::stod(m[8]);

        // the overlay passes through the root at theta = pi
        REQUIRE(std::regex_search(svg, m, std::regex(R"re(<polyline class="homm"[^>]*points="([^"]+)")re")));
        std::istringstream pts(m[1].str());
        std::string pair;
        bool near_root = false;
        while (pts >> pair)
        {
            const auto comma = pair.find(',');
            const double tau = f.x_at(std::stod(pair.substr(0, comma)));
            const double theta = f.y_at(std::stod(pair.substr(comma + 1)));
            const HommPoint root = find_homm_tau(cfg.chain, pi, kAB, kAB);
            if (std::abs(theta - pi) < 0.01)
            {
                near_root = near_root || std::abs(tau - root.tau) < 0.005;
            }
        }
        CHECK(near_root);
    }
}

TEST_CASE("an isolated homm point is drawn as a marker")
{
    const ChainSpec chain{{RingParams{0.5, 0.0, 0.95}}};
    const std::vector<double> tau = linspace(0.005, 0.995, 21);
    const std::vector<double> theta = linspace(0.0, 2.0 * pi, 9);
    const ProbabilityGrid grid = probability_grid(chain, kAB, kAB, tau, theta);
    ContourPlot plot;
    plot.grid = &grid;
    plot.homm = trace_homm_curve(chain, theta, kAB, kAB);
    REQUIRE(plot.homm->converged_count() == 1);
    const std::string svg = render_contour_plot(plot);
    CHECK(svg.find("class=\"homm\"") == std::string::npos);
    CHECK(svg.find("<circle class=\"homm-point\"") != std::string::npos);
}

TEST_CASE("distribution and alt-io outputs")
{
    const fs::path dir = scratch("distribution");
    run_experiment(config("mode: distribution\nchain: {rings: [{tau: 0.41421356237309503, theta: pi}]}\n", dir));
    const Table t = read_csv(dir / "distribution.csv");
    CHECK(t.header == "n_a,n_b,n_c,n_d,probability");
    CHECK(t.rows.size() == 10);
    double sum = 0.0;
    for (std::size_t k = 0; k < t.rows.size(); ++k)
    {
        sum += t.number(k, 4);
        if (t.rows[k][0] == "1" && t.rows[k][1] == "1")
        {
            CHECK(t.number(k, 4) < 1e-20);
        }
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    const Table summary = read_csv(dir / "distribution_summary.csv");
    CHECK(summary.header == "quantity,value");

    const fs::path alt = scratch("alt-io");
    run_experiment(config(R"(
mode: alt-io
chain: {rings: [{tau: 0.5}]}
ports: {input: AB, output: CD}
gammas: [0.75, 0.25]
axes: {tau: {count: 41}}
)",
                          alt));
    const Table rows = read_csv(alt / "alt_io.csv");
    CHECK(rows.header == "gamma,tau,total,detected,p11,p20,p02");
    CHECK(rows.rows.size() == 82);
    const Table dips = read_csv(alt / "alt_io_dips.csv");
    CHECK(dips.header == "gamma,tau,residual,detected,converged");
    CHECK(dips.rows.size() >= 2);
}

TEST_CASE("unwritable output directory")
{
    const fs::path dir = scratch("blocked");
    fs::create_directories(dir.parent_path());
    std::ofstream(dir) << "not a directory";
    ExperimentConfig cfg = config("mode: slice\nchain: {rings: [{tau: 0.5}]}\naxes: {tau: {count: 5}}\n", dir / "sub");
    CHECK_THROWS_AS(run_experiment(cfg), IoError);
}

TEST_CASE("command-line tool")
{
    const std::string cli = MRRHOM_CLI_PATH;
    const fs::path dir = scratch("cli");
    const std::string ok = cli + " slice --tau 0.5 --gamma 0.9 --slice-theta pi --tau-count 21 --output-dir " +
                           dir.string() + " --no-plots > /dev/null";
    CHECK(std::system(ok.c_str()) == 0);
    const Table t = read_csv(dir / "slice.csv");
    CHECK(t.rows.size() == 21);
    CHECK_FALSE(fs::exists(dir / "slice.svg"));
    CHECK(fs::exists(dir / "manifest.json"));

    const std::string bad_gamma = cli + " slice --tau 0.5 --gamma 1.5 --output-dir " + dir.string() + " 2> /dev/null";
    CHECK(WEXITSTATUS(std::system(bad_gamma.c_str())) == 2);
    const std::string no_tau = cli + " spectrum --output-dir " + dir.string() + " 2> /dev/null";
    CHECK(WEXITSTATUS(std::system(no_tau.c_str())) == 2);

    const fs::path cfg_dir = scratch("cli-config");
    std::ofstream(cfg_dir.string() + ".yaml") << "mode: grid\nchain: {rings: [{tau: 0.5}]}\naxes: {tau: {count: 6}, theta: {count: 7}}\n";
    const std::string from_file = cli + " grid --config " + cfg_dir.string() + ".yaml --threads 2 --output-dir " +
                                  cfg_dir.string() + " > /dev/null";
    CHECK(std::system(from_file.c_str()) == 0);
    CHECK(read_csv(cfg_dir / "grid.csv").rows.size() == 42);
    CHECK(fs::exists(cfg_dir / "grid.svg"));
}
