#include "mrrhom/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "mrrhom/errors.hpp"
#include "mrrhom/homm.hpp"

namespace mrrhom
{

namespace
{

using std::numbers::pi;

constexpr std::array<std::pair<Mode, std::string_view>, 7> kModeNames = {{
    {Mode::spectrum, "spectrum"},
    {Mode::slice, "slice"},
    {Mode::grid, "grid"},
    {Mode::contour, "contour"},
    {Mode::homm_curve, "homm-curve"},
    {Mode::distribution, "distribution"},
    {Mode::alt_io, "alt-io"},
}};

std::size_t line_of(const YAML::Node& node)
{
    const YAML::Mark mark = node.Mark();
    return mark.line >= 0 ? static_cast<std::size_t>(mark.line) + 1 : 0;
}

[[noreturn]] void fail(const std::string& key, const YAML::Node& node, const std::string& message)
{
    throw ConfigError(key, line_of(node), message);
}

void allow_keys(const YAML::Node& map, const std::string& where, std::initializer_list<std::string_view> keys)
{
    if (!map.IsMap())
    {
        fail(where.empty() ? "<root>" : where, map, "expected a mapping");
    }
    for (const auto& entry : map)
    {
        const std::string name = entry.first.as<std::string>();
        if (std::find(keys.begin(), keys.end(), name) == keys.end())
        {
            fail(where.empty() ? name : where + "." + name, entry.first, "unknown key");
        }
    }
}

// "pi", "-pi/2", "0.25pi", "2*pi/3"
std::optional<double> phase_expression(const std::string& text)
{
    static const std::regex pattern(
        R"(^\s*([+-]?)\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, pattern))
    {
        return std::nullopt;
    }
    double value = pi;
    if (m[2].matched)
    {
        value *= std::stod(m[2].str());
    }
    if (m[3].matched)
    {
        const double divisor = std::stod(m[3].str());
        if (divisor == 0.0)
        {
            return std::nullopt;
        }
        value /= divisor;
    }
    return m[1].str() == "-" ? -value : value;
}

double read_number(const YAML::Node& node, const std::string& key, bool phase = false)
{
    if (!node.IsScalar())
    {
        fail(key, node, "expected a number");
    }
    double value = 0.0;
    try
    {
        value = node.as<double>();
    }
    catch (const YAML::BadConversion&)
    {
        const std::optional<double> expr = phase ? phase_expression(node.Scalar()) : std::nullopt;
        if (!expr)
        {
            fail(key, node, "expected a number, got '" + node.Scalar() + "'");
        }
        value = *expr;
    }
    if (!std::isfinite(value))
    {
        fail(key, node, "value must be finite");
    }
    return value;
}

double read_in_range(const YAML::Node& node, const std::string& key, double lo, double hi, bool open_lo = false)
{
    const double v = read_number(node, key);
    if (v > hi || v < lo || (open_lo && v == lo))
    {
        std::ostringstream msg;
        msg << "value " << v << " out of range " << (open_lo ? "(" : "[") << lo << ", " << hi << "]";
        fail(key, node, msg.str());
    }
    return v;
}

long long read_integer(const YAML::Node& node, const std::string& key)
{
    if (!node.IsScalar())
    {
        fail(key, node, "expected an integer");
    }
    try
    {
        return node.as<long long>();
    }
    catch (const YAML::BadConversion&)
    {
        fail(key, node, "expected an integer, got '" + node.Scalar() + "'");
    }
}

std::vector<double> read_list(const YAML::Node& node, const std::string& key)
{
    if (!node.IsSequence())
    {
        fail(key, node, "expected a list of numbers");
    }
    std::vector<double> values;
    for (std::size_t k = 0; k < node.size(); ++k)
    {
        values.push_back(read_number(node[k], key + "[" + std::to_string(k) + "]"));
    }
    return values;
}

RingParams read_ring(const YAML::Node& node, const std::string& key)
{
    allow_keys(node, key, {"tau", "theta", "gamma", "alpha"});
    if (!node["tau"])
    {
        fail(key + ".tau", node, "missing required key");
    }
    const double tau = read_in_range(node["tau"], key + ".tau", 0.0, 1.0);
    const double theta = node["theta"] ? read_number(node["theta"], key + ".theta", true) : 0.0;
    const double gamma = node["gamma"] ? read_in_range(node["gamma"], key + ".gamma", 0.0, 1.0) : 1.0;
    const double alpha = node["alpha"] ? read_in_range(node["alpha"], key + ".alpha", 0.0, 1.0, true) : 1.0;
    return RingParams{tau, theta, gamma, alpha};
}

AxisSpec read_axis(const YAML::Node& node, const std::string& key, AxisSpec axis, bool phase)
{
    allow_keys(node, key, {"min", "max", "count"});
    if (node["min"])
    {
        axis.min = read_number(node["min"], key + ".min", phase);
    }
    if (node["max"])
    {
        axis.max = read_number(node["max"], key + ".max", phase);
    }
    if (node["count"])
    {
        const long long count = read_integer(node["count"], key + ".count");
        if (count < 2)
        {
            fail(key + ".count", node["count"], "axis needs at least 2 points");
        }
        axis.count = static_cast<std::size_t>(count);
    }
    return axis;
}

PortPair read_pair(const YAML::Node& node, const std::string& key)
{
    if (!node.IsScalar())
    {
        fail(key, node, "expected port letters such as AB");
    }
    const std::string text = node.Scalar();
    try
    {
        if (text.size() == 1)
        {
            const Port p = parse_port(text[0]);
            return PortPair{p, p};
        }
        return parse_port_pair(text);
    }
    catch (const DomainError& e)
    {
        fail(key, node, e.what());
    }
}

bool port_pair_required(Mode mode) { return mode != Mode::spectrum; }

} // namespace

std::optional<double> parse_phase(std::string_view text)
{
    const std::string s(text);
    try
    {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v))
        {
            return v;
        }
    }
    catch (const std::exception&)
    {
    }
    return phase_expression(s);
}

ConfigError::ConfigError(const std::string& key, std::size_t line, const std::string& message)
    : std::runtime_error(key + (line > 0 ? " (line " + std::to_string(line) + ")" : std::string{}) + ": " + message),
      key_(key),
      line_(line)
{
}

std::string_view mode_name(Mode mode) noexcept
{
    for (const auto& [m, name] : kModeNames)
    {
        if (m == mode)
        {
            return name;
        }
    }
    return "grid";
}

std::optional<Mode> parse_mode(std::string_view text) noexcept
{
    for (const auto& [m, name] : kModeNames)
    {
        if (name == text)
        {
            return m;
        }
    }
    return std::nullopt;
}

std::vector<double> AxisSpec::values() const { return linspace(min, max, count); }

ExperimentConfig parse_config(std::string_view text)
{
    YAML::Node root;
    try
    {
        root = YAML::Load(std::string(text));
    }
    catch (const YAML::ParserException& e)
    {
        throw ConfigError("<document>", static_cast<std::size_t>(e.mark.line + 1), e.msg);
    }
    if (!root || root.IsNull())
    {
        throw ConfigError("chain.rings", 0, "empty document; a ring list is required");
    }
    allow_keys(root,
               "",
               {"mode", "chain", "ports", "axes", "slice", "levels", "gammas", "input_state", "output", "threads"});

    ExperimentConfig cfg;
    if (root["mode"])
    {
        const std::optional<Mode> mode = parse_mode(root["mode"].Scalar());
        if (!mode)
        {
            fail("mode", root["mode"], "unknown mode '" + root["mode"].Scalar() + "'");
        }
        cfg.mode = *mode;
    }

    const YAML::Node chain = root["chain"];
    if (!chain)
    {
        fail("chain.rings", root, "missing ring list");
    }
    allow_keys(chain, "chain", {"rings", "bus_phase"});
    const YAML::Node rings = chain["rings"];
    if (!rings)
    {
        fail("chain.rings", chain, "missing ring list");
    }
    if (!rings.IsSequence() || rings.size() == 0)
    {
        fail("chain.rings", rings, "expected a non-empty list of rings");
    }
    std::vector<RingParams> ring_list;
    for (std::size_t k = 0; k < rings.size(); ++k)
    {
        ring_list.push_back(read_ring(rings[k], "chain.rings[" + std::to_string(k) + "]"));
    }
    const double bus_phase = chain["bus_phase"] ? read_number(chain["bus_phase"], "chain.bus_phase", true) : 0.0;
    cfg.chain = ChainSpec{std::move(ring_list), bus_phase};

    if (const YAML::Node ports = root["ports"])
    {
        allow_keys(ports, "ports", {"input", "output"});
        if (ports["input"])
        {
            cfg.input = read_pair(ports["input"], "ports.input");
        }
        if (ports["output"])
        {
            cfg.output = read_pair(ports["output"], "ports.output");
        }
    }

    if (const YAML::Node axes = root["axes"])
    {
        allow_keys(axes, "axes", {"tau", "theta"});
        if (axes["tau"])
        {
            cfg.tau_axis = read_axis(axes["tau"], "axes.tau", cfg.tau_axis, false);
        }
        if (axes["theta"])
        {
            cfg.theta_axis = read_axis(axes["theta"], "axes.theta", cfg.theta_axis, true);
        }
    }

    if (const YAML::Node slice = root["slice"])
    {
        allow_keys(slice, "slice", {"theta"});
        if (slice["theta"])
        {
            cfg.slice_theta = read_number(slice["theta"], "slice.theta", true);
        }
    }

    if (root["levels"])
    {
        cfg.levels = read_list(root["levels"], "levels");
    }
    if (root["gammas"])
    {
        cfg.gammas = read_list(root["gammas"], "gammas");
    }

    if (const YAML::Node state = root["input_state"])
    {
        if (!state.IsSequence() || state.size() != kPortCount)
        {
            fail("input_state", state, "expected four occupation numbers (a, b, c, d)");
        }
        std::array<int, kPortCount> n{};
        for (std::size_t k = 0; k < kPortCount; ++k)
        {
            const long long v = read_integer(state[k], "input_state[" + std::to_string(k) + "]");
            if (v < 0 || v > kMaxPhotons)
            {
                fail("input_state[" + std::to_string(k) + "]", state[k], "occupation out of range");
            }
            n[k] = static_cast<int>(v);
        }
        cfg.input_state = FockState{n};
    }

    if (const YAML::Node output = root["output"])
    {
        allow_keys(output, "output", {"directory", "plots"});
        if (output["directory"])
        {
            cfg.output_directory = output["directory"].as<std::string>();
        }
        if (output["plots"])
        {
            try
            {
                cfg.plots = output["plots"].as<bool>();
            }
            catch (const YAML::BadConversion&)
            {
                fail("output.plots", output["plots"], "expected true or false");
            }
        }
    }

    if (root["threads"])
    {
        const long long threads = read_integer(root["threads"], "threads");
        if (threads < 1 || threads > 4096)
        {
            fail("threads", root["threads"], "thread count must lie in [1, 4096]");
        }
        cfg.threads = static_cast<unsigned>(threads);
    }

    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw ConfigError("<file>", 0, "cannot read " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

void validate_config(const ExperimentConfig& cfg)
{
    auto check_axis = [](const AxisSpec& axis, const std::string& key, double lo, double hi) {
        if (axis.count < 2)
        {
            throw ConfigError(key + ".count", 0, "axis needs at least 2 points");
        }
        if (!(std::isfinite(axis.min) && std::isfinite(axis.max)) || !(axis.min < axis.max))
        {
            throw ConfigError(key, 0, "axis needs min < max");
        }
        if (axis.min < lo || axis.max > hi)
        {
            throw ConfigError(key, 0, "axis leaves the allowed range");
        }
    };
    check_axis(cfg.tau_axis, "axes.tau", 0.0, 1.0);
    check_axis(cfg.theta_axis, "axes.theta", -INFINITY, INFINITY);

    if (!std::isfinite(cfg.slice_theta))
    {
        throw ConfigError("slice.theta", 0, "value must be finite");
    }
    if (cfg.levels.empty())
    {
        throw ConfigError("levels", 0, "at least one contour level is required");
    }
    for (std::size_t k = 0; k < cfg.levels.size(); ++k)
    {
        if (!(cfg.levels[k] > 0.0 && cfg.levels[k] < 1.0))
        {
            throw ConfigError("levels[" + std::to_string(k) + "]", 0, "levels must lie in (0, 1)");
        }
        if (k > 0 && !(cfg.levels[k] > cfg.levels[k - 1]))
        {
            throw ConfigError("levels", 0, "levels must be strictly ascending");
        }
    }
    if (cfg.gammas.empty())
    {
        throw ConfigError("gammas", 0, "at least one gamma is required");
    }
    for (std::size_t k = 0; k < cfg.gammas.size(); ++k)
    {
        if (!(cfg.gammas[k] >= 0.0 && cfg.gammas[k] <= 1.0))
        {
            throw ConfigError("gammas[" + std::to_string(k) + "]", 0, "gamma must lie in [0, 1]");
        }
    }
    if (port_pair_required(cfg.mode))
    {
        if (!cfg.input.distinct())
        {
            throw ConfigError("ports.input", 0, "expected two distinct ports for mode " + std::string(mode_name(cfg.mode)));
        }
        if (!cfg.output.distinct())
        {
            throw ConfigError("ports.output", 0, "expected two distinct ports for mode " + std::string(mode_name(cfg.mode)));
        }
    }
    if (cfg.mode == Mode::alt_io)
    {
        const bool supported = (cfg.input == kAB && (cfg.output == kCD || cfg.output == kAB)) ||
                               (cfg.input == kAD && cfg.output == kAD) || (cfg.input == kCD && cfg.output == kCD);
        if (!supported)
        {
            throw ConfigError("ports", 0, "alt-io supports AB->CD, AB->AB, AD->AD and CD->CD");
        }
    }
    if (cfg.input_state && (cfg.input_state->total() < 1 || cfg.input_state->total() > kMaxPhotons))
    {
        throw ConfigError("input_state", 0, "photon number must lie in [1, " + std::to_string(kMaxPhotons) + "]");
    }
    if (cfg.threads < 1)
    {
        throw ConfigError("threads", 0, "thread count must be at least 1");
    }
    if (cfg.output_directory.empty())
    {
        throw ConfigError("output.directory", 0, "output directory must not be empty");
    }
}

std::string config_to_json(const ExperimentConfig& cfg, int indent)
{
    using nlohmann::ordered_json;
    ordered_json rings = ordered_json::array();
    for (const RingParams& r : cfg.chain.rings())
    {
        rings.push_back({{"tau", r.tau()}, {"theta", r.theta()}, {"gamma", r.gamma()}, {"alpha", r.alpha()}});
    }
    auto axis = [](const AxisSpec& a) { return ordered_json{{"min", a.min}, {"max", a.max}, {"count", a.count}}; };

    ordered_json doc;
    doc["mode"] = mode_name(cfg.mode);
    doc["chain"] = {{"bus_phase", cfg.chain.bus_phase()}, {"rings", rings}};
    doc["ports"] = {{"input", to_string(cfg.input)}, {"output", to_string(cfg.output)}};
    doc["axes"] = {{"tau", axis(cfg.tau_axis)}, {"theta", axis(cfg.theta_axis)}};
    doc["slice"] = {{"theta", cfg.slice_theta}};
    doc["levels"] = cfg.levels;
    doc["gammas"] = cfg.gammas;
    if (cfg.input_state)
    {
        doc["input_state"] = cfg.input_state->occupations();
    }
    doc["output"] = {{"directory", cfg.output_directory.generic_string()}, {"plots", cfg.plots}};
    doc["threads"] = cfg.threads;
    return doc.dump(indent);
}

ExperimentConfig apply_overrides(ExperimentConfig cfg, const ConfigOverrides& o)
{
    if (o.mode)
    {
        cfg.mode = *o.mode;
    }
    if (o.tau || o.theta || o.gamma || o.alpha || o.bus_phase)
    {
        std::vector<RingParams> rings;
        for (const RingParams& r : cfg.chain.rings())
        {
            try
            {
                rings.emplace_back(o.tau.value_or(r.tau()),
                                   o.theta.value_or(r.theta()),
                                   o.gamma.value_or(r.gamma()),
                                   o.alpha.value_or(r.alpha()));
            }
            catch (const DomainError& e)
            {
                throw ConfigError("chain.rings", 0, e.what());
            }
        }
        try
        {
            cfg.chain = ChainSpec{std::move(rings), o.bus_phase.value_or(cfg.chain.bus_phase())};
        }
        catch (const DomainError& e)
        {
            throw ConfigError("chain.bus_phase", 0, e.what());
        }
    }
    auto pair = [](const std::string& text, const std::string& key) {
        try
        {
            if (text.size() == 1)
            {
                const Port p = parse_port(text[0]);
                return PortPair{p, p};
            }
            return parse_port_pair(text);
        }
        catch (const DomainError& e)
        {
            throw ConfigError(key, 0, e.what());
        }
    };
    if (o.input)
    {
        cfg.input = pair(*o.input, "ports.input");
    }
    if (o.output)
    {
        cfg.output = pair(*o.output, "ports.output");
    }
    cfg.tau_axis.min = o.tau_min.value_or(cfg.tau_axis.min);
    cfg.tau_axis.max = o.tau_max.value_or(cfg.tau_axis.max);
    cfg.tau_axis.count = o.tau_count.value_or(cfg.tau_axis.count);
    cfg.theta_axis.min = o.theta_min.value_or(cfg.theta_axis.min);
    cfg.theta_axis.max = o.theta_max.value_or(cfg.theta_axis.max);
    cfg.theta_axis.count = o.theta_count.value_or(cfg.theta_axis.count);
    cfg.slice_theta = o.slice_theta.value_or(cfg.slice_theta);
    if (o.levels)
    {
        cfg.levels = *o.levels;
    }
    if (o.gammas)
    {
        cfg.gammas = *o.gammas;
    }
    if (o.output_directory)
    {
        cfg.output_directory = *o.output_directory;
    }
    cfg.plots = o.plots.value_or(cfg.plots);
    cfg.threads = o.threads.value_or(cfg.threads);
    validate_config(cfg);
    return cfg;
}

} // namespace mrrhom
