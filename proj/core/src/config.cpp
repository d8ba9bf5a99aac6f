#include "mpqkd/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mpqkd/errors.hpp"

namespace mpqkd {

namespace {

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep)
        out.push_back("");
    return out;
}

double to_double(const std::string& s, const std::string& key)
{
    if (s.empty())
        throw ConfigError(key, "empty value");
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(s.c_str(), &end);
    if (*end != '\0' || errno == ERANGE || !std::isfinite(v))
        throw ConfigError(key, "'" + s + "' is not a number");
    return v;
}

std::uint64_t to_u64(const std::string& s, const std::string& key)
{
    if (s.empty() || s[0] == '-' || s[0] == '+')
        throw ConfigError(key, "'" + s + "' is not a non-negative integer");
    char* end = nullptr;
    errno = 0;
    unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (*end != '\0' || errno == ERANGE)
        throw ConfigError(key, "'" + s + "' is not a non-negative integer");
    return v;
}

double snap(double v) { return std::round(v * 1e12) / 1e12; }

std::string number_text(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double probability(const std::string& s, const std::string& key)
{
    double v = to_double(s, key);
    if (v < 0.0 || v > 1.0)
        throw ConfigError(key, "value " + s + " outside [0, 1]");
    return v;
}

const std::set<std::string>& known_keys()
{
    static const std::set<std::string> keys{
        "topology.kind", "topology.width",    "topology.height",  "topology.nodes", "topology.radius",
        "topology.max_retries", "layout.kind", "layout.nodes",    "protocol.n_parties",
        "params.p",      "params.q",          "params.gamma_list", "routing.strategy", "sim.rounds",
        "sim.graph_seeds", "sim.master_seed", "sim.swap_mode",    "output.path"};
    return keys;
}

} // namespace

std::vector<std::string> expand_list(const std::string& value, const std::string& key)
{
    auto items = split(value, ',');
    for (const auto& it : items)
        if (it.empty())
            throw ConfigError(key, "empty list element");
    auto dots = std::find(items.begin(), items.end(), "...");
    if (dots == items.end())
        return items;
    auto k = static_cast<std::size_t>(dots - items.begin());
    if (k < 2 || k + 2 != items.size() || std::count(items.begin(), items.end(), "...") != 1)
        throw ConfigError(key, "range must look like 'a, b, ..., c'");
    std::vector<double> head;
    for (std::size_t i = 0; i < k; ++i)
        head.push_back(to_double(items[i], key));
    const double last = to_double(items.back(), key);
    const double step = head[k - 1] - head[k - 2];
    if (step == 0.0 || (last - head[k - 1]) / step < 0.0)
        throw ConfigError(key, "range step does not reach the end value");
    const double span = (last - head[0]) / step;
    const auto steps = static_cast<std::size_t>(std::llround(span));
    if (std::abs(span - static_cast<double>(steps)) > 1e-6)
        throw ConfigError(key, "range end is not on the step grid");
    for (std::size_t i = 1; i < k; ++i)
        if (std::abs(head[i] - head[i - 1] - step) > 1e-9 * std::max(1.0, std::abs(step)))
            throw ConfigError(key, "explicit range values are not evenly spaced");
    std::vector<std::string> out(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(k));
    for (std::size_t i = k; i <= steps; ++i)
        out.push_back(number_text(snap(head[0] + static_cast<double>(i) * step)));
    return out;
}

ExperimentConfig parse_config(const std::string& text)
{
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.resize(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const std::string where = "line " + std::to_string(lineno);
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where, "expected 'section.key = value'");
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        auto dot = key.find('.');
        if (key.empty() || dot == std::string::npos || dot == 0 || dot + 1 == key.size() ||
            key.find_first_of(" \t") != std::string::npos)
            throw ConfigError(where, "malformed key '" + key + "'");
        if (!known_keys().count(key))
            throw ConfigError(key, "unknown key");
        if (value.empty())
            throw ConfigError(key, "missing value");
        if (!kv.emplace(key, value).second)
            throw ConfigError(key, "duplicate key");
    }

    auto require = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end())
            throw ConfigError(key, "required key missing");
        return it->second;
    };
    auto get = [&](const std::string& key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    ExperimentConfig c;
    const auto& kind = require("topology.kind");
    if (kind == "grid") {
        c.topology.kind = TopologyKind::Grid;
        auto dim = [&](const char* key) {
            auto v = to_u64(require(key), key);
            if (v < 2 || v > 1000)
                throw ConfigError(key, "grid dimension must lie in 2..1000");
            return static_cast<std::uint32_t>(v);
        };
        c.topology.width = dim("topology.width");
        c.topology.height = dim("topology.height");
        for (const char* k : {"topology.nodes", "topology.radius", "topology.max_retries"})
            if (get(k))
                throw ConfigError(k, "only valid for random topologies");
    } else if (kind == "random") {
        c.topology.kind = TopologyKind::Random;
        c.topology.nodes = to_u64(require("topology.nodes"), "topology.nodes");
        if (c.topology.nodes < 2)
            throw ConfigError("topology.nodes", "need at least two nodes");
        c.topology.radius = to_double(require("topology.radius"), "topology.radius");
        if (c.topology.radius <= 0.0)
            throw ConfigError("topology.radius", "radius must be positive");
        if (auto v = get("topology.max_retries")) {
            c.topology.max_retries = to_u64(*v, "topology.max_retries");
            if (c.topology.max_retries < 1)
                throw ConfigError("topology.max_retries", "must be at least 1");
        }
        for (const char* k : {"topology.width", "topology.height"})
            if (get(k))
                throw ConfigError(k, "only valid for grid topologies");
    } else {
        throw ConfigError("topology.kind", "expected 'grid' or 'random', got '" + kind + "'");
    }

    const auto& lk = require("layout.kind");
    try {
        c.layout.kind = parse_layout_kind(lk);
    } catch (const InvalidArgument&) {
        throw ConfigError("layout.kind", "unknown layout '" + lk + "'");
    }
    if (auto v = get("layout.nodes")) {
        if (c.layout.kind != LayoutKind::Explicit)
            throw ConfigError("layout.nodes", "only valid for explicit layouts");
        for (const auto& s : expand_list(*v, "layout.nodes"))
            c.layout.nodes.push_back(static_cast<NodeId>(to_u64(s, "layout.nodes")));
    } else if (c.layout.kind == LayoutKind::Explicit) {
        throw ConfigError("layout.nodes", "required for explicit layouts");
    }
    if (c.layout.kind != LayoutKind::Explicit && c.layout.kind != LayoutKind::Random &&
        c.topology.kind != TopologyKind::Grid)
        throw ConfigError("layout.kind", "grid presets need a grid topology");

    for (const auto& s : expand_list(require("protocol.n_parties"), "protocol.n_parties")) {
        auto n = to_u64(s, "protocol.n_parties");
        if (n < 2 || n > kMaxTreeTerminals)
            throw ConfigError("protocol.n_parties", "party count must lie in 2.." + std::to_string(kMaxTreeTerminals));
        if (c.layout.kind == LayoutKind::Explicit && n > c.layout.nodes.size())
            throw ConfigError("protocol.n_parties", "explicit layout lists fewer nodes than " + s);
        c.n_parties.push_back(n);
    }

    c.p = probability(require("params.p"), "params.p");
    c.q = probability(require("params.q"), "params.q");
    for (const auto& s : expand_list(require("params.gamma_list"), "params.gamma_list")) {
        double g = probability(s, "params.gamma_list");
        if (!c.gamma_list.empty() && !(g > c.gamma_list.back()))
            throw ConfigError("params.gamma_list", "values must be strictly increasing");
        c.gamma_list.push_back(g);
    }

    for (const auto& s : expand_list(require("routing.strategy"), "routing.strategy")) {
        try {
            c.strategies.push_back(parse_mode(s));
        } catch (const InvalidArgument&) {
            throw ConfigError("routing.strategy", "unknown strategy '" + s + "'");
        }
    }

    if (auto v = get("sim.rounds")) {
        c.rounds = to_u64(*v, "sim.rounds");
        if (c.rounds < 1)
            throw ConfigError("sim.rounds", "must be at least 1");
    }
    if (auto v = get("sim.graph_seeds")) {
        c.graph_seeds.clear();
        for (const auto& s : expand_list(*v, "sim.graph_seeds"))
            c.graph_seeds.push_back(to_u64(s, "sim.graph_seeds"));
    }
    if (auto v = get("sim.master_seed"))
        c.master_seed = to_u64(*v, "sim.master_seed");
    if (auto v = get("sim.swap_mode")) {
        try {
            c.swap_mode = parse_swap_mode(*v);
        } catch (const InvalidArgument&) {
            throw ConfigError("sim.swap_mode", "expected 'analytic' or 'monte-carlo'");
        }
    }
    if (auto v = get("output.path"))
        c.output_path = *v;
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

PointConfig point_config(const ExperimentConfig& c, std::uint64_t graph_seed, Mode strategy, double gamma,
                         std::size_t n_parties)
{
    PointConfig p;
    p.topology = c.topology;
    p.layout = c.layout;
    p.n_parties = n_parties;
    p.p = c.p;
    p.q = c.q;
    p.gamma = gamma;
    p.strategy = strategy;
    p.rounds = c.rounds;
    p.graph_seeds = {graph_seed};
    p.master_seed = c.master_seed;
    p.swap_mode = c.swap_mode;
    return p;
}

} // namespace mpqkd
