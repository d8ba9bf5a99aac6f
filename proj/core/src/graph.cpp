#include "mpqkd/graph.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "mpqkd/errors.hpp"

namespace mpqkd {

EdgeSet make_edge_set(std::vector<LinkId> links)
{
    std::sort(links.begin(), links.end());
    links.erase(std::unique(links.begin(), links.end()), links.end());
    return links;
}

namespace {

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

} // namespace

bool operator==(const Link& a, const Link& b)
{
    return a.u == b.u && a.v == b.v && a.p == b.p && a.gamma == b.gamma;
}

bool operator==(const GridShape& a, const GridShape& b)
{
    return a.width == b.width && a.height == b.height;
}

bool is_connected(std::size_t node_count, std::span<const Link> links)
{
    if (node_count == 0)
        return false;
    std::vector<std::size_t> parent(node_count);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    std::size_t components = node_count;
    for (const auto& l : links) {
        auto a = find(l.u), b = find(l.v);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    return components == 1;
}

Network::Network(std::size_t node_count, std::vector<Link> links, std::vector<double> q,
                 std::vector<NodeId> terminals, std::optional<GridShape> grid)
    : links_(std::move(links)), q_(std::move(q)), terminals_(std::move(terminals)), grid_(grid)
{
    if (node_count == 0)
        throw InvalidArgument("network must have at least one node");
    if (q_.size() != node_count)
        throw InvalidArgument("q must have one value per node");
    for (double v : q_)
        if (!in_unit(v))
            throw InvalidArgument("q outside [0, 1]");

    for (auto& l : links_) {
        if (l.u == l.v)
            throw InvalidArgument("self-loop at node " + std::to_string(l.u));
        if (l.u >= node_count || l.v >= node_count)
            throw InvalidArgument("link endpoint out of range");
        if (!in_unit(l.p) || !in_unit(l.gamma))
            throw InvalidArgument("link parameter outside [0, 1]");
        if (l.u > l.v)
            std::swap(l.u, l.v);
    }
    {
        std::vector<std::pair<NodeId, NodeId>> keys;
        keys.reserve(links_.size());
        for (const auto& l : links_)
            keys.emplace_back(l.u, l.v);
        std::sort(keys.begin(), keys.end());
        if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
            throw InvalidArgument("parallel links are not allowed");
    }
    if (!is_connected(node_count, links_))
        throw InvalidArgument("network is not connected");

    for (std::size_t i = 0; i < terminals_.size(); ++i) {
        if (terminals_[i] >= node_count)
            throw InvalidArgument("terminal " + std::to_string(terminals_[i]) + " not in graph");
        for (std::size_t j = 0; j < i; ++j)
            if (terminals_[j] == terminals_[i])
                throw InvalidArgument("duplicate terminal " + std::to_string(terminals_[i]));
    }
    if (grid_ && std::size_t{grid_->width} * grid_->height != node_count)
        throw InvalidArgument("grid shape does not match node count");

    std::vector<std::vector<Adjacent>> adj(node_count);
    for (LinkId id = 0; id < links_.size(); ++id) {
        adj[links_[id].u].push_back({links_[id].v, id});
        adj[links_[id].v].push_back({links_[id].u, id});
    }
    adj_offset_.assign(node_count + 1, 0);
    for (std::size_t n = 0; n < node_count; ++n) {
        std::sort(adj[n].begin(), adj[n].end(),
                  [](const Adjacent& a, const Adjacent& b) { return a.node < b.node; });
        adj_offset_[n + 1] = adj_offset_[n] + adj[n].size();
        adj_.insert(adj_.end(), adj[n].begin(), adj[n].end());
    }
}

std::span<const Adjacent> Network::neighbors(NodeId node) const
{
    if (node >= node_count())
        throw InvalidArgument("node " + std::to_string(node) + " out of range");
    return std::span<const Adjacent>(adj_.data() + adj_offset_[node], adj_offset_[node + 1] - adj_offset_[node]);
}

std::optional<LinkId> Network::find_link(NodeId a, NodeId b) const
{
    if (a >= node_count() || b >= node_count())
        return std::nullopt;
    for (const auto& n : neighbors(a))
        if (n.node == b)
            return n.link;
    return std::nullopt;
}

bool Network::is_terminal(NodeId node) const
{
    return std::find(terminals_.begin(), terminals_.end(), node) != terminals_.end();
}

Network Network::with_terminals(std::vector<NodeId> terminals) const
{
    return Network(node_count(), links_, q_, std::move(terminals), grid_);
}

bool operator==(const Network& a, const Network& b)
{
    return a.links_ == b.links_ && a.q_ == b.q_ && a.terminals_ == b.terminals_ && a.grid_ == b.grid_;
}

Network build_grid(std::uint32_t width, std::uint32_t height, double p, double gamma, double q)
{
    if (width < 2 || height < 2)
        throw InvalidArgument("grid dimensions must be at least 2");
    if (!in_unit(p) || !in_unit(gamma) || !in_unit(q))
        throw InvalidArgument("grid parameters must lie in [0, 1]");
    GridShape shape{width, height};
    std::vector<Link> links;
    links.reserve(2 * std::size_t{width} * height);
    for (std::uint32_t r = 0; r < height; ++r) {
        for (std::uint32_t c = 0; c < width; ++c) {
            if (c + 1 < width)
                links.push_back({shape.node(r, c), shape.node(r, c + 1), p, gamma});
            if (r + 1 < height)
                links.push_back({shape.node(r, c), shape.node(r + 1, c), p, gamma});
        }
    }
    std::size_t n = std::size_t{width} * height;
    return Network(n, std::move(links), std::vector<double>(n, q), {}, shape);
}

Network build_random_geometric(std::size_t n_nodes, double radius, double p, double gamma, double q,
                               std::uint64_t seed, RandomGeometricOptions options)
{
    if (n_nodes < 2)
        throw InvalidArgument("random geometric graph needs at least 2 nodes");
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw InvalidArgument("radius must be positive");
    if (!in_unit(p) || !in_unit(gamma) || !in_unit(q))
        throw InvalidArgument("link/node parameters must lie in [0, 1]");

    Rng rng(seed);
    std::vector<std::array<double, 2>> pos(n_nodes);
    const double r2 = radius * radius;
    for (std::size_t attempt = 0; attempt < options.max_attempts; ++attempt) {
        for (auto& xy : pos) {
            xy[0] = uniform01(rng);
            xy[1] = uniform01(rng);
        }
        std::vector<Link> links;
        for (NodeId i = 0; i < n_nodes; ++i) {
            for (NodeId j = i + 1; j < n_nodes; ++j) {
                double dx = pos[i][0] - pos[j][0], dy = pos[i][1] - pos[j][1];
                if (dx * dx + dy * dy < r2)
                    links.push_back({i, j, p, gamma});
            }
        }
        if (is_connected(n_nodes, links))
            return Network(n_nodes, std::move(links), std::vector<double>(n_nodes, q));
    }
    throw GenerationFailure("no connected placement within " + std::to_string(options.max_attempts) +
                            " attempts");
}

double mean_degree(const Network& network)
{
    return 2.0 * static_cast<double>(network.link_count()) / static_cast<double>(network.node_count());
}

// ---------------------------------------------------------------------------

std::string to_string(LayoutKind kind)
{
    switch (kind) {
    case LayoutKind::Bet: return "bet";
    case LayoutKind::Dalet: return "dalet";
    case LayoutKind::Giml: return "giml";
    case LayoutKind::GimlIncremental: return "giml-incremental";
    case LayoutKind::Explicit: return "explicit";
    case LayoutKind::Random: return "random";
    }
    return "unknown";
}

LayoutKind parse_layout_kind(const std::string& name)
{
    for (auto k : {LayoutKind::Bet, LayoutKind::Dalet, LayoutKind::Giml, LayoutKind::GimlIncremental,
                   LayoutKind::Explicit, LayoutKind::Random})
        if (to_string(k) == name)
            return k;
    throw InvalidArgument("unknown layout '" + name + "'");
}

namespace {

// Reference cells, (row, col), on the 7x7 grid and on the 11x11 grid.
// Terminals sit on interior cells so each has four incident links.
constexpr std::array<GridCoord, 3> kBet{{{2, 2}, {2, 4}, {4, 3}}};
constexpr std::array<GridCoord, 3> kDalet{{{1, 3}, {3, 1}, {5, 4}}};
constexpr std::array<GridCoord, 6> kGimlIncremental{{{1, 1}, {1, 5}, {5, 5}, {3, 3}, {5, 1}, {3, 5}}};

constexpr std::array<GridCoord, 3> kBetLarge{{{2, 2}, {2, 8}, {8, 5}}};
constexpr std::array<GridCoord, 3> kDaletLarge{{{1, 5}, {5, 1}, {9, 7}}};
constexpr std::array<GridCoord, 6> kGimlIncrementalLarge{{{1, 1}, {1, 9}, {9, 9}, {5, 5}, {9, 1}, {5, 9}}};

std::uint32_t scale_coord(std::uint32_t c, std::uint32_t dim, std::uint32_t ref_dim)
{
    return static_cast<std::uint32_t>(std::lround(static_cast<double>(c) * (dim - 1) / (ref_dim - 1.0)));
}

} // namespace

LayoutSpec grid_layout(LayoutKind kind, GridShape grid, std::size_t n_parties)
{
    const bool large = grid.width >= 11 && grid.height >= 11;
    const std::uint32_t ref_dim = large ? 11 : 7;
    std::span<const GridCoord> ref;
    std::size_t max_parties = 3;
    switch (kind) {
    case LayoutKind::Bet: ref = large ? std::span<const GridCoord>(kBetLarge) : kBet; break;
    case LayoutKind::Dalet: ref = large ? std::span<const GridCoord>(kDaletLarge) : kDalet; break;
    case LayoutKind::Giml:
        ref = std::span<const GridCoord>(large ? kGimlIncrementalLarge : kGimlIncremental).first(3);
        break;
    case LayoutKind::GimlIncremental:
        ref = large ? std::span<const GridCoord>(kGimlIncrementalLarge) : kGimlIncremental;
        max_parties = ref.size();
        break;
    default: throw InvalidArgument("not a grid preset: " + to_string(kind));
    }
    if (n_parties < 3 || n_parties > max_parties)
        throw InvalidArgument(to_string(kind) + " supports 3.." + std::to_string(max_parties) + " parties");
    if (grid.width < 7 || grid.height < 7)
        throw InvalidArgument("grid presets need at least a 7x7 grid");
    LayoutSpec spec;
    spec.kind = kind;
    spec.n_parties = n_parties;
    for (std::size_t i = 0; i < n_parties; ++i)
        spec.coordinates.push_back({scale_coord(ref[i].row, grid.height, ref_dim), scale_coord(ref[i].col, grid.width, ref_dim)});
    return spec;
}

LayoutSpec random_layout(std::size_t n_parties, std::uint64_t seed)
{
    LayoutSpec spec;
    spec.kind = LayoutKind::Random;
    spec.n_parties = n_parties;
    spec.seed = seed;
    return spec;
}

Network apply_layout(const Network& network, const LayoutSpec& layout)
{
    if (layout.n_parties < 2 || layout.n_parties > 8)
        throw InvalidArgument("n_parties must lie in 2..8");
    if (layout.n_parties > network.node_count())
        throw InvalidArgument("more parties than nodes");

    std::vector<NodeId> terminals;
    switch (layout.kind) {
    case LayoutKind::Explicit:
        if (layout.nodes.size() != layout.n_parties)
            throw InvalidArgument("explicit layout must list exactly n_parties nodes");
        for (auto n : layout.nodes) {
            if (n >= network.node_count())
                throw InvalidArgument("explicit terminal " + std::to_string(n) + " out of range");
            terminals.push_back(n);
        }
        break;
    case LayoutKind::Random: {
        // Seeded Fisher-Yates over all nodes; the first N form the layout, so
        // smaller N are prefixes of larger N.
        std::vector<NodeId> order(network.node_count());
        std::iota(order.begin(), order.end(), NodeId{0});
        Rng rng(layout.seed);
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            auto span = order.size() - i;
            auto j = i + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(span));
            std::swap(order[i], order[std::min(j, order.size() - 1)]);
        }
        terminals.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(layout.n_parties));
        break;
    }
    default: {
        if (!network.grid())
            throw InvalidArgument("grid layout applied to a non-grid network");
        const auto& g = *network.grid();
        if (layout.coordinates.size() != layout.n_parties)
            throw InvalidArgument("layout coordinate count must equal n_parties");
        for (const auto& c : layout.coordinates) {
            if (c.row >= g.height || c.col >= g.width)
                throw InvalidArgument("layout coordinate (" + std::to_string(c.row) + ", " +
                                      std::to_string(c.col) + ") out of bounds");
            terminals.push_back(g.node(c.row, c.col));
        }
        break;
    }
    }
    return network.with_terminals(std::move(terminals)); // rejects duplicates
}

// ---------------------------------------------------------------------------

Snapshot::Snapshot(std::shared_ptr<const Network> network)
    : network_(std::move(network))
{
    if (!network_)
        throw InvalidArgument("snapshot needs a network");
    alive_.assign(network_->link_count(), 1);
    alive_count_ = alive_.size();
}

Snapshot::Snapshot(std::shared_ptr<const Network> network, std::vector<std::uint8_t> alive)
    : network_(std::move(network)), alive_(std::move(alive))
{
    if (!network_)
        throw InvalidArgument("snapshot needs a network");
    if (alive_.size() != network_->link_count())
        throw InvalidArgument("alive mask size mismatch");
    for (auto& a : alive_)
        a = a ? 1 : 0;
    alive_count_ = static_cast<std::size_t>(std::count(alive_.begin(), alive_.end(), std::uint8_t{1}));
}

EdgeSet Snapshot::alive_links() const
{
    EdgeSet out;
    for (LinkId id = 0; id < alive_.size(); ++id)
        if (alive_[id])
            out.push_back(id);
    return out;
}

Snapshot sample_snapshot(const std::shared_ptr<const Network>& network, Rng& rng)
{
    std::vector<std::uint8_t> alive(network->link_count());
    for (LinkId id = 0; id < alive.size(); ++id)
        alive[id] = bernoulli(rng, network->link(id).p) ? 1 : 0;
    return Snapshot(network, std::move(alive));
}

Snapshot residual(const Snapshot& snapshot, std::span<const LinkId> used)
{
    std::vector<std::uint8_t> alive(snapshot.alive_mask().begin(), snapshot.alive_mask().end());
    for (auto id : used) {
        if (id >= alive.size() || !alive[id])
            throw ContractViolation("residual: link " + std::to_string(id) + " is not alive");
        alive[id] = 0;
    }
    return Snapshot(snapshot.network_ptr(), std::move(alive));
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
T parse_number(const std::string& tok, std::size_t line)
{
    T value{};
    if constexpr (std::is_floating_point_v<T>) {
        std::size_t pos = 0;
        try {
            value = std::stod(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != tok.size() || tok.empty())
            throw InvalidArgument("line " + std::to_string(line) + ": bad number '" + tok + "'");
    } else {
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc{} || ptr != tok.data() + tok.size())
            throw InvalidArgument("line " + std::to_string(line) + ": bad integer '" + tok + "'");
    }
    return value;
}

} // namespace

void write_network(std::ostream& out, const Network& network)
{
    out << "nodes " << network.node_count() << '\n';
    for (const auto& l : network.links())
        out << "link " << l.u << ' ' << l.v << ' ' << fmt_real(l.p) << ' ' << fmt_real(l.gamma) << '\n';
    for (NodeId n = 0; n < network.node_count(); ++n)
        out << "q " << n << ' ' << fmt_real(network.q(n)) << '\n';
    for (auto t : network.terminals())
        out << "terminal " << t << '\n';
}

Network read_network(std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::size_t> nodes;
    std::vector<Link> links;
    std::vector<double> q;
    std::vector<std::uint8_t> q_seen;
    std::vector<NodeId> terminals;

    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;)
            tok.push_back(t);
        if (tok.empty())
            continue;
        auto need = [&](std::size_t n) {
            if (tok.size() != n)
                throw InvalidArgument("line " + std::to_string(lineno) + ": expected " + std::to_string(n - 1) +
                                      " fields after '" + tok[0] + "'");
        };
        if (tok[0] == "nodes") {
            need(2);
            if (nodes)
                throw InvalidArgument("line " + std::to_string(lineno) + ": duplicate header");
            nodes = parse_number<std::size_t>(tok[1], lineno);
            q.assign(*nodes, 1.0);
            q_seen.assign(*nodes, 0);
            continue;
        }
        if (!nodes)
            throw InvalidArgument("line " + std::to_string(lineno) + ": missing 'nodes' header");
        if (tok[0] == "link") {
            need(5);
            links.push_back({parse_number<NodeId>(tok[1], lineno), parse_number<NodeId>(tok[2], lineno),
                             parse_number<double>(tok[3], lineno), parse_number<double>(tok[4], lineno)});
        } else if (tok[0] == "q") {
            need(3);
            auto n = parse_number<NodeId>(tok[1], lineno);
            if (n >= *nodes)
                throw InvalidArgument("line " + std::to_string(lineno) + ": node out of range");
            q[n] = parse_number<double>(tok[2], lineno);
            q_seen[n] = 1;
        } else if (tok[0] == "terminal") {
            need(2);
            terminals.push_back(parse_number<NodeId>(tok[1], lineno));
        } else {
            throw InvalidArgument("line " + std::to_string(lineno) + ": unknown record '" + tok[0] + "'");
        }
    }
    if (!nodes)
        throw InvalidArgument("missing 'nodes' header");
    for (std::size_t n = 0; n < *nodes; ++n)
        if (!q_seen[n])
            throw InvalidArgument("no q value for node " + std::to_string(n));
    return Network(*nodes, std::move(links), std::move(q), std::move(terminals));
}

std::string to_text(const Network& network)
{
    std::ostringstream os;
    write_network(os, network);
    return os.str();
}

Network network_from_text(const std::string& text)
{
    std::istringstream is(text);
    return read_network(is);
}

} // namespace mpqkd
