#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mpqkd/rng.hpp"

namespace mpqkd {

using NodeId = std::uint32_t;
using LinkId = std::uint32_t;

// Sorted, duplicate-free list of link ids.
using EdgeSet = std::vector<LinkId>;

EdgeSet make_edge_set(std::vector<LinkId> links);

struct Link {
    NodeId u = 0; // u < v after construction
    NodeId v = 0;
    double p = 1.0;     // Phase-1 generation success probability
    double gamma = 1.0; // depolarizing parameter of the generated pair

    NodeId other(NodeId x) const noexcept { return x == u ? v : u; }
};

struct Adjacent {
    NodeId node;
    LinkId link;
};

struct GridShape {
    std::uint32_t width = 0;
    std::uint32_t height = 0;

    NodeId node(std::uint32_t row, std::uint32_t col) const noexcept { return row * width + col; }
};

/// Immutable repeater network: a simple connected undirected graph with
/// per-link (p, gamma), per-node swap/fusion success q, and an ordered
/// terminal list.
///
/// Construction validates every invariant and throws InvalidArgument on
/// violation. Adjacency lists are sorted by neighbour id so every
/// traversal is deterministic.
class Network {
public:
    Network(std::size_t node_count, std::vector<Link> links, std::vector<double> q,
            std::vector<NodeId> terminals = {}, std::optional<GridShape> grid = std::nullopt);

    std::size_t node_count() const noexcept { return q_.size(); }
    std::size_t link_count() const noexcept { return links_.size(); }

    const std::vector<Link>& links() const noexcept { return links_; }
    const Link& link(LinkId id) const { return links_.at(id); }
    std::span<const Adjacent> neighbors(NodeId node) const;
    std::size_t degree(NodeId node) const { return neighbors(node).size(); }
    std::optional<LinkId> find_link(NodeId a, NodeId b) const;

    double q(NodeId node) const { return q_.at(node); }
    const std::vector<double>& q_values() const noexcept { return q_; }

    const std::vector<NodeId>& terminals() const noexcept { return terminals_; }
    bool is_terminal(NodeId node) const;

    const std::optional<GridShape>& grid() const noexcept { return grid_; }

    Network with_terminals(std::vector<NodeId> terminals) const;

    friend bool operator==(const Network& a, const Network& b);

private:
    std::vector<Link> links_;
    std::vector<double> q_;
    std::vector<NodeId> terminals_;
    std::optional<GridShape> grid_;
    std::vector<std::size_t> adj_offset_;
    std::vector<Adjacent> adj_;
};

bool operator==(const Link& a, const Link& b);
bool operator==(const GridShape& a, const GridShape& b);

bool is_connected(std::size_t node_count, std::span<const Link> links);

Network build_grid(std::uint32_t width, std::uint32_t height, double p, double gamma, double q);

struct RandomGeometricOptions {
    std::size_t max_attempts = 1000;
};

// Uniform placement in the unit square, link iff distance < radius,
// whole placement redrawn from the same stream until connected.
Network build_random_geometric(std::size_t n_nodes, double radius, double p, double gamma, double q,
                               std::uint64_t seed, RandomGeometricOptions options = {});

double mean_degree(const Network& network);

// ---------------------------------------------------------------------------
// Terminal layouts

enum class LayoutKind { Bet, Dalet, Giml, GimlIncremental, Explicit, Random };

std::string to_string(LayoutKind kind);
LayoutKind parse_layout_kind(const std::string& name);

struct GridCoord {
    std::uint32_t row = 0;
    std::uint32_t col = 0;

    friend bool operator==(const GridCoord&, const GridCoord&) = default;
};

struct LayoutSpec {
    LayoutKind kind = LayoutKind::Explicit;
    std::vector<GridCoord> coordinates; // grid layouts
    std::vector<NodeId> nodes;          // explicit layouts
    std::size_t n_parties = 3;
    std::uint64_t seed = 0; // random layouts only
};

// Preset grid layouts. Grids of at least 11x11 use the 11x11 reference
// cells, smaller ones the 7x7 cells; either is scaled to the target by
// round(c * (dim - 1) / (ref - 1)). Bet, Dalet and Giml are 3-party;
// GimlIncremental extends Giml with three more parties (N = 4..6).
LayoutSpec grid_layout(LayoutKind kind, GridShape grid, std::size_t n_parties);

// N terminals drawn uniformly without replacement; the list for N is a
// prefix of the list for any larger N under the same seed.
LayoutSpec random_layout(std::size_t n_parties, std::uint64_t seed);

Network apply_layout(const Network& network, const LayoutSpec& layout);

// ---------------------------------------------------------------------------
// Snapshots

/// Surviving-link subgraph of one round. Immutable; packing works on
/// residual copies.
class Snapshot {
public:
    explicit Snapshot(std::shared_ptr<const Network> network); // all links alive
    Snapshot(std::shared_ptr<const Network> network, std::vector<std::uint8_t> alive);

    const Network& network() const noexcept { return *network_; }
    const std::shared_ptr<const Network>& network_ptr() const noexcept { return network_; }

    bool alive(LinkId id) const { return alive_.at(id) != 0; }
    std::span<const std::uint8_t> alive_mask() const noexcept { return alive_; }
    std::size_t alive_count() const noexcept { return alive_count_; }
    EdgeSet alive_links() const;

    friend bool operator==(const Snapshot& a, const Snapshot& b)
    {
        return a.network_ == b.network_ && a.alive_ == b.alive_;
    }

private:
    std::shared_ptr<const Network> network_;
    std::vector<std::uint8_t> alive_;
    std::size_t alive_count_ = 0;
};

// Keeps each link independently with its own p.
Snapshot sample_snapshot(const std::shared_ptr<const Network>& network, Rng& rng);

// alive \ used. Throws ContractViolation if a used link is not alive.
Snapshot residual(const Snapshot& snapshot, std::span<const LinkId> used);

// ---------------------------------------------------------------------------
// Text serialization
//
//   nodes <n>
//   link <u> <v> <p> <gamma>
//   q <node> <value>
//   terminal <node>

void write_network(std::ostream& out, const Network& network);
Network read_network(std::istream& in);
std::string to_text(const Network& network);
Network network_from_text(const std::string& text);

} // namespace mpqkd
