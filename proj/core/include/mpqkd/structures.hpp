#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "mpqkd/graph.hpp"

namespace mpqkd {

struct PathRecord {
    std::vector<NodeId> nodes; // src .. dst; a single node for the empty path
    std::vector<LinkId> links; // links[i] joins nodes[i] and nodes[i + 1]
    double gamma_p = 1.0;      // product of link gammas
    double cost = 0.0;         // sum of link costs

    std::size_t n_links() const noexcept { return links.size(); }
    bool empty() const noexcept { return links.empty(); }

    friend bool operator==(const PathRecord&, const PathRecord&) = default;
};

PathRecord make_path(const Network& network, std::vector<NodeId> nodes);

/// Star for N = 3: arms[i] runs from terminals[i] to the center. A terminal
/// that is the center has the empty arm (gamma_p = 1).
struct Star {
    NodeId center = 0;
    std::vector<NodeId> terminals;
    std::vector<PathRecord> arms;
    EdgeSet used_edges;

    // Measuring nodes: the center plus every interior arm node, counted once
    // per arm it relays for.
    std::size_t swap_count() const;

    friend bool operator==(const Star&, const Star&) = default;
};

struct SteinerTree {
    EdgeSet edges;
    std::vector<NodeId> terminals;
    std::size_t non_leaf_count = 0;

    friend bool operator==(const SteinerTree&, const SteinerTree&) = default;
};

struct ContractedEdge {
    std::size_t a = 0; // vertex indices into ContractedTree::vertices
    std::size_t b = 0;
    PathRecord path;   // vertices[a] .. vertices[b]

    friend bool operator==(const ContractedEdge&, const ContractedEdge&) = default;
};

/// Tree reduced to its terminals and branch repeaters. Vertices
/// [0, terminal_count) are the terminals in terminal order; the rest are
/// repeaters of tree degree >= 3 in ascending node id.
struct ContractedTree {
    std::vector<NodeId> vertices;
    std::size_t terminal_count = 0;
    std::vector<ContractedEdge> edges;
    std::vector<NodeId> fusion_nodes; // interior terminals
    std::size_t non_leaf_count = 0;   // counted on the uncontracted tree

    bool is_terminal_vertex(std::size_t v) const noexcept { return v < terminal_count; }
    std::vector<std::vector<std::size_t>> incident_edges() const;

    friend bool operator==(const ContractedTree&, const ContractedTree&) = default;
};

using Structure = std::variant<Star, SteinerTree>;

EdgeSet used_edges(const Structure& s);

// Golden-test dump: `star center=<id> arms=<path>;<path>;<path>` or
// `tree edges=<u-v,...> fusion=<ids>`.
std::string format_structure(const Network& network, const Structure& s);

} // namespace mpqkd
