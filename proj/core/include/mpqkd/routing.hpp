#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mpqkd/graph.hpp"
#include "mpqkd/keyrate.hpp"
#include "mpqkd/structures.hpp"

namespace mpqkd {

// -ln(gamma) - ln(q); +infinity when the link is unusable (gamma = 0 or q = 0).
double link_cost(double gamma_link, double q);

// Cost of a network link. The node term is the mean of -ln q over both
// endpoints, which equals -ln q for uniform q.
double link_cost(const Network& network, LinkId link);

/// Minimum-cost path over alive links. Ties: equal cost (to 1e-9 relative)
/// is broken by fewer hops, then by the lexicographically smallest node
/// sequence from src.
std::optional<PathRecord> shortest_path(const Snapshot& snapshot, NodeId src, NodeId dst);

enum class Mode { FixedSingle, FixedMulti, DynamicSingle, DynamicMulti };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& name); // throws InvalidArgument
bool is_fixed(Mode mode) noexcept;
bool is_multi(Mode mode) noexcept;

// Auto: stars for three parties, trees otherwise.
enum class Family { Auto, Star, Tree };

Family resolve_family(Family family, std::size_t n_parties) noexcept;

KeyRateReport evaluate_star(const Network& network, const Star& star);

/// Star search over every center and every terminal ordering, arms routed
/// greedily in the residual graph. Best expected round rate wins; ties go
/// to fewer links, lower center id, then lexicographic arms.
std::optional<Star> find_best_star(const Snapshot& snapshot, std::span<const NodeId> terminals);

// Stars found one after another, each on the residual of the previous ones.
std::vector<Star> pack_stars(const Snapshot& snapshot, std::span<const NodeId> terminals);

/// Rate-weighted MST approximation of the Steiner tree: terminal metric
/// closure weighted by the pairwise rate proxy, its MST expanded to paths,
/// the MST of that subgraph, then non-terminal leaves pruned.
std::optional<SteinerTree> steiner_tree(const Snapshot& snapshot, std::span<const NodeId> terminals);

std::vector<SteinerTree> pack_trees(const Snapshot& snapshot, std::span<const NodeId> terminals);

ContractedTree contract_tree(const Network& network, const SteinerTree& tree);

// Links of every contracted edge; inverse of contract_tree.
EdgeSet expand_tree(const ContractedTree& tree);

// Sum of link costs.
double tree_cost(const Network& network, const EdgeSet& edges);

/// Closed form when the contracted tree is a star (or a single edge),
/// density-operator evaluation otherwise. Throws CapacityError above
/// kMaxTreeTerminals terminals.
KeyRateReport evaluate_tree(const Network& network, const ContractedTree& tree);
KeyRateReport evaluate_tree(const Network& network, const SteinerTree& tree);

KeyRateReport evaluate_structure(const Network& network, const Structure& structure);

// Nodes that must succeed for the structure to deliver its state: star
// center plus every relay (once per arm), or every non-leaf tree node.
std::vector<NodeId> measuring_nodes(const Network& network, const Structure& structure);

double link_survival(const Network& network, const EdgeSet& edges); // prod p_e

struct Plan {
    Mode mode = Mode::DynamicMulti;
    Family family = Family::Star; // resolved
    std::vector<NodeId> terminals;
    std::vector<Structure> structures;    // fixed modes only
    std::vector<KeyRateReport> reports;   // one per structure, on the full network
};

// Fixed modes: structures chosen once on the full network, stars ranked by
// prod p_e * r_round. Dynamic modes: empty structure list.
Plan make_plan(const Network& network, std::span<const NodeId> terminals, Mode mode, Family family = Family::Auto);
Plan plan_fixed(const Network& network, std::span<const NodeId> terminals, Mode mode, Family family = Family::Auto);

// Structures for one snapshot under a dynamic mode.
std::vector<Structure> route_snapshot(const Snapshot& snapshot, std::span<const NodeId> terminals, Family family,
                                      bool multi);

} // namespace mpqkd
