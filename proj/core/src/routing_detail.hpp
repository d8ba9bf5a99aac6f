#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <optional>
#include <vector>

#include "mpqkd/routing.hpp"

namespace mpqkd::detail {

// Working graph: the network with a mutable alive mask and cached costs.
struct View {
    const Network* network = nullptr;
    std::vector<std::uint8_t> alive;
    std::vector<double> cost; // per link, +inf if unusable

    explicit View(const Snapshot& snapshot);

    bool usable(LinkId l) const { return alive[l] != 0 && cost[l] != kInf; }
    void remove(const std::vector<LinkId>& links)
    {
        for (auto l : links)
            alive[l] = 0;
    }

    static constexpr double kInf = 1e300;
};

// Single-target distances (cost, hops) to `root`.
struct DistanceTree {
    NodeId root = 0;
    std::vector<double> cost;
    std::vector<std::uint32_t> hops;

    bool reaches(NodeId n) const { return cost[n] < View::kInf; }
};

DistanceTree distance_tree(const View& view, NodeId root);

// Lexicographically smallest shortest path from `from` to tree.root.
std::optional<PathRecord> walk(const View& view, const DistanceTree& tree, NodeId from);

PathRecord reversed(const PathRecord& path);

bool cost_less(double a, double b);
bool cost_equal(double a, double b);

// Star objective; must never exceed the star's r_round (centers are pruned
// against an r_round bound).
using StarScore = std::function<double(const Star&, const KeyRateReport&)>;

std::optional<Star> best_star(const View& base, std::span<const NodeId> terminals, const StarScore& score);
std::vector<Star> pack(const Snapshot& snapshot, std::span<const NodeId> terminals, const StarScore& score);

} // namespace mpqkd::detail
