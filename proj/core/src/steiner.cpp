#include <algorithm>
#include <numeric>
#include <tuple>

#include "mpqkd/errors.hpp"
#include "routing_detail.hpp"

namespace mpqkd {

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x)
    {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return false;
        parent[std::max(a, b)] = std::min(a, b);
        return true;
    }
};

double path_proxy(const Network& net, const PathRecord& p)
{
    double swaps = 1.0;
    for (std::size_t i = 1; i + 1 < p.nodes.size(); ++i)
        swaps *= net.q(p.nodes[i]);
    return swaps * pairwise_rate_proxy(p.gamma_p, p.n_links(), 1.0);
}

std::optional<SteinerTree> steiner_on(const detail::View& view, std::span<const NodeId> terminals)
{
    const Network& net = *view.network;
    const std::size_t k = terminals.size();
    if (k < 2)
        throw InvalidArgument("Steiner tree needs at least two terminals");
    for (std::size_t i = 0; i < k; ++i) {
        if (terminals[i] >= net.node_count())
            throw InvalidArgument("terminal out of range");
        for (std::size_t j = 0; j < i; ++j)
            if (terminals[i] == terminals[j])
                throw InvalidArgument("terminals must be distinct");
    }

    // step 1: metric closure over the terminals
    struct Pair {
        double weight;
        double cost;
        std::size_t i, j;
        PathRecord path;
    };
    std::vector<Pair> pairs;
    for (std::size_t j = 0; j < k; ++j) {
        auto tree = detail::distance_tree(view, terminals[j]);
        for (std::size_t i = 0; i < j; ++i) {
            auto p = detail::walk(view, tree, terminals[i]);
            if (!p)
                return std::nullopt;
            pairs.push_back({-path_proxy(net, *p), p->cost, i, j, std::move(*p)});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (!detail::cost_equal(a.weight, b.weight))
            return a.weight < b.weight;
        if (!detail::cost_equal(a.cost, b.cost))
            return a.cost < b.cost;
        return std::tie(a.i, a.j) < std::tie(b.i, b.j);
    });

    // steps 2-3: MST of the closure, expanded into network links
    UnionFind closure(k);
    std::vector<LinkId> gs;
    for (const auto& p : pairs)
        if (closure.unite(p.i, p.j))
            gs.insert(gs.end(), p.path.links.begin(), p.path.links.end());
    gs = make_edge_set(std::move(gs));

    // step 4: MST of the expanded subgraph
    std::sort(gs.begin(), gs.end(), [&](LinkId a, LinkId b) {
        if (!detail::cost_equal(view.cost[a], view.cost[b]))
            return view.cost[a] < view.cost[b];
        return a < b;
    });
    UnionFind sub(net.node_count());
    std::vector<LinkId> mst;
    for (auto l : gs) {
        const auto& link = net.link(l);
        if (sub.unite(link.u, link.v))
            mst.push_back(l);
    }

    // step 5: prune non-terminal leaves
    std::vector<std::size_t> deg(net.node_count(), 0);
    for (auto l : mst) {
        ++deg[net.link(l).u];
        ++deg[net.link(l).v];
    }
    std::vector<char> is_term(net.node_count(), 0);
    for (auto t : terminals)
        is_term[t] = 1;
    std::vector<char> keep_link(mst.size(), 1);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t e = 0; e < mst.size(); ++e) {
            if (!keep_link[e])
                continue;
            const auto& link = net.link(mst[e]);
            for (NodeId x : {link.u, link.v}) {
                if (!is_term[x] && deg[x] == 1) {
                    keep_link[e] = 0;
                    --deg[link.u];
                    --deg[link.v];
                    changed = true;
                    break;
                }
            }
        }
    }
    SteinerTree out;
    std::vector<LinkId> kept;
    for (std::size_t e = 0; e < mst.size(); ++e)
        if (keep_link[e])
            kept.push_back(mst[e]);
    out.edges = make_edge_set(std::move(kept));
    out.terminals.assign(terminals.begin(), terminals.end());
    for (std::size_t x = 0; x < deg.size(); ++x)
        if (deg[x] >= 2)
            ++out.non_leaf_count;
    return out;
}

} // namespace

std::optional<SteinerTree> steiner_tree(const Snapshot& snapshot, std::span<const NodeId> terminals)
{
    detail::View view(snapshot);
    return steiner_on(view, terminals);
}

std::vector<SteinerTree> pack_trees(const Snapshot& snapshot, std::span<const NodeId> terminals)
{
    detail::View view(snapshot);
    std::vector<SteinerTree> out;
    while (auto t = steiner_on(view, terminals)) {
        view.remove(t->edges);
        out.push_back(std::move(*t));
    }
    return out;
}

double tree_cost(const Network& network, const EdgeSet& edges)
{
    double c = 0.0;
    for (auto l : edges)
        c += link_cost(network, l);
    return c;
}

} // namespace mpqkd
