#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "mpqkd/errors.hpp"
#include "routing_detail.hpp"

namespace mpqkd {

double link_cost(double gamma_link, double q)
{
    if (!(gamma_link >= 0.0 && gamma_link <= 1.0) || !(q >= 0.0 && q <= 1.0))
        throw InvalidArgument("link_cost arguments must lie in [0, 1]");
    if (gamma_link == 0.0 || q == 0.0)
        return std::numeric_limits<double>::infinity();
    return -std::log(gamma_link) - std::log(q);
}

double link_cost(const Network& network, LinkId link)
{
    const auto& l = network.link(link);
    double qu = network.q(l.u), qv = network.q(l.v);
    if (l.gamma == 0.0 || qu == 0.0 || qv == 0.0)
        return std::numeric_limits<double>::infinity();
    double node_term = qu == qv ? -std::log(qu) : -0.5 * (std::log(qu) + std::log(qv));
    return -std::log(l.gamma) + node_term;
}

PathRecord make_path(const Network& network, std::vector<NodeId> nodes)
{
    if (nodes.empty())
        throw InvalidArgument("path needs at least one node");
    PathRecord p;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        auto l = network.find_link(nodes[i], nodes[i + 1]);
        if (!l)
            throw InvalidArgument("path nodes " + std::to_string(nodes[i]) + " and " + std::to_string(nodes[i + 1]) +
                                  " are not adjacent");
        p.links.push_back(*l);
        p.gamma_p *= network.link(*l).gamma;
        p.cost += link_cost(network, *l);
    }
    p.nodes = std::move(nodes);
    return p;
}

namespace detail {

View::View(const Snapshot& snapshot) : network(&snapshot.network())
{
    alive.assign(snapshot.alive_mask().begin(), snapshot.alive_mask().end());
    cost.resize(network->link_count());
    for (LinkId l = 0; l < cost.size(); ++l) {
        double c = link_cost(*network, l);
        cost[l] = std::isfinite(c) ? c : kInf;
    }
}

bool cost_equal(double a, double b)
{
    return std::abs(a - b) <= 1e-9 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

bool cost_less(double a, double b) { return a < b && !cost_equal(a, b); }

DistanceTree distance_tree(const View& view, NodeId root)
{
    const auto n = view.network->node_count();
    DistanceTree t;
    t.root = root;
    t.cost.assign(n, View::kInf);
    t.hops.assign(n, 0);
    std::vector<char> done(n, 0);
    using Item = std::tuple<double, std::uint32_t, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    t.cost[root] = 0.0;
    pq.emplace(0.0, 0u, root);
    while (!pq.empty()) {
        auto [c, h, u] = pq.top();
        pq.pop();
        if (done[u])
            continue;
        done[u] = 1;
        for (const auto& adj : view.network->neighbors(u)) {
            if (!view.usable(adj.link) || done[adj.node])
                continue;
            double nc = c + view.cost[adj.link];
            std::uint32_t nh = h + 1;
            double& cur = t.cost[adj.node];
            if (cost_less(nc, cur) || (cost_equal(nc, cur) && nh < t.hops[adj.node])) {
                cur = nc;
                t.hops[adj.node] = nh;
                pq.emplace(nc, nh, adj.node);
            }
        }
    }
    return t;
}

std::optional<PathRecord> walk(const View& view, const DistanceTree& tree, NodeId from)
{
    if (!tree.reaches(from))
        return std::nullopt;
    PathRecord p;
    p.nodes.push_back(from);
    NodeId u = from;
    while (u != tree.root) {
        std::optional<Adjacent> next;
        for (const auto& adj : view.network->neighbors(u)) {
            if (!view.usable(adj.link) || !tree.reaches(adj.node))
                continue;
            if (tree.hops[adj.node] + 1 != tree.hops[u])
                continue;
            if (!cost_equal(tree.cost[adj.node] + view.cost[adj.link], tree.cost[u]))
                continue;
            next = adj; // neighbours are sorted by id: first match is smallest
            break;
        }
        if (!next)
            throw ContractViolation("shortest-path walk lost its way");
        p.links.push_back(next->link);
        p.nodes.push_back(next->node);
        p.gamma_p *= view.network->link(next->link).gamma;
        p.cost += view.cost[next->link];
        u = next->node;
    }
    return p;
}

PathRecord reversed(const PathRecord& path)
{
    PathRecord r = path;
    std::reverse(r.nodes.begin(), r.nodes.end());
    std::reverse(r.links.begin(), r.links.end());
    return r;
}

} // namespace detail

std::optional<PathRecord> shortest_path(const Snapshot& snapshot, NodeId src, NodeId dst)
{
    const auto n = snapshot.network().node_count();
    if (src >= n || dst >= n)
        throw InvalidArgument("shortest_path endpoint out of range");
    detail::View view(snapshot);
    auto tree = detail::distance_tree(view, dst);
    return detail::walk(view, tree, src);
}

} // namespace mpqkd
