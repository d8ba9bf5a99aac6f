#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>

#include "mpqkd/errors.hpp"
#include "routing_detail.hpp"

namespace mpqkd {

std::size_t Star::swap_count() const
{
    std::size_t n = 1;
    for (const auto& a : arms)
        if (a.n_links() > 1)
            n += a.n_links() - 1;
    return n;
}

namespace {

double measuring_q(const Network& network, const Star& star)
{
    double f = network.q(star.center);
    for (const auto& a : star.arms)
        for (std::size_t i = 1; i + 1 < a.nodes.size(); ++i)
            f *= network.q(a.nodes[i]);
    return f;
}

} // namespace

KeyRateReport evaluate_star(const Network& network, const Star& star)
{
    if (star.arms.size() != star.terminals.size() || star.arms.size() < 2)
        throw InvalidArgument("star needs one arm per terminal");
    std::vector<double> legs;
    for (const auto& a : star.arms)
        legs.push_back(a.gamma_p);
    auto report = select_star_leader(legs);
    report.swap_count = star.swap_count();
    report.r_round = measuring_q(network, star) * report.r_clamped;
    return report;
}

namespace detail {

namespace {

std::vector<std::vector<NodeId>> arm_nodes(const Star& s)
{
    std::vector<std::vector<NodeId>> out;
    for (const auto& a : s.arms)
        out.push_back(a.nodes);
    return out;
}

bool better(double score_a, const Star& a, double score_b, const Star& b)
{
    if (!cost_equal(score_a, score_b))
        return score_a > score_b;
    if (a.used_edges.size() != b.used_edges.size())
        return a.used_edges.size() < b.used_edges.size();
    if (a.center != b.center)
        return a.center < b.center;
    return arm_nodes(a) < arm_nodes(b);
}

// Minimum over paths from root of the summed weight, where traversing a
// link into node x costs link_weight[l] + node_weight[x].
std::vector<double> min_weights(const View& view, NodeId root, const std::vector<double>& link_weight,
                                const std::vector<double>& node_weight)
{
    const auto n = view.network->node_count();
    std::vector<double> d(n, View::kInf);
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    d[root] = 0.0;
    pq.emplace(0.0, root);
    while (!pq.empty()) {
        auto [c, u] = pq.top();
        pq.pop();
        if (c > d[u])
            continue;
        for (const auto& adj : view.network->neighbors(u)) {
            if (!view.usable(adj.link))
                continue;
            double nc = c + link_weight[adj.link] + node_weight[adj.node];
            if (nc < d[adj.node]) {
                d[adj.node] = nc;
                pq.emplace(nc, adj.node);
            }
        }
    }
    return d;
}

// Upper bound on r_round of any star at each center: every arm gets the
// best path gamma and, separately, the best interior q product reachable
// in `view`, and the key rate is monotone in every leg gamma.
std::vector<double> center_bounds(const View& view, std::span<const NodeId> terminals)
{
    const Network& net = *view.network;
    const auto n = net.node_count();
    std::vector<double> neg_log_gamma(net.link_count()), zero_link(net.link_count(), 0.0);
    std::vector<double> zero_node(n, 0.0), neg_log_q(n);
    for (LinkId l = 0; l < net.link_count(); ++l)
        neg_log_gamma[l] = net.link(l).gamma > 0.0 ? -std::log(net.link(l).gamma) : View::kInf;
    for (NodeId v = 0; v < n; ++v)
        neg_log_q[v] = net.q(v) > 0.0 ? -std::log(net.q(v)) : View::kInf;
    std::vector<std::vector<double>> g, a;
    for (auto t : terminals) {
        g.push_back(min_weights(view, t, neg_log_gamma, zero_node));
        a.push_back(min_weights(view, t, zero_link, neg_log_q));
    }
    std::vector<double> bound(n, 0.0);
    std::vector<double> legs(terminals.size());
    for (NodeId c = 0; c < n; ++c) {
        double f = net.q(c);
        bool ok = true;
        for (std::size_t i = 0; i < terminals.size() && ok; ++i) {
            if (terminals[i] == c) {
                legs[i] = 1.0;
                continue;
            }
            ok = g[i][c] < View::kInf && a[i][c] < View::kInf;
            if (!ok)
                break;
            legs[i] = std::min(1.0, std::exp(-g[i][c]));
            f *= std::min(1.0, std::exp(-(a[i][c] - neg_log_q[c])));
        }
        if (ok)
            bound[c] = f * select_star_leader(legs).r_clamped;
        else
            bound[c] = -1.0;
    }
    return bound;
}

} // namespace

std::optional<Star> best_star(const View& base, std::span<const NodeId> terminals, const StarScore& score)
{
    if (terminals.size() != 3)
        throw InvalidArgument("star search needs exactly three terminals");
    const Network& net = *base.network;
    for (auto t : terminals)
        if (t >= net.node_count())
            throw InvalidArgument("terminal out of range");
    if (terminals[0] == terminals[1] || terminals[0] == terminals[2] || terminals[1] == terminals[2])
        throw InvalidArgument("star terminals must be distinct");
    const std::size_t k = terminals.size();
    std::vector<DistanceTree> trees;
    for (auto t : terminals)
        trees.push_back(distance_tree(base, t));

    auto bound = center_bounds(base, terminals);
    std::vector<NodeId> centers(net.node_count());
    std::iota(centers.begin(), centers.end(), NodeId{0});
    std::stable_sort(centers.begin(), centers.end(), [&](NodeId x, NodeId y) { return bound[x] > bound[y]; });

    std::optional<Star> best;
    double best_score = 0.0;
    std::array<std::size_t, 3> order{0, 1, 2};
    for (NodeId c : centers) {
        if (bound[c] < 0.0)
            continue;
        if (best && cost_less(bound[c], best_score))
            break;
        bool reachable = true;
        for (std::size_t i = 0; i < k; ++i)
            reachable = reachable && trees[i].reaches(c);
        if (!reachable)
            continue;
        // cached center-to-terminal paths on the unmodified residual
        std::vector<std::optional<PathRecord>> cached(k);
        for (std::size_t i = 0; i < k; ++i)
            if (terminals[i] != c)
                cached[i] = walk(base, trees[i], c);
        std::sort(order.begin(), order.end());
        do {
            Star s;
            s.center = c;
            s.terminals.assign(terminals.begin(), terminals.end());
            s.arms.resize(k);
            std::optional<View> work;
            bool ok = true;
            std::vector<LinkId> used;
            for (auto i : order) {
                if (terminals[i] == c) {
                    s.arms[i].nodes = {c};
                    continue;
                }
                std::optional<PathRecord> p = cached[i];
                bool clash = std::any_of(p->links.begin(), p->links.end(), [&](LinkId l) {
                    return std::find(used.begin(), used.end(), l) != used.end();
                });
                if (clash) {
                    if (!work)
                        work.emplace(base);
                    work->alive = base.alive;
                    work->remove(used);
                    p = walk(*work, distance_tree(*work, terminals[i]), c);
                    if (!p) {
                        ok = false;
                        break;
                    }
                }
                used.insert(used.end(), p->links.begin(), p->links.end());
                s.arms[i] = reversed(*p);
            }
            if (!ok)
                continue;
            s.used_edges = make_edge_set(used);
            auto report = evaluate_star(net, s);
            double sc = score(s, report);
            if (!best || better(sc, s, best_score, *best)) {
                best = std::move(s);
                best_score = sc;
            }
        } while (std::next_permutation(order.begin(), order.end()));
    }
    return best;
}

std::vector<Star> pack(const Snapshot& snapshot, std::span<const NodeId> terminals, const StarScore& score)
{
    View view(snapshot);
    std::vector<Star> out;
    while (auto s = best_star(view, terminals, score)) {
        view.remove(s->used_edges);
        out.push_back(std::move(*s));
    }
    return out;
}

} // namespace detail

std::optional<Star> find_best_star(const Snapshot& snapshot, std::span<const NodeId> terminals)
{
    detail::View view(snapshot);
    return detail::best_star(view, terminals, [](const Star&, const KeyRateReport& r) { return r.r_round; });
}

std::vector<Star> pack_stars(const Snapshot& snapshot, std::span<const NodeId> terminals)
{
    return detail::pack(snapshot, terminals, [](const Star&, const KeyRateReport& r) { return r.r_round; });
}

} // namespace mpqkd
