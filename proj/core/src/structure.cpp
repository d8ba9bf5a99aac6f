#include <algorithm>
#include <map>
#include <memory>
#include <sstream>

#include "mpqkd/errors.hpp"
#include "routing_detail.hpp"

namespace mpqkd {

std::vector<std::vector<std::size_t>> ContractedTree::incident_edges() const
{
    std::vector<std::vector<std::size_t>> inc(vertices.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        inc.at(edges[e].a).push_back(e);
        inc.at(edges[e].b).push_back(e);
    }
    return inc;
}

EdgeSet used_edges(const Structure& s)
{
    return std::visit([](const auto& x) -> EdgeSet {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Star>)
            return x.used_edges;
        else
            return x.edges;
    }, s);
}

namespace {

std::string join_path(const std::vector<NodeId>& nodes)
{
    std::string s;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i)
            s += '-';
        s += std::to_string(nodes[i]);
    }
    return s;
}

} // namespace

std::string format_structure(const Network& network, const Structure& s)
{
    std::ostringstream out;
    if (const auto* star = std::get_if<Star>(&s)) {
        out << "star center=" << star->center << " arms=";
        for (std::size_t i = 0; i < star->arms.size(); ++i)
            out << (i ? ";" : "") << join_path(star->arms[i].nodes);
        return out.str();
    }
    const auto& tree = std::get<SteinerTree>(s);
    out << "tree edges=";
    for (std::size_t i = 0; i < tree.edges.size(); ++i) {
        const auto& l = network.link(tree.edges[i]);
        out << (i ? "," : "") << l.u << '-' << l.v;
    }
    out << " fusion=";
    auto c = contract_tree(network, tree);
    for (std::size_t i = 0; i < c.fusion_nodes.size(); ++i)
        out << (i ? "," : "") << c.fusion_nodes[i];
    return out.str();
}

ContractedTree contract_tree(const Network& network, const SteinerTree& tree)
{
    const auto n = network.node_count();
    std::vector<std::vector<Adjacent>> adj(n);
    std::vector<NodeId> nodes;
    for (auto l : tree.edges) {
        const auto& link = network.link(l);
        adj[link.u].push_back({link.v, l});
        adj[link.v].push_back({link.u, l});
        nodes.push_back(link.u);
        nodes.push_back(link.v);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    if (tree.terminals.size() < 2)
        throw InvalidArgument("tree needs at least two terminals");
    if (nodes.size() != tree.edges.size() + 1)
        throw InvalidArgument("edge set is not a tree");
    for (auto& a : adj)
        std::sort(a.begin(), a.end(), [](const Adjacent& x, const Adjacent& y) { return x.node < y.node; });

    ContractedTree c;
    std::vector<long> vindex(n, -1);
    for (auto t : tree.terminals) {
        if (t >= n || adj[t].empty())
            throw InvalidArgument("terminal " + std::to_string(t) + " is not on the tree");
        vindex[t] = static_cast<long>(c.vertices.size());
        c.vertices.push_back(t);
    }
    c.terminal_count = c.vertices.size();
    for (auto x : nodes) {
        if (vindex[x] >= 0)
            continue;
        if (adj[x].size() == 1)
            throw InvalidArgument("tree has non-terminal leaf " + std::to_string(x));
        if (adj[x].size() >= 3) {
            vindex[x] = static_cast<long>(c.vertices.size());
            c.vertices.push_back(x);
        }
    }
    for (auto x : nodes)
        if (adj[x].size() >= 2)
            ++c.non_leaf_count;
    for (auto t : tree.terminals)
        if (adj[t].size() >= 2)
            c.fusion_nodes.push_back(t);

    std::size_t visited_links = 0;
    for (std::size_t v = 0; v < c.vertices.size(); ++v) {
        for (const auto& first : adj[c.vertices[v]]) {
            std::vector<NodeId> path{c.vertices[v]};
            NodeId prev = c.vertices[v], cur = first.node;
            path.push_back(cur);
            while (vindex[cur] < 0) {
                const auto& a = adj[cur];
                NodeId next = a[0].node == prev ? a[1].node : a[0].node;
                prev = cur;
                cur = next;
                path.push_back(cur);
                if (path.size() > nodes.size())
                    throw InvalidArgument("edge set contains a cycle");
            }
            auto w = static_cast<std::size_t>(vindex[cur]);
            if (w == v)
                throw InvalidArgument("edge set contains a cycle");
            if (w < v)
                continue;
            ContractedEdge e;
            e.a = v;
            e.b = w;
            e.path = make_path(network, std::move(path));
            visited_links += e.path.n_links();
            c.edges.push_back(std::move(e));
        }
    }
    if (visited_links != tree.edges.size() || c.edges.size() + 1 != c.vertices.size())
        throw InvalidArgument("edge set is not a connected tree");
    return c;
}

EdgeSet expand_tree(const ContractedTree& tree)
{
    std::vector<LinkId> links;
    for (const auto& e : tree.edges)
        links.insert(links.end(), e.path.links.begin(), e.path.links.end());
    return make_edge_set(std::move(links));
}

namespace {

double tree_measuring_q(const Network& network, const ContractedTree& tree)
{
    double f = 1.0;
    auto inc = tree.incident_edges();
    for (std::size_t v = 0; v < tree.vertices.size(); ++v)
        if (inc[v].size() >= 2)
            f *= network.q(tree.vertices[v]);
    for (const auto& e : tree.edges)
        for (std::size_t i = 1; i + 1 < e.path.nodes.size(); ++i)
            f *= network.q(e.path.nodes[i]);
    return f;
}

// Leg gammas when the contracted tree is a star (or one edge), else nothing.
std::optional<std::vector<double>> star_legs(const ContractedTree& tree)
{
    const std::size_t k = tree.terminal_count;
    auto inc = tree.incident_edges();
    for (std::size_t v = 0; v < tree.vertices.size(); ++v) {
        if (inc[v].size() != tree.edges.size())
            continue;
        std::vector<double> legs(k, 1.0);
        for (auto e : inc[v]) {
            const auto& ce = tree.edges[e];
            std::size_t leaf = ce.a == v ? ce.b : ce.a;
            if (leaf >= k)
                return std::nullopt;
            legs[leaf] = ce.path.gamma_p;
        }
        return legs;
    }
    return std::nullopt;
}

} // namespace

KeyRateReport evaluate_tree(const Network& network, const ContractedTree& tree)
{
    if (tree.terminal_count > kMaxTreeTerminals)
        throw CapacityError("tree has " + std::to_string(tree.terminal_count) + " terminals (max " +
                            std::to_string(kMaxTreeTerminals) + ")");
    KeyRateReport report;
    if (auto legs = star_legs(tree)) {
        report = select_star_leader(*legs);
    } else {
        bool noiseless = std::all_of(tree.edges.begin(), tree.edges.end(),
                                     [](const ContractedEdge& e) { return e.path.gamma_p == 1.0; });
        std::map<std::size_t, ErrorRates> per;
        if (noiseless) {
            for (std::size_t a = 0; a < tree.terminal_count; ++a)
                per.emplace(a, ErrorRates{0.0, std::vector<double>(tree.terminal_count - 1, 0.0)});
        } else {
            auto state = tree_state(tree);
            for (std::size_t a = 0; a < tree.terminal_count; ++a)
                per.emplace(a, error_rates_from_state(state, a));
        }
        report = select_leader(per);
    }
    report.swap_count = tree.non_leaf_count;
    report.r_round = tree_measuring_q(network, tree) * report.r_clamped;
    return report;
}

KeyRateReport evaluate_tree(const Network& network, const SteinerTree& tree)
{
    return evaluate_tree(network, contract_tree(network, tree));
}

KeyRateReport evaluate_structure(const Network& network, const Structure& structure)
{
    if (const auto* star = std::get_if<Star>(&structure))
        return evaluate_star(network, *star);
    return evaluate_tree(network, std::get<SteinerTree>(structure));
}

std::vector<NodeId> measuring_nodes(const Network& network, const Structure& structure)
{
    std::vector<NodeId> out;
    if (const auto* star = std::get_if<Star>(&structure)) {
        out.push_back(star->center);
        for (const auto& a : star->arms)
            for (std::size_t i = 1; i + 1 < a.nodes.size(); ++i)
                out.push_back(a.nodes[i]);
        return out;
    }
    const auto& tree = std::get<SteinerTree>(structure);
    std::map<NodeId, std::size_t> deg;
    for (auto l : tree.edges) {
        ++deg[network.link(l).u];
        ++deg[network.link(l).v];
    }
    for (auto [node, d] : deg)
        if (d >= 2)
            out.push_back(node);
    return out;
}

double link_survival(const Network& network, const EdgeSet& edges)
{
    double f = 1.0;
    for (auto l : edges)
        f *= network.link(l).p;
    return f;
}

std::string to_string(Mode mode)
{
    switch (mode) {
    case Mode::FixedSingle: return "fixed-single";
    case Mode::FixedMulti: return "fixed-multi";
    case Mode::DynamicSingle: return "dynamic-single";
    case Mode::DynamicMulti: return "dynamic-multi";
    }
    return "?";
}

Mode parse_mode(const std::string& name)
{
    for (auto m : {Mode::FixedSingle, Mode::FixedMulti, Mode::DynamicSingle, Mode::DynamicMulti})
        if (to_string(m) == name)
            return m;
    throw InvalidArgument("unknown strategy '" + name + "'");
}

bool is_fixed(Mode mode) noexcept { return mode == Mode::FixedSingle || mode == Mode::FixedMulti; }
bool is_multi(Mode mode) noexcept { return mode == Mode::FixedMulti || mode == Mode::DynamicMulti; }

Family resolve_family(Family family, std::size_t n_parties) noexcept
{
    if (family != Family::Auto)
        return family;
    return n_parties == 3 ? Family::Star : Family::Tree;
}

std::vector<Structure> route_snapshot(const Snapshot& snapshot, std::span<const NodeId> terminals, Family family,
                                      bool multi)
{
    family = resolve_family(family, terminals.size());
    std::vector<Structure> out;
    if (family == Family::Star) {
        if (multi) {
            for (auto& s : pack_stars(snapshot, terminals))
                out.emplace_back(std::move(s));
        } else if (auto s = find_best_star(snapshot, terminals)) {
            out.emplace_back(std::move(*s));
        }
    } else {
        if (multi) {
            for (auto& t : pack_trees(snapshot, terminals))
                out.emplace_back(std::move(t));
        } else if (auto t = steiner_tree(snapshot, terminals)) {
            out.emplace_back(std::move(*t));
        }
    }
    return out;
}

Plan plan_fixed(const Network& network, std::span<const NodeId> terminals, Mode mode, Family family)
{
    if (!is_fixed(mode))
        throw InvalidArgument("plan_fixed needs a fixed mode");
    Plan plan;
    plan.mode = mode;
    plan.family = resolve_family(family, terminals.size());
    plan.terminals.assign(terminals.begin(), terminals.end());
    Snapshot full(std::make_shared<const Network>(network));
    if (plan.family == Family::Star) {
        detail::StarScore score = [&](const Star& s, const KeyRateReport& r) {
            return link_survival(network, s.used_edges) * r.r_round;
        };
        if (is_multi(mode)) {
            for (auto& s : detail::pack(full, terminals, score))
                plan.structures.emplace_back(std::move(s));
        } else {
            detail::View view(full);
            if (auto s = detail::best_star(view, terminals, score))
                plan.structures.emplace_back(std::move(*s));
        }
    } else {
        plan.structures = route_snapshot(full, terminals, Family::Tree, is_multi(mode));
    }
    for (const auto& s : plan.structures)
        plan.reports.push_back(evaluate_structure(network, s));
    return plan;
}

Plan make_plan(const Network& network, std::span<const NodeId> terminals, Mode mode, Family family)
{
    if (is_fixed(mode))
        return plan_fixed(network, terminals, mode, family);
    Plan plan;
    plan.mode = mode;
    plan.family = resolve_family(family, terminals.size());
    plan.terminals.assign(terminals.begin(), terminals.end());
    return plan;
}

} // namespace mpqkd
