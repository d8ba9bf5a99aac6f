#include "mpqkd/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "mpqkd/errors.hpp"
#include "mpqkd/quantum.hpp"
#include "mpqkd/rng.hpp"

namespace mpqkd {

namespace {

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

std::size_t below(Rng& rng, std::size_t n) { return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * n)); }

double max_rate_deviation(const ErrorRates& a, const ErrorRates& b)
{
    double d = std::abs(a.q_x - b.q_x);
    if (a.q_ab.size() != b.q_ab.size())
        return INFINITY;
    for (std::size_t i = 0; i < a.q_ab.size(); ++i)
        d = std::max(d, std::abs(a.q_ab[i] - b.q_ab[i]));
    return d;
}

double max_entry_deviation(const DensityOperator& a, const DensityOperator& b)
{
    if (a.labels() != b.labels())
        return INFINITY;
    return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

// Arm of Werner pairs from the terminal to the center qubit, reduced by
// explicit Bell-measurement swaps at every relay.
DensityOperator swapped_arm(std::span<const double> link_gammas, NodeId arm, QubitLabel terminal, QubitLabel center)
{
    const std::size_t len = link_gammas.size();
    auto pos = [&](std::size_t k, std::uint32_t port) {
        if (k == 0)
            return terminal;
        if (k == len)
            return center;
        return QubitLabel{arm * 100 + static_cast<NodeId>(k), port};
    };
    DensityOperator state = werner_pair({link_gammas[0]}, pos(0, 0), pos(1, 0));
    for (std::size_t k = 1; k < len; ++k) {
        state = tensor(state, werner_pair({link_gammas[k]}, pos(k, 1), pos(k + 1, 0)));
        const QubitLabel measured[2] = {pos(k, 0), pos(k, 1)};
        const std::vector<QubitLabel> groups[2] = {{terminal}, {pos(k + 1, 0)}};
        state = ghz_projective_merge(state, measured, groups);
    }
    return state;
}

ValidationCheck star_equivalence(const ValidationHooks& hooks, Rng& rng)
{
    ValidationCheck c{"star closed form vs density operator", true, 0.0, ""};
    auto gamma_of = hooks.path_gamma ? hooks.path_gamma
                                     : std::function<double(std::span<const double>)>(
                                           [](std::span<const double> g) { return path_gamma(g); });
    for (int draw = 0; draw < 100; ++draw) {
        DensityOperator state;
        std::vector<QubitLabel> measured, terminals;
        std::vector<std::vector<QubitLabel>> groups;
        std::vector<double> legs;
        for (NodeId arm = 0; arm < 3; ++arm) {
            std::vector<double> links(1 + below(rng, 3));
            for (auto& g : links)
                g = uniform(rng, 0.5, 1.0);
            QubitLabel t{arm, 0}, m{999, arm + 1};
            state = tensor(state, swapped_arm(links, arm + 1, t, m));
            measured.push_back(m);
            terminals.push_back(t);
            groups.push_back({t});
            legs.push_back(gamma_of(links));
        }
        state = ghz_projective_merge(state, measured, groups).permuted(terminals);
        const double bobs[2] = {legs[1], legs[2]};
        auto closed = star_error_rates(legs[0], bobs);
        auto dm = error_rates_from_state(state, 0);
        c.max_deviation = std::max(c.max_deviation, max_rate_deviation(closed, dm));
    }
    c.passed = c.max_deviation <= 1e-10;
    return c;
}

ValidationCheck incremental_vs_direct(Rng& rng)
{
    ValidationCheck c{"incremental merge vs direct GHZ measurement", true, 0.0, ""};
    for (int draw = 0; draw < 20; ++draw) {
        const std::size_t k = 3 + below(rng, 3);
        ContractedTree tree;
        tree.terminal_count = k;
        std::vector<double> g;
        for (std::size_t i = 0; i < k; ++i) {
            tree.vertices.push_back(static_cast<NodeId>(i));
            tree.edges.push_back({i, k, {}});
            g.push_back(uniform(rng, 0.5, 1.0));
        }
        tree.vertices.push_back(static_cast<NodeId>(k));
        tree.non_leaf_count = 1;
        auto incremental = tree_state(tree, g);

        DensityOperator direct;
        std::vector<QubitLabel> measured, terminals;
        std::vector<std::vector<QubitLabel>> groups;
        for (std::size_t i = 0; i < k; ++i) {
            QubitLabel t{static_cast<NodeId>(i), 0}, m{static_cast<NodeId>(k), static_cast<std::uint32_t>(i + 1)};
            direct = tensor(direct, werner_pair({g[i]}, t, m));
            measured.push_back(m);
            terminals.push_back(t);
            groups.push_back({t});
        }
        direct = ghz_projective_merge(direct, measured, groups).permuted(terminals);
        c.max_deviation = std::max(c.max_deviation, max_entry_deviation(incremental, direct));
    }
    c.passed = c.max_deviation <= 1e-10;
    return c;
}

// Random tree on up to 6 vertices; leaves and degree-2 vertices are terminals.
std::pair<ContractedTree, std::vector<double>> random_tree(Rng& rng)
{
    const std::size_t m = 3 + below(rng, 4);
    std::vector<std::pair<std::size_t, std::size_t>> raw;
    std::vector<std::size_t> deg(m, 0);
    for (std::size_t i = 1; i < m; ++i) {
        auto j = below(rng, i);
        raw.emplace_back(j, i);
        ++deg[i];
        ++deg[j];
    }
    std::vector<char> term(m);
    for (std::size_t v = 0; v < m; ++v)
        term[v] = deg[v] <= 2 || uniform01(rng) < 0.5;
    std::vector<std::size_t> index(m);
    ContractedTree tree;
    for (int pass = 0; pass < 2; ++pass)
        for (std::size_t v = 0; v < m; ++v)
            if ((pass == 0) == static_cast<bool>(term[v])) {
                index[v] = tree.vertices.size();
                tree.vertices.push_back(static_cast<NodeId>(10 + v));
            }
    tree.terminal_count = static_cast<std::size_t>(std::count(term.begin(), term.end(), 1));
    std::vector<double> g;
    for (auto [a, b] : raw) {
        tree.edges.push_back({index[a], index[b], {}});
        g.push_back(uniform(rng, 0.6, 1.0));
    }
    return {tree, g};
}

ValidationCheck merge_order(Rng& rng)
{
    ValidationCheck c{"merge-order independence", true, 0.0, ""};
    for (int draw = 0; draw < 20; ++draw) {
        auto [tree, g] = random_tree(rng);
        auto reference = tree_state(tree, g);
        for (std::size_t root = 0; root < tree.vertices.size(); ++root)
            for (std::uint64_t shuffle : {0, 1, 2}) {
                TreeMergeOptions opt;
                opt.root = root;
                opt.shuffle_seed = shuffle;
                c.max_deviation = std::max(c.max_deviation, max_entry_deviation(reference, tree_state(tree, g, opt)));
            }
    }
    c.passed = c.max_deviation <= 1e-10;
    return c;
}

ValidationCheck swap_identity(Rng& rng)
{
    ValidationCheck c{"swap-count identity", true, 0.0, ""};
    for (int draw = 0; draw < 50; ++draw) {
        const double q = uniform(rng, 0.5, 1.0);
        Star s;
        double product = q;
        for (int arm = 0; arm < 3; ++arm) {
            PathRecord p;
            p.links.resize(1 + below(rng, 6));
            p.nodes.resize(p.links.size() + 1);
            product *= std::pow(q, static_cast<double>(p.n_links() - 1));
            s.arms.push_back(p);
        }
        const double direct = std::pow(q, static_cast<double>(s.swap_count()));
        c.max_deviation = std::max(c.max_deviation, std::abs(product - direct) / direct);
    }
    c.passed = c.max_deviation <= 1e-13;
    return c;
}

ValidationCheck entropy_endpoints()
{
    ValidationCheck c{"entropy endpoints", true, 0.0, ""};
    c.max_deviation = std::max({std::abs(binary_entropy(0.0)), std::abs(binary_entropy(1.0)),
                                std::abs(binary_entropy(0.5) - 1.0)});
    c.passed = c.max_deviation == 0.0;
    return c;
}

} // namespace

std::vector<ValidationCheck> run_validation(const ValidationHooks& hooks, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<ValidationCheck> out;
    out.push_back(star_equivalence(hooks, rng));
    out.push_back(incremental_vs_direct(rng));
    out.push_back(merge_order(rng));
    out.push_back(swap_identity(rng));
    out.push_back(entropy_endpoints());
    return out;
}

void print_validation(std::ostream& out, const std::vector<ValidationCheck>& checks)
{
    char buf[64];
    for (const auto& c : checks) {
        std::snprintf(buf, sizeof buf, "%.3e", c.max_deviation);
        out << (c.passed ? "PASS " : "FAIL ") << c.name << " (max deviation " << buf << ")";
        if (!c.detail.empty())
            out << ": " << c.detail;
        out << '\n';
    }
}

StarAnalysis analyze_star(double gamma_leader, std::span<const double> gamma_bobs, double q,
                          std::span<const std::size_t> lengths)
{
    if (lengths.size() != gamma_bobs.size() + 1)
        throw InvalidArgument("need one arm length per party");
    if (!(q >= 0.0 && q <= 1.0))
        throw InvalidArgument("q outside [0, 1]");
    std::vector<double> legs{gamma_leader};
    legs.insert(legs.end(), gamma_bobs.begin(), gamma_bobs.end());
    StarAnalysis a;
    a.report = select_star_leader(legs);
    a.swap_count = 1;
    for (auto l : lengths)
        if (l > 1)
            a.swap_count += l - 1;
    a.report.swap_count = a.swap_count;
    a.report.r_round = expected_round_rate(a.report, q, a.swap_count);
    return a;
}

void print_star_analysis(std::ostream& out, const StarAnalysis& a)
{
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return std::string(buf);
    };
    out << "Q_X = " << num(a.report.rates.q_x) << '\n';
    for (std::size_t i = 0; i < a.report.rates.q_ab.size(); ++i)
        out << "Q_AB[" << i << "] = " << num(a.report.rates.q_ab[i]) << '\n';
    out << "leader = " << a.report.leader << '\n';
    out << "r = " << num(a.report.r_clamped) << '\n';
    out << "r_raw = " << num(a.report.r_asymptotic) << '\n';
    out << "swap_count = " << a.swap_count << '\n';
    out << "r_round = " << num(a.report.r_round) << '\n';
}

} // namespace mpqkd
