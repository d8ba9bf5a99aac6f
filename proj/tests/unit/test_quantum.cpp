#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mpqkd/errors.hpp"
#include "mpqkd/quantum.hpp"
#include "oracles/full_tensor.hpp"
#include "oracles/pauli_state.hpp"

using namespace mpqkd;

namespace {

// Contracted tree over vertex ids 100+i with the given edges and gammas.
ContractedTree make_tree(std::size_t terminals, std::size_t vertices,
                         const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                         const std::vector<double>& gammas)
{
    ContractedTree t;
    t.terminal_count = terminals;
    for (std::size_t v = 0; v < vertices; ++v)
        t.vertices.push_back(static_cast<NodeId>(100 + v));
    for (std::size_t i = 0; i < edges.size(); ++i) {
        ContractedEdge e;
        e.a = edges[i].first;
        e.b = edges[i].second;
        e.path.gamma_p = gammas[i];
        t.edges.push_back(e);
    }
    return t;
}

oracle::TreeSpec spec_of(const ContractedTree& t, const std::vector<double>& g)
{
    oracle::TreeSpec s;
    s.terminals = t.terminal_count;
    s.vertices = t.vertices.size();
    for (const auto& e : t.edges)
        s.edges.emplace_back(e.a, e.b);
    s.gamma = g;
    return s;
}

double max_abs(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Random tree with up to `max_vertices` vertices; leaves and degree-2
// vertices are terminals, higher-degree vertices are repeaters with
// probability one half.
std::pair<ContractedTree, std::vector<double>> random_tree(std::mt19937_64& rng, std::size_t max_vertices,
                                                           std::size_t max_terminals)
{
    for (;;) {
        std::uniform_int_distribution<std::size_t> size(3, max_vertices);
        std::size_t m = size(rng);
        std::vector<std::pair<std::size_t, std::size_t>> raw;
        std::vector<std::size_t> deg(m, 0);
        for (std::size_t i = 1; i < m; ++i) {
            std::size_t j = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
            raw.emplace_back(j, i);
            ++deg[i];
            ++deg[j];
        }
        std::vector<char> term(m);
        for (std::size_t v = 0; v < m; ++v)
            term[v] = deg[v] <= 2 || (rng() & 1);
        std::size_t nt = std::count(term.begin(), term.end(), 1);
        if (nt > max_terminals)
            continue;
        std::vector<std::size_t> index(m);
        std::size_t next = 0;
        for (std::size_t v = 0; v < m; ++v)
            if (term[v])
                index[v] = next++;
        for (std::size_t v = 0; v < m; ++v)
            if (!term[v])
                index[v] = next++;
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        std::vector<double> g;
        std::uniform_real_distribution<double> gd(0.6, 1.0);
        for (auto [a, b] : raw) {
            edges.emplace_back(index[a], index[b]);
            g.push_back(gd(rng));
        }
        return {make_tree(nt, m, edges, g), g};
    }
}

} // namespace

TEST(PathGamma, Products)
{
    const double ones[] = {1.0, 1.0, 1.0};
    EXPECT_DOUBLE_EQ(path_gamma(ones), 1.0);
    const double two[] = {0.9, 0.8};
    EXPECT_NEAR(path_gamma(two), 0.72, 1e-15);
    const double four[] = {0.97, 0.97, 0.97, 0.97};
    EXPECT_NEAR(path_gamma(four), 0.88529281, 1e-12);
    EXPECT_THROW(path_gamma(std::span<const double>{}), InvalidArgument);
    const double bad[] = {1.1};
    EXPECT_THROW(path_gamma(bad), InvalidArgument);
}

TEST(StarErrorRates, ClosedFormExamples)
{
    const double noiseless[] = {1.0, 1.0};
    auto r0 = star_error_rates(1.0, noiseless);
    EXPECT_EQ(r0.q_x, 0.0);
    EXPECT_EQ(r0.q_ab, (std::vector<double>{0.0, 0.0}));

    const double b1[] = {0.9, 0.8};
    auto r1 = star_error_rates(1.0, b1);
    EXPECT_NEAR(r1.q_ab[0], 0.05, 1e-15);
    EXPECT_NEAR(r1.q_ab[1], 0.10, 1e-15);
    EXPECT_NEAR(r1.q_x, 0.14, 1e-15);

    const double b2[] = {0.95, 0.95};
    auto r2 = star_error_rates(0.95, b2);
    EXPECT_NEAR(r2.q_ab[0], 0.04875, 1e-15);
    EXPECT_NEAR(r2.q_ab[1], 0.04875, 1e-15);
    EXPECT_NEAR(r2.q_x, 0.0713125, 1e-15);

    EXPECT_THROW(star_error_rates(1.0, std::span<const double>{}), InvalidArgument);
}

TEST(ErrorRatesFromState, LimitsAndRange)
{
    DensityOperator mixed(Eigen::MatrixXcd::Identity(8, 8) / 8.0, {{0, 0}, {1, 0}, {2, 0}});
    auto r = error_rates_from_state(mixed, 1);
    EXPECT_NEAR(r.q_x, 0.5, 1e-15);
    for (double q : r.q_ab)
        EXPECT_NEAR(q, 0.5, 1e-15);
    EXPECT_THROW(error_rates_from_state(mixed, 3), InvalidArgument);

    for (std::size_t n = 2; n <= 8; ++n) {
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (std::size_t i = 0; i < n; ++i)
            edges.emplace_back(i, n);
        auto t = make_tree(n, n + 1, edges, std::vector<double>(n, 1.0));
        auto state = tree_state(t);
        for (std::size_t a = 0; a < n; ++a) {
            auto rr = error_rates_from_state(state, a);
            EXPECT_NEAR(rr.q_x, 0.0, 1e-12);
            for (double q : rr.q_ab)
                EXPECT_NEAR(q, 0.0, 1e-12);
        }
    }
}

TEST(TreeState, StarMatchesPauliExpansion)
{
    auto t = make_tree(3, 4, {{0, 3}, {1, 3}, {2, 3}}, {0.9, 0.95, 0.99});
    auto state = tree_state(t);
    EXPECT_EQ(state.labels(), (std::vector<QubitLabel>{{100, 0}, {101, 0}, {102, 0}}));
    EXPECT_LE(max_abs(state.matrix(), oracle::noisy_ghz3(0.9, 0.95, 0.99)), 1e-10);
    auto rates = error_rates_from_state(state, 0);
    const double bobs[] = {0.95, 0.99};
    auto closed = star_error_rates(0.9, bobs);
    EXPECT_NEAR(rates.q_x, closed.q_x, 1e-12);
    EXPECT_NEAR(rates.q_ab[0], closed.q_ab[0], 1e-12);
    EXPECT_NEAR(rates.q_ab[1], closed.q_ab[1], 1e-12);
}

TEST(TreeState, DirectStarMergeMatchesPauliExpansion)
{
    DensityOperator s;
    std::vector<QubitLabel> measured, partners;
    const double g[] = {0.9, 0.95, 0.99};
    for (NodeId i = 0; i < 3; ++i) {
        s = tensor(s, werner_pair({g[i]}, {i, 0}, {9, i + 1}));
        measured.push_back({9, i + 1});
        partners.push_back({i, 0});
    }
    auto out = ghz_projective_merge(s, measured, partners).permuted(partners);
    EXPECT_LE(max_abs(out.matrix(), oracle::noisy_ghz3(0.9, 0.95, 0.99)), 1e-10);
}

TEST(TreeState, NoiselessTreesGiveIdealGhz)
{
    std::mt19937_64 rng(1);
    for (int i = 0; i < 15; ++i) {
        auto [t, g] = random_tree(rng, 7, 6);
        std::vector<double> ones(g.size(), 1.0);
        EXPECT_NEAR(fidelity_with_ghz(tree_state(t, ones)), 1.0, 1e-12);
    }
}

TEST(TreeState, FusionTreeMatchesFullTensorOracle)
{
    // T1 - R1, T2 - R1, R1 - T3 - T4: T3 is a path terminal performing fusion
    auto t = make_tree(4, 5, {{0, 4}, {1, 4}, {4, 2}, {2, 3}}, {0.95, 0.95, 0.95, 0.95});
    std::vector<double> g(4, 0.95);
    auto state = tree_state(t, g);
    auto ref = oracle::full_tensor_state(spec_of(t, g));
    EXPECT_LE(max_abs(state.matrix(), ref), 1e-10);
    DensityOperator ref_op(ref, state.labels());
    for (std::size_t a = 0; a < 4; ++a) {
        auto x = error_rates_from_state(state, a);
        auto y = error_rates_from_state(ref_op, a);
        EXPECT_NEAR(x.q_x, y.q_x, 1e-12);
        for (std::size_t i = 0; i < 3; ++i)
            EXPECT_NEAR(x.q_ab[i], y.q_ab[i], 1e-12);
    }
}

TEST(TreeState, FusionAtTerminalMatchesStarWithUnitLeg)
{
    // T0 - T1 - T2 with T1 fusing: star with gamma_T1 = 1
    auto t = make_tree(3, 3, {{1, 0}, {1, 2}}, {0.9, 0.8});
    auto state = tree_state(t);
    for (std::size_t a = 0; a < 3; ++a) {
        std::vector<double> legs{0.9, 1.0, 0.8};
        std::vector<double> bobs;
        for (std::size_t i = 0; i < 3; ++i)
            if (i != a)
                bobs.push_back(legs[i]);
        auto closed = star_error_rates(legs[a], bobs);
        auto dm = error_rates_from_state(state, a);
        EXPECT_NEAR(dm.q_x, closed.q_x, 1e-12);
        for (std::size_t i = 0; i < 2; ++i)
            EXPECT_NEAR(dm.q_ab[i], closed.q_ab[i], 1e-12);
    }
}

TEST(TreeState, RandomTreesMatchFullTensorOracle)
{
    std::mt19937_64 rng(7);
    int checked = 0;
    while (checked < 12) {
        auto [t, g] = random_tree(rng, 6, 5);
        if (t.edges.size() > 5)
            continue;
        auto state = tree_state(t, g);
        auto ref = oracle::full_tensor_state(spec_of(t, g));
        EXPECT_LE(max_abs(state.matrix(), ref), 1e-10) << "tree " << checked;
        ++checked;
    }
}

TEST(TreeState, StarEquivalenceOnRandomDraws)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.5, 1.0);
    for (int i = 0; i < 100; ++i) {
        double g[] = {u(rng), u(rng), u(rng)};
        auto t = make_tree(3, 4, {{0, 3}, {1, 3}, {2, 3}}, {g[0], g[1], g[2]});
        auto dm = error_rates_from_state(tree_state(t), 0);
        const double bobs[] = {g[1], g[2]};
        auto closed = star_error_rates(g[0], bobs);
        EXPECT_NEAR(dm.q_x, closed.q_x, 1e-10);
        EXPECT_NEAR(dm.q_ab[0], closed.q_ab[0], 1e-10);
        EXPECT_NEAR(dm.q_ab[1], closed.q_ab[1], 1e-10);
    }
}

TEST(TreeState, MergeOrderIndependence)
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 12; ++i) {
        auto [t, g] = random_tree(rng, 7, 5);
        auto ref = tree_state(t, g);
        for (std::size_t root = 0; root < t.vertices.size(); ++root)
            for (std::uint64_t shuffle : {0u, 3u, 8u}) {
                TreeMergeOptions opt;
                opt.root = root;
                opt.shuffle_seed = shuffle;
                auto other = tree_state(t, g, opt);
                EXPECT_LE(max_abs(ref.matrix(), other.matrix()), 1e-10);
            }
    }
}

TEST(TreeState, PeakStaysWithinNPlusTwo)
{
    std::mt19937_64 rng(9);
    for (int i = 0; i < 20; ++i) {
        auto [t, g] = random_tree(rng, 9, 8);
        TreeStateStats stats;
        auto state = tree_state(t, g, {}, &stats);
        EXPECT_LE(stats.peak_qubits, t.terminal_count + 2);
        EXPECT_EQ(stats.peak_qubits, planned_peak_qubits(t));
        EXPECT_NO_THROW(state.check_invariants());
    }
    // eight-party star
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < 8; ++i)
        edges.emplace_back(i, 8);
    auto star = make_tree(8, 9, edges, std::vector<double>(8, 0.97));
    TreeStateStats stats;
    tree_state(star, {}, &stats);
    EXPECT_LE(stats.peak_qubits, 10u);
}

TEST(TreeState, RejectsInvalidTrees)
{
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < 9; ++i)
        edges.emplace_back(i, 9);
    EXPECT_THROW(tree_state(make_tree(9, 10, edges, std::vector<double>(9, 1.0))), CapacityError);
    // repeater leaf
    EXPECT_THROW(tree_state(make_tree(2, 3, {{0, 1}, {1, 2}}, {1, 1})), InvalidArgument);
    // wrong number of gammas
    auto t = make_tree(2, 2, {{0, 1}}, {0.9});
    const double two[] = {0.9, 0.8};
    EXPECT_THROW(tree_state(t, two), InvalidArgument);
    // cycle / disconnected
    EXPECT_THROW(tree_state(make_tree(3, 3, {{0, 1}, {1, 0}}, {1, 1})), InvalidArgument);
}

TEST(TreeState, TwoPartyIsWernerPair)
{
    auto t = make_tree(2, 2, {{0, 1}}, {0.83});
    auto s = tree_state(t);
    auto w = werner_pair({0.83}, {100, 0}, {101, 0});
    EXPECT_LE(max_abs(s.matrix(), w.matrix()), 1e-12);
}

TEST(TreeState, RatesNonincreasingInEdgeGamma)
{
    std::mt19937_64 rng(21);
    for (int i = 0; i < 8; ++i) {
        auto [t, g] = random_tree(rng, 6, 5);
        auto base = error_rates_from_state(tree_state(t, g), 0);
        for (std::size_t e = 0; e < g.size(); ++e) {
            auto h = g;
            h[e] = std::min(1.0, h[e] + 0.02);
            auto up = error_rates_from_state(tree_state(t, h), 0);
            EXPECT_LE(up.q_x, base.q_x + 1e-12);
            for (std::size_t j = 0; j < up.q_ab.size(); ++j)
                EXPECT_LE(up.q_ab[j], base.q_ab[j] + 1e-12);
        }
    }
}
