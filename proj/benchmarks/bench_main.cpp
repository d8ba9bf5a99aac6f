#include <benchmark/benchmark.h>

#include <memory>
#include <numeric>

#include "mpqkd/graph.hpp"
#include "mpqkd/quantum.hpp"
#include "mpqkd/rng.hpp"
#include "mpqkd/routing.hpp"
#include "mpqkd/simulator.hpp"

using namespace mpqkd;

namespace {

std::shared_ptr<const Network> grid_net(std::uint32_t side, std::size_t parties)
{
    auto base = build_grid(side, side, 0.85, 0.99, 0.85);
    auto layout = grid_layout(LayoutKind::GimlIncremental, GridShape{side, side}, parties);
    PointConfig pc;
    pc.topology.width = pc.topology.height = side;
    pc.layout = layout;
    pc.n_parties = parties;
    pc.p = 0.85;
    pc.gamma = 0.99;
    return std::make_shared<const Network>(build_point_network(pc, 0));
}

// Star with arms of one link each: N terminals around a repeater.
ContractedTree star_tree(std::size_t n, double gamma)
{
    ContractedTree t;
    t.terminal_count = n;
    for (std::size_t v = 0; v <= n; ++v)
        t.vertices.push_back(static_cast<NodeId>(v));
    for (std::size_t i = 0; i < n; ++i) {
        ContractedEdge e;
        e.a = i;
        e.b = n;
        e.path.gamma_p = gamma;
        t.edges.push_back(e);
    }
    return t;
}

void BM_TreeState(benchmark::State& state)
{
    auto t = star_tree(static_cast<std::size_t>(state.range(0)), 0.97);
    for (auto _ : state)
        benchmark::DoNotOptimize(tree_state(t));
}
BENCHMARK(BM_TreeState)->DenseRange(3, 8);

void BM_FindBestStar(benchmark::State& state)
{
    auto net = grid_net(static_cast<std::uint32_t>(state.range(0)), 3);
    Snapshot s(net);
    for (auto _ : state)
        benchmark::DoNotOptimize(find_best_star(s, net->terminals()));
}
BENCHMARK(BM_FindBestStar)->Arg(7)->Arg(11);

void BM_PackStars(benchmark::State& state)
{
    auto net = grid_net(static_cast<std::uint32_t>(state.range(0)), 3);
    Rng rng(1);
    auto s = sample_snapshot(net, rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(pack_stars(s, net->terminals()));
}
BENCHMARK(BM_PackStars)->Arg(7)->Arg(11);

void BM_SteinerTree(benchmark::State& state)
{
    auto net = grid_net(11, static_cast<std::size_t>(state.range(0)));
    Snapshot s(net);
    for (auto _ : state)
        benchmark::DoNotOptimize(steiner_tree(s, net->terminals()));
}
BENCHMARK(BM_SteinerTree)->DenseRange(3, 6);

void BM_PackTrees(benchmark::State& state)
{
    auto net = grid_net(11, static_cast<std::size_t>(state.range(0)));
    Rng rng(1);
    auto s = sample_snapshot(net, rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(pack_trees(s, net->terminals()));
}
BENCHMARK(BM_PackTrees)->DenseRange(3, 6);

void BM_RunRound(benchmark::State& state)
{
    auto net = grid_net(7, static_cast<std::size_t>(state.range(0)));
    auto plan = make_plan(*net, net->terminals(), Mode::DynamicMulti);
    Rng rng(7);
    for (auto _ : state)
        benchmark::DoNotOptimize(run_round(net, plan, rng));
}
BENCHMARK(BM_RunRound)->DenseRange(3, 6);

} // namespace
BENCHMARK_MAIN();
