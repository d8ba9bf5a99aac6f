#include "mpqkd/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "mpqkd/errors.hpp"

namespace mpqkd {

namespace {

constexpr std::uint64_t kTopologyStream = 1;
constexpr std::uint64_t kLayoutStream = 2;
constexpr std::uint64_t kLinkStream = 3;
constexpr std::uint64_t kSwapStream = 4;

bool structure_alive(const Snapshot& snapshot, const Structure& s)
{
    for (auto l : used_edges(s))
        if (!snapshot.alive(l))
            return false;
    return true;
}

double credit(const Network& network, const Structure& s, const KeyRateReport& report, SwapMode mode, Rng& swap_rng)
{
    if (mode == SwapMode::Analytic)
        return report.r_round;
    bool ok = true;
    for (auto node : measuring_nodes(network, s))
        ok = bernoulli(swap_rng, network.q(node)) && ok; // one coin per node regardless of earlier failures
    return ok ? report.r_clamped : 0.0;
}

} // namespace

std::string to_string(SwapMode mode) { return mode == SwapMode::Analytic ? "analytic" : "monte-carlo"; }

SwapMode parse_swap_mode(const std::string& name)
{
    if (name == "analytic")
        return SwapMode::Analytic;
    if (name == "monte-carlo")
        return SwapMode::MonteCarlo;
    throw InvalidArgument("unknown swap mode '" + name + "'");
}

std::string to_string(TopologyKind kind) { return kind == TopologyKind::Grid ? "grid" : "random"; }

RoundResult run_round(const Snapshot& snapshot, const Plan& plan, SwapMode swap_mode, Rng& swap_rng)
{
    const Network& net = snapshot.network();
    RoundResult r;
    if (is_fixed(plan.mode)) {
        for (std::size_t i = 0; i < plan.structures.size(); ++i) {
            if (!structure_alive(snapshot, plan.structures[i]))
                continue;
            ++r.structures_found;
            r.rate += credit(net, plan.structures[i], plan.reports[i], swap_mode, swap_rng);
            r.per_structure.push_back(plan.reports[i]);
        }
        return r;
    }
    auto structures = route_snapshot(snapshot, plan.terminals, plan.family, is_multi(plan.mode));
    for (const auto& s : structures) {
        auto report = evaluate_structure(net, s);
        ++r.structures_found;
        r.rate += credit(net, s, report, swap_mode, swap_rng);
        r.per_structure.push_back(std::move(report));
    }
    return r;
}

RoundResult run_round(const std::shared_ptr<const Network>& network, const Plan& plan, Rng& rng, SwapMode swap_mode)
{
    auto snapshot = sample_snapshot(network, rng);
    return run_round(snapshot, plan, swap_mode, rng);
}

Network build_point_network(const PointConfig& c, std::uint64_t graph_seed)
{
    std::optional<Network> base;
    if (c.topology.kind == TopologyKind::Grid) {
        base.emplace(build_grid(c.topology.width, c.topology.height, c.p, c.gamma, c.q));
    } else {
        RandomGeometricOptions opt;
        opt.max_attempts = c.topology.max_retries;
        base.emplace(build_random_geometric(c.topology.nodes, c.topology.radius, c.p, c.gamma, c.q,
                                            derive_seed(c.master_seed, {kTopologyStream, graph_seed}), opt));
    }
    LayoutSpec layout = c.layout;
    layout.n_parties = c.n_parties;
    switch (layout.kind) {
    case LayoutKind::Bet:
    case LayoutKind::Dalet:
    case LayoutKind::Giml:
    case LayoutKind::GimlIncremental:
        if (!base->grid())
            throw InvalidArgument("layout " + to_string(layout.kind) + " needs a grid topology");
        layout = grid_layout(layout.kind, *base->grid(), c.n_parties);
        break;
    case LayoutKind::Random:
        layout = random_layout(c.n_parties, derive_seed(c.master_seed, {kLayoutStream, graph_seed}));
        break;
    case LayoutKind::Explicit:
        if (layout.nodes.size() < c.n_parties)
            throw InvalidArgument("explicit layout lists fewer nodes than n_parties");
        layout.nodes.resize(c.n_parties);
        break;
    }
    return apply_layout(*base, layout);
}

namespace {

template <class F>
void parallel_for(std::size_t n, std::size_t threads, F&& f)
{
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += threads)
                f(i);
        });
    for (auto& th : pool)
        th.join();
}

} // namespace

RoundSeries run_series(const PointConfig& c)
{
    if (c.rounds < 1)
        throw InvalidArgument("rounds must be at least 1");
    if (c.graph_seeds.empty())
        throw InvalidArgument("at least one graph seed is required");
    RoundSeries out;
    out.rates.resize(c.rounds * c.graph_seeds.size());
    out.structures.resize(out.rates.size());
    for (std::size_t g = 0; g < c.graph_seeds.size(); ++g) {
        const auto seed = c.graph_seeds[g];
        auto net = std::make_shared<const Network>(build_point_network(c, seed));
        const auto plan = make_plan(*net, net->terminals(), c.strategy, c.family);
        parallel_for(c.rounds, c.threads, [&](std::size_t round) {
            Rng link_rng(derive_seed(c.master_seed, {kLinkStream, seed, round}));
            Rng swap_rng(derive_seed(c.master_seed, {kSwapStream, seed, round}));
            auto snapshot = sample_snapshot(net, link_rng);
            auto r = run_round(snapshot, plan, c.swap_mode, swap_rng);
            out.rates[g * c.rounds + round] = r.rate;
            out.structures[g * c.rounds + round] = r.structures_found;
        });
    }
    return out;
}

ExperimentResult summarize(const RoundSeries& series, const PointConfig& config)
{
    ExperimentResult r;
    r.config = config;
    r.rounds = series.rates.size();
    if (r.rounds == 0)
        throw InvalidArgument("empty series");
    const double n = static_cast<double>(r.rounds);
    double sum = 0.0, trees = 0.0;
    for (std::size_t i = 0; i < r.rounds; ++i) {
        sum += series.rates[i];
        trees += static_cast<double>(series.structures[i]);
    }
    r.mean_rate = sum / n;
    r.trees_per_round_mean = trees / n;
    if (r.rounds > 1) {
        double ss = 0.0;
        for (double x : series.rates)
            ss += (x - r.mean_rate) * (x - r.mean_rate);
        r.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return r;
}

ExperimentResult run_experiment(const PointConfig& config) { return summarize(run_series(config), config); }

RatioEstimate paired_ratio(std::span<const double> num, std::span<const double> den)
{
    if (num.size() != den.size() || num.empty())
        throw InvalidArgument("paired ratio needs two equal-length non-empty series");
    const double n = static_cast<double>(num.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < num.size(); ++i) {
        mx += num[i];
        my += den[i];
    }
    mx /= n;
    my /= n;
    RatioEstimate r;
    if (my == 0.0) {
        r.ratio = mx == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
        return r;
    }
    r.ratio = mx / my;
    if (num.size() > 1) {
        double ss = 0.0;
        for (std::size_t i = 0; i < num.size(); ++i) {
            double d = num[i] - r.ratio * den[i];
            ss += d * d;
        }
        r.std_error = std::sqrt(ss / (n - 1.0) / n) / std::abs(my);
    }
    return r;
}

StrategyComparison compare_strategies(const PointConfig& config, std::span<const Mode> strategies)
{
    StrategyComparison out;
    std::vector<RoundSeries> series;
    for (auto m : strategies) {
        PointConfig c = config;
        c.strategy = m;
        series.push_back(run_series(c));
        out.results.push_back(summarize(series.back(), c));
    }
    for (std::size_t i = 1; i < series.size(); ++i) {
        auto r = paired_ratio(series[i].rates, series[0].rates);
        r.numerator = strategies[i];
        r.denominator = strategies[0];
        out.ratios.push_back(r);
    }
    return out;
}

} // namespace mpqkd
