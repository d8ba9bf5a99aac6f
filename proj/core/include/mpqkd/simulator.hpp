#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mpqkd/graph.hpp"
#include "mpqkd/routing.hpp"

namespace mpqkd {

enum class SwapMode { Analytic, MonteCarlo };

std::string to_string(SwapMode mode);
SwapMode parse_swap_mode(const std::string& name);

struct RoundResult {
    std::size_t structures_found = 0;
    double rate = 0.0; // sum of credited per-structure rates
    std::vector<KeyRateReport> per_structure;
};

/// Phases two and three of a round on an already sampled snapshot.
/// Dynamic plans route on the snapshot; fixed plans keep each planned
/// structure whose links all survived. Analytic mode credits r_round,
/// Monte-Carlo mode flips one q-coin per measuring node (from swap_rng)
/// and credits r_clamped when all succeed.
RoundResult run_round(const Snapshot& snapshot, const Plan& plan, SwapMode swap_mode, Rng& swap_rng);

// All three phases; the snapshot and the swap coins share `rng`.
RoundResult run_round(const std::shared_ptr<const Network>& network, const Plan& plan, Rng& rng,
                      SwapMode swap_mode = SwapMode::Analytic);

enum class TopologyKind { Grid, Random };

std::string to_string(TopologyKind kind);

struct TopologySpec {
    TopologyKind kind = TopologyKind::Grid;
    std::uint32_t width = 7;
    std::uint32_t height = 7;
    std::size_t nodes = 50;
    double radius = 0.3;
    std::size_t max_retries = 1000;
};

// One data point: everything needed to run a strategy on a topology.
struct PointConfig {
    TopologySpec topology;
    LayoutSpec layout;
    std::size_t n_parties = 3;
    double p = 0.85;
    double q = 0.85;
    double gamma = 1.0;
    Mode strategy = Mode::DynamicMulti;
    Family family = Family::Auto;
    std::size_t rounds = 1000;
    std::vector<std::uint64_t> graph_seeds{0};
    std::uint64_t master_seed = 0;
    SwapMode swap_mode = SwapMode::Analytic;
    std::size_t threads = 1;
};

// Network with terminals for graph seed `graph_seed` of the config.
Network build_point_network(const PointConfig& config, std::uint64_t graph_seed);

struct ExperimentResult {
    double mean_rate = 0.0;
    double std_error = 0.0;
    std::size_t rounds = 0; // total over all graphs
    double trees_per_round_mean = 0.0;
    PointConfig config;
};

// Per-round samples in (graph, round) order.
struct RoundSeries {
    std::vector<double> rates;
    std::vector<std::size_t> structures;
};

RoundSeries run_series(const PointConfig& config);

ExperimentResult summarize(const RoundSeries& series, const PointConfig& config);

ExperimentResult run_experiment(const PointConfig& config);

struct RatioEstimate {
    Mode numerator = Mode::DynamicMulti;
    Mode denominator = Mode::DynamicMulti;
    double ratio = 0.0;
    double std_error = 0.0;
};

struct StrategyComparison {
    std::vector<ExperimentResult> results;
    std::vector<RatioEstimate> ratios; // every strategy against the first
};

/// Runs each strategy on the same snapshot sequence and estimates paired
/// mean ratios (delta method on the per-round pairs).
StrategyComparison compare_strategies(const PointConfig& config, std::span<const Mode> strategies);

RatioEstimate paired_ratio(std::span<const double> numerator, std::span<const double> denominator);

} // namespace mpqkd
