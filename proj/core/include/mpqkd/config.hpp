#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mpqkd/simulator.hpp"

namespace mpqkd {

/// Sweep configuration.
///
/// Grammar, one entry per line:
///
///     # comment
///     section.key = value
///     section.key = v1, v2, v3
///     section.key = a, b, ..., c     # arithmetic progression a, b, b + (b - a), ..., c
///
/// Keys: topology.{kind,width,height,nodes,radius,max_retries},
/// layout.{kind,nodes}, protocol.n_parties, params.{p,q,gamma_list},
/// routing.strategy, sim.{rounds,graph_seeds,master_seed,swap_mode},
/// output.path.
struct ExperimentConfig {
    TopologySpec topology;
    LayoutSpec layout;
    std::vector<std::size_t> n_parties;
    double p = 0.0;
    double q = 0.0;
    std::vector<double> gamma_list;
    std::vector<Mode> strategies;
    std::size_t rounds = 1000;
    std::vector<std::uint64_t> graph_seeds{0};
    std::uint64_t master_seed = 0;
    SwapMode swap_mode = SwapMode::Analytic;
    std::string output_path;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path); // IoError if unreadable

// Single data point of the sweep.
PointConfig point_config(const ExperimentConfig& config, std::uint64_t graph_seed, Mode strategy, double gamma,
                         std::size_t n_parties);

// Expands "a, b, ..., c" lists; values are trimmed strings.
std::vector<std::string> expand_list(const std::string& value, const std::string& key);

} // namespace mpqkd
