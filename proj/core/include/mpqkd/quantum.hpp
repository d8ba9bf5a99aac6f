#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mpqkd/density.hpp"
#include "mpqkd/structures.hpp"

namespace mpqkd {

struct ErrorRates {
    double q_x = 0.0;          // X-basis parity error across all parties
    std::vector<double> q_ab;  // Z-basis disagreement leader vs. each Bob
};

// Product of the per-link gammas along a repeater path.
double path_gamma(std::span<const double> gammas);

// Closed form for star distribution:
//   q_ab[i] = (1 - gA gBi) / 2,  q_x = (1 - gA prod_i gBi) / 2.
ErrorRates star_error_rates(double gamma_leader, std::span<const double> gamma_bobs);

/// Q_{A,B_i} = (1 - <Z_A Z_Bi>)/2 and Q_X = (1 - <X...X>)/2 on an N-qubit
/// state whose qubits are the terminals in order.
ErrorRates error_rates_from_state(const DensityOperator& state, std::size_t leader_index);

constexpr std::size_t kMaxTreeTerminals = 8;

struct TreeMergeOptions {
    // Vertex the traversal is rooted at; by default the vertex whose plan
    // keeps the fewest qubits alive.
    std::optional<std::size_t> root;
    // Nonzero: shuffle child order at every vertex with this seed (used to
    // check order independence). Zero: largest-requirement child first.
    std::uint64_t shuffle_seed = 0;
};

struct TreeStateStats {
    std::size_t peak_qubits = 0;
    std::size_t root = 0;
};

/// Noisy N-GHZ state produced by distributing over a contracted tree.
///
/// One Werner pair per contracted edge (gamma from edge_gammas). Repeater
/// branch vertices perform a k-GHZ measurement and terminal interior
/// vertices a fusion; both are carried out incrementally as pairwise
/// fusions into one retained qubit (closed with an X measurement at
/// repeaters), so only the subtree being merged is ever live. Returns one
/// qubit per terminal, labelled {terminal, 0}, in terminal order.
DensityOperator tree_state(const ContractedTree& tree, std::span<const double> edge_gammas,
                           const TreeMergeOptions& options = {}, TreeStateStats* stats = nullptr);

DensityOperator tree_state(const ContractedTree& tree, const TreeMergeOptions& options = {},
                           TreeStateStats* stats = nullptr);

// Peak live-qubit count of the default merge plan without running it.
std::size_t planned_peak_qubits(const ContractedTree& tree);

} // namespace mpqkd
