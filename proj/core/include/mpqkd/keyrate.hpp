#pragma once

#include <cstddef>
#include <map>

#include "mpqkd/quantum.hpp"

namespace mpqkd {

struct KeyRateReport {
    std::size_t leader = 0;
    ErrorRates rates;
    double r_asymptotic = 0.0; // raw, may be negative
    double r_clamped = 0.0;
    double r_round = 0.0;      // q^swap_count * r_clamped
    std::size_t swap_count = 0;
};

// Base-2 binary entropy with H(0) = H(1) = 0.
double binary_entropy(double x);

// 1 - H(q_x) - max_i H(q_ab[i]); not clamped.
double asymptotic_rate(const ErrorRates& rates);

/// Picks the leader whose worst Z-basis disagreement is smallest (lowest
/// index on ties) and fills in the report except for r_round and
/// swap_count.
KeyRateReport select_leader(const std::map<std::size_t, ErrorRates>& per_leader);

// Leader selection for a star with the given leg gammas (one per terminal).
KeyRateReport select_star_leader(std::span<const double> leg_gammas);

// q^n * r_clamped.
double expected_round_rate(const KeyRateReport& report, double q, std::size_t n_nonleaf);

// Same with one success probability per measuring node.
double expected_round_rate(const KeyRateReport& report, std::span<const double> node_q);

// q^(n_links - 1) * max(0, 1 - 2 H((1 - gamma_p) / 2)).
double pairwise_rate_proxy(double gamma_p, std::size_t n_links, double q);

} // namespace mpqkd
