#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mpqkd/keyrate.hpp"

namespace mpqkd {

struct ValidationCheck {
    std::string name;
    bool passed = false;
    double max_deviation = 0.0;
    std::string detail;
};

struct ValidationHooks {
    // Path gamma used by the closed-form side of the star equivalence check.
    std::function<double(std::span<const double>)> path_gamma;
};

/// Built-in oracle suite: star closed form vs explicit density-operator
/// swaps, incremental vs direct GHZ merging, merge-order independence,
/// the q^n swap-count identity and entropy endpoints.
std::vector<ValidationCheck> run_validation(const ValidationHooks& hooks = {}, std::uint64_t seed = 2024);

void print_validation(std::ostream& out, const std::vector<ValidationCheck>& checks);

struct StarAnalysis {
    KeyRateReport report;
    std::size_t swap_count = 0;
};

// gamma values are per-arm path gammas; lengths are arm link counts
// (leader first, then Bobs).
StarAnalysis analyze_star(double gamma_leader, std::span<const double> gamma_bobs, double q,
                          std::span<const std::size_t> lengths);

void print_star_analysis(std::ostream& out, const StarAnalysis& analysis);

} // namespace mpqkd
