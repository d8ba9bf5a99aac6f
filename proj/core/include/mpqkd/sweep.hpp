#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>

#include "mpqkd/config.hpp"

namespace mpqkd {

inline constexpr const char* kCsvHeader =
    "topology,layout,n_parties,p,q,gamma,strategy,rounds,seed,mean_keyrate,std_error,trees_per_round";

std::size_t sweep_row_count(const ExperimentConfig& config);

// Writes the header and one row per (seed, strategy, gamma, n_parties), in
// that nesting order. `progress` is called after each row if set.
void write_sweep(std::ostream& out, const ExperimentConfig& config, std::size_t threads = 1,
                 const std::function<void(std::size_t done, std::size_t total)>& progress = {});

// Same, to a file; throws IoError naming the path.
void write_sweep_file(const std::string& path, const ExperimentConfig& config, std::size_t threads = 1);

std::string format_number(double v); // 10 significant digits

} // namespace mpqkd
