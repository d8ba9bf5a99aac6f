#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mpqkd {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from a master seed and a path of
// indices, e.g. derive_seed(master, {graph, round}). Pure function, so
// parallel workers reproduce the sequential streams exactly.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept
{
    std::uint64_t h = splitmix64(master);
    for (auto v : path)
        h = splitmix64(h ^ splitmix64(v + 0x632be59bd9b4e019ULL));
    return h;
}

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementation.
inline double uniform01(Rng& rng) noexcept
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) noexcept
{
    return uniform01(rng) < p;
}

} // namespace mpqkd
