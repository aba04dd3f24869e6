#pragma once

#include <cstdint>
#include <random>

namespace netacr {

/// Every random stream is a std::mt19937_64 whose seed is derived from a master
/// seed and a stream index, so results never depend on evaluation order.
using Engine = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// seed_i = mix64(mix64(master) ^ mix64(i + 1))
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept
{
    return mix64(mix64(master) ^ mix64(stream + 1));
}

inline Engine make_engine(std::uint64_t master, std::uint64_t stream)
{
    return Engine(derive_seed(master, stream));
}

}  // namespace netacr
