#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rlct_nmf {

/// All randomness flows from one 64-bit master seed. A substream is named by
/// a path of integers (e.g. {replication, chain}); its engine seed is
///
///   s = splitmix64(master); for each p in path: s = splitmix64(s ^ mix(p))
///
/// where mix(p) = splitmix64(p + 0x9E3779B97F4A7C15). Engines are
/// std::mt19937_64, whose output sequence is fixed by the standard, and
/// variates are drawn with Boost.Random distributions, whose algorithms do
/// not vary between standard libraries.
using Engine = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path) noexcept;

inline Engine make_engine(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path) {
    return Engine(derive_seed(master, path));
}

/// Fresh seed from the operating system, for `--seed auto`.
std::uint64_t random_device_seed();

} // namespace rlct_nmf
