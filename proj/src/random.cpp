#include "rlct_nmf/random.hpp"

namespace rlct_nmf {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t s = splitmix64(master);
    for (std::uint64_t p : path)
        s = splitmix64(s ^ splitmix64(p + 0x9E3779B97F4A7C15ull));
    return s;
}

std::uint64_t random_device_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

} // namespace rlct_nmf
