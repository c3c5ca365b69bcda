#include "splice/rng.hpp"

#include <limits>
#include <numeric>

namespace splice {

std::uint64_t Rng::below(std::uint64_t n)
{
    // Rejection sampling keeps the draw unbiased for any n.
    const auto max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - (max % n + 1) % n;
    std::uint64_t x = next();
    while (x > limit) {
        x = next();
    }
    return x % n;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt)
{
    // splitmix64 finaliser over the combined words
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<std::uint32_t> permutation(std::size_t n, std::uint64_t seed)
{
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0U);
    Rng rng(seed);
    rng.shuffle(std::span<std::uint32_t>(order));
    return order;
}

} // namespace splice
