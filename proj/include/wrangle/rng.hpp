#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace wrangle {

// Deterministic sampling primitives. std::shuffle and the standard
// distributions are implementation-defined, so golden files and seeded
// experiments go through these instead. mt19937_64 output is pinned by
// the standard, which makes every draw reproducible across platforms.

inline std::uint64_t bounded_uint(std::mt19937_64& gen, std::uint64_t bound) {
    // Rejection sampling over the top of the range; unbiased and portable.
    const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % bound;
    std::uint64_t draw;
    do {
        draw = gen();
    } while (draw >= limit);
    return draw % bound;
}

// First k positions of a seeded Fisher-Yates pass over [0, n); the result
// order is the sampled order. k == n yields a full permutation.
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
    std::vector<std::size_t> indices(n);
    for (std::size_t i = 0; i < n; ++i) indices[i] = i;
    std::mt19937_64 gen(seed);
    for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(bounded_uint(gen, n - i));
        std::swap(indices[i], indices[j]);
    }
    indices.resize(k);
    return indices;
}

template <typename T>
std::vector<T> shuffled(std::vector<T> items, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    for (std::size_t i = 0; i + 1 < items.size(); ++i) {
        const std::size_t j = i + static_cast<std::size_t>(bounded_uint(gen, items.size() - i));
        std::swap(items[i], items[j]);
    }
    return items;
}

} // namespace wrangle
