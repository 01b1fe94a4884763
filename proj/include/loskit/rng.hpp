#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace loskit {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Independent stream seed for (seed, stream). Distinct streams give distinct seeds.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed ^ mix64(stream + 0x51ed2701ULL));
}

// Distribution helpers are hand-rolled: the std:: distributions are not
// bit-stable across standard library implementations, and seeded runs must be.

// Uniform double in [0, 1).
inline double uniform_real(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). n must be > 0.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return static_cast<std::size_t>(v % n);
}

// Uniform integer in [lo, hi] inclusive.
inline long long uniform_int(Rng& rng, long long lo, long long hi) {
    return lo + static_cast<long long>(uniform_index(rng, static_cast<std::size_t>(hi - lo + 1)));
}

// Standard normal via Box-Muller (one value per call).
inline double normal(Rng& rng) {
    double u1 = uniform_real(rng);
    while (u1 <= 0.0) u1 = uniform_real(rng);
    const double u2 = uniform_real(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = uniform_index(rng, i);
        std::swap(v[i - 1], v[j]);
    }
}

// Weighted choice over non-negative weights summing to anything positive.
inline std::size_t weighted_index(Rng& rng, const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double x = uniform_real(rng) * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        x -= weights[i];
        if (x < 0.0) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
}

}  // namespace loskit
