#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace uqx {

// Deterministic random helpers built directly on std::mt19937_64 output.
// The standard distribution classes are implementation-defined, so every
// draw here is constructed from raw engine words to keep results identical
// across standard libraries and platforms.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

// Uniform in [0, 1) with 53-bit resolution.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& eng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(eng);
}

// Unbiased integer in [0, n) via rejection sampling.
inline std::uint64_t below(std::mt19937_64& eng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = eng();
    while (v >= limit) v = eng();
    return v % n;
}

inline bool bernoulli(std::mt19937_64& eng, double p) {
    return uniform01(eng) < p;
}

// Standard normal via Box-Muller; one value per call, deterministic.
inline double normal(std::mt19937_64& eng) {
    double u1 = uniform01(eng);
    while (u1 <= 0.0) u1 = uniform01(eng);
    const double u2 = uniform01(eng);
    const double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

template <typename T>
void shuffle(std::mt19937_64& eng, std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(below(eng, i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace rng
} // namespace uqx
