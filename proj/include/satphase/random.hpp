#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace satphase {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Counter-based sub-stream derivation: (root, name, index) -> seed.
/// Streams with different names or indices never share state, so adding a
/// new consumer does not perturb existing ones.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view stream,
                                    std::uint64_t index = 0) noexcept {
    return splitmix64(splitmix64(root ^ fnv1a(stream)) + splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_stream(std::uint64_t root, std::string_view stream, std::uint64_t index = 0) {
    return Rng(derive_seed(root, stream, index));
}

/// Normal draw parameterised by variance, the convention used for every
/// N(mean, var) in this library.
inline double normal_variance(Rng& rng, double mean, double variance) {
    if (variance <= 0.0) return mean;
    return std::normal_distribution<double>(mean, std::sqrt(variance))(rng);
}

}  // namespace satphase
