#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace morl {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based seed derivation: the result depends only on the listed
/// coordinates, so adding a coordinate elsewhere never shifts this stream.
inline constexpr std::uint64_t derive_seed(std::uint64_t master,
                                           std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t s = mix64(master);
    for (std::uint64_t p : path) s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
    return s;
}

/// Flat Dirichlet sample of the given size.
template <class G>
std::vector<double> flat_dirichlet(std::size_t n, G& rng) {
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> v(n);
    double total = 0.0;
    for (double& x : v) {
        x = expo(rng);
        total += x;
    }
    for (double& x : v) x /= total;
    return v;
}

} // namespace morl
