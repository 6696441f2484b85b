#pragma once
#include <cstdint>
#include <random>

namespace partsim {

using RandomStream = std::mt19937_64;

// SplitMix64 step; used only to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic per-task seed from (master seed, coordinates).  Streams for
// distinct coordinates are independent for all practical purposes, and the
// derivation does not depend on scheduling order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = splitmix64(master ^ 0x6a09e667f3bcc908ULL);
    s = splitmix64(s ^ splitmix64(a ^ 0xbb67ae8584caa73bULL));
    s = splitmix64(s ^ splitmix64(b ^ 0x3c6ef372fe94f82bULL));
    return s;
}

inline RandomStream make_stream(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return RandomStream(derive_seed(master, a, b));
}

}  // namespace partsim
