#pragma once

#include <cstdint>
#include <random>

namespace specshape {

/// SplitMix64 finaliser; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-derived stream key for (seed, a, b). Distinct triples give unrelated keys.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0) {
    return splitmix64(splitmix64(splitmix64(seed) ^ (a + 0x632BE59BD9B4E019ULL)) ^
                      (b + 0x85157AF5ULL));
}

/// A generator whose state depends only on (seed, a, b), never on call order elsewhere.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(stream_key(seed, a, b)),
                      static_cast<std::uint32_t>(stream_key(seed, a, b) >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
    return std::mt19937_64(seq);
}

}  // namespace specshape
