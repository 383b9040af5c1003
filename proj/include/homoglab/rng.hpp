#pragma once

#include <cstdint>
#include <random>

namespace homoglab {

// splitmix64 step, used both as a stream seeder and to derive independent
// per-realization seeds from (master seed, indices).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s);
    s ^= a * 0x9E3779B97F4A7C15ull;
    h ^= splitmix64(s);
    s ^= b * 0xC2B2AE3D27D4EB4Full;
    h ^= splitmix64(s);
    return h;
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    std::uint64_t s = seed;
    std::seed_seq seq{splitmix64(s), splitmix64(s), splitmix64(s), splitmix64(s)};
    return std::mt19937_64(seq);
}

}  // namespace homoglab
