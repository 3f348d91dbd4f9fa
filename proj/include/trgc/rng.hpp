#ifndef TRGC_RNG_HPP
#define TRGC_RNG_HPP

#include <cstdint>
#include <random>

namespace trgc {

using Rng = std::mt19937_64;

/// Derive an independent stream seed from a base seed and a stream index
/// (splitmix64 over the combined word). Used so that experiment repetitions
/// and bootstrap replicates get reproducible, order-independent streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace trgc

#endif
