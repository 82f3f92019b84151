#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace prclab {

// SplitMix64 finalizer. Used to derive worker substream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed of worker w's substream under a master seed. Monte Carlo output is a pure
// function of (seed, workers, samples); changing `workers` changes the stream
// split, and every report records it.
inline std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t worker) {
    return splitmix64(master_seed + 0x9e3779b97f4a7c15ULL * (worker + 1));
}

// Deterministic RNG. std::mt19937_64 output is fully specified by the standard;
// the helpers below avoid std distributions (whose streams are implementation
// defined) so identical seeds give identical results on every platform.
class RngState {
public:
    explicit RngState(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Unbiased uniform integer in [0, n), n >= 1, by modulo rejection.
    std::uint64_t uniform_below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform double in [0, 1) with 53-bit resolution.
    double next_double01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Fair +1/-1 draw.
    int next_sign() { return (next_u64() >> 63) ? +1 : -1; }

private:
    std::mt19937_64 engine_;
};

// Moves a uniform k-subset of `scratch` into its first k slots (partial
// Fisher-Yates). Exactly uniform over subsets and O(k) swaps.
inline void partial_shuffle(std::span<int> scratch, int k, RngState& rng) {
    const auto n = static_cast<std::uint64_t>(scratch.size());
    for (int i = 0; i < k; ++i) {
        const auto j = static_cast<std::size_t>(i + rng.uniform_below(n - static_cast<std::uint64_t>(i)));
        std::swap(scratch[static_cast<std::size_t>(i)], scratch[j]);
    }
}

}  // namespace prclab
