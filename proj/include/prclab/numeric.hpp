#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "prclab/errors.hpp"

namespace prclab {

// Comparison tolerances: inequalities absorb floating-point noise at 1e-9,
// identities at 1e-12.
inline constexpr double kInequalityTol = 1e-9;
inline constexpr double kIdentityTol = 1e-12;

// Default ceiling on the number of outcomes exact mode may enumerate.
inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 22;

// Streaming pairwise (cascade) summation. Level i holds the sum of a completed
// block of 2^i addends; add() merges blocks like binary-counter carries, so the
// rounding error grows with log(n) instead of n. Deterministic for a fixed
// insertion order.
class PairwiseAccumulator {
public:
    void add(double x) {
        std::uint64_t c = count_;
        std::size_t level = 0;
        while (c & 1) {
            x += levels_[level];
            c >>= 1;
            ++level;
        }
        if (level >= levels_.size()) {
            levels_.push_back(x);
        } else {
            levels_[level] = x;
        }
        ++count_;
    }

    // Folds pending blocks from fine to coarse.
    double total() const {
        double s = 0.0;
        std::uint64_t c = count_;
        for (std::size_t level = 0; c != 0; ++level, c >>= 1) {
            if (c & 1) s += levels_[level];
        }
        return s;
    }

    std::uint64_t count() const { return count_; }

private:
    std::vector<double> levels_;
    std::uint64_t count_ = 0;
};

// C(n, k), clamped: returns cap + 1 as soon as the exact value exceeds cap.
// Requires cap < 2^64 - 1; anything that would overflow 64 bits exceeds it too.
inline std::uint64_t binomial_capped(int n, int k, std::uint64_t cap) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t res = 1;
    for (int i = 1; i <= k; ++i) {
        const auto factor = static_cast<std::uint64_t>(n - k + i);
        if (res > UINT64_MAX / factor) return cap + 1;
        // res * factor is divisible by i: this is C(n-k+i, i) from C(n-k+i-1, i-1)
        res = res * factor / static_cast<std::uint64_t>(i);
        if (res > cap) return cap + 1;
    }
    return res;
}

// base^exp (base >= 1), clamped at cap + 1 without overflowing.
inline std::uint64_t pow_capped(std::uint64_t base, int exp, std::uint64_t cap) {
    std::uint64_t res = 1;
    for (int i = 0; i < exp; ++i) {
        if (res > cap / base) return cap + 1;
        res *= base;
    }
    return res;
}

}  // namespace prclab
