#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "prclab/errors.hpp"
#include "prclab/numeric.hpp"

namespace prclab {

// The four exhaustive outcome spaces backing exact mode:
//   subsets(n, k)         all k-subsets of {0..n-1}            C(n, k) outcomes
//   sign_vectors(m)       {-1,+1}^m                            2^m outcomes
//   balanced_vectors(m)   +-1 vectors of even length m with
//                         equal counts of each sign            C(m, m/2) outcomes
//   ternary_vectors(n)    {-1,0,+1}^n                          3^n outcomes
enum class OutcomeSpace { subsets, sign_vectors, balanced_vectors, ternary_vectors };

// Outcome count, clamped at cap + 1. `k` is ignored by the single-parameter spaces.
inline std::uint64_t outcome_count_capped(OutcomeSpace space, int n, int k, std::uint64_t cap) {
    switch (space) {
        case OutcomeSpace::subsets:
            return binomial_capped(n, k, cap);
        case OutcomeSpace::sign_vectors:
            return pow_capped(2, n, cap);
        case OutcomeSpace::balanced_vectors:
            if (n % 2 != 0) throw ParityError("balanced_vectors requires an even length, got " + std::to_string(n));
            return binomial_capped(n, n / 2, cap);
        case OutcomeSpace::ternary_vectors:
            return pow_capped(3, n, cap);
    }
    throw InvalidArgumentError("unknown outcome space");
}

// Validates that exact enumeration of the space fits under cap; returns the count.
inline std::uint64_t ensure_enumerable(OutcomeSpace space, int n, int k, std::uint64_t cap) {
    const std::uint64_t count = outcome_count_capped(space, n, k, cap);
    if (count > cap) {
        throw CapExceededError("exact enumeration needs more than " + std::to_string(cap) +
                               " outcomes; switch to Monte Carlo mode");
    }
    return count;
}

// All k-subsets of {0..n-1} in lexicographic order of the sorted index tuple.
// visit receives a span of k ascending indices valid only during the call.
template <class Visitor>
void for_each_subset(int n, int k, Visitor&& visit) {
    if (k < 0 || k > n) throw InvalidSizeError("subset size out of range");
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    const std::span<const int> view(idx);
    for (;;) {
        visit(view);
        int j = k - 1;
        while (j >= 0 && idx[static_cast<std::size_t>(j)] == n - k + j) --j;
        if (j < 0) break;
        ++idx[static_cast<std::size_t>(j)];
        for (int t = j + 1; t < k; ++t) {
            idx[static_cast<std::size_t>(t)] = idx[static_cast<std::size_t>(t - 1)] + 1;
        }
    }
}

// {-1,+1}^m in binary counting order: outcome r maps bit i of r to entry i,
// bit 0 -> -1 and bit 1 -> +1.
template <class Visitor>
void for_each_sign_vector(int m, Visitor&& visit) {
    if (m < 0 || m >= 63) throw InvalidSizeError("sign vector length out of range");
    std::vector<int> entries(static_cast<std::size_t>(m), -1);
    const std::span<const int> view(entries);
    const std::uint64_t total = std::uint64_t{1} << m;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        for (int i = 0; i < m; ++i) {
            entries[static_cast<std::size_t>(i)] = (mask >> i) & 1 ? +1 : -1;
        }
        visit(view);
    }
}

// Balanced +-1 vectors of even length m: one outcome per (m/2)-subset P of
// positions, in the lexicographic subset order, with +1 on P and -1 elsewhere.
template <class Visitor>
void for_each_balanced_vector(int m, Visitor&& visit) {
    if (m <= 0) throw InvalidSizeError("balanced vector length must be positive");
    if (m % 2 != 0) throw ParityError("balanced vectors require an even length, got " + std::to_string(m));
    std::vector<int> entries(static_cast<std::size_t>(m), -1);
    const std::span<const int> view(entries);
    for_each_subset(m, m / 2, [&](std::span<const int> plus_positions) {
        std::fill(entries.begin(), entries.end(), -1);
        for (int p : plus_positions) entries[static_cast<std::size_t>(p)] = +1;
        visit(view);
    });
}

// {-1,0,+1}^n in base-3 counting order, digit at index i: 0 -> -1, 1 -> 0, 2 -> +1.
template <class Visitor>
void for_each_ternary_vector(int n, Visitor&& visit) {
    if (n < 0 || n >= 40) throw InvalidSizeError("ternary vector length out of range");
    std::vector<int> digits(static_cast<std::size_t>(n), 0);
    std::vector<int> entries(static_cast<std::size_t>(n), -1);
    const std::span<const int> view(entries);
    for (;;) {
        visit(view);
        int i = 0;
        while (i < n) {
            auto& d = digits[static_cast<std::size_t>(i)];
            if (++d < 3) {
                entries[static_cast<std::size_t>(i)] = d - 1;
                break;
            }
            d = 0;
            entries[static_cast<std::size_t>(i)] = -1;
            ++i;
        }
        if (i == n) break;
    }
}

// Ascending complement of a sorted subset of {0..n-1}.
inline std::vector<int> sorted_complement(int n, std::span<const int> subset) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(n) - subset.size());
    std::size_t j = 0;
    for (int i = 0; i < n; ++i) {
        if (j < subset.size() && subset[j] == i) {
            ++j;
        } else {
            out.push_back(i);
        }
    }
    return out;
}

}  // namespace prclab
