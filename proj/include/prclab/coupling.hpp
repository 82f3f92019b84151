#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "prclab/core.hpp"
#include "prclab/enumeration.hpp"
#include "prclab/errors.hpp"
#include "prclab/numeric.hpp"
#include "prclab/rng.hpp"

namespace prclab {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Exact C(n, k) without overflow.
inline BigInt exact_binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt res = 1;
    for (int i = 1; i <= k; ++i) {
        res *= n - k + i;
        res /= i;
    }
    return res;
}

// Nearest-balanced projection data of a +-1 vector v of even length m: the
// excess q = sum v_i, the positions carrying the majority sign, and the number
// of balanced vectors at minimal Hamming distance, C((m+|q|)/2, |q|/2).
// Those candidates are exactly the vectors obtained by flipping |q|/2 of the
// majority-sign entries; the candidate set itself is never materialized.
struct BalancedProjection {
    int excess = 0;
    std::uint64_t candidate_count = 1;
    std::vector<int> majority_positions;
};

inline BalancedProjection balanced_projection(const SignVector& v) {
    const int m = v.length();
    if (m <= 0 || m % 2 != 0) throw ParityError("balanced projection needs a nonempty even-length vector");
    for (int e : v.entries) {
        if (e == 0) throw InvalidArgumentError("balanced projection needs entries in {-1,+1}");
    }
    BalancedProjection proj;
    proj.excess = v.sum();
    if (proj.excess == 0) return proj;
    const int majority_sign = proj.excess > 0 ? +1 : -1;
    for (int i = 0; i < m; ++i) {
        if (v.entries[static_cast<std::size_t>(i)] == majority_sign) proj.majority_positions.push_back(i);
    }
    const int majority = static_cast<int>(proj.majority_positions.size());
    const int flips = std::abs(proj.excess) / 2;
    proj.candidate_count = binomial_capped(majority, flips, UINT64_MAX - 1);
    return proj;
}

// Randomized map onto the balanced vectors: already-balanced input is returned
// unchanged; otherwise a uniformly chosen set of |q|/2 majority-sign entries is
// flipped. Consumes the caller's rng only for the tie-break choice.
inline SignVector couple(const SignVector& v, RngState& rng) {
    const auto proj = balanced_projection(v);
    SignVector out;
    out.entries = v.entries;
    out.kind = SignKind::balanced;
    if (proj.excess == 0) return out;

    std::vector<int> candidates = proj.majority_positions;
    const int flips = std::abs(proj.excess) / 2;
    partial_shuffle(candidates, flips, rng);
    for (int i = 0; i < flips; ++i) {
        auto& entry = out.entries[static_cast<std::size_t>(candidates[static_cast<std::size_t>(i)])];
        entry = -entry;
    }
    return out;
}

// Balanced vector of length m from the bitmask of its +1 positions.
inline SignVector balanced_vector_from_mask(int m, std::uint32_t mask) {
    SignVector v;
    v.kind = SignKind::balanced;
    v.entries.resize(static_cast<std::size_t>(m), -1);
    for (int i = 0; i < m; ++i) {
        if (mask >> i & 1) v.entries[static_cast<std::size_t>(i)] = +1;
    }
    return v;
}

inline std::uint32_t mask_from_sign_vector(const SignVector& v) {
    std::uint32_t mask = 0;
    for (int i = 0; i < v.length(); ++i) {
        if (v.entries[static_cast<std::size_t>(i)] > 0) mask |= std::uint32_t{1} << i;
    }
    return mask;
}

// Full distribution of couple() over a uniform +-1 input vector, computed in
// exact rational arithmetic: P(e) = sum_v 2^-m [e in T(v)] / |T(v)|.
struct CouplingDistribution {
    int m = 0;
    // (mask of +1 positions, probability), ascending by mask
    std::vector<std::pair<std::uint32_t, double>> probabilities;
    bool exactly_uniform = false;  // each entry equals 1 / C(m, m/2) as a rational
};

inline CouplingDistribution coupling_distribution(int m, std::uint64_t cap = kDefaultEnumerationCap) {
    if (m <= 0 || m % 2 != 0) throw ParityError("coupling distribution needs an even positive length");
    if (m >= 30) throw InvalidSizeError("coupling distribution length too large");
    ensure_enumerable(OutcomeSpace::sign_vectors, m, 0, cap);
    ensure_enumerable(OutcomeSpace::balanced_vectors, m, 0, cap);

    const std::uint32_t total = std::uint32_t{1} << m;
    const BigInt pow2m = BigInt(1) << m;
    std::map<std::uint32_t, BigRational> dist;

    std::vector<int> bit_positions;
    for (std::uint32_t vmask = 0; vmask < total; ++vmask) {
        const int plus = std::popcount(vmask);
        const int excess = 2 * plus - m;
        if (excess == 0) {
            dist[vmask] += BigRational(1, pow2m);
            continue;
        }
        const int flips = std::abs(excess) / 2;
        bit_positions.clear();
        if (excess > 0) {
            for (int i = 0; i < m; ++i) {
                if (vmask >> i & 1) bit_positions.push_back(i);
            }
        } else {
            for (int i = 0; i < m; ++i) {
                if (!(vmask >> i & 1)) bit_positions.push_back(i);
            }
        }
        const BigInt candidates = exact_binomial(static_cast<int>(bit_positions.size()), flips);
        const BigRational weight(1, pow2m * candidates);
        for_each_subset(static_cast<int>(bit_positions.size()), flips, [&](std::span<const int> chosen) {
            std::uint32_t emask = vmask;
            for (int c : chosen) {
                emask ^= std::uint32_t{1} << bit_positions[static_cast<std::size_t>(c)];
            }
            dist[emask] += weight;
        });
    }

    const BigRational uniform(1, exact_binomial(m, m / 2));
    CouplingDistribution out;
    out.m = m;
    out.exactly_uniform = true;
    out.probabilities.reserve(dist.size());
    for (const auto& [mask, prob] : dist) {
        if (prob != uniform) out.exactly_uniform = false;
        out.probabilities.emplace_back(mask, prob.convert_to<double>());
    }
    return out;
}

// Conditional expectation E[eps_q | couple(eps) = e] for a balanced target e,
// by exact weighted enumeration of every (input vector, tie-break) pair, next to
// the closed form (1 - 2^-m C(m, m/2)) e_q and its floor (1 - 2 (2 pi m)^-1/2) e_q.
struct ConditionalSignExpectation {
    double enumerated = 0.0;
    double closed_form = 0.0;
    double lower_bound = 0.0;
    BigRational enumerated_rational;
    BigRational closed_form_rational;
};

inline ConditionalSignExpectation conditional_sign_expectation(int m, int coord, const SignVector& target,
                                                               std::uint64_t cap = kDefaultEnumerationCap) {
    if (m <= 0 || m % 2 != 0) throw ParityError("conditional sign expectation needs an even positive length");
    if (m >= 30) throw InvalidSizeError("conditional sign expectation length too large");
    if (coord < 0 || coord >= m) throw InvalidArgumentError("coordinate out of range");
    if (target.length() != m) throw InvalidArgumentError("target length mismatch");
    target.validate();
    if (target.kind != SignKind::balanced) throw InvalidArgumentError("target must be a balanced sign vector");
    ensure_enumerable(OutcomeSpace::sign_vectors, m, 0, cap);

    const std::uint32_t emask = mask_from_sign_vector(target);
    const std::uint32_t total = std::uint32_t{1} << m;
    // common factor 2^-m cancels between numerator and normalizer
    BigRational numerator = 0;
    BigRational normalizer = 0;
    for (std::uint32_t vmask = 0; vmask < total; ++vmask) {
        const int plus = std::popcount(vmask);
        const int excess = 2 * plus - m;
        BigRational weight;
        if (excess == 0) {
            if (vmask != emask) continue;
            weight = 1;
        } else if (excess > 0) {
            // e reachable iff it keeps all of v's -1 entries: emask subset of vmask
            if ((emask & ~vmask) != 0) continue;
            weight = BigRational(1, exact_binomial(plus, excess / 2));
        } else {
            if ((vmask & ~emask) != 0) continue;
            weight = BigRational(1, exact_binomial(m - plus, -excess / 2));
        }
        normalizer += weight;
        const int sign = (vmask >> coord & 1) ? +1 : -1;
        numerator += sign * weight;
    }
    if (normalizer == 0) throw InvalidArgumentError("target is unreachable, which contradicts the coupling support");

    ConditionalSignExpectation out;
    out.enumerated_rational = numerator / normalizer;
    out.closed_form_rational =
        (BigRational(1) - BigRational(exact_binomial(m, m / 2), BigInt(1) << m)) *
        target.entries[static_cast<std::size_t>(coord)];
    out.enumerated = out.enumerated_rational.convert_to<double>();
    out.closed_form = out.closed_form_rational.convert_to<double>();
    out.lower_bound = (1.0 - 2.0 / std::sqrt(2.0 * std::numbers::pi * m)) *
                      target.entries[static_cast<std::size_t>(coord)];
    return out;
}

// Sum of C(n-1, n-j) / C(n+j, j) over j = 1..n in exact rational arithmetic.
// Evaluates to 1/2 for every n >= 1.
inline BigRational binomial_ratio_series(int n) {
    if (n < 1) throw InvalidSizeError("series needs n >= 1");
    BigRational sum = 0;
    for (int j = 1; j <= n; ++j) {
        sum += BigRational(exact_binomial(n - 1, n - j), exact_binomial(n + j, j));
    }
    return sum;
}

// Exact first absolute moment of a +-1 sign sum, E|sum eps_i|, by enumeration,
// with its classical bracket sqrt(m/2) <= E|S| <= sqrt(m).
struct KhinchinBounds {
    double expectation = 0.0;
    double upper_bound = 0.0;
    double lower_bound = 0.0;
};

inline KhinchinBounds khinchin_check(int m, std::uint64_t cap = kDefaultEnumerationCap) {
    if (m <= 0 || m % 2 != 0) throw ParityError("khinchin check needs an even positive length");
    if (m >= 62) throw InvalidSizeError("khinchin check length too large");
    ensure_enumerable(OutcomeSpace::sign_vectors, m, 0, cap);
    const std::uint64_t total = std::uint64_t{1} << m;
    std::uint64_t abs_sum = 0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        const int s = 2 * std::popcount(mask) - m;
        abs_sum += static_cast<std::uint64_t>(std::abs(s));
    }
    KhinchinBounds out;
    out.expectation = static_cast<double>(abs_sum) / static_cast<double>(total);
    out.upper_bound = std::sqrt(static_cast<double>(m));
    out.lower_bound = std::sqrt(static_cast<double>(m) / 2.0);
    return out;
}

}  // namespace prclab
