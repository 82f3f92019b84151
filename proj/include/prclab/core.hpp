#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "prclab/enumeration.hpp"
#include "prclab/errors.hpp"
#include "prclab/numeric.hpp"
#include "prclab/rng.hpp"

namespace prclab {

// Finite population of N points, identified by the indices 0..N-1.
struct PointSet {
    int size = 0;

    explicit PointSet(int n) : size(n) {
        if (n < 2) throw InvalidSizeError("a point set needs at least 2 points, got " + std::to_string(n));
    }

    std::vector<int> ids() const {
        std::vector<int> v(static_cast<std::size_t>(size));
        std::iota(v.begin(), v.end(), 0);
        return v;
    }
};

// Disjoint train/test split of {0..N-1}; both sides sorted ascending.
struct Partition {
    std::vector<int> train;
    std::vector<int> test;

    int train_size() const { return static_cast<int>(train.size()); }
    int test_size() const { return static_cast<int>(test.size()); }
    int population() const { return train_size() + test_size(); }

    // Checks disjointness, coverage of {0..n-1}, and nonempty sides.
    void validate(int n) const {
        if (train.empty() || test.empty()) throw InvalidSizeError("partition needs nonempty train and test sides");
        if (population() != n) throw InvalidSizeError("partition does not cover the population");
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        for (const auto* side : {&train, &test}) {
            for (int i : *side) {
                if (i < 0 || i >= n) throw InvalidSizeError("partition index out of range");
                if (seen[static_cast<std::size_t>(i)]++) throw InvalidSizeError("partition sides overlap");
            }
        }
    }
};

enum class EstimationMode { exact, monte_carlo };

inline std::string to_string(EstimationMode mode) {
    return mode == EstimationMode::exact ? "exact" : "monte_carlo";
}

// Shared estimator configuration. Identical (config, inputs) yield bit-identical
// results; `workers` is part of that contract and is recorded in every report.
struct EstimationConfig {
    EstimationMode mode = EstimationMode::exact;
    std::uint64_t samples = 10000;  // Monte Carlo only
    std::uint64_t seed = 0;
    int workers = 1;
    std::uint64_t enumeration_cap = kDefaultEnumerationCap;

    void validate() const {
        if (mode == EstimationMode::monte_carlo && samples == 0) {
            throw InvalidArgumentError("Monte Carlo mode needs at least one sample");
        }
        if (workers < 1) throw InvalidArgumentError("workers must be positive");
        if (enumeration_cap == 0) throw InvalidArgumentError("enumeration cap must be positive");
    }

    static EstimationConfig exact_with_cap(std::uint64_t cap = kDefaultEnumerationCap) {
        EstimationConfig cfg;
        cfg.mode = EstimationMode::exact;
        cfg.enumeration_cap = cap;
        return cfg;
    }

    static EstimationConfig monte_carlo_with(std::uint64_t samples, std::uint64_t seed, int workers = 1) {
        EstimationConfig cfg;
        cfg.mode = EstimationMode::monte_carlo;
        cfg.samples = samples;
        cfg.seed = seed;
        cfg.workers = workers;
        return cfg;
    }
};

enum class SignKind { rademacher, balanced, transductive };

// Sign draw over {-1,0,+1}. Which values are allowed depends on the kind:
// rademacher forbids zeros, balanced additionally requires an even length and
// zero sum, transductive permits zeros.
struct SignVector {
    std::vector<int> entries;
    SignKind kind = SignKind::rademacher;

    int length() const { return static_cast<int>(entries.size()); }

    int sum() const { return std::accumulate(entries.begin(), entries.end(), 0); }

    void validate() const {
        for (int e : entries) {
            if (e < -1 || e > 1) throw InvalidArgumentError("sign entries must lie in {-1,0,+1}");
            if (e == 0 && kind != SignKind::transductive) {
                throw InvalidArgumentError("zero entries are only allowed in transductive sign vectors");
            }
        }
        if (kind == SignKind::balanced) {
            if (length() % 2 != 0) throw ParityError("balanced sign vectors must have even length");
            if (sum() != 0) throw InvalidArgumentError("balanced sign vectors must sum to zero");
        }
    }
};

// Uniform size-m train subset of {0..N-1} with the complement as test.
// All C(N, m) outcomes are equiprobable; consumes exactly m index draws.
inline Partition sample_partition(int population, int train_size, RngState& rng) {
    if (train_size <= 0 || train_size >= population) {
        throw InvalidSizeError("train size must satisfy 1 <= m < N, got m=" + std::to_string(train_size) +
                               " N=" + std::to_string(population));
    }
    std::vector<int> scratch(static_cast<std::size_t>(population));
    std::iota(scratch.begin(), scratch.end(), 0);
    partial_shuffle(scratch, train_size, rng);

    Partition part;
    part.train.assign(scratch.begin(), scratch.begin() + train_size);
    std::sort(part.train.begin(), part.train.end());
    part.test = sorted_complement(population, part.train);
    return part;
}

// Arithmetic mean of the selected entries (pairwise summation).
inline double average_on_subset(std::span<const double> values, std::span<const int> subset) {
    if (subset.empty()) throw InvalidArgumentError("cannot average over an empty subset");
    PairwiseAccumulator acc;
    for (int i : subset) {
        if (i < 0 || static_cast<std::size_t>(i) >= values.size()) {
            throw InvalidArgumentError("subset index out of range");
        }
        acc.add(values[static_cast<std::size_t>(i)]);
    }
    return acc.total() / static_cast<double>(subset.size());
}

}  // namespace prclab
