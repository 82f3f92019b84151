#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "prclab/core.hpp"
#include "prclab/enumeration.hpp"
#include "prclab/errors.hpp"
#include "prclab/function_class.hpp"
#include "prclab/numeric.hpp"
#include "prclab/rng.hpp"

namespace prclab {

// Numeric result of a complexity estimator plus everything needed to reproduce
// it. In exact mode std_error is 0 and samples is the full enumeration count.
struct ComplexityEstimate {
    double value = 0.0;
    double std_error = 0.0;
    EstimationMode method = EstimationMode::exact;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    int workers = 1;
    bool abs_variant = false;
    std::map<std::string, double> params;
};

namespace detail {

// Indexed pairwise sum without allocation; fetch(i) supplies addend i.
template <class Fetch>
double pairwise_sum_n(std::size_t n, Fetch&& fetch, std::size_t offset = 0) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += fetch(offset + i);
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum_n(half, fetch, offset) + pairwise_sum_n(n - half, fetch, offset + half);
}

// Dense row-major copy of the class restricted to the given columns.
inline std::vector<double> restrict_columns(const FunctionClass& cls, std::span<const int> subset) {
    for (int i : subset) {
        if (i < 0 || i >= cls.num_points()) throw InvalidArgumentError("subset index out of range");
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(cls.num_functions()) * subset.size());
    for (int f = 0; f < cls.num_functions(); ++f) {
        for (int i : subset) out.push_back(cls.value(f, i));
    }
    return out;
}

// Row sums of a dense row-major matrix (pairwise per row).
inline std::vector<double> row_totals(const std::vector<double>& vals, int rows, int cols) {
    std::vector<double> totals(static_cast<std::size_t>(rows));
    for (int f = 0; f < rows; ++f) {
        const double* row = vals.data() + static_cast<std::size_t>(f) * static_cast<std::size_t>(cols);
        totals[static_cast<std::size_t>(f)] =
            pairwise_sum_n(static_cast<std::size_t>(cols), [row](std::size_t i) { return row[i]; });
    }
    return totals;
}

// sup over rows of sum_i signs[i] * vals[f][i], optionally of its absolute value.
inline double sup_signed_sum(const std::vector<double>& vals, int rows, int cols, std::span<const int> signs,
                             bool abs_variant) {
    double best = -std::numeric_limits<double>::infinity();
    for (int f = 0; f < rows; ++f) {
        const double* row = vals.data() + static_cast<std::size_t>(f) * static_cast<std::size_t>(cols);
        double s = pairwise_sum_n(static_cast<std::size_t>(cols),
                                  [row, signs](std::size_t i) { return signs[i] * row[i]; });
        if (abs_variant) s = std::abs(s);
        if (s > best) best = s;
    }
    return best;
}

// sup over rows of mean(complement) - mean(chosen), where `chosen` lists column
// positions of the subtracted side and totals holds full row sums.
inline double sup_mean_gap(const std::vector<double>& vals, const std::vector<double>& totals, int rows, int cols,
                           std::span<const int> chosen, bool abs_variant) {
    const auto n = static_cast<double>(chosen.size());
    const auto k = static_cast<double>(cols) - n;
    double best = -std::numeric_limits<double>::infinity();
    for (int f = 0; f < rows; ++f) {
        const double* row = vals.data() + static_cast<std::size_t>(f) * static_cast<std::size_t>(cols);
        const double sum_chosen = pairwise_sum_n(
            chosen.size(), [row, chosen](std::size_t i) { return row[chosen[i]]; });
        double gap = (totals[static_cast<std::size_t>(f)] - sum_chosen) / k - sum_chosen / n;
        if (abs_variant) gap = std::abs(gap);
        if (gap > best) best = gap;
    }
    return best;
}

struct McMoments {
    double mean = 0.0;
    double std_error = 0.0;
};

// Monte Carlo driver. Worker w owns the contiguous sample range
// [w*S/W, (w+1)*S/W) and the substream seeded by substream_seed(seed, w);
// partial sums merge in worker order, so results depend only on
// (seed, workers, samples), never on scheduling.
template <class SamplerFactory>
McMoments run_monte_carlo(const EstimationConfig& cfg, SamplerFactory&& make_sampler) {
    const std::uint64_t total = cfg.samples;
    const int workers = cfg.workers;
    std::vector<double> sums(static_cast<std::size_t>(workers), 0.0);
    std::vector<double> sum_squares(static_cast<std::size_t>(workers), 0.0);
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));

    auto run_worker = [&](int w) {
        try {
            RngState rng(substream_seed(cfg.seed, static_cast<std::uint64_t>(w)));
            auto sampler = make_sampler(w);
            const std::uint64_t lo = total * static_cast<std::uint64_t>(w) / static_cast<std::uint64_t>(workers);
            const std::uint64_t hi = total * static_cast<std::uint64_t>(w + 1) / static_cast<std::uint64_t>(workers);
            PairwiseAccumulator sum;
            PairwiseAccumulator sum_sq;
            for (std::uint64_t s = lo; s < hi; ++s) {
                const double v = sampler(rng);
                sum.add(v);
                sum_sq.add(v * v);
            }
            sums[static_cast<std::size_t>(w)] = sum.total();
            sum_squares[static_cast<std::size_t>(w)] = sum_sq.total();
        } catch (...) {
            failures[static_cast<std::size_t>(w)] = std::current_exception();
        }
    };

    if (workers == 1) {
        run_worker(0);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) threads.emplace_back(run_worker, w);
        for (auto& t : threads) t.join();
    }
    for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }

    double sum = 0.0;
    double sum_sq = 0.0;
    for (int w = 0; w < workers; ++w) {
        sum += sums[static_cast<std::size_t>(w)];
        sum_sq += sum_squares[static_cast<std::size_t>(w)];
    }
    McMoments out;
    out.mean = sum / static_cast<double>(total);
    if (total >= 2) {
        const double var = (sum_sq - sum * sum / static_cast<double>(total)) / static_cast<double>(total - 1);
        out.std_error = var > 0.0 ? std::sqrt(var / static_cast<double>(total)) : 0.0;
    }
    return out;
}

inline ComplexityEstimate make_estimate(const EstimationConfig& cfg, double value, double std_error,
                                        std::uint64_t samples, bool abs_variant,
                                        std::map<std::string, double> params) {
    ComplexityEstimate est;
    est.value = value;
    est.std_error = std_error;
    est.method = cfg.mode;
    est.samples = samples;
    est.seed = cfg.seed;
    est.workers = cfg.workers;
    est.abs_variant = abs_variant;
    est.params = std::move(params);
    return est;
}

}  // namespace detail

// Conditional Rademacher complexity of the class on the given points:
// E over i.i.d. +-1 signs of (2/m) sup_f sum_i eps_i f(z_i). The subset may
// contain repeated indices (needed for with-replacement resampling).
// abs_variant applies |.| to the inner sum before the sup.
inline ComplexityEstimate rademacher(const FunctionClass& cls, std::span<const int> subset,
                                     const EstimationConfig& cfg, bool abs_variant = false) {
    cfg.validate();
    const int m = static_cast<int>(subset.size());
    if (m < 1) throw InvalidSizeError("Rademacher complexity needs a nonempty subset");
    const auto vals = detail::restrict_columns(cls, subset);
    const int rows = cls.num_functions();
    const double scale = 2.0 / static_cast<double>(m);
    std::map<std::string, double> params{{"m", static_cast<double>(m)}};

    if (cfg.mode == EstimationMode::exact) {
        const std::uint64_t count = ensure_enumerable(OutcomeSpace::sign_vectors, m, 0, cfg.enumeration_cap);
        PairwiseAccumulator acc;
        for_each_sign_vector(m, [&](std::span<const int> signs) {
            acc.add(detail::sup_signed_sum(vals, rows, m, signs, abs_variant));
        });
        const double value = scale * (acc.total() / static_cast<double>(count));
        return detail::make_estimate(cfg, value, 0.0, count, abs_variant, std::move(params));
    }

    auto factory = [&](int) {
        return [&vals, rows, m, scale, abs_variant, signs = std::vector<int>(static_cast<std::size_t>(m))](
                   RngState& rng) mutable {
            for (int i = 0; i < m; ++i) signs[static_cast<std::size_t>(i)] = rng.next_sign();
            return scale * detail::sup_signed_sum(vals, rows, m, signs, abs_variant);
        };
    };
    const auto moments = detail::run_monte_carlo(cfg, factory);
    return detail::make_estimate(cfg, moments.mean, moments.std_error, cfg.samples, abs_variant, std::move(params));
}

// Permutational Rademacher complexity of the class on the given points:
// E over uniform size-n subsets Z_n of the subset of
// sup_f (mean over the complement Z_k - mean over Z_n), k = m - n.
inline ComplexityEstimate prc(const FunctionClass& cls, std::span<const int> subset, int n,
                              const EstimationConfig& cfg, bool abs_variant = false) {
    cfg.validate();
    const int m = static_cast<int>(subset.size());
    if (m < 2) throw InvalidSizeError("PRC needs a subset of at least 2 points");
    if (n < 1 || n > m - 1) {
        throw InvalidSizeError("PRC split size must satisfy 1 <= n <= m-1, got n=" + std::to_string(n) +
                               " m=" + std::to_string(m));
    }
    const auto vals = detail::restrict_columns(cls, subset);
    const int rows = cls.num_functions();
    const auto totals = detail::row_totals(vals, rows, m);
    std::map<std::string, double> params{{"m", static_cast<double>(m)}, {"n", static_cast<double>(n)}};

    if (cfg.mode == EstimationMode::exact) {
        const std::uint64_t count = ensure_enumerable(OutcomeSpace::subsets, m, n, cfg.enumeration_cap);
        PairwiseAccumulator acc;
        for_each_subset(m, n, [&](std::span<const int> chosen) {
            acc.add(detail::sup_mean_gap(vals, totals, rows, m, chosen, abs_variant));
        });
        const double value = acc.total() / static_cast<double>(count);
        return detail::make_estimate(cfg, value, 0.0, count, abs_variant, std::move(params));
    }

    auto factory = [&](int) {
        std::vector<int> positions(static_cast<std::size_t>(m));
        std::iota(positions.begin(), positions.end(), 0);
        return [&vals, &totals, rows, m, n, abs_variant, positions](RngState& rng) mutable {
            partial_shuffle(positions, n, rng);
            const std::span<const int> chosen(positions.data(), static_cast<std::size_t>(n));
            return detail::sup_mean_gap(vals, totals, rows, m, chosen, abs_variant);
        };
    };
    const auto moments = detail::run_monte_carlo(cfg, factory);
    return detail::make_estimate(cfg, moments.mean, moments.std_error, cfg.samples, abs_variant, std::move(params));
}

// Transductive Rademacher complexity on the full point set of the class:
// (1/m + 1/u) E over i.i.d. ternary signs (+1, -1 with probability p each,
// 0 otherwise) of sup_f sum_i sigma_i f(z_i). Requires m + u = N.
inline ComplexityEstimate trc(const FunctionClass& cls, int m, int u, double p, const EstimationConfig& cfg) {
    cfg.validate();
    const int total_points = cls.num_points();
    if (m < 1 || u < 1 || m + u != total_points) {
        throw InvalidSizeError("TRC needs m >= 1, u >= 1, m + u = N");
    }
    if (!(p >= 0.0 && p <= 0.5)) throw InvalidArgumentError("TRC probability p must lie in [0, 1/2]");
    const auto all = cls.all_points();
    const auto vals = detail::restrict_columns(cls, all);
    const int rows = cls.num_functions();
    const double scale = 1.0 / static_cast<double>(m) + 1.0 / static_cast<double>(u);
    std::map<std::string, double> params{{"N", static_cast<double>(total_points)},
                                         {"m", static_cast<double>(m)},
                                         {"u", static_cast<double>(u)},
                                         {"p", p}};

    if (cfg.mode == EstimationMode::exact) {
        const std::uint64_t count = ensure_enumerable(OutcomeSpace::ternary_vectors, total_points, 0,
                                                      cfg.enumeration_cap);
        // product weights p^(nonzeros) * (1-2p)^(zeros); they sum to 1 across outcomes
        std::vector<double> pow_p(static_cast<std::size_t>(total_points) + 1, 1.0);
        std::vector<double> pow_z(static_cast<std::size_t>(total_points) + 1, 1.0);
        for (int j = 1; j <= total_points; ++j) {
            pow_p[static_cast<std::size_t>(j)] = pow_p[static_cast<std::size_t>(j - 1)] * p;
            pow_z[static_cast<std::size_t>(j)] = pow_z[static_cast<std::size_t>(j - 1)] * (1.0 - 2.0 * p);
        }
        PairwiseAccumulator acc;
        for_each_ternary_vector(total_points, [&](std::span<const int> signs) {
            int nonzeros = 0;
            for (int s : signs) nonzeros += (s != 0);
            const double weight = pow_p[static_cast<std::size_t>(nonzeros)] *
                                  pow_z[static_cast<std::size_t>(total_points - nonzeros)];
            if (weight == 0.0) return;
            acc.add(weight * detail::sup_signed_sum(vals, rows, total_points, signs, false));
        });
        return detail::make_estimate(cfg, scale * acc.total(), 0.0, count, false, std::move(params));
    }

    auto factory = [&](int) {
        return [&vals, rows, total_points, p, scale,
                signs = std::vector<int>(static_cast<std::size_t>(total_points))](RngState& rng) mutable {
            for (int i = 0; i < total_points; ++i) {
                const double x = rng.next_double01();
                signs[static_cast<std::size_t>(i)] = x < p ? +1 : (x < 2.0 * p ? -1 : 0);
            }
            return scale * detail::sup_signed_sum(vals, rows, total_points, signs, false);
        };
    };
    const auto moments = detail::run_monte_carlo(cfg, factory);
    return detail::make_estimate(cfg, moments.mean, moments.std_error, cfg.samples, false, std::move(params));
}

// Maximal discrepancy of the class for one fixed ordering of an even-size subset:
// sup_f (mean over the first half - mean over the second half).
inline double max_discrepancy(const FunctionClass& cls, std::span<const int> ordered_subset) {
    const int m = static_cast<int>(ordered_subset.size());
    if (m < 2) throw InvalidSizeError("maximal discrepancy needs at least 2 points");
    if (m % 2 != 0) throw ParityError("maximal discrepancy needs an even subset size, got " + std::to_string(m));
    const auto vals = detail::restrict_columns(cls, ordered_subset);
    const int rows = cls.num_functions();
    const int half = m / 2;
    double best = -std::numeric_limits<double>::infinity();
    for (int f = 0; f < rows; ++f) {
        const double* row = vals.data() + static_cast<std::size_t>(f) * static_cast<std::size_t>(m);
        const double first = detail::pairwise_sum_n(static_cast<std::size_t>(half),
                                                    [row](std::size_t i) { return row[i]; });
        const double second = detail::pairwise_sum_n(static_cast<std::size_t>(half),
                                                     [row, half](std::size_t i) { return row[i + static_cast<std::size_t>(half)]; });
        best = std::max(best, (first - second) / static_cast<double>(half));
    }
    return best;
}

// Average of max_discrepancy over the balanced first-half choices of the subset:
// exact mode enumerates all C(m, m/2) choices, Monte Carlo samples them uniformly.
inline ComplexityEstimate mean_discrepancy(const FunctionClass& cls, std::span<const int> subset,
                                           const EstimationConfig& cfg) {
    cfg.validate();
    const int m = static_cast<int>(subset.size());
    if (m < 2) throw InvalidSizeError("mean discrepancy needs at least 2 points");
    if (m % 2 != 0) throw ParityError("mean discrepancy needs an even subset size, got " + std::to_string(m));
    const int half = m / 2;
    const auto vals = detail::restrict_columns(cls, subset);
    const int rows = cls.num_functions();
    const auto totals = detail::row_totals(vals, rows, m);
    std::map<std::string, double> params{{"m", static_cast<double>(m)}};

    // first-half sum F, second-half sum T - F: gap = (F - (T - F)) / half
    auto gap_for_first_half = [&](std::span<const int> first_positions) {
        double best = -std::numeric_limits<double>::infinity();
        for (int f = 0; f < rows; ++f) {
            const double* row = vals.data() + static_cast<std::size_t>(f) * static_cast<std::size_t>(m);
            const double first = detail::pairwise_sum_n(
                first_positions.size(), [row, first_positions](std::size_t i) { return row[first_positions[i]]; });
            const double gap = (first - (totals[static_cast<std::size_t>(f)] - first)) / static_cast<double>(half);
            if (gap > best) best = gap;
        }
        return best;
    };

    if (cfg.mode == EstimationMode::exact) {
        const std::uint64_t count = ensure_enumerable(OutcomeSpace::balanced_vectors, m, 0, cfg.enumeration_cap);
        PairwiseAccumulator acc;
        for_each_subset(m, half, [&](std::span<const int> first_positions) { acc.add(gap_for_first_half(first_positions)); });
        const double value = acc.total() / static_cast<double>(count);
        return detail::make_estimate(cfg, value, 0.0, count, false, std::move(params));
    }

    auto factory = [&](int) {
        std::vector<int> positions(static_cast<std::size_t>(m));
        std::iota(positions.begin(), positions.end(), 0);
        return [gap_for_first_half, half, positions](RngState& rng) mutable {
            partial_shuffle(positions, half, rng);
            return gap_for_first_half(std::span<const int>(positions.data(), static_cast<std::size_t>(half)));
        };
    };
    const auto moments = detail::run_monte_carlo(cfg, factory);
    return detail::make_estimate(cfg, moments.mean, moments.std_error, cfg.samples, false, std::move(params));
}

// Expected supremum of the two-sample mean gap under sampling without
// replacement: E over uniform size-m train subsets of the class's full point set
// of sup_f (mean on the test complement - mean on the train set).
inline ComplexityEstimate empirical_process_sup(const FunctionClass& cls, int train_size,
                                                const EstimationConfig& cfg, bool abs_variant = false) {
    cfg.validate();
    const int total_points = cls.num_points();
    if (train_size < 1 || train_size >= total_points) {
        throw InvalidSizeError("train size must satisfy 1 <= m < N");
    }
    const auto all = cls.all_points();
    const auto vals = detail::restrict_columns(cls, all);
    const int rows = cls.num_functions();
    const auto totals = detail::row_totals(vals, rows, total_points);
    const int test_size = total_points - train_size;
    std::map<std::string, double> params{{"N", static_cast<double>(total_points)},
                                         {"m", static_cast<double>(train_size)},
                                         {"u", static_cast<double>(test_size)}};

    auto gap_for_train = [&](std::span<const int> train) {
        double best = -std::numeric_limits<double>::infinity();
        for (int f = 0; f < rows; ++f) {
            const double* row = vals.data() + static_cast<std::size_t>(f) * static_cast<std::size_t>(total_points);
            const double train_sum =
                detail::pairwise_sum_n(train.size(), [row, train](std::size_t i) { return row[train[i]]; });
            double gap = (totals[static_cast<std::size_t>(f)] - train_sum) / static_cast<double>(test_size) -
                         train_sum / static_cast<double>(train_size);
            if (abs_variant) gap = std::abs(gap);
            if (gap > best) best = gap;
        }
        return best;
    };

    if (cfg.mode == EstimationMode::exact) {
        const std::uint64_t count = ensure_enumerable(OutcomeSpace::subsets, total_points, train_size,
                                                      cfg.enumeration_cap);
        PairwiseAccumulator acc;
        for_each_subset(total_points, train_size, [&](std::span<const int> train) { acc.add(gap_for_train(train)); });
        const double value = acc.total() / static_cast<double>(count);
        return detail::make_estimate(cfg, value, 0.0, count, abs_variant, std::move(params));
    }

    auto factory = [&](int) {
        std::vector<int> positions(static_cast<std::size_t>(total_points));
        std::iota(positions.begin(), positions.end(), 0);
        return [gap_for_train, train_size, positions](RngState& rng) mutable {
            partial_shuffle(positions, train_size, rng);
            return gap_for_train(std::span<const int>(positions.data(), static_cast<std::size_t>(train_size)));
        };
    };
    const auto moments = detail::run_monte_carlo(cfg, factory);
    return detail::make_estimate(cfg, moments.mean, moments.std_error, cfg.samples, abs_variant, std::move(params));
}

}  // namespace prclab
