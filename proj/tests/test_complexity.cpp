#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "prclab/complexity.hpp"
#include "prclab/function_class.hpp"

using namespace prclab;
using Catch::Matchers::WithinAbs;

namespace {

// ---------------------------------------------------------------------------
// Straight-line oracles: plain bitmask/base-3 loops, kept deliberately separate
// from the library's enumeration helpers.
// ---------------------------------------------------------------------------

using Rows = std::vector<std::vector<double>>;

Rows rows_of(const FunctionClass& cls) {
    Rows rows;
    for (int f = 0; f < cls.num_functions(); ++f) rows.emplace_back(cls.row(f).begin(), cls.row(f).end());
    return rows;
}

double oracle_rademacher(const Rows& rows, bool abs_variant) {
    const int m = static_cast<int>(rows.front().size());
    const std::uint64_t total = std::uint64_t{1} << m;
    double sum = 0.0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& row : rows) {
            double s = 0.0;
            for (int i = 0; i < m; ++i) s += ((mask >> i & 1) ? 1.0 : -1.0) * row[static_cast<std::size_t>(i)];
            if (abs_variant) s = std::abs(s);
            best = std::max(best, s);
        }
        sum += best;
    }
    return (2.0 / m) * sum / static_cast<double>(total);
}

double oracle_prc(const Rows& rows, int n, bool abs_variant) {
    const int m = static_cast<int>(rows.front().size());
    const int k = m - n;
    const std::uint64_t total = std::uint64_t{1} << m;
    double sum = 0.0;
    std::uint64_t count = 0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        if (std::popcount(mask) != n) continue;
        ++count;
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& row : rows) {
            double chosen = 0.0, rest = 0.0;
            for (int i = 0; i < m; ++i) {
                if (mask >> i & 1) {
                    chosen += row[static_cast<std::size_t>(i)];
                } else {
                    rest += row[static_cast<std::size_t>(i)];
                }
            }
            double gap = rest / k - chosen / n;
            if (abs_variant) gap = std::abs(gap);
            best = std::max(best, gap);
        }
        sum += best;
    }
    return sum / static_cast<double>(count);
}

double oracle_esup(const Rows& rows, int train, bool abs_variant) {
    const int population = static_cast<int>(rows.front().size());
    const std::uint64_t total = std::uint64_t{1} << population;
    double sum = 0.0;
    std::uint64_t count = 0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        if (std::popcount(mask) != train) continue;
        ++count;
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& row : rows) {
            double tr = 0.0, te = 0.0;
            for (int i = 0; i < population; ++i) {
                if (mask >> i & 1) {
                    tr += row[static_cast<std::size_t>(i)];
                } else {
                    te += row[static_cast<std::size_t>(i)];
                }
            }
            double gap = te / (population - train) - tr / train;
            if (abs_variant) gap = std::abs(gap);
            best = std::max(best, gap);
        }
        sum += best;
    }
    return sum / static_cast<double>(count);
}

double oracle_trc(const Rows& rows, int m, int u, double p) {
    const int population = static_cast<int>(rows.front().size());
    std::vector<int> digits(static_cast<std::size_t>(population), 0);
    double sum = 0.0;
    for (;;) {
        double weight = 1.0;
        for (int d : digits) weight *= (d == 1) ? 1.0 - 2.0 * p : p;
        if (weight != 0.0) {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& row : rows) {
                double s = 0.0;
                for (int i = 0; i < population; ++i) {
                    s += (digits[static_cast<std::size_t>(i)] - 1) * row[static_cast<std::size_t>(i)];
                }
                best = std::max(best, s);
            }
            sum += weight * best;
        }
        int i = 0;
        while (i < population && ++digits[static_cast<std::size_t>(i)] == 3) {
            digits[static_cast<std::size_t>(i)] = 0;
            ++i;
        }
        if (i == population) break;
    }
    return (1.0 / m + 1.0 / u) * sum;
}

double oracle_mean_discrepancy(const Rows& rows) {
    const int m = static_cast<int>(rows.front().size());
    const int half = m / 2;
    const std::uint64_t total = std::uint64_t{1} << m;
    double sum = 0.0;
    std::uint64_t count = 0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        if (std::popcount(mask) != half) continue;
        ++count;
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& row : rows) {
            double first = 0.0, second = 0.0;
            for (int i = 0; i < m; ++i) {
                if (mask >> i & 1) {
                    first += row[static_cast<std::size_t>(i)];
                } else {
                    second += row[static_cast<std::size_t>(i)];
                }
            }
            best = std::max(best, (first - second) / half);
        }
        sum += best;
    }
    return sum / static_cast<double>(count);
}

FunctionClass test_class(std::uint64_t seed, int functions, int points) {
    RngState rng(seed);
    return random_class(functions, points, 1.0, rng);
}

const EstimationConfig kExact = EstimationConfig::exact_with_cap();

}  // namespace

TEST_CASE("rademacher: singleton constant class vanishes") {
    const FunctionClass cls({{0.7, 0.7, 0.7, 0.7}});
    const auto est = rademacher(cls, cls.all_points(), kExact);
    CHECK(est.method == EstimationMode::exact);
    CHECK(est.samples == 16);
    CHECK(est.std_error == 0.0);
    CHECK_THAT(est.value, WithinAbs(0.0, 1e-13));
}

TEST_CASE("rademacher: constant pair on 4 points hits the frozen oracle value") {
    const auto pair = tightness_classes(4);
    const auto est = rademacher(pair.constant_pair, pair.constant_pair.all_points(), kExact);
    // oracle: E max(0, (2/4) sum eps) over all 16 sign vectors
    CHECK_THAT(oracle_rademacher(rows_of(pair.constant_pair), false), WithinAbs(0.375, 1e-15));
    CHECK_THAT(est.value, WithinAbs(0.375, 1e-13));
    // bracket (2m)^(-1/2) <= value <= 2 m^(-1/2)
    CHECK(est.value >= 1.0 / std::sqrt(8.0) - 1e-12);
    CHECK(est.value <= 1.0 + 1e-12);
}

TEST_CASE("rademacher: balanced indicators match the closed form") {
    for (int m = 2; m <= 8; m += 2) {
        const auto pair = tightness_classes(m);
        const auto est = rademacher(pair.balanced_indicators, pair.balanced_indicators.all_points(), kExact);
        const double expected =
            1.0 - std::ldexp(static_cast<double>(binomial_capped(m, m / 2, UINT64_MAX - 1)), -m);
        CHECK_THAT(est.value, WithinAbs(expected, 1e-12));
    }
}

TEST_CASE("rademacher matches the oracle on random classes") {
    for (std::uint64_t seed : {11ULL, 12ULL, 13ULL}) {
        const auto cls = test_class(seed, 4, 7);
        for (const bool abs_variant : {false, true}) {
            const auto est = rademacher(cls, cls.all_points(), kExact, abs_variant);
            CHECK_THAT(est.value, WithinAbs(oracle_rademacher(rows_of(cls), abs_variant), 1e-12));
        }
    }
}

TEST_CASE("prc: constant pair and balanced indicators take their exact values") {
    for (int m = 2; m <= 8; m += 2) {
        const auto pair = tightness_classes(m);
        for (int n = 1; n <= m - 1; ++n) {
            const auto est = prc(pair.constant_pair, pair.constant_pair.all_points(), n, kExact);
            CHECK_THAT(est.value, WithinAbs(0.0, 1e-12));
        }
        const auto half = prc(pair.balanced_indicators, pair.balanced_indicators.all_points(), m / 2, kExact);
        CHECK_THAT(half.value, WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("prc: singleton classes vanish for every split size") {
    const FunctionClass cls({{0.3, -1.2, 0.8, 2.5, -0.7, 1.1}});
    for (int n = 1; n <= 5; ++n) {
        const auto est = prc(cls, cls.all_points(), n, kExact);
        CHECK_THAT(est.value, WithinAbs(0.0, 1e-13));
    }
}

TEST_CASE("prc matches the oracle on random classes for every split size") {
    for (std::uint64_t seed : {21ULL, 22ULL}) {
        // both an even and an odd point count; every n in 1..m-1 is legal
        for (int points : {7, 8}) {
            const auto cls = test_class(seed + static_cast<std::uint64_t>(points), 5, points);
            for (int n = 1; n <= points - 1; ++n) {
                for (const bool abs_variant : {false, true}) {
                    const auto est = prc(cls, cls.all_points(), n, kExact, abs_variant);
                    CHECK_THAT(est.value, WithinAbs(oracle_prc(rows_of(cls), n, abs_variant), 1e-12));
                }
            }
        }
    }
}

TEST_CASE("prc validates the split size") {
    const auto cls = test_class(31, 2, 5);
    CHECK_THROWS_AS(prc(cls, cls.all_points(), 0, kExact), InvalidSizeError);
    CHECK_THROWS_AS(prc(cls, cls.all_points(), 5, kExact), InvalidSizeError);
}

TEST_CASE("trc: degenerate parameters give zero") {
    const auto cls = test_class(41, 3, 6);
    const auto at_zero = trc(cls, 3, 3, 0.0, kExact);
    CHECK_THAT(at_zero.value, WithinAbs(0.0, 1e-15));

    const FunctionClass zero({{0.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}});
    for (double p : {0.0, 0.1, 0.25, 0.5}) {
        CHECK_THAT(trc(zero, 2, 2, p, kExact).value, WithinAbs(0.0, 1e-15));
    }
}

TEST_CASE("trc matches the oracle and rejects bad parameters") {
    const auto cls = test_class(42, 4, 5);
    for (double p : {0.1, 0.25, 0.5}) {
        const auto est = trc(cls, 2, 3, p, kExact);
        CHECK_THAT(est.value, WithinAbs(oracle_trc(rows_of(cls), 2, 3, p), 1e-12));
    }
    CHECK_THROWS_AS(trc(cls, 2, 2, 0.25, kExact), InvalidSizeError);
    CHECK_THROWS_AS(trc(cls, 2, 3, 0.75, kExact), InvalidArgumentError);
    CHECK_THROWS_AS(trc(cls, 2, 3, -0.1, kExact), InvalidArgumentError);
}

TEST_CASE("trc at p=1/4 sits between one and two conditional Rademacher complexities") {
    for (std::uint64_t seed : {51ULL, 52ULL, 53ULL}) {
        const auto cls = test_class(seed, 4, 8);
        const auto td = trc(cls, 4, 4, 0.25, kExact);
        const auto rad = rademacher(cls, cls.all_points(), kExact);
        CHECK(td.value >= rad.value - 1e-9);
        CHECK(td.value <= 2.0 * rad.value + 1e-9);
    }
}

TEST_CASE("max discrepancy on fixed orderings") {
    const FunctionClass single({{1.0, 3.0, 2.0, 0.0}});
    const std::vector<int> natural{0, 1, 2, 3};
    CHECK_THAT(max_discrepancy(single, natural), WithinAbs((1.0 + 3.0) / 2.0 - (2.0 + 0.0) / 2.0, 1e-15));

    const FunctionClass constant({{0.4, 0.4, 0.4, 0.4}});
    const std::vector<int> swapped{2, 0, 3, 1};
    CHECK_THAT(max_discrepancy(constant, natural), WithinAbs(0.0, 1e-15));
    CHECK_THAT(max_discrepancy(constant, swapped), WithinAbs(0.0, 1e-15));

    CHECK_THROWS_AS(max_discrepancy(single, std::vector<int>{0, 1, 2}), ParityError);
}

TEST_CASE("averaged discrepancy equals the half-split complexity") {
    for (std::uint64_t seed : {61ULL, 62ULL}) {
        const auto cls = test_class(seed, 5, 8);
        const auto mean_disc = mean_discrepancy(cls, cls.all_points(), kExact);
        const auto half_prc = prc(cls, cls.all_points(), 4, kExact);
        CHECK_THAT(mean_disc.value, WithinAbs(half_prc.value, 1e-12));
        CHECK_THAT(mean_disc.value, WithinAbs(oracle_mean_discrepancy(rows_of(cls)), 1e-12));

        // the same average assembled from single-ordering calls
        const int m = cls.num_points();
        double sum = 0.0;
        std::uint64_t count = 0;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
            if (std::popcount(mask) != m / 2) continue;
            std::vector<int> ordering;
            for (int i = 0; i < m; ++i) {
                if (mask >> i & 1) ordering.push_back(i);
            }
            for (int i = 0; i < m; ++i) {
                if (!(mask >> i & 1)) ordering.push_back(i);
            }
            sum += max_discrepancy(cls, ordering);
            ++count;
        }
        CHECK_THAT(sum / static_cast<double>(count), WithinAbs(mean_disc.value, 1e-12));
    }
}

TEST_CASE("empirical process supremum equals the full-set split complexity") {
    for (std::uint64_t seed : {71ULL, 72ULL}) {
        const auto cls = test_class(seed, 6, 8);
        for (int m = 1; m <= 7; ++m) {
            const auto esup = empirical_process_sup(cls, m, kExact);
            const auto split = prc(cls, cls.all_points(), m, kExact);
            CHECK_THAT(esup.value, WithinAbs(split.value, 1e-12));
            CHECK_THAT(esup.value, WithinAbs(oracle_esup(rows_of(cls), m, false), 1e-12));
        }
    }
}

TEST_CASE("empirical process supremum: special classes") {
    const FunctionClass single({{0.3, -1.2, 0.8, 2.5}});
    CHECK_THAT(empirical_process_sup(single, 2, kExact).value, WithinAbs(0.0, 1e-13));

    for (int population : {4, 6, 8}) {
        const auto pair = tightness_classes(population);
        const auto est = empirical_process_sup(pair.balanced_indicators, population / 2, kExact);
        CHECK_THAT(est.value, WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("all five quantities are nonnegative and monotone in the class") {
    for (std::uint64_t seed : {81ULL, 82ULL, 83ULL}) {
        const auto cls = test_class(seed, 3, 8);
        RngState extra_rng(seed + 1000);
        std::vector<double> extra(8);
        for (double& v : extra) v = 2.0 * extra_rng.next_double01() - 1.0;
        const auto grown = cls.with_row(extra);

        const auto all = cls.all_points();
        const double rad_small = rademacher(cls, all, kExact).value;
        const double rad_large = rademacher(grown, all, kExact).value;
        const double prc_small = prc(cls, all, 4, kExact).value;
        const double prc_large = prc(grown, all, 4, kExact).value;
        const double trc_small = trc(cls, 4, 4, 0.25, kExact).value;
        const double trc_large = trc(grown, 4, 4, 0.25, kExact).value;
        const double disc_small = mean_discrepancy(cls, all, kExact).value;
        const double disc_large = mean_discrepancy(grown, all, kExact).value;
        const double esup_small = empirical_process_sup(cls, 4, kExact).value;
        const double esup_large = empirical_process_sup(grown, 4, kExact).value;

        for (double v : {rad_small, prc_small, trc_small, disc_small, esup_small}) CHECK(v >= -1e-12);
        CHECK(rad_large >= rad_small - 1e-12);
        CHECK(prc_large >= prc_small - 1e-12);
        CHECK(trc_large >= trc_small - 1e-12);
        CHECK(disc_large >= disc_small - 1e-12);
        CHECK(esup_large >= esup_small - 1e-12);
    }
}

TEST_CASE("positive homogeneity: scaling values scales every quantity") {
    const auto cls = test_class(91, 4, 8);
    const double c = 3.5;
    const auto scaled = cls.scaled(c);
    const auto all = cls.all_points();
    CHECK_THAT(rademacher(scaled, all, kExact).value, WithinAbs(c * rademacher(cls, all, kExact).value, 1e-9));
    CHECK_THAT(prc(scaled, all, 3, kExact).value, WithinAbs(c * prc(cls, all, 3, kExact).value, 1e-9));
    CHECK_THAT(trc(scaled, 4, 4, 0.25, kExact).value, WithinAbs(c * trc(cls, 4, 4, 0.25, kExact).value, 1e-9));
    CHECK_THAT(mean_discrepancy(scaled, all, kExact).value,
               WithinAbs(c * mean_discrepancy(cls, all, kExact).value, 1e-9));
    CHECK_THAT(empirical_process_sup(scaled, 4, kExact).value,
               WithinAbs(c * empirical_process_sup(cls, 4, kExact).value, 1e-9));
}

TEST_CASE("absolute-value variants dominate the plain ones") {
    for (std::uint64_t seed : {101ULL, 102ULL}) {
        const auto cls = test_class(seed, 4, 8);
        const auto all = cls.all_points();
        CHECK(rademacher(cls, all, kExact, true).value >= rademacher(cls, all, kExact, false).value - 1e-12);
        for (int n = 1; n <= 7; ++n) {
            CHECK(prc(cls, all, n, kExact, true).value >= prc(cls, all, n, kExact, false).value - 1e-12);
        }
        CHECK(empirical_process_sup(cls, 4, kExact, true).value >=
              empirical_process_sup(cls, 4, kExact, false).value - 1e-12);
    }
}

TEST_CASE("half-split complexity and Rademacher complexity stay within the comparison bounds") {
    for (int m = 2; m <= 12; m += 2) {
        for (std::uint64_t seed : {111ULL, 112ULL}) {
            const auto cls = test_class(seed + static_cast<std::uint64_t>(m), 4, m);
            const auto all = cls.all_points();
            const double factor = 1.0 + 2.0 / (std::sqrt(2.0 * std::numbers::pi * m) - 2.0);
            for (const bool abs_variant : {false, true}) {
                const double q = prc(cls, all, m / 2, kExact, abs_variant).value;
                const double r = rademacher(cls, all, kExact, abs_variant).value;
                CHECK(q <= factor * r + 1e-12);
                CHECK(std::abs(q - r) <= 2.0 * cls.bound() / std::sqrt(static_cast<double>(m)) + 1e-12);
            }
        }
    }
}

TEST_CASE("Monte Carlo estimates agree with exact values within sampling error") {
    const auto cls = test_class(121, 5, 10);
    const auto all = cls.all_points();
    const auto cfg = EstimationConfig::monte_carlo_with(20000, 7);

    const auto exact = prc(cls, all, 5, kExact);
    const auto mc = prc(cls, all, 5, cfg);
    CHECK(mc.std_error > 0.0);
    CHECK(std::abs(mc.value - exact.value) <= 6.0 * mc.std_error);

    const auto exact_rad = rademacher(cls, all, kExact);
    const auto mc_rad = rademacher(cls, all, cfg);
    CHECK(std::abs(mc_rad.value - exact_rad.value) <= 6.0 * mc_rad.std_error);
}

TEST_CASE("Monte Carlo results are a pure function of (seed, workers)") {
    const auto cls = test_class(131, 4, 9);
    const auto all = cls.all_points();
    for (int workers : {1, 3}) {
        const auto cfg = EstimationConfig::monte_carlo_with(5000, 99, workers);
        const auto a = rademacher(cls, all, cfg);
        const auto b = rademacher(cls, all, cfg);
        CHECK(a.value == b.value);
        CHECK(a.std_error == b.std_error);
        CHECK(a.workers == workers);
    }
}

TEST_CASE("exact mode refuses enumerations beyond the cap") {
    RngState rng(141);
    const auto wide = random_class(2, 23, 1.0, rng);
    CHECK_THROWS_AS(rademacher(wide, wide.all_points(), kExact), CapExceededError);

    EstimationConfig tiny = kExact;
    tiny.enumeration_cap = 4;
    const auto cls = test_class(142, 2, 6);
    CHECK_THROWS_AS(prc(cls, cls.all_points(), 3, tiny), CapExceededError);

    RngState rng_b(143);
    const auto ternary_heavy = random_class(2, 14, 1.0, rng_b);  // 3^14 > default cap
    CHECK_THROWS_AS(trc(ternary_heavy, 7, 7, 0.25, kExact), CapExceededError);

    // Monte Carlo mode handles the same sizes
    const auto mc = trc(ternary_heavy, 7, 7, 0.25, EstimationConfig::monte_carlo_with(2000, 3));
    CHECK(mc.method == EstimationMode::monte_carlo);
    CHECK(mc.value >= -1e-12);
}
