#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "prclab/bounds.hpp"
#include "prclab/io.hpp"

using namespace prclab;
using Catch::Matchers::WithinAbs;

namespace {

LabeledProblem binary_problem(int hypotheses, int population, std::uint64_t seed) {
    RngState rng(seed);
    LabeledProblem problem;
    problem.labels.resize(static_cast<std::size_t>(population));
    for (auto& y : problem.labels) y = rng.next_sign();
    problem.predictions.resize(static_cast<std::size_t>(hypotheses));
    for (auto& row : problem.predictions) {
        row.resize(static_cast<std::size_t>(population));
        for (auto& v : row) v = rng.next_sign();
    }
    problem.loss = LossSpec::zero_one();
    return problem;
}

Partition halves(int population) {
    Partition part;
    for (int i = 0; i < population / 2; ++i) part.train.push_back(i);
    for (int i = population / 2; i < population; ++i) part.test.push_back(i);
    return part;
}

}  // namespace

TEST_CASE("slack term formula and monotonicity") {
    // direct evaluation for N = 100, delta = 0.01
    const double expected = std::sqrt(200.0 * std::log(100.0)) / 99.5;
    CHECK_THAT(slack_term(100, 0.01, SlackScale::one), WithinAbs(expected, 1e-15));

    // vanishes as delta approaches 1
    CHECK(slack_term(100, 0.999999, SlackScale::one) < 1e-2);

    // strictly decreasing in delta
    double previous = slack_term(50, 0.01, SlackScale::one);
    for (double delta : {0.05, 0.1, 0.3, 0.6, 0.9}) {
        const double current = slack_term(50, delta, SlackScale::one);
        CHECK(current < previous);
        previous = current;
    }

    // the doubled form is exactly twice the single form at delta/2
    for (double delta : {0.02, 0.1, 0.5}) {
        CHECK_THAT(slack_term(40, delta, SlackScale::two),
                   WithinAbs(2.0 * slack_term(40, delta / 2.0, SlackScale::one), 1e-15));
    }

    CHECK_THROWS_AS(slack_term(100, 0.0, SlackScale::one), InvalidArgumentError);
    CHECK_THROWS_AS(slack_term(100, 1.0, SlackScale::one), InvalidArgumentError);
    CHECK_THROWS_AS(slack_term(7, 0.1, SlackScale::one), InvalidSizeError);
}

TEST_CASE("risk bound reports: totals, singleton class, perfect hypothesis") {
    EstimationConfig cfg = EstimationConfig::monte_carlo_with(200, 3);

    // singleton hypothesis: its split complexity is identically zero
    LabeledProblem singleton;
    singleton.labels = {+1, -1, +1, -1, +1, -1};
    singleton.predictions = {{+1, +1, -1, -1, +1, -1}};
    singleton.loss = LossSpec::zero_one();
    const auto part = halves(6);
    const auto rep = risk_bound(singleton, part, 0, BoundVariant::prc_empirical_eq11, 1, 0.1, cfg);
    CHECK_THAT(rep.complexity_term, WithinAbs(0.0, 1e-13));
    CHECK_THAT(rep.total_bound, WithinAbs(rep.train_risk + rep.slack_term, 1e-13));

    // perfect hypothesis: zero train risk
    LabeledProblem perfect;
    perfect.labels = {+1, -1, +1, -1, +1, -1, +1, -1};
    perfect.predictions = {std::vector<double>(perfect.labels.begin(), perfect.labels.end()),
                           {-1, -1, -1, -1, +1, +1, +1, +1}};
    perfect.loss = LossSpec::zero_one();
    const auto part8 = halves(8);
    for (const auto variant :
         {BoundVariant::trc_eq9, BoundVariant::prc_expected_eq10, BoundVariant::prc_empirical_eq11}) {
        const auto reports = risk_bounds(perfect, part8, variant, 2, 0.1, cfg);
        REQUIRE(reports.size() == 2);
        CHECK(reports[0].train_risk == 0.0);
        CHECK_THAT(reports[0].total_bound,
                   WithinAbs(reports[0].complexity_term + reports[0].slack_term, 1e-13));
        CHECK_THAT(reports[1].total_bound,
                   WithinAbs(reports[1].train_risk + reports[1].complexity_term + reports[1].slack_term, 1e-13));
    }
}

TEST_CASE("risk bound totals shrink as delta grows") {
    const auto problem = binary_problem(3, 12, 5);
    const auto part = halves(12);
    const EstimationConfig cfg = EstimationConfig::monte_carlo_with(100, 11);
    for (const auto variant :
         {BoundVariant::trc_eq9, BoundVariant::prc_expected_eq10, BoundVariant::prc_empirical_eq11}) {
        const auto tight = risk_bound(problem, part, 0, variant, 3, 0.1, cfg);
        const auto loose = risk_bound(problem, part, 0, variant, 3, 0.5, cfg);
        CHECK(loose.total_bound <= tight.total_bound + 1e-12);
    }
}

TEST_CASE("risk bound complexity scales with the loss table") {
    // identical problems, losses scaled by 1/2 via the table: the split
    // complexity halves and the total drops accordingly
    LabeledProblem base;
    base.labels = {+1, -1, +1, -1, +1, -1, +1, -1};
    base.predictions = {{+1, +1, -1, -1, +1, +1, -1, -1}, {-1, +1, -1, +1, -1, +1, -1, +1}};
    base.loss = LossSpec::from_table({{{+1, +1}, 0.0}, {{+1, -1}, 1.0}, {{-1, +1}, 1.0}, {{-1, -1}, 0.0}});

    LabeledProblem scaled = base;
    scaled.loss = LossSpec::from_table({{{+1, +1}, 0.0}, {{+1, -1}, 0.5}, {{-1, +1}, 0.5}, {{-1, -1}, 0.0}});

    const auto part = halves(8);
    const EstimationConfig cfg = EstimationConfig::monte_carlo_with(100, 2);
    const auto rep_base = risk_bound(base, part, 0, BoundVariant::prc_empirical_eq11, 2, 0.2, cfg);
    const auto rep_scaled = risk_bound(scaled, part, 0, BoundVariant::prc_empirical_eq11, 2, 0.2, cfg);
    CHECK_THAT(rep_scaled.complexity_term, WithinAbs(0.5 * rep_base.complexity_term, 1e-12));
    CHECK(rep_scaled.total_bound <= rep_base.total_bound + 1e-12);
}

TEST_CASE("train-set-only variant never reads test labels") {
    const auto problem = binary_problem(4, 10, 7);
    auto poisoned = problem;
    for (int i : {5, 6, 7, 8, 9}) poisoned.labels[static_cast<std::size_t>(i)] *= -1.0;

    const auto part = halves(10);
    const EstimationConfig cfg = EstimationConfig::monte_carlo_with(500, 13);
    const auto clean_reports = risk_bounds(problem, part, BoundVariant::prc_empirical_eq11, 2, 0.1, cfg);
    const auto poisoned_reports = risk_bounds(poisoned, part, BoundVariant::prc_empirical_eq11, 2, 0.1, cfg);

    OrderedJson clean_doc = OrderedJson::array();
    OrderedJson poisoned_doc = OrderedJson::array();
    for (const auto& r : clean_reports) clean_doc.push_back(to_json(r));
    for (const auto& r : poisoned_reports) poisoned_doc.push_back(to_json(r));
    CHECK(clean_doc.dump() == poisoned_doc.dump());
}

TEST_CASE("risk bound parameter validation") {
    const auto problem = binary_problem(2, 8, 9);
    const EstimationConfig cfg = EstimationConfig::monte_carlo_with(50, 1);

    Partition uneven;
    uneven.train = {0, 1};
    uneven.test = {2, 3, 4, 5, 6, 7};
    CHECK_THROWS_AS(risk_bounds(problem, uneven, BoundVariant::prc_empirical_eq11, 1, 0.1, cfg),
                    InvalidSizeError);

    const auto part = halves(8);
    CHECK_THROWS_AS(risk_bounds(problem, part, BoundVariant::prc_empirical_eq11, 0, 0.1, cfg), InvalidSizeError);
    CHECK_THROWS_AS(risk_bounds(problem, part, BoundVariant::prc_empirical_eq11, 4, 0.1, cfg), InvalidSizeError);
    CHECK_THROWS_AS(risk_bound(problem, part, 5, BoundVariant::prc_empirical_eq11, 1, 0.1, cfg),
                    InvalidArgumentError);
}

TEST_CASE("trc-variant report carries the additive constant and slack ratio") {
    const auto problem = binary_problem(3, 10, 21);
    const auto part = halves(10);
    const EstimationConfig cfg = EstimationConfig::monte_carlo_with(100, 5);
    const auto rep = risk_bound(problem, part, 0, BoundVariant::trc_eq9, 2, 0.01, cfg);

    const double additive = 11.0 * std::sqrt(2.0 / 10.0);
    CHECK_THAT(rep.params.at("additive_constant"), WithinAbs(additive, 1e-15));
    const double slack1 = slack_term(10, 0.01, SlackScale::one);
    CHECK_THAT(rep.slack_term, WithinAbs(slack1, 1e-15));
    CHECK_THAT(rep.params.at("slack_ratio_vs_eq10"), WithinAbs((additive + slack1) / slack1, 1e-12));

    // complexity term = exact trc at p = 1/4 plus the constant
    const auto losses = loss_class(problem);
    const auto exact_trc = trc(losses, 5, 5, 0.25, EstimationConfig::exact_with_cap());
    CHECK_THAT(rep.complexity_term, WithinAbs(exact_trc.value + additive, 1e-12));
}

TEST_CASE("expected-split variant is reproducible and declares its sampling") {
    const auto problem = binary_problem(3, 8, 33);
    const auto part = halves(8);
    const EstimationConfig cfg = EstimationConfig::monte_carlo_with(400, 17);
    const auto a = risk_bound(problem, part, 1, BoundVariant::prc_expected_eq10, 2, 0.2, cfg);
    const auto b = risk_bound(problem, part, 1, BoundVariant::prc_expected_eq10, 2, 0.2, cfg);
    CHECK(a.complexity_term == b.complexity_term);
    CHECK(a.params.at("samples") == 400.0);
    CHECK(a.params.at("inner_exact") == 1.0);
    CHECK(a.params.at("complexity_std_error") >= 0.0);

    // single-sample mode runs too
    const EstimationConfig one = EstimationConfig::monte_carlo_with(1, 9);
    const auto single = risk_bound(problem, part, 0, BoundVariant::prc_expected_eq10, 2, 0.2, one);
    CHECK(single.params.at("samples") == 1.0);
}

TEST_CASE("prior bounds on the zero class reduce to their constants") {
    const FunctionClass zero({{0.0, 0.0, 0.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0, 0.0, 0.0}});
    const EstimationConfig cfg = EstimationConfig::monte_carlo_with(200, 1);
    const auto bounds = prior_bounds(zero, 3, cfg);
    CHECK_THAT(bounds.resampled_rademacher_rhs, WithinAbs(0.0, 1e-13));
    CHECK_THAT(bounds.trc_rhs, WithinAbs(0.0, 1e-13));  // B = 0 kills the additive term
    CHECK_THAT(bounds.params.at("p0"), WithinAbs(0.25, 1e-15));
}

TEST_CASE("prior bounds dominate the exact two-sample supremum") {
    for (std::uint64_t seed : {3ULL, 4ULL}) {
        RngState rng(seed);
        const auto cls = random_class(4, 8, 1.0, rng);
        const EstimationConfig cfg = EstimationConfig::monte_carlo_with(20000, seed);
        const auto bounds = prior_bounds(cls, 4, cfg);
        const auto esup = empirical_process_sup(cls, 4, EstimationConfig::exact_with_cap());
        CHECK(bounds.resampled_rademacher_rhs >= esup.value - 4.0 * bounds.resampled_std_error);
        CHECK(bounds.trc_rhs >= esup.value - 1e-9);
    }
}

TEST_CASE("verification harness: tightness instances pass every suite") {
    const std::vector<int> sizes{2, 4, 6, 8};
    const auto instances = tightness_suite_instances(sizes);
    const auto report = verify_theorems(instances, {"all"});
    const auto summary = report.summary();
    CHECK(summary.checks > 0);
    CHECK(summary.failed == 0);
    CHECK_FALSE(report.any_normative_failure());

    // the achievability identities are present and pass
    int prime_prc = 0, dprime_prc = 0, dprime_exact = 0;
    for (const auto& rec : report.records) {
        CHECK_THAT(rec.margin, WithinAbs(rec.rhs - rec.lhs, 1e-15));
        if (rec.check_id == "l3-prime-prc") {
            ++prime_prc;
            CHECK(rec.pass);
        }
        if (rec.check_id == "l3-dprime-prc") {
            ++dprime_prc;
            CHECK(rec.pass);
        }
        if (rec.check_id == "l3-dprime-rad-exact") {
            ++dprime_exact;
            CHECK(rec.pass);
        }
    }
    CHECK(prime_prc == 4);
    CHECK(dprime_prc == 4);
    CHECK(dprime_exact == 4);
}

TEST_CASE("verification harness: random instances have zero normative failures") {
    const auto instances = random_suite_instances(40, 7);
    const auto report = verify_theorems(instances, {"all"});
    const auto summary = report.summary();
    CHECK(summary.failed == 0);
    CHECK_FALSE(report.any_normative_failure());
    // the printed-sign variant is tracked but never counts as a failure
    for (const auto& rec : report.records) {
        if (rec.check_id == "c1-lower-printed") CHECK_FALSE(rec.normative);
    }
}

TEST_CASE("verification harness rejects unknown suites and lopsided instances") {
    const auto instances = random_suite_instances(1, 1);
    CHECK_THROWS_AS(verify_theorems(instances, {"t9"}), InvalidArgumentError);

    RngState rng(2);
    std::vector<SuiteInstance> lopsided;
    lopsided.push_back({random_class(2, 6, 1.0, rng), 2, InstanceKind::random, "lopsided"});
    CHECK_THROWS_AS(verify_theorems(lopsided, {"t2"}), InvalidSizeError);
}

TEST_CASE("coverage: constant-loss singleton never violates and rates respect delta ordering") {
    LabeledProblem constant;
    constant.labels.assign(20, 1.0);
    constant.predictions = {std::vector<double>(20, 1.0)};
    constant.loss = LossSpec::zero_one();
    const EstimationConfig cfg = EstimationConfig::monte_carlo_with(64, 3);
    const auto res = coverage_check(constant, 0.5, 1000, 5, cfg);
    CHECK(res.violations == 0);

    const auto problem = binary_problem(4, 20, 19);
    const auto tight = coverage_check(problem, 0.1, 2000, 5, cfg);
    const auto loose = coverage_check(problem, 0.5, 2000, 5, cfg);
    CHECK(tight.violation_rate <= 0.1 + 0.05);
    CHECK(loose.violation_rate <= 0.5 + 0.05);
    // same seed, same partitions: the looser bound can only be violated more often
    CHECK(tight.violation_rate <= loose.violation_rate + 1e-15);

    CHECK_THROWS_AS(coverage_check(problem, 0.5, 100, 5, cfg), InvalidArgumentError);
}

TEST_CASE("coverage violations do occur and still respect delta") {
    // a singleton class has zero split complexity, so a large enough two-sample
    // deviation lands above the bound with small positive probability
    LabeledProblem skewed;
    skewed.labels.resize(200);
    for (int i = 0; i < 200; ++i) skewed.labels[static_cast<std::size_t>(i)] = i < 100 ? 1.0 : -1.0;
    skewed.predictions = {std::vector<double>(200, 1.0)};
    skewed.loss = LossSpec::zero_one();

    const EstimationConfig cfg = EstimationConfig::monte_carlo_with(64, 2);
    const auto res = coverage_check(skewed, 0.5, 10000, 50, cfg);
    CHECK(res.violations >= 1);
    CHECK(res.violation_rate <= 0.5);
}

TEST_CASE("single train/test swaps move the sup-deviation by at most 1/m + 1/u") {
    const auto problem = binary_problem(5, 30, 23);
    const auto probe = bounded_difference_probe(problem, 2000, 29);
    CHECK(probe.pass);
    CHECK(probe.max_change <= probe.allowed);
    CHECK(probe.allowed >= 1.0 / 15.0 + 1.0 / 15.0);

    // sup_deviation agrees with a direct computation on a fixed partition
    const auto part = halves(30);
    const auto losses = loss_class(problem);
    double expected = -1e300;
    for (int h = 0; h < losses.num_functions(); ++h) {
        double train = 0.0, test = 0.0;
        for (int i = 0; i < 15; ++i) train += losses.value(h, i);
        for (int i = 15; i < 30; ++i) test += losses.value(h, i);
        expected = std::max(expected, test / 15.0 - train / 15.0);
    }
    CHECK_THAT(sup_deviation(problem, part), WithinAbs(expected, 1e-12));
}
