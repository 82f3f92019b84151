// prclab command line: complexity measures, risk bounds, inequality
// verification, sign-vector coupling, and coverage simulation.
//
// Exit codes: 0 success, 1 validation or input error (one-line diagnostic on
// stderr, nothing on stdout), 2 verify run with normative failures.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prclab/prclab.hpp"

namespace {

using prclab::OrderedJson;

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag_seed) {
    if (flag_seed) return *flag_seed;
    if (const char* env = std::getenv("PRC_LAB_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw prclab::InvalidArgumentError("PRC_LAB_SEED is not an unsigned integer");
        }
    }
    return 0;
}

void print_report(const OrderedJson& doc) { std::cout << doc.dump(2) << "\n"; }

prclab::FunctionClass class_from_input(const prclab::InputDocument& input) {
    if (std::holds_alternative<prclab::FunctionClass>(input)) return std::get<prclab::FunctionClass>(input);
    // a labeled problem contributes its loss class
    return prclab::loss_class(std::get<prclab::LabeledProblem>(input));
}

struct ComplexityArgs {
    std::string measure;
    std::string input;
    std::string mode = "exact";
    int m = 0;  // 0: use every column
    int n = 0;
    double p = 0.25;
    bool abs_variant = false;
    std::uint64_t samples = 10000;
    std::optional<std::uint64_t> seed;
    int workers = 1;
};

int run_complexity(const ComplexityArgs& args) {
    prclab::EstimationConfig cfg;
    if (args.mode == "exact") {
        cfg.mode = prclab::EstimationMode::exact;
    } else if (args.mode == "mc") {
        cfg.mode = prclab::EstimationMode::monte_carlo;
    } else {
        throw prclab::InvalidArgumentError("--mode must be exact or mc");
    }
    cfg.samples = args.samples;
    cfg.seed = resolve_seed(args.seed);
    cfg.workers = args.workers;

    const auto cls = class_from_input(prclab::parse_input(args.input));
    const int population = cls.num_points();
    const int subset_size = args.m > 0 ? args.m : population;
    if (subset_size > population) throw prclab::InvalidSizeError("--m exceeds the number of points");
    std::vector<int> subset(static_cast<std::size_t>(subset_size));
    std::iota(subset.begin(), subset.end(), 0);

    prclab::ComplexityEstimate estimate;
    if (args.measure == "rademacher") {
        estimate = prclab::rademacher(cls, subset, cfg, args.abs_variant);
    } else if (args.measure == "prc") {
        if (args.n <= 0) throw prclab::InvalidArgumentError("--measure prc needs --n");
        estimate = prclab::prc(cls, subset, args.n, cfg, args.abs_variant);
    } else if (args.measure == "trc") {
        if (args.abs_variant) throw prclab::InvalidArgumentError("trc has no abs variant");
        const int m = args.m > 0 ? args.m : population / 2;
        estimate = prclab::trc(cls, m, population - m, args.p, cfg);
    } else if (args.measure == "discrepancy") {
        if (args.abs_variant) throw prclab::InvalidArgumentError("discrepancy has no abs variant");
        estimate = prclab::mean_discrepancy(cls, subset, cfg);
    } else {
        throw prclab::InvalidArgumentError("--measure must be prc, rademacher, trc or discrepancy");
    }
    print_report(prclab::to_json(estimate, args.measure));
    return 0;
}

struct BoundArgs {
    std::string variant;
    std::string input;
    double delta = 0.0;
    int n = 0;
    std::uint64_t samples = 1000;
    std::optional<std::uint64_t> seed;
    int workers = 1;
};

int run_bound(const BoundArgs& args) {
    const auto input = prclab::parse_input(args.input);
    if (!std::holds_alternative<prclab::LabeledProblem>(input)) {
        throw prclab::InvalidArgumentError("bound needs a .json problem input");
    }
    const auto& problem = std::get<prclab::LabeledProblem>(input);

    prclab::BoundVariant variant;
    if (args.variant == "eq9") {
        variant = prclab::BoundVariant::trc_eq9;
    } else if (args.variant == "eq10") {
        variant = prclab::BoundVariant::prc_expected_eq10;
    } else if (args.variant == "eq11") {
        variant = prclab::BoundVariant::prc_empirical_eq11;
    } else {
        throw prclab::InvalidArgumentError("--variant must be eq9, eq10 or eq11");
    }

    const int population = problem.num_points();
    if (population % 2 != 0) throw prclab::InvalidSizeError("bound needs an even population (m = u)");
    const int m = population / 2;
    const int n = args.n > 0 ? args.n : std::max(1, m / 2);

    prclab::EstimationConfig cfg;
    cfg.mode = prclab::EstimationMode::monte_carlo;
    cfg.samples = args.samples;
    cfg.seed = resolve_seed(args.seed);
    cfg.workers = args.workers;

    // the transductive draw itself: a seeded uniform train/test split
    prclab::RngState rng(prclab::splitmix64(cfg.seed));
    const auto partition = prclab::sample_partition(population, m, rng);

    const auto reports = prclab::risk_bounds(problem, partition, variant, n, args.delta, cfg);
    OrderedJson doc = prclab::report_document("bound");
    doc["variant"] = args.variant;
    doc["delta"] = args.delta;
    doc["seed"] = cfg.seed;
    doc["partition"] = {{"train", partition.train}, {"test", partition.test}};
    OrderedJson list = OrderedJson::array();
    for (const auto& rep : reports) list.push_back(prclab::to_json(rep));
    doc["reports"] = std::move(list);
    print_report(doc);
    return 0;
}

struct VerifyArgs {
    std::string suite = "all";
    std::string classes = "random";
    int count = 50;
    std::optional<std::uint64_t> seed;
};

int run_verify(const VerifyArgs& args) {
    const std::uint64_t seed = resolve_seed(args.seed);
    std::vector<prclab::SuiteInstance> instances;
    if (args.classes == "random") {
        instances = prclab::random_suite_instances(args.count, seed);
    } else if (args.classes == "lemma3") {
        const std::vector<int> sizes{2, 4, 6, 8};
        instances = prclab::tightness_suite_instances(sizes);
    } else {
        throw prclab::InvalidArgumentError("--classes must be random or lemma3");
    }

    const auto report = prclab::verify_theorems(instances, {args.suite});
    OrderedJson doc = prclab::report_document("verify");
    doc["suite"] = args.suite;
    doc["classes"] = args.classes;
    doc["count"] = static_cast<int>(instances.size());
    doc["seed"] = seed;
    const auto body = prclab::to_json(report);
    doc["checks"] = body.at("checks");
    doc["summary"] = body.at("summary");
    print_report(doc);
    return report.any_normative_failure() ? 2 : 0;
}

struct CoupleArgs {
    int m = 0;
    std::string emit = "distribution";
    std::uint64_t samples = 10;
    std::optional<std::uint64_t> seed;
};

int run_couple(const CoupleArgs& args) {
    const std::uint64_t seed = resolve_seed(args.seed);
    OrderedJson doc = prclab::report_document("couple");
    doc["emit"] = args.emit;
    if (args.emit == "distribution") {
        const auto dist = prclab::coupling_distribution(args.m);
        const auto body = prclab::to_json(dist);
        doc.update(body);
    } else if (args.emit == "samples") {
        doc["m"] = args.m;
        doc["samples"] = args.samples;
        doc["seed"] = seed;
        prclab::RngState rng(seed);
        OrderedJson pairs = OrderedJson::array();
        for (std::uint64_t s = 0; s < args.samples; ++s) {
            prclab::SignVector v;
            v.kind = prclab::SignKind::rademacher;
            v.entries.resize(static_cast<std::size_t>(args.m));
            for (auto& e : v.entries) e = rng.next_sign();
            const auto coupled = prclab::couple(v, rng);
            pairs.push_back({{"input", v.entries}, {"output", coupled.entries}});
        }
        doc["pairs"] = std::move(pairs);
    } else {
        throw prclab::InvalidArgumentError("--emit must be distribution or samples");
    }
    print_report(doc);
    return 0;
}

struct CoverageArgs {
    std::string input;
    double delta = 0.0;
    std::uint64_t trials = 10000;
    int n = 0;
    std::uint64_t samples = 64;
    std::optional<std::uint64_t> seed;
    int workers = 1;
};

int run_coverage(const CoverageArgs& args) {
    const auto input = prclab::parse_input(args.input);
    if (!std::holds_alternative<prclab::LabeledProblem>(input)) {
        throw prclab::InvalidArgumentError("coverage needs a .json problem input");
    }
    const auto& problem = std::get<prclab::LabeledProblem>(input);
    const int population = problem.num_points();
    if (population % 2 != 0) throw prclab::InvalidSizeError("coverage needs an even population (m = u)");
    const int m = population / 2;
    const int n = args.n > 0 ? args.n : std::max(1, m / 2);

    prclab::EstimationConfig cfg;
    cfg.mode = prclab::EstimationMode::monte_carlo;
    cfg.samples = args.samples;
    cfg.seed = resolve_seed(args.seed);
    cfg.workers = args.workers;

    const auto result = prclab::coverage_check(problem, args.delta, args.trials, n, cfg);
    OrderedJson doc = prclab::report_document("coverage");
    doc.update(prclab::to_json(result));
    print_report(doc);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"complexity measures and risk bounds for transductive learning on finite classes"};
    app.require_subcommand(1);

    ComplexityArgs complexity_args;
    auto* complexity = app.add_subcommand("complexity", "estimate a complexity measure of an input class");
    complexity->add_option("--measure", complexity_args.measure, "prc|rademacher|trc|discrepancy")->required();
    complexity->add_option("--input", complexity_args.input, "input file (.csv matrix or .json problem)")->required();
    complexity->add_option("--m", complexity_args.m, "subset size (default: all points; trc: train size)");
    complexity->add_option("--n", complexity_args.n, "split size for prc");
    complexity->add_option("--p", complexity_args.p, "sign probability for trc (default 0.25)");
    complexity->add_flag("--abs", complexity_args.abs_variant, "absolute values inside the supremum");
    complexity->add_option("--mode", complexity_args.mode, "exact|mc (default exact)");
    complexity->add_option("--samples", complexity_args.samples, "Monte Carlo sample count");
    complexity->add_option("--seed", [&complexity_args](const CLI::results_t& res) {
        complexity_args.seed = std::stoull(res.front());
        return true;
    }, "RNG seed (default: PRC_LAB_SEED or 0)");
    complexity->add_option("--workers", complexity_args.workers, "Monte Carlo worker substreams");

    BoundArgs bound_args;
    auto* bound = app.add_subcommand("bound", "evaluate a transductive risk bound on a problem");
    bound->add_option("--variant", bound_args.variant, "eq9|eq10|eq11")->required();
    bound->add_option("--input", bound_args.input, "problem file (.json)")->required();
    bound->add_option("--delta", bound_args.delta, "confidence parameter in (0,1)")->required();
    bound->add_option("--n", bound_args.n, "split size (default m/2)");
    bound->add_option("--samples", bound_args.samples, "Monte Carlo sample count for complexity terms");
    bound->add_option("--seed", [&bound_args](const CLI::results_t& res) {
        bound_args.seed = std::stoull(res.front());
        return true;
    }, "RNG seed (default: PRC_LAB_SEED or 0)");
    bound->add_option("--workers", bound_args.workers, "Monte Carlo worker substreams");

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "run the inequality verification suites");
    verify->add_option("--suite", verify_args.suite, "all|t2|t3|l2|l3|c1|appendix (default all)");
    verify->add_option("--classes", verify_args.classes, "random|lemma3 (default random)");
    verify->add_option("--count", verify_args.count, "number of random instances (default 50)");
    verify->add_option("--seed", [&verify_args](const CLI::results_t& res) {
        verify_args.seed = std::stoull(res.front());
        return true;
    }, "RNG seed (default: PRC_LAB_SEED or 0)");

    CoupleArgs couple_args;
    auto* couple = app.add_subcommand("couple", "balanced sign-vector coupling");
    couple->add_option("--m", couple_args.m, "even vector length")->required();
    couple->add_option("--emit", couple_args.emit, "distribution|samples (default distribution)");
    couple->add_option("--samples", couple_args.samples, "number of coupled pairs for --emit samples");
    couple->add_option("--seed", [&couple_args](const CLI::results_t& res) {
        couple_args.seed = std::stoull(res.front());
        return true;
    }, "RNG seed (default: PRC_LAB_SEED or 0)");

    CoverageArgs coverage_args;
    auto* coverage = app.add_subcommand("coverage", "empirical violation rate of the train-set risk bound");
    coverage->add_option("--input", coverage_args.input, "problem file (.json)")->required();
    coverage->add_option("--delta", coverage_args.delta, "confidence parameter in (0,1)")->required();
    coverage->add_option("--trials", coverage_args.trials, "number of sampled partitions (default 10000)");
    coverage->add_option("--n", coverage_args.n, "split size (default m/2)");
    coverage->add_option("--samples", coverage_args.samples, "splits per trial when exact is infeasible");
    coverage->add_option("--seed", [&coverage_args](const CLI::results_t& res) {
        coverage_args.seed = std::stoull(res.front());
        return true;
    }, "RNG seed (default: PRC_LAB_SEED or 0)");
    coverage->add_option("--workers", coverage_args.workers, "Monte Carlo worker substreams");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (complexity->parsed()) return run_complexity(complexity_args);
        if (bound->parsed()) return run_bound(bound_args);
        if (verify->parsed()) return run_verify(verify_args);
        if (couple->parsed()) return run_couple(couple_args);
        if (coverage->parsed()) return run_coverage(coverage_args);
    } catch (const prclab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
