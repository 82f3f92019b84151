#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "prclab/bounds.hpp"
#include "prclab/complexity.hpp"
#include "prclab/coupling.hpp"
#include "prclab/errors.hpp"
#include "prclab/function_class.hpp"

namespace prclab {

using OrderedJson = nlohmann::ordered_json;

inline constexpr const char* kReportSchemaVersion = "1";

namespace detail {

inline std::string trimmed(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// Locale-independent decimal double; the full cell must be consumed.
inline std::optional<double> parse_double_cell(const std::string& cell) {
    const std::string t = trimmed(cell);
    if (t.empty()) return std::nullopt;
    double value = 0.0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) return std::nullopt;
    return value;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace detail

// CSV matrix: one row per function, numeric cells, optional header row (any row
// whose cells do not all parse as decimals is only tolerated in first position).
inline FunctionClass parse_csv_matrix(std::istream& in, const std::string& origin = "<csv>") {
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_number = 0;
    bool first_content_row = true;
    while (std::getline(in, line)) {
        ++line_number;
        const std::string stripped = detail::trimmed(line);
        if (stripped.empty()) continue;
        const auto cells = detail::split_csv_line(line);
        std::vector<double> row;
        row.reserve(cells.size());
        bool all_numeric = true;
        for (const auto& cell : cells) {
            if (const auto v = detail::parse_double_cell(cell)) {
                row.push_back(*v);
            } else {
                all_numeric = false;
                break;
            }
        }
        if (!all_numeric) {
            if (first_content_row) {
                first_content_row = false;  // header row
                continue;
            }
            throw ParseError(origin + ":" + std::to_string(line_number) + ": non-numeric cell");
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError(origin + ":" + std::to_string(line_number) + ": ragged row");
        }
        first_content_row = false;
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(origin + ": no numeric rows");
    try {
        [[maybe_unused]] const PointSet points(static_cast<int>(rows.front().size()));
        return FunctionClass(std::move(rows), std::nullopt, origin);
    } catch (const Error& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

// JSON problem document:
// {"points": N, "predictions": [[...], ...], "labels": [...],
//  "loss": "zero_one" | {"table": [[prediction, label, loss], ...]},
//  "bound": optional}
inline LabeledProblem parse_json_problem(const OrderedJson& doc, const std::string& origin = "<json>") {
    try {
        if (!doc.is_object()) throw ParseError(origin + ": expected a JSON object");
        LabeledProblem problem;
        if (!doc.contains("predictions") || !doc.contains("labels") || !doc.contains("loss")) {
            throw ParseError(origin + ": needs predictions, labels and loss");
        }
        for (const auto& row : doc.at("predictions")) {
            problem.predictions.push_back(row.get<std::vector<double>>());
        }
        problem.labels = doc.at("labels").get<std::vector<double>>();
        if (doc.contains("points")) {
            const int declared = doc.at("points").get<int>();
            if (declared != static_cast<int>(problem.labels.size())) {
                throw ParseError(origin + ": declared point count disagrees with labels");
            }
        }
        const auto& loss = doc.at("loss");
        if (loss.is_string() && loss.get<std::string>() == "zero_one") {
            problem.loss = LossSpec::zero_one();
        } else if (loss.is_object() && loss.contains("table")) {
            std::map<std::pair<double, double>, double> entries;
            for (const auto& triple : loss.at("table")) {
                if (!triple.is_array() || triple.size() != 3) {
                    throw ParseError(origin + ": table entries are [prediction, label, loss] triples");
                }
                entries[{triple[0].get<double>(), triple[1].get<double>()}] = triple[2].get<double>();
            }
            problem.loss = LossSpec::from_table(std::move(entries));
        } else {
            throw ParseError(origin + ": loss must be \"zero_one\" or {\"table\": [...]}");
        }
        if (doc.contains("bound")) {
            problem.declared_bound = doc.at("bound").get<double>();
            if (*problem.declared_bound < 0.0) throw ParseError(origin + ": bound must be nonnegative");
        }
        [[maybe_unused]] const PointSet points(problem.num_points());
        problem.validate();
        loss_class(problem);  // a declared bound must dominate every loss value
        return problem;
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(origin + ": " + e.what());
    } catch (const OrderedJson::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

// Input file dispatch by extension: .csv -> function class, .json -> problem.
using InputDocument = std::variant<FunctionClass, LabeledProblem>;

inline InputDocument parse_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        OrderedJson doc;
        try {
            doc = OrderedJson::parse(in);
        } catch (const OrderedJson::exception& e) {
            throw ParseError(path + ": " + e.what());
        }
        return parse_json_problem(doc, path);
    }
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
        return parse_csv_matrix(in, path);
    }
    throw ParseError(path + ": unknown input format (expected .csv or .json)");
}

// ---------------------------------------------------------------------------
// Report documents (schema version 1). Key order is fixed so identical results
// serialize to identical bytes; reports round-trip through JSON losslessly.
// ---------------------------------------------------------------------------

inline OrderedJson to_json(const std::map<std::string, double>& params) {
    OrderedJson obj = OrderedJson::object();
    for (const auto& [key, value] : params) obj[key] = value;
    return obj;
}

inline OrderedJson report_document(const std::string& command) {
    OrderedJson doc = OrderedJson::object();
    doc["schema_version"] = kReportSchemaVersion;
    doc["command"] = command;
    return doc;
}

inline OrderedJson to_json(const ComplexityEstimate& est, const std::string& quantity) {
    OrderedJson doc = report_document("complexity");
    doc["quantity"] = quantity;
    doc["value"] = est.value;
    doc["std_error"] = est.std_error;
    doc["method"] = to_string(est.method);
    doc["samples"] = est.samples;
    doc["seed"] = est.seed;
    doc["workers"] = est.workers;
    doc["abs_variant"] = est.abs_variant;
    doc["params"] = to_json(est.params);
    return doc;
}

inline OrderedJson to_json(const RiskBoundReport& rep) {
    OrderedJson doc = OrderedJson::object();
    doc["variant"] = to_string(rep.variant);
    doc["hypothesis"] = rep.hypothesis;
    doc["train_risk"] = rep.train_risk;
    doc["complexity_term"] = rep.complexity_term;
    doc["slack_term"] = rep.slack_term;
    doc["total_bound"] = rep.total_bound;
    doc["delta"] = rep.delta;
    doc["params"] = to_json(rep.params);
    return doc;
}

inline OrderedJson to_json(const CheckRecord& rec) {
    OrderedJson doc = OrderedJson::object();
    doc["check_id"] = rec.check_id;
    doc["instance"] = rec.instance;
    doc["lhs"] = rec.lhs;
    doc["rhs"] = rec.rhs;
    doc["margin"] = rec.margin;
    doc["tolerance"] = rec.tolerance;
    doc["two_sided"] = rec.two_sided;
    doc["normative"] = rec.normative;
    doc["pass"] = rec.pass;
    return doc;
}

inline OrderedJson to_json(const VerificationReport& report) {
    OrderedJson doc = OrderedJson::object();
    OrderedJson checks = OrderedJson::array();
    for (const auto& rec : report.records) checks.push_back(to_json(rec));
    doc["checks"] = std::move(checks);
    const auto s = report.summary();
    doc["summary"] = {{"checks", s.checks},
                      {"passed", s.passed},
                      {"failed", s.failed},
                      {"informational_failures", s.informational_failures}};
    return doc;
}

inline OrderedJson to_json(const CouplingDistribution& dist) {
    OrderedJson doc = OrderedJson::object();
    doc["m"] = dist.m;
    doc["support"] = dist.probabilities.size();
    doc["exactly_uniform"] = dist.exactly_uniform;
    OrderedJson entries = OrderedJson::array();
    for (const auto& [mask, prob] : dist.probabilities) {
        const auto vec = balanced_vector_from_mask(dist.m, mask);
        entries.push_back({{"vector", vec.entries}, {"probability", prob}});
    }
    doc["entries"] = std::move(entries);
    return doc;
}

inline OrderedJson to_json(const CoverageResult& res) {
    OrderedJson doc = OrderedJson::object();
    doc["delta"] = res.delta;
    doc["trials"] = res.trials;
    doc["violations"] = res.violations;
    doc["violation_rate"] = res.violation_rate;
    doc["params"] = to_json(res.params);
    return doc;
}

}  // namespace prclab
