#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prclab/core.hpp"
#include "prclab/enumeration.hpp"
#include "prclab/errors.hpp"

namespace prclab {

// A finite class of real-valued functions represented extensionally: one row per
// function, one column per point of the underlying point set. Every quantity in
// this library depends on a class only through these values, so a supremum over
// the class is a maximum over rows.
class FunctionClass {
public:
    FunctionClass(std::vector<std::vector<double>> rows, std::optional<double> declared_bound = std::nullopt,
                  std::string name = "")
        : name_(std::move(name)) {
        if (rows.empty()) throw InvalidArgumentError("a function class needs at least one function");
        num_points_ = static_cast<int>(rows.front().size());
        if (num_points_ < 1) throw InvalidArgumentError("a function class needs at least one point");
        num_functions_ = static_cast<int>(rows.size());
        values_.reserve(static_cast<std::size_t>(num_functions_) * static_cast<std::size_t>(num_points_));
        double max_abs = 0.0;
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != num_points_) {
                throw InvalidArgumentError("all functions must be evaluated on the same points");
            }
            for (double v : row) {
                if (!std::isfinite(v)) throw InvalidArgumentError("function values must be finite");
                max_abs = std::max(max_abs, std::abs(v));
                values_.push_back(v);
            }
        }
        if (declared_bound) {
            if (*declared_bound < 0.0) throw InvalidArgumentError("declared bound must be nonnegative");
            if (max_abs > *declared_bound) {
                throw InvalidArgumentError("function values exceed the declared bound");
            }
            bound_ = *declared_bound;
            bound_declared_ = true;
        } else {
            bound_ = max_abs;
            bound_declared_ = false;
        }
    }

    int num_functions() const { return num_functions_; }
    int num_points() const { return num_points_; }

    double value(int function, int point) const {
        return values_[static_cast<std::size_t>(function) * static_cast<std::size_t>(num_points_) +
                       static_cast<std::size_t>(point)];
    }

    std::span<const double> row(int function) const {
        return {values_.data() + static_cast<std::size_t>(function) * static_cast<std::size_t>(num_points_),
                static_cast<std::size_t>(num_points_)};
    }

    // Uniform bound B: declared at construction or inferred as max |entry|.
    double bound() const { return bound_; }
    bool bound_declared() const { return bound_declared_; }
    const std::string& name() const { return name_; }

    // Same values with an extra function appended (classes are immutable).
    FunctionClass with_row(const std::vector<double>& extra_row) const {
        std::vector<std::vector<double>> rows;
        rows.reserve(static_cast<std::size_t>(num_functions_) + 1);
        for (int f = 0; f < num_functions_; ++f) {
            rows.emplace_back(row(f).begin(), row(f).end());
        }
        rows.push_back(extra_row);
        return FunctionClass(std::move(rows), bound_declared_ ? std::optional<double>(bound_) : std::nullopt, name_);
    }

    // Same values scaled by c (bound scales along).
    FunctionClass scaled(double c) const {
        std::vector<std::vector<double>> rows;
        rows.reserve(static_cast<std::size_t>(num_functions_));
        for (int f = 0; f < num_functions_; ++f) {
            std::vector<double> r(row(f).begin(), row(f).end());
            for (double& v : r) v *= c;
            rows.push_back(std::move(r));
        }
        return FunctionClass(std::move(rows),
                             bound_declared_ ? std::optional<double>(bound_ * std::abs(c)) : std::nullopt, name_);
    }

    std::vector<int> all_points() const {
        std::vector<int> v(static_cast<std::size_t>(num_points_));
        std::iota(v.begin(), v.end(), 0);
        return v;
    }

private:
    std::vector<double> values_;  // row-major
    int num_functions_ = 0;
    int num_points_ = 0;
    double bound_ = 0.0;
    bool bound_declared_ = false;
    std::string name_;
};

// The two classes witnessing that the PRC/Rademacher comparison constants are
// tight on m points: a pair of constant functions (one all-ones, one all-zeros),
// and the C(m, m/2) indicator functions of the balanced 0/1 patterns.
struct TightnessClasses {
    FunctionClass constant_pair;        // half-split complexity 0
    FunctionClass balanced_indicators;  // half-split complexity 1
};

inline TightnessClasses tightness_classes(int m, std::uint64_t enumeration_cap = kDefaultEnumerationCap) {
    if (m < 2) throw InvalidSizeError("tightness classes need m >= 2");
    if (m % 2 != 0) throw ParityError("tightness classes need an even m, got " + std::to_string(m));
    ensure_enumerable(OutcomeSpace::balanced_vectors, m, 0, enumeration_cap);

    const auto sz = static_cast<std::size_t>(m);
    std::vector<std::vector<double>> constant_rows{std::vector<double>(sz, 1.0), std::vector<double>(sz, 0.0)};

    std::vector<std::vector<double>> indicator_rows;
    for_each_balanced_vector(m, [&](std::span<const int> signs) {
        std::vector<double> row(sz, 0.0);
        for (int i = 0; i < m; ++i) {
            if (signs[static_cast<std::size_t>(i)] > 0) row[static_cast<std::size_t>(i)] = 1.0;
        }
        indicator_rows.push_back(std::move(row));
    });

    return {FunctionClass(std::move(constant_rows), 1.0, "constant-pair-" + std::to_string(m)),
            FunctionClass(std::move(indicator_rows), 1.0, "balanced-indicators-" + std::to_string(m))};
}

// Bounded loss: the binary zero-one loss on labels {-1,+1}, or an explicit table
// over (prediction, label) pairs with values in [0,1].
struct LossSpec {
    enum class Kind { zero_one, table };

    Kind kind = Kind::zero_one;
    // Table entries keyed by exact (prediction, label) values.
    std::map<std::pair<double, double>, double> table;

    static LossSpec zero_one() { return LossSpec{}; }

    static LossSpec from_table(std::map<std::pair<double, double>, double> entries) {
        for (const auto& [key, loss] : entries) {
            if (!(loss >= 0.0 && loss <= 1.0)) {
                throw InvalidArgumentError("table losses must lie in [0,1]");
            }
        }
        LossSpec spec;
        spec.kind = Kind::table;
        spec.table = std::move(entries);
        return spec;
    }

    double evaluate(double prediction, double label) const {
        if (kind == Kind::zero_one) {
            if (std::abs(prediction) != 1.0 || std::abs(label) != 1.0) {
                throw InvalidArgumentError("zero-one loss needs predictions and labels in {-1,+1}");
            }
            return (1.0 - prediction * label) / 2.0;
        }
        const auto it = table.find({prediction, label});
        if (it == table.end()) {
            throw MissingEntryError("loss table has no entry for (" + std::to_string(prediction) + ", " +
                                    std::to_string(label) + ")");
        }
        return it->second;
    }
};

// Transductive problem instance: hypothesis outputs on all N points, the labels,
// and the loss used to score them. declared_bound, when set, is used as the loss
// class's uniform bound instead of the default 1.
struct LabeledProblem {
    std::vector<std::vector<double>> predictions;  // predictions[h][i]
    std::vector<double> labels;                    // labels[i]
    LossSpec loss;
    std::optional<double> declared_bound;

    int num_hypotheses() const { return static_cast<int>(predictions.size()); }
    int num_points() const { return static_cast<int>(labels.size()); }

    void validate() const {
        if (predictions.empty()) throw InvalidArgumentError("a problem needs at least one hypothesis");
        if (num_points() < 2) throw InvalidSizeError("a problem needs at least 2 points");
        for (const auto& row : predictions) {
            if (static_cast<int>(row.size()) != num_points()) {
                throw InvalidArgumentError("prediction width must match the number of labels");
            }
        }
        // every (prediction, label) pair must be resolvable
        for (const auto& row : predictions) {
            for (int i = 0; i < num_points(); ++i) {
                loss.evaluate(row[static_cast<std::size_t>(i)], labels[static_cast<std::size_t>(i)]);
            }
        }
    }
};

// Loss class of a problem restricted to the given points: row h, column j holds
// loss(predictions[h][points[j]], labels[points[j]]). Losses are evaluated at
// the listed points only; labels outside them are never read.
inline FunctionClass loss_class_on(const LabeledProblem& problem, std::span<const int> points) {
    if (points.empty()) throw InvalidSizeError("loss class needs at least one point");
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(problem.num_hypotheses()));
    for (const auto& prediction_row : problem.predictions) {
        std::vector<double> row;
        row.reserve(points.size());
        for (int i : points) {
            if (i < 0 || i >= problem.num_points()) throw InvalidArgumentError("point index out of range");
            row.push_back(problem.loss.evaluate(prediction_row[static_cast<std::size_t>(i)],
                                                problem.labels[static_cast<std::size_t>(i)]));
        }
        rows.push_back(std::move(row));
    }
    return FunctionClass(std::move(rows), problem.declared_bound.value_or(1.0), "loss-class");
}

// Loss class on all N points.
inline FunctionClass loss_class(const LabeledProblem& problem) {
    std::vector<int> pts(static_cast<std::size_t>(problem.num_points()));
    std::iota(pts.begin(), pts.end(), 0);
    return loss_class_on(problem, pts);
}

// Fuzz-test instance: entries i.i.d. uniform on [-B, B].
inline FunctionClass random_class(int num_functions, int num_points, double bound, RngState& rng,
                                  std::string name = "random") {
    if (num_functions < 1) throw InvalidSizeError("need at least one function");
    if (num_points < 2) throw InvalidSizeError("need at least two points");
    if (bound < 0.0) throw InvalidArgumentError("bound must be nonnegative");
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(num_functions));
    for (auto& row : rows) {
        row.resize(static_cast<std::size_t>(num_points));
        for (double& v : row) v = bound * (2.0 * rng.next_double01() - 1.0);
    }
    return FunctionClass(std::move(rows), std::nullopt, std::move(name));
}

}  // namespace prclab
