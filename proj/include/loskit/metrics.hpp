#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "loskit/matrix.hpp"

namespace loskit {

// K x K counts; rows are actual classes, columns predicted.
struct ConfusionMatrix {
    std::size_t k = 0;
    std::vector<std::int64_t> counts;  // row-major

    ConfusionMatrix() = default;
    explicit ConfusionMatrix(std::size_t k_) : k(k_), counts(k_ * k_, 0) {}

    std::int64_t& at(std::size_t actual, std::size_t predicted) {
        return counts[actual * k + predicted];
    }
    std::int64_t at(std::size_t actual, std::size_t predicted) const {
        return counts[actual * k + predicted];
    }
    std::int64_t total() const;
    std::int64_t trace() const;
    std::int64_t row_sum(std::size_t r) const;  // actual-class support
    std::int64_t col_sum(std::size_t c) const;  // predicted-class count
};

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                                 std::size_t k);

struct MetricsReport {
    double accuracy = 0;
    std::vector<double> precision, recall, f1;  // per class
    std::vector<char> precision_degenerate, recall_degenerate, f1_degenerate;
    std::vector<std::int64_t> support;
    double macro_precision = 0, macro_recall = 0, macro_f1 = 0;
    double weighted_precision = 0, weighted_recall = 0, weighted_f1 = 0;
    double kappa = 0;
    bool kappa_degenerate = false;
    double mcc = 0;
    bool mcc_degenerate = false;
};

// Accuracy, per-class precision/recall/F1 (harmonic mean) with macro and
// support-weighted aggregates, Cohen's kappa and the multiclass MCC.
// Zero-denominator classes score 0 and are flagged.
MetricsReport metrics_report(const ConfusionMatrix& cm);

// (p0 - pe) / (1 - pe); pe = 1 reports 0 with the degenerate flag.
double cohen_kappa(const ConfusionMatrix& cm, bool* degenerate = nullptr);

// Multiclass correlation form; reduces to the binary TP/TN/FP/FN formula at
// K = 2. A zero denominator reports 0 with the degenerate flag.
double mcc(const ConfusionMatrix& cm, bool* degenerate = nullptr);

// Per-class test counts are round(class_count * test_fraction); deterministic
// for a fixed seed. Both index lists come back sorted ascending.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    const LabelVector& y, double test_fraction, std::uint64_t seed);

// Metric value by name: accuracy, precision, recall, f1, kappa, mcc.
// Bare precision/recall/f1 mean the weighted aggregate; the _macro /
// _weighted suffixes select explicitly.
double metric_by_name(const MetricsReport& report, const std::string& name);

}  // namespace loskit
