#include "loskit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "loskit/error.hpp"
#include "loskit/rng.hpp"

namespace loskit {

std::int64_t ConfusionMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

std::int64_t ConfusionMatrix::trace() const {
    std::int64_t t = 0;
    for (std::size_t i = 0; i < k; ++i) t += at(i, i);
    return t;
}

std::int64_t ConfusionMatrix::row_sum(std::size_t r) const {
    std::int64_t s = 0;
    for (std::size_t c = 0; c < k; ++c) s += at(r, c);
    return s;
}

std::int64_t ConfusionMatrix::col_sum(std::size_t c) const {
    std::int64_t s = 0;
    for (std::size_t r = 0; r < k; ++r) s += at(r, c);
    return s;
}

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                                 std::size_t k) {
    if (y_true.size() != y_pred.size())
        throw Error::validation("confusion_matrix: length mismatch");
    ConfusionMatrix cm(k);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const int a = y_true[i], p = y_pred[i];
        if (a < 0 || p < 0 || static_cast<std::size_t>(a) >= k ||
            static_cast<std::size_t>(p) >= k)
            throw Error::validation("confusion_matrix: label out of range at index " +
                                    std::to_string(i));
        ++cm.at(static_cast<std::size_t>(a), static_cast<std::size_t>(p));
    }
    return cm;
}

double cohen_kappa(const ConfusionMatrix& cm, bool* degenerate) {
    const std::int64_t total = cm.total();
    if (total <= 0)
        throw Error::validation("cohen_kappa: empty matrix");
    const long double t = static_cast<long double>(total);
    const long double p0 = static_cast<long double>(cm.trace()) / t;
    long double pe = 0;
    for (std::size_t c = 0; c < cm.k; ++c)
        pe += (static_cast<long double>(cm.row_sum(c)) / t) *
              (static_cast<long double>(cm.col_sum(c)) / t);
    if (degenerate) *degenerate = false;
    if (pe >= 1.0L) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    return static_cast<double>((p0 - pe) / (1.0L - pe));
}

double mcc(const ConfusionMatrix& cm, bool* degenerate) {
    const std::int64_t total = cm.total();
    if (total <= 0)
        throw Error::validation("mcc: empty matrix");
    const long double s = static_cast<long double>(total);
    const long double c = static_cast<long double>(cm.trace());
    long double sum_tp = 0;  // sum over classes of row_sum * col_sum
    long double sum_pp = 0;  // predicted marginals squared
    long double sum_tt = 0;  // actual marginals squared
    for (std::size_t i = 0; i < cm.k; ++i) {
        const long double t_k = static_cast<long double>(cm.row_sum(i));
        const long double p_k = static_cast<long double>(cm.col_sum(i));
        sum_tp += t_k * p_k;
        sum_pp += p_k * p_k;
        sum_tt += t_k * t_k;
    }
    const long double num = c * s - sum_tp;
    const long double den2 = (s * s - sum_pp) * (s * s - sum_tt);
    if (degenerate) *degenerate = false;
    if (den2 <= 0) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    return static_cast<double>(num / std::sqrt(den2));
}

MetricsReport metrics_report(const ConfusionMatrix& cm) {
    const std::int64_t total = cm.total();
    if (total <= 0)
        throw Error::validation("metrics_report: empty matrix");
    const std::size_t k = cm.k;

    MetricsReport rep;
    rep.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
    rep.precision.resize(k);
    rep.recall.resize(k);
    rep.f1.resize(k);
    rep.precision_degenerate.assign(k, 0);
    rep.recall_degenerate.assign(k, 0);
    rep.f1_degenerate.assign(k, 0);
    rep.support.resize(k);

    for (std::size_t c = 0; c < k; ++c) {
        const double tp = static_cast<double>(cm.at(c, c));
        const double predicted = static_cast<double>(cm.col_sum(c));  // tp + fp
        const double actual = static_cast<double>(cm.row_sum(c));     // tp + fn
        rep.support[c] = cm.row_sum(c);
        if (predicted > 0) {
            rep.precision[c] = tp / predicted;
        } else {
            rep.precision[c] = 0;
            rep.precision_degenerate[c] = 1;
        }
        if (actual > 0) {
            rep.recall[c] = tp / actual;
        } else {
            rep.recall[c] = 0;
            rep.recall_degenerate[c] = 1;
        }
        const double pr = rep.precision[c] + rep.recall[c];
        if (pr > 0) {
            rep.f1[c] = 2.0 * rep.precision[c] * rep.recall[c] / pr;
        } else {
            rep.f1[c] = 0;
            rep.f1_degenerate[c] = 1;
        }
    }

    for (std::size_t c = 0; c < k; ++c) {
        rep.macro_precision += rep.precision[c];
        rep.macro_recall += rep.recall[c];
        rep.macro_f1 += rep.f1[c];
        const double w = static_cast<double>(rep.support[c]) / static_cast<double>(total);
        rep.weighted_precision += w * rep.precision[c];
        rep.weighted_recall += w * rep.recall[c];
        rep.weighted_f1 += w * rep.f1[c];
    }
    rep.macro_precision /= static_cast<double>(k);
    rep.macro_recall /= static_cast<double>(k);
    rep.macro_f1 /= static_cast<double>(k);

    rep.kappa = cohen_kappa(cm, &rep.kappa_degenerate);
    rep.mcc = mcc(cm, &rep.mcc_degenerate);
    return rep;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(
    const LabelVector& y, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0) || !(test_fraction < 1.0))
        throw Error::validation("stratified_split: test_fraction must be in (0, 1)");
    int max_label = 0;
    for (int label : y) {
        if (label < 0)
            throw Error::validation("stratified_split: negative label");
        max_label = std::max(max_label, label);
    }
    const std::size_t k = static_cast<std::size_t>(max_label) + 1;

    std::vector<std::vector<std::size_t>> by_class(k);
    for (std::size_t i = 0; i < y.size(); ++i)
        by_class[static_cast<std::size_t>(y[i])].push_back(i);
    for (std::size_t c = 0; c < k; ++c)
        if (by_class[c].size() < 2)
            throw Error::runtime("stratified_split: class " + std::to_string(c) +
                                 " has fewer than 2 samples");

    std::vector<std::size_t> train, test;
    for (std::size_t c = 0; c < k; ++c) {
        auto& members = by_class[c];
        Rng rng(derive_seed(seed, c));
        shuffle(members, rng);
        const std::size_t n_test = static_cast<std::size_t>(
            std::llround(static_cast<double>(members.size()) * test_fraction));
        for (std::size_t i = 0; i < members.size(); ++i)
            (i < n_test ? test : train).push_back(members[i]);
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {std::move(train), std::move(test)};
}

double metric_by_name(const MetricsReport& report, const std::string& name) {
    if (name == "accuracy") return report.accuracy;
    if (name == "precision" || name == "precision_weighted") return report.weighted_precision;
    if (name == "recall" || name == "recall_weighted") return report.weighted_recall;
    if (name == "f1" || name == "f1_weighted") return report.weighted_f1;
    if (name == "precision_macro") return report.macro_precision;
    if (name == "recall_macro") return report.macro_recall;
    if (name == "f1_macro") return report.macro_f1;
    if (name == "kappa") return report.kappa;
    if (name == "mcc") return report.mcc;
    throw Error::validation("unknown metric name: " + name);
}

}  // namespace loskit
