#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "loskit/dataset.hpp"
#include "loskit/matrix.hpp"

namespace loskit {

// Ordinal string index: codes 1..n in category order, 0 for anything unseen.
struct OrdinalMap {
    std::string column;
    std::vector<std::string> ordered_categories;
    bool explicit_order = false;

    static constexpr int unknown_code = 0;

    int code(const std::string& label) const {
        if (label.empty()) return unknown_code;
        for (std::size_t i = 0; i < ordered_categories.size(); ++i)
            if (ordered_categories[i] == label) return static_cast<int>(i) + 1;
        return unknown_code;
    }
};

// Frequency-descending order, ties broken lexicographically. Empty values are
// missing.
OrdinalMap fit_ordinal_map(const std::string& column, const std::vector<std::string>& values);

// Explicit order; errors if the data contains a label the order lacks.
// `missing_label`, when non-empty, is treated as missing (the cleaner's fill
// literal has no ordinal position and codes to 0).
OrdinalMap fit_ordinal_map(const std::string& column, const std::vector<std::string>& values,
                           const std::vector<std::string>& order,
                           const std::string& missing_label = "");

inline int apply_ordinal(const OrdinalMap& map, const std::string& value) {
    return map.code(value);
}

// Inclusive day ranges that partition [1, 120].
struct BinSpec {
    struct Range {
        int lo = 0, hi = 0;
        std::string label;
    };
    std::vector<Range> ranges;

    std::size_t n_bins() const noexcept { return ranges.size(); }
    void validate() const;

    // 1-5, 6-10, 11-20, 21-30, 31-50, 51-120.
    static BinSpec default_bins();
    static BinSpec from_edges(const std::vector<std::pair<int, int>>& edges);
};

int assign_bin(int los_days, const BinSpec& spec);

// Per-feature centering and scaling. Population standard deviation.
struct Standardizer {
    std::vector<std::string> feature_names;
    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<char> zero_variance;
};

Standardizer fit_standardizer(const FeatureMatrix& X);

// (x - mean) / std per column; zero-variance columns map to 0.
FeatureMatrix standardize(const Standardizer& params, const FeatureMatrix& X);

// Everything needed to reproduce the train-time encoding at predict time.
struct EncoderSet {
    std::vector<OrdinalMap> maps;  // one per categorical column, dataset order
    BinSpec bins;

    const OrdinalMap* find_map(const std::string& column) const {
        for (const auto& m : maps)
            if (m.column == column) return &m;
        return nullptr;
    }
};

// Default explicit category orders (Age Group, risk, severity).
const std::map<std::string, std::vector<std::string>>& default_explicit_orders();

// Fits one ordinal map per categorical column.
EncoderSet fit_encoders(const Dataset& ds, const BinSpec& bins,
                        const std::map<std::string, std::vector<std::string>>& explicit_orders =
                            default_explicit_orders(),
                        const std::string& missing_label = "Unknown");

// Categorical columns become codes, numeric and currency pass through, LoS
// becomes the binned label vector. Column order follows the dataset.
std::pair<FeatureMatrix, LabelVector> build_design_matrix(const Dataset& ds,
                                                          const EncoderSet& encoders);

}  // namespace loskit
