#include "loskit/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace loskit {

OrdinalMap fit_ordinal_map(const std::string& column, const std::vector<std::string>& values) {
    std::map<std::string, std::size_t> counts;
    for (const auto& v : values) {
        if (v.empty()) continue;
        ++counts[v];
    }
    if (counts.empty())
        throw Error::validation("fit_ordinal_map: no non-missing values in column " + column);
    OrdinalMap map;
    map.column = column;
    map.explicit_order = false;
    std::vector<std::pair<std::string, std::size_t>> items(counts.begin(), counts.end());
    std::stable_sort(items.begin(), items.end(), [](const auto& l, const auto& r) {
        if (l.second != r.second) return l.second > r.second;
        return l.first < r.first;
    });
    for (auto& [label, count] : items) map.ordered_categories.push_back(label);
    return map;
}

OrdinalMap fit_ordinal_map(const std::string& column, const std::vector<std::string>& values,
                           const std::vector<std::string>& order,
                           const std::string& missing_label) {
    std::set<std::string> known(order.begin(), order.end());
    std::set<std::string> unknown;
    bool any = false;
    for (const auto& v : values) {
        if (v.empty() || (!missing_label.empty() && v == missing_label)) continue;
        any = true;
        if (!known.count(v)) unknown.insert(v);
    }
    if (!any)
        throw Error::validation("fit_ordinal_map: no non-missing values in column " + column);
    if (!unknown.empty()) {
        std::string msg = "fit_ordinal_map: explicit order for column " + column +
                          " is missing observed label(s):";
        for (const auto& u : unknown) msg += " '" + u + "'";
        throw Error::validation(msg);
    }
    OrdinalMap map;
    map.column = column;
    map.explicit_order = true;
    map.ordered_categories = order;
    return map;
}

void BinSpec::validate() const {
    if (ranges.empty())
        throw Error::validation("bin spec: no ranges");
    int expect = 1;
    for (const auto& r : ranges) {
        if (r.lo != expect || r.hi < r.lo)
            throw Error::validation("bin spec: ranges must be contiguous and cover [1,120]");
        expect = r.hi + 1;
    }
    if (expect != 121)
        throw Error::validation("bin spec: ranges must end at 120");
}

BinSpec BinSpec::default_bins() {
    return from_edges({{1, 5}, {6, 10}, {11, 20}, {21, 30}, {31, 50}, {51, 120}});
}

BinSpec BinSpec::from_edges(const std::vector<std::pair<int, int>>& edges) {
    BinSpec spec;
    for (const auto& [lo, hi] : edges) {
        BinSpec::Range r;
        r.lo = lo;
        r.hi = hi;
        r.label = std::to_string(lo) + "-" + std::to_string(hi);
        spec.ranges.push_back(std::move(r));
    }
    spec.validate();
    return spec;
}

int assign_bin(int los_days, const BinSpec& spec) {
    if (los_days < 1 || los_days > 120)
        throw Error::validation("assign_bin: LoS " + std::to_string(los_days) +
                                " outside [1,120]");
    for (std::size_t i = 0; i < spec.ranges.size(); ++i)
        if (los_days >= spec.ranges[i].lo && los_days <= spec.ranges[i].hi)
            return static_cast<int>(i);
    throw Error::validation("assign_bin: no range for " + std::to_string(los_days));
}

Standardizer fit_standardizer(const FeatureMatrix& X) {
    const std::size_t n = X.n_rows(), d = X.n_features();
    if (n < 2)
        throw Error::validation("fit_standardizer: need at least 2 rows");
    Standardizer s;
    s.feature_names = X.feature_names;
    s.mean.resize(d);
    s.stddev.resize(d);
    s.zero_variance.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        double sum = 0;
        for (std::size_t i = 0; i < n; ++i) sum += X.values(i, j);
        const double mu = sum / static_cast<double>(n);
        double ss = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dlt = X.values(i, j) - mu;
            ss += dlt * dlt;
        }
        s.mean[j] = mu;
        s.stddev[j] = std::sqrt(ss / static_cast<double>(n));
        s.zero_variance[j] = s.stddev[j] == 0.0 ? 1 : 0;
    }
    return s;
}

FeatureMatrix standardize(const Standardizer& params, const FeatureMatrix& X) {
    if (params.feature_names != X.feature_names)
        throw Error::validation("standardize: feature names do not match the fitted params");
    FeatureMatrix out;
    out.feature_names = X.feature_names;
    out.values = Matrix(X.n_rows(), X.n_features());
    for (std::size_t j = 0; j < X.n_features(); ++j) {
        if (params.zero_variance[j]) continue;  // column stays 0
        const double mu = params.mean[j], sd = params.stddev[j];
        for (std::size_t i = 0; i < X.n_rows(); ++i)
            out.values(i, j) = (X.values(i, j) - mu) / sd;
    }
    return out;
}

const std::map<std::string, std::vector<std::string>>& default_explicit_orders() {
    static const std::map<std::string, std::vector<std::string>> orders = {
        {"Age Group", {"0 to 17", "18 to 29", "30 to 49", "50 to 69", "70 or Older"}},
        {"APR Risk of Mortality", {"Minor", "Moderate", "Major", "Extreme"}},
        {"APR Severity of Illness Description", {"Minor", "Moderate", "Major", "Extreme"}},
    };
    return orders;
}

EncoderSet fit_encoders(const Dataset& ds, const BinSpec& bins,
                        const std::map<std::string, std::vector<std::string>>& explicit_orders,
                        const std::string& missing_label) {
    bins.validate();
    EncoderSet enc;
    enc.bins = bins;
    for (std::size_t c = 0; c < ds.columns.size(); ++c) {
        if (ds.columns[c].kind != ColumnKind::categorical) continue;
        const auto it = explicit_orders.find(ds.names[c]);
        if (it != explicit_orders.end())
            enc.maps.push_back(
                fit_ordinal_map(ds.names[c], ds.columns[c].cat, it->second, missing_label));
        else
            enc.maps.push_back(fit_ordinal_map(ds.names[c], ds.columns[c].cat));
    }
    return enc;
}

std::pair<FeatureMatrix, LabelVector> build_design_matrix(const Dataset& ds,
                                                          const EncoderSet& encoders) {
    const auto los_idx = ds.los_index();
    if (!los_idx)
        throw Error::validation("build_design_matrix: LoS column absent");

    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < ds.columns.size(); ++c) {
        if (c == *los_idx) continue;
        if (ds.columns[c].kind == ColumnKind::categorical &&
            encoders.find_map(ds.names[c]) == nullptr)
            throw Error::validation("build_design_matrix: no fitted ordinal map for column " +
                                    ds.names[c]);
        feature_cols.push_back(c);
    }
    if (feature_cols.empty())
        throw Error::validation("build_design_matrix: empty feature set");

    FeatureMatrix X;
    X.values = Matrix(ds.n_rows, feature_cols.size());
    for (std::size_t j = 0; j < feature_cols.size(); ++j)
        X.feature_names.push_back(ds.names[feature_cols[j]]);

    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
        const Column& col = ds.columns[feature_cols[j]];
        if (col.kind == ColumnKind::categorical) {
            const OrdinalMap* map = encoders.find_map(X.feature_names[j]);
            for (std::size_t i = 0; i < ds.n_rows; ++i)
                X.values(i, j) = map->code(col.cat[i]);
        } else {
            for (std::size_t i = 0; i < ds.n_rows; ++i) {
                const double v = col.num[i];
                if (std::isnan(v))
                    throw Error::runtime("build_design_matrix: missing value in column " +
                                         X.feature_names[j] + " at row " + std::to_string(i) +
                                         "; clean the dataset first");
                X.values(i, j) = v;
            }
        }
    }

    LabelVector y(ds.n_rows);
    const Column& los_col = ds.columns[*los_idx];
    for (std::size_t i = 0; i < ds.n_rows; ++i) {
        if (los_col.los[i] == 0)
            throw Error::runtime("build_design_matrix: missing LoS at row " + std::to_string(i) +
                                 "; clean the dataset first");
        y[i] = assign_bin(los_col.los[i], encoders.bins);
    }
    X.validate();
    return {std::move(X), std::move(y)};
}

}  // namespace loskit
