#include "loskit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

#include "loskit/csv.hpp"

namespace loskit {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, bool& ok) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    double v = 0;
    const auto res = std::from_chars(begin, end, v);
    ok = res.ec == std::errc() && res.ptr == end;
    return v;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string column_kind_name(ColumnKind k) {
    switch (k) {
        case ColumnKind::categorical: return "categorical";
        case ColumnKind::numeric: return "numeric";
        case ColumnKind::currency: return "currency";
        case ColumnKind::los: return "los";
    }
    return "?";
}

ColumnKind column_kind_from_name(const std::string& name) {
    if (name == "categorical") return ColumnKind::categorical;
    if (name == "numeric") return ColumnKind::numeric;
    if (name == "currency") return ColumnKind::currency;
    if (name == "los") return ColumnKind::los;
    throw Error::validation("unknown column kind: " + name);
}

Schema::Schema(std::vector<ColumnSpec> cols) : cols_(std::move(cols)) {
    std::set<std::string> seen;
    std::size_t los_count = 0;
    for (std::size_t i = 0; i < cols_.size(); ++i) {
        if (!seen.insert(cols_[i].name).second)
            throw Error::validation("schema: duplicate column name: " + cols_[i].name);
        if (cols_[i].kind == ColumnKind::los) {
            los_index_ = i;
            ++los_count;
        }
    }
    if (los_count != 1)
        throw Error::validation("schema: exactly one LoS column required, got " +
                                std::to_string(los_count));
}

Schema Schema::with_mapping(const std::map<std::string, std::string>& mapping) const {
    std::vector<ColumnSpec> cols = cols_;
    for (auto& c : cols) {
        auto it = mapping.find(c.name);
        if (it != mapping.end()) c.source = it->second;
    }
    return Schema(std::move(cols));
}

Schema default_schema() {
    const ColumnKind cat = ColumnKind::categorical;
    const ColumnKind num = ColumnKind::numeric;
    std::vector<ColumnSpec> cols = {
        {"Health Service Area", cat, false, ""},
        {"Age Group", cat, true, ""},
        {"Gender", cat, false, ""},
        {"Race", cat, false, ""},
        {"Type of Admission", cat, false, ""},
        {"Patient Disposition", cat, false, ""},
        {"CCS Diagnosis Code", num, false, ""},
        {"CCS Procedure Code", num, false, ""},
        {"APR DRG Code", num, false, ""},
        {"APR MDC Code", num, false, ""},
        {"APR Severity of Illness Code", num, false, ""},
        {"APR Severity of Illness Description", cat, false, ""},
        {"APR Risk of Mortality", cat, false, ""},
        {"APR Medical Surgical Description", cat, false, ""},
        {"Payment Typology 1", cat, false, ""},
        {"Emergency Department Indicator", cat, false, ""},
        {"Total Charges", ColumnKind::currency, false, ""},
        {"Total Costs", ColumnKind::currency, false, ""},
        {"Length of Stay", ColumnKind::los, true, ""},
    };
    return Schema(std::move(cols));
}

const std::vector<std::string>& default_drop_list() {
    static const std::vector<std::string> names = {
        "License Number",
        "Payment Typology 2",
        "Payment Typology 3",
        "Zip Code - 3 digits",
        "Facility Id",
        "Attending Provider License Number",
    };
    return names;
}

double Column::numeric_at(std::size_t i) const {
    switch (kind) {
        case ColumnKind::los: return los[i] == 0 ? kMissing : static_cast<double>(los[i]);
        case ColumnKind::categorical:
            throw Error::validation("numeric_at on categorical column");
        default: return num[i];
    }
}

bool Column::missing_at(std::size_t i) const {
    switch (kind) {
        case ColumnKind::categorical: return cat[i].empty();
        case ColumnKind::los: return los[i] == 0;
        default: return std::isnan(num[i]);
    }
}

std::optional<std::size_t> Dataset::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return i;
    return std::nullopt;
}

const Column& Dataset::column(const std::string& name) const {
    auto idx = index_of(name);
    if (!idx) throw Error::validation("no such column: " + name);
    return columns[*idx];
}

std::optional<std::size_t> Dataset::los_index() const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].kind == ColumnKind::los) return i;
    return std::nullopt;
}

void Dataset::validate() const {
    if (names.size() != columns.size())
        throw Error::validation("dataset: name/column count mismatch");
    std::set<std::string> seen;
    for (const auto& n : names)
        if (!seen.insert(n).second)
            throw Error::validation("dataset: duplicate column name: " + n);
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].size() != n_rows)
            throw Error::validation("dataset: column " + names[i] + " has wrong length");
}

int parse_los(const std::string& raw) {
    std::string s = trim(raw);
    if (s.empty())
        throw Error::runtime("LoS parse error: empty value");
    // "120 +" marks stays aggregated at the 120-day cap.
    if (s.back() == '+') {
        s.pop_back();
        s = trim(s);
    }
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw Error::runtime("LoS parse error: '" + raw + "'");
    if (v <= 0)
        throw Error::runtime("LoS parse error: '" + raw + "' (a stay is at least one day)");
    return v >= 120 ? 120 : static_cast<int>(v);
}

double parse_currency(const std::string& raw) {
    std::string s;
    s.reserve(raw.size());
    for (char c : raw)
        if (c != '$' && c != ',') s.push_back(c);
    s = trim(s);
    bool ok = false;
    const double v = parse_double(s, ok);
    if (s.empty() || !ok)
        throw Error::runtime("currency parse error: '" + raw + "'");
    return v;
}

Dataset load_csv(const std::string& path, const Schema& schema) {
    csv::Reader reader(path);

    std::unordered_map<std::string, std::size_t> header_index;
    for (std::size_t i = 0; i < reader.header().size(); ++i)
        header_index.emplace(trim(reader.header()[i]), i);

    struct Slot {
        ColumnSpec spec;
        std::size_t field = 0;
    };
    std::vector<Slot> slots;
    for (const auto& spec : schema.columns()) {
        auto it = header_index.find(spec.header());
        if (it == header_index.end()) {
            if (spec.required)
                throw Error::runtime("required column absent: " + spec.header());
            continue;
        }
        slots.push_back({spec, it->second});
    }

    Dataset ds;
    for (const auto& s : slots) {
        ds.names.push_back(s.spec.name);
        Column col;
        col.kind = s.spec.kind;
        ds.columns.push_back(std::move(col));
    }

    std::vector<std::string> fields;
    const std::size_t width = reader.header().size();
    while (reader.next(fields)) {
        if (fields.size() != width)
            throw Error::runtime("row " + std::to_string(reader.line()) + " has " +
                                 std::to_string(fields.size()) + " fields, expected " +
                                 std::to_string(width));
        for (std::size_t c = 0; c < slots.size(); ++c) {
            const auto& slot = slots[c];
            const std::string cell = trim(fields[slot.field]);
            Column& col = ds.columns[c];
            const bool empty = cell.empty();
            switch (slot.spec.kind) {
                case ColumnKind::categorical:
                    col.cat.push_back(cell);
                    break;
                case ColumnKind::numeric: {
                    if (empty) {
                        col.num.push_back(kMissing);
                        break;
                    }
                    bool ok = false;
                    const double v = parse_double(cell, ok);
                    if (!ok) {
                        if (slot.spec.required)
                            throw Error::runtime("unparseable numeric cell at row " +
                                                 std::to_string(reader.line()) + ", column " +
                                                 slot.spec.name + ": '" + cell + "'");
                        col.num.push_back(kMissing);
                    } else {
                        col.num.push_back(v);
                    }
                    break;
                }
                case ColumnKind::currency: {
                    if (empty) {
                        col.num.push_back(kMissing);
                        break;
                    }
                    try {
                        col.num.push_back(parse_currency(cell));
                    } catch (const Error&) {
                        if (slot.spec.required) throw;
                        col.num.push_back(kMissing);
                    }
                    break;
                }
                case ColumnKind::los: {
                    if (empty) {
                        col.los.push_back(0);
                        break;
                    }
                    try {
                        col.los.push_back(parse_los(cell));
                    } catch (const Error& e) {
                        if (slot.spec.required)
                            throw Error::runtime(std::string(e.what()) + " at row " +
                                                 std::to_string(reader.line()) + ", column " +
                                                 slot.spec.name);
                        col.los.push_back(0);
                    }
                    break;
                }
            }
        }
        ++ds.n_rows;
    }
    ds.validate();
    return ds;
}

namespace {

std::string format_dollars(double v) {
    const bool neg = v < 0;
    const long long cents = std::llround(std::fabs(v) * 100.0);
    std::string digits = std::to_string(cents / 100);
    std::string grouped;
    int k = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it, ++k) {
        if (k && k % 3 == 0) grouped.push_back(',');
        grouped.push_back(*it);
    }
    std::reverse(grouped.begin(), grouped.end());
    const long long frac = cents % 100;
    std::string out = neg ? "-$" : "$";
    out += grouped;
    out.push_back('.');
    out.push_back(static_cast<char>('0' + frac / 10));
    out.push_back(static_cast<char>('0' + frac % 10));
    return out;
}

}  // namespace

void write_csv(const Dataset& ds, const std::string& path, const CsvWriteOptions& opts) {
    csv::Writer writer(path);
    writer.write_row(ds.names);
    std::vector<std::string> row(ds.columns.size());
    for (std::size_t i = 0; i < ds.n_rows; ++i) {
        for (std::size_t c = 0; c < ds.columns.size(); ++c) {
            const Column& col = ds.columns[c];
            switch (col.kind) {
                case ColumnKind::categorical:
                    row[c] = col.cat[i];
                    break;
                case ColumnKind::numeric:
                    row[c] = std::isnan(col.num[i]) ? "" : csv::format_double(col.num[i]);
                    break;
                case ColumnKind::currency:
                    if (std::isnan(col.num[i]))
                        row[c] = "";
                    else
                        row[c] = opts.currency_dollars ? format_dollars(col.num[i])
                                                       : csv::format_double(col.num[i]);
                    break;
                case ColumnKind::los:
                    row[c] = col.los[i] == 0 ? "" : std::to_string(col.los[i]);
                    break;
            }
        }
        writer.write_row(row);
    }
}

Dataset drop_columns(const Dataset& ds, const std::vector<std::string>& names,
                     CleanReport* report) {
    std::set<std::string> wanted(names.begin(), names.end());
    for (const auto& n : names) {
        if (ds.index_of(n)) {
            if (report) report->columns_dropped.push_back(n);
        } else {
            if (report) report->drop_misses.push_back(n);
        }
    }
    Dataset out;
    out.n_rows = ds.n_rows;
    for (std::size_t i = 0; i < ds.names.size(); ++i) {
        if (wanted.count(ds.names[i])) continue;
        out.names.push_back(ds.names[i]);
        out.columns.push_back(ds.columns[i]);
    }
    return out;
}

std::pair<Dataset, CleanReport> clean(const Dataset& ds, const MissingPolicy& policy) {
    const auto los_idx = ds.los_index();
    if (!los_idx)
        throw Error::validation("clean: LoS column absent");

    CleanReport report;
    std::vector<std::size_t> keep;
    keep.reserve(ds.n_rows);
    const Column& los_col = ds.columns[*los_idx];
    for (std::size_t i = 0; i < ds.n_rows; ++i) {
        if (policy.drop_missing_target && los_col.los[i] == 0) {
            ++report.rows_dropped;
        } else {
            keep.push_back(i);
        }
    }
    if (report.rows_dropped > 0)
        report.missing_per_column[ds.names[*los_idx]] = report.rows_dropped;
    if (keep.empty())
        throw Error::runtime("empty dataset after cleaning");

    Dataset out;
    out.n_rows = keep.size();
    out.names = ds.names;
    out.columns.resize(ds.columns.size());
    for (std::size_t c = 0; c < ds.columns.size(); ++c) {
        const Column& src = ds.columns[c];
        Column& dst = out.columns[c];
        dst.kind = src.kind;
        std::size_t filled = 0;
        switch (src.kind) {
            case ColumnKind::categorical: {
                dst.cat.reserve(keep.size());
                for (std::size_t i : keep) {
                    if (src.cat[i].empty()) {
                        dst.cat.push_back(policy.categorical_fill);
                        ++filled;
                    } else {
                        dst.cat.push_back(src.cat[i]);
                    }
                }
                break;
            }
            case ColumnKind::los: {
                dst.los.reserve(keep.size());
                for (std::size_t i : keep) dst.los.push_back(src.los[i]);
                break;
            }
            default: {
                std::vector<double> present;
                for (std::size_t i : keep)
                    if (!std::isnan(src.num[i])) present.push_back(src.num[i]);
                const double fill =
                    policy.numeric_median_fill && !present.empty() ? median_of(present) : 0.0;
                dst.num.reserve(keep.size());
                for (std::size_t i : keep) {
                    if (std::isnan(src.num[i])) {
                        dst.num.push_back(fill);
                        ++filled;
                    } else {
                        dst.num.push_back(src.num[i]);
                    }
                }
                break;
            }
        }
        if (filled > 0) report.missing_per_column[ds.names[c]] += filled;
    }
    return {std::move(out), std::move(report)};
}

namespace {

// Pearson r over rows where both columns are present. Degenerate (zero
// variance or fewer than two overlapping rows) reports r = 0 with a flag.
CorrelationEntry pearson(const Dataset& ds, std::size_t a, std::size_t b) {
    CorrelationEntry e{ds.names[a], ds.names[b], 0.0, false};
    const Column& ca = ds.columns[a];
    const Column& cb = ds.columns[b];
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < ds.n_rows; ++i) {
        if (ca.missing_at(i) || cb.missing_at(i)) continue;
        xs.push_back(ca.numeric_at(i));
        ys.push_back(cb.numeric_at(i));
    }
    const std::size_t n = xs.size();
    if (n < 2) {
        e.degenerate = true;
        return e;
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        e.degenerate = true;
        return e;
    }
    e.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    return e;
}

}  // namespace

ProfileReport profile(const Dataset& ds, const std::vector<std::string>& extra_groupby) {
    if (ds.n_rows == 0)
        throw Error::validation("profile: empty dataset");

    ProfileReport rep;
    const auto los_idx = ds.los_index();

    for (std::size_t c = 0; c < ds.columns.size(); ++c) {
        const Column& col = ds.columns[c];
        if (col.is_numeric_kind()) {
            NumericSummary s;
            double sum = 0, sum2 = 0;
            std::size_t n = 0;
            s.min = std::numeric_limits<double>::infinity();
            s.max = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < ds.n_rows; ++i) {
                if (col.missing_at(i)) {
                    ++s.n_missing;
                    continue;
                }
                const double v = col.numeric_at(i);
                s.min = std::min(s.min, v);
                s.max = std::max(s.max, v);
                sum += v;
                ++n;
            }
            if (n == 0) {
                s.min = s.max = 0;
                s.degenerate = true;
            } else {
                s.mean = sum / static_cast<double>(n);
                for (std::size_t i = 0; i < ds.n_rows; ++i) {
                    if (col.missing_at(i)) continue;
                    const double d = col.numeric_at(i) - s.mean;
                    sum2 += d * d;
                }
                s.stddev = std::sqrt(sum2 / static_cast<double>(n));
                s.degenerate = s.stddev == 0.0;
            }
            rep.numeric[ds.names[c]] = s;
        } else {
            CategoricalSummary s;
            std::map<std::string, std::size_t> counts;
            for (std::size_t i = 0; i < ds.n_rows; ++i) {
                if (col.cat[i].empty())
                    ++s.n_missing;
                else
                    ++counts[col.cat[i]];
            }
            s.frequencies.assign(counts.begin(), counts.end());
            std::stable_sort(s.frequencies.begin(), s.frequencies.end(),
                             [](const auto& l, const auto& r) {
                                 if (l.second != r.second) return l.second > r.second;
                                 return l.first < r.first;
                             });
            rep.categorical[ds.names[c]] = s;
        }
    }

    for (std::size_t a = 0; a < ds.columns.size(); ++a) {
        if (!ds.columns[a].is_numeric_kind()) continue;
        for (std::size_t b = a + 1; b < ds.columns.size(); ++b) {
            if (!ds.columns[b].is_numeric_kind()) continue;
            rep.correlations.push_back(pearson(ds, a, b));
        }
    }

    // Per-category mean LoS tables.
    std::vector<std::size_t> group_cols;
    for (std::size_t c = 0; c < ds.columns.size(); ++c)
        if (ds.columns[c].kind == ColumnKind::categorical) group_cols.push_back(c);
    for (const auto& name : extra_groupby) {
        auto idx = ds.index_of(name);
        if (idx && ds.columns[*idx].kind != ColumnKind::categorical &&
            ds.columns[*idx].kind != ColumnKind::los)
            group_cols.push_back(*idx);
    }

    if (los_idx) {
        const Column& los_col = ds.columns[*los_idx];
        for (std::size_t c : group_cols) {
            const Column& col = ds.columns[c];
            struct Acc {
                double sum = 0;
                std::size_t count = 0, with_los = 0;
            };
            std::map<std::string, Acc> groups;
            for (std::size_t i = 0; i < ds.n_rows; ++i) {
                std::string label;
                if (col.kind == ColumnKind::categorical)
                    label = col.cat[i].empty() ? "(missing)" : col.cat[i];
                else
                    label = col.missing_at(i) ? "(missing)"
                                              : csv::format_double(col.numeric_at(i));
                Acc& acc = groups[label];
                ++acc.count;
                if (los_col.los[i] != 0) {
                    acc.sum += los_col.los[i];
                    ++acc.with_los;
                }
            }
            std::vector<GroupByRow> rows;
            rows.reserve(groups.size());
            for (const auto& [label, acc] : groups) {
                GroupByRow r;
                r.category = label;
                r.count = acc.count;
                r.n_with_los = acc.with_los;
                r.mean_los = acc.with_los ? acc.sum / static_cast<double>(acc.with_los) : 0.0;
                rows.push_back(std::move(r));
            }
            rep.group_mean_los[ds.names[c]] = std::move(rows);
        }

        rep.los_histogram.assign(120, 0);
        for (std::size_t i = 0; i < ds.n_rows; ++i)
            if (los_col.los[i] != 0) ++rep.los_histogram[los_col.los[i] - 1];
    }

    return rep;
}

}  // namespace loskit
