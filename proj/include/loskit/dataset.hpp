#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "loskit/error.hpp"

namespace loskit {

enum class ColumnKind { categorical, numeric, currency, los };

std::string column_kind_name(ColumnKind k);
ColumnKind column_kind_from_name(const std::string& name);

struct ColumnSpec {
    std::string name;          // canonical column name
    ColumnKind kind = ColumnKind::categorical;
    bool required = true;
    std::string source;        // header name in the file; empty means same as `name`

    const std::string& header() const { return source.empty() ? name : source; }
};

// Validated column list: unique names, exactly one LoS column.
class Schema {
public:
    explicit Schema(std::vector<ColumnSpec> cols);

    const std::vector<ColumnSpec>& columns() const noexcept { return cols_; }
    const ColumnSpec& los_column() const { return cols_[los_index_]; }

    // Applies a canonical-name -> file-header mapping.
    Schema with_mapping(const std::map<std::string, std::string>& mapping) const;

private:
    std::vector<ColumnSpec> cols_;
    std::size_t los_index_ = 0;
};

// The canonical SPARCS inpatient-discharge column set.
Schema default_schema();

// Columns removed from raw SPARCS exports before analysis.
const std::vector<std::string>& default_drop_list();

// One typed column. Missing cells: "" for categorical, NaN for numeric and
// currency, 0 for LoS.
struct Column {
    ColumnKind kind = ColumnKind::categorical;
    std::vector<std::string> cat;
    std::vector<double> num;
    std::vector<int> los;

    std::size_t size() const {
        switch (kind) {
            case ColumnKind::categorical: return cat.size();
            case ColumnKind::los: return los.size();
            default: return num.size();
        }
    }
    bool is_numeric_kind() const {
        return kind == ColumnKind::numeric || kind == ColumnKind::currency ||
               kind == ColumnKind::los;
    }
    // Numeric view of the cell: codes are not applied here, only raw values.
    double numeric_at(std::size_t i) const;
    bool missing_at(std::size_t i) const;
};

// Immutable after load/clean. Column order follows the schema.
struct Dataset {
    std::vector<std::string> names;
    std::vector<Column> columns;
    std::size_t n_rows = 0;

    std::optional<std::size_t> index_of(const std::string& name) const;
    const Column& column(const std::string& name) const;
    std::optional<std::size_t> los_index() const;
    void validate() const;
};

struct CleanReport {
    std::size_t rows_dropped = 0;
    std::map<std::string, std::size_t> missing_per_column;
    std::vector<std::string> columns_dropped;
    std::vector<std::string> drop_misses;  // requested drops that were not present
};

struct MissingPolicy {
    std::string categorical_fill = "Unknown";
    bool drop_missing_target = true;   // rows without LoS are removed
    bool numeric_median_fill = true;   // numerics get the column median
};

struct NumericSummary {
    double min = 0, max = 0, mean = 0, stddev = 0;
    std::size_t n_missing = 0;
    bool degenerate = false;  // zero variance
};

struct CategoricalSummary {
    // (label, count) sorted by descending count, ties lexicographic.
    std::vector<std::pair<std::string, std::size_t>> frequencies;
    std::size_t n_missing = 0;
};

struct CorrelationEntry {
    std::string a, b;
    double r = 0;
    bool degenerate = false;  // a zero-variance side; r reported as 0
};

struct GroupByRow {
    std::string category;
    double mean_los = 0;
    std::size_t count = 0;       // rows in this category
    std::size_t n_with_los = 0;  // rows that contributed to the mean
};

struct ProfileReport {
    std::map<std::string, NumericSummary> numeric;
    std::map<std::string, CategoricalSummary> categorical;
    std::vector<CorrelationEntry> correlations;            // every numeric-kind pair
    std::map<std::string, std::vector<GroupByRow>> group_mean_los;
    std::vector<std::size_t> los_histogram;                // counts for days 1..120
};

// "5" -> 5; "120 +" and anything >= 120 -> 120. Zero, negative or non-numeric
// input is a parse error.
int parse_los(const std::string& raw);

// Strips "$" and "," then parses a decimal number.
double parse_currency(const std::string& raw);

// Loads the schema columns (in schema order) from a CSV file.
Dataset load_csv(const std::string& path, const Schema& schema);

struct CsvWriteOptions {
    bool currency_dollars = false;  // format currency as "$1,234.56"
};

void write_csv(const Dataset& ds, const std::string& path, const CsvWriteOptions& opts = {});

// Removes the listed columns. Absent names are no-ops recorded in the report.
Dataset drop_columns(const Dataset& ds, const std::vector<std::string>& names,
                     CleanReport* report = nullptr);

// Drops rows with missing LoS, fills missing categoricals with the policy
// label and missing numerics with the column median.
std::pair<Dataset, CleanReport> clean(const Dataset& ds, const MissingPolicy& policy = {});

// Summary stats, Pearson correlations over numeric-kind columns, and
// per-category mean LoS for every categorical column (plus any columns named
// in `extra_groupby`, e.g. diagnosis codes).
ProfileReport profile(const Dataset& ds, const std::vector<std::string>& extra_groupby = {});

}  // namespace loskit
