#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "psvm/core.hpp"

namespace psvm {

// Raw CSV contents: header row plus string cells, column-major.
struct RawTable {
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> columns;

    std::size_t n_rows() const { return columns.empty() ? 0 : columns[0].size(); }
    std::size_t n_cols() const { return columns.size(); }
    int find(const std::string& name) const;
};

// Numeric table after encoding; NAN marks a missing cell.
struct NumericTable {
    std::vector<std::string> names;
    std::vector<FeatureKind> kinds;
    std::vector<std::vector<double>> columns;

    std::size_t n_rows() const { return columns.empty() ? 0 : columns[0].size(); }
    std::size_t n_cols() const { return columns.size(); }
};

struct SchemaColumn {
    std::string name;
    std::string kind = "continuous";  // binary | integer | continuous | categorical
    bool controllable = false;
    std::optional<double> lower;
    std::optional<double> upper;
    std::string direction = "both";  // both | increase | decrease
};

struct RowFilter {
    std::string column;
    std::string equals;  // rows whose cell equals this are dropped
};

struct Schema {
    std::string label;
    bool label_zero_one = false;  // map {0,1} labels to {-1,+1} on ingestion
    std::vector<SchemaColumn> columns;
    std::vector<RowFilter> drop_rows_where;

    const SchemaColumn* find(const std::string& name) const;
};

// Values treated as missing cells when parsing.
bool is_missing_token(const std::string& s);

// Sorted category list per categorical column; "<MISSING>" appears when any
// cell was missing during the fit.
using CategoryMap = std::map<std::string, std::vector<std::string>>;

// Expands categorical columns into one indicator column per category
// ("name=category"); missing values become their own category. Other columns
// are parsed as numbers with missing cells set to NaN.
NumericTable one_hot(const RawTable& raw, const Schema& schema, CategoryMap* learned = nullptr);

// Same expansion with frozen category maps; unseen categories produce
// all-zero indicators.
NumericTable one_hot_apply(const RawTable& raw, const Schema& schema, const CategoryMap& cats);

// Each missing cell <- mean of that column over the k nearest donor rows
// (Euclidean distance on mutually observed columns of the original table,
// ties by row index; donors must hold the column). Throws DataError for a
// row with no observed cells.
NumericTable impute_knn(const NumericTable& table, int k);

// Removes columns with sample standard deviation < threshold (strict).
NumericTable drop_low_variance(const NumericTable& table, double threshold,
                               std::vector<std::string>* removed = nullptr);

// Scans pairs in index order; |Pearson r| > threshold drops the
// higher-indexed column, which is then skipped in later pairs.
NumericTable drop_correlated(const NumericTable& table, double threshold,
                             std::vector<std::string>* removed = nullptr);

// (v - min) / (max - min) per column; degenerate columns map to 0.
NumericTable minmax_scale(const NumericTable& table, ScalingParams& params);

struct SplitResult {
    Dataset train;
    Dataset validation;
    Dataset test;
    std::vector<std::size_t> train_idx, validation_idx, test_idx;
};

// Uniform random partition without replacement; validation/test sizes are
// floor(fraction*n) and the remainder goes to train.
SplitResult split_dataset(const Dataset& data, double train_frac, double validation_frac,
                          double test_frac, std::uint64_t seed);

struct PipelineOptions {
    int knn_k = 5;
    double variance_threshold = 0.005;
    double correlation_threshold = 0.8;
};

// Everything needed to replay a fitted transform on new rows.
struct PipelineMeta {
    int format_version = 1;
    PipelineOptions options;
    Schema schema;
    CategoryMap categories;
    std::vector<std::string> dropped_low_variance;
    std::vector<std::string> dropped_correlated;
    std::vector<FeatureMeta> features;  // retained, post-encoding
    ScalingParams scaling;
};

// Fixed order: one-hot -> impute -> variance filter -> correlation filter ->
// scale. Labels are mapped to -1/+1 per the schema flag.
Dataset fit_pipeline(const RawTable& raw, const Schema& schema, const PipelineOptions& opts,
                     PipelineMeta& meta_out);

// Applies a fitted pipeline (frozen categories, drops and scaling) to new
// rows; imputation runs within the given table.
Dataset apply_pipeline(const RawTable& raw, const PipelineMeta& meta);

// Row filters from the schema (exact string match on the raw cell).
RawTable filter_rows(const RawTable& raw, const Schema& schema);

// Builds the per-feature FeatureMeta for retained columns, applying the
// schema's controllable flags and raw bounds to surviving source columns.
std::vector<FeatureMeta> build_feature_meta(const NumericTable& table, const Schema& schema);

}  // namespace psvm
