#include "psvm/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "psvm/parallel.hpp"
#include "psvm/rng.hpp"

namespace psvm {

int RawTable::find(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

const SchemaColumn* Schema::find(const std::string& name) const {
    for (const SchemaColumn& c : columns)
        if (c.name == name) return &c;
    return nullptr;
}

bool is_missing_token(const std::string& s) {
    return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "null";
}

namespace {

constexpr const char* kMissingCategory = "<MISSING>";

double parse_numeric_cell(const std::string& cell, const std::string& column) {
    if (is_missing_token(cell)) return std::numeric_limits<double>::quiet_NaN();
    try {
        std::size_t pos = 0;
        double v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw DataError("column '" + column + "': cannot parse numeric cell '" + cell + "'");
    }
}

FeatureKind kind_from_schema(const std::string& kind, const std::string& column) {
    if (kind == "binary") return FeatureKind::Binary;
    if (kind == "integer") return FeatureKind::Integer;
    if (kind == "continuous") return FeatureKind::Continuous;
    throw DataError("column '" + column + "': unknown schema kind '" + kind + "'");
}

void expand_categorical(const std::string& name, const std::vector<std::string>& cells,
                        const std::vector<std::string>& categories, NumericTable& out) {
    for (const std::string& cat : categories) {
        std::vector<double> col(cells.size(), 0.0);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const std::string& value =
                is_missing_token(cells[i]) ? kMissingCategory : cells[i];
            if (value == cat) col[i] = 1.0;
        }
        out.names.push_back(name + "=" + cat);
        out.kinds.push_back(FeatureKind::CategoricalExpanded);
        out.columns.push_back(std::move(col));
    }
}

NumericTable encode(const RawTable& raw, const Schema& schema, const CategoryMap* frozen,
                    CategoryMap* learned) {
    NumericTable out;
    for (std::size_t c = 0; c < raw.n_cols(); ++c) {
        const std::string& name = raw.names[c];
        if (!schema.label.empty() && name == schema.label) continue;
        const SchemaColumn* sc = schema.find(name);
        const std::string kind = sc ? sc->kind : "continuous";
        if (kind == "categorical") {
            std::vector<std::string> categories;
            if (frozen) {
                auto it = frozen->find(name);
                if (it == frozen->end())
                    throw DataError("column '" + name + "': no frozen categories in pipeline");
                categories = it->second;
            } else {
                std::set<std::string> seen;
                for (const std::string& cell : raw.columns[c])
                    seen.insert(is_missing_token(cell) ? kMissingCategory : cell);
                bool missing = seen.erase(kMissingCategory) > 0;
                categories.assign(seen.begin(), seen.end());
                if (missing) categories.push_back(kMissingCategory);
                if (learned) (*learned)[name] = categories;
            }
            expand_categorical(name, raw.columns[c], categories, out);
        } else {
            std::vector<double> col(raw.n_rows());
            for (std::size_t i = 0; i < raw.n_rows(); ++i)
                col[i] = parse_numeric_cell(raw.columns[c][i], name);
            out.names.push_back(name);
            out.kinds.push_back(kind_from_schema(kind, name));
            out.columns.push_back(std::move(col));
        }
    }
    return out;
}

}  // namespace

NumericTable one_hot(const RawTable& raw, const Schema& schema, CategoryMap* learned) {
    return encode(raw, schema, nullptr, learned);
}

NumericTable one_hot_apply(const RawTable& raw, const Schema& schema, const CategoryMap& cats) {
    return encode(raw, schema, &cats, nullptr);
}

NumericTable impute_knn(const NumericTable& table, int k) {
    if (k < 1)
        throw std::invalid_argument("impute_knn: k must be >= 1");
    const std::size_t n = table.n_rows();
    const std::size_t D = table.n_cols();

    std::vector<char> observed(n * D);
    std::vector<char> row_has_missing(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t seen = 0;
        for (std::size_t c = 0; c < D; ++c) {
            bool ok = !std::isnan(table.columns[c][i]);
            observed[i * D + c] = ok;
            seen += ok;
            row_has_missing[i] |= !ok;
        }
        if (D > 0 && seen == 0)
            throw DataError("impute_knn: row " + std::to_string(i) + " has no observed values");
    }

    NumericTable out = table;
    // Distances and donor values are read from the original table, so rows
    // can be filled independently. Errors are collected and rethrown after
    // the loop; exceptions must not unwind through the parallel region.
    std::vector<std::string> row_error(n);
    parallel_for(n, [&](std::size_t i) {
        if (!row_has_missing[i]) return;
        std::vector<std::pair<double, std::size_t>> dist;  // (distance, row)
        dist.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double d2 = 0.0;
            std::size_t shared = 0;
            for (std::size_t c = 0; c < D; ++c) {
                if (!observed[i * D + c] || !observed[j * D + c]) continue;
                double diff = table.columns[c][i] - table.columns[c][j];
                d2 += diff * diff;
                ++shared;
            }
            if (shared == 0) continue;
            dist.emplace_back(std::sqrt(d2), j);
        }
        std::sort(dist.begin(), dist.end());
        for (std::size_t c = 0; c < D; ++c) {
            if (observed[i * D + c]) continue;
            double sum = 0.0;
            int used = 0;
            for (const auto& [d, j] : dist) {
                if (!observed[j * D + c]) continue;
                sum += table.columns[c][j];
                if (++used == k) break;
            }
            if (used == 0) {
                row_error[i] = "impute_knn: no donors for row " + std::to_string(i) +
                               ", column '" + table.names[c] + "'";
                return;
            }
            out.columns[c][i] = sum / used;
        }
    });
    for (const std::string& err : row_error)
        if (!err.empty()) throw DataError(err);
    return out;
}

namespace {

double sample_std(const std::vector<double>& col) {
    const std::size_t n = col.size();
    if (n < 2) return 0.0;
    double mean = std::accumulate(col.begin(), col.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (n - 1));
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

NumericTable keep_columns(const NumericTable& table, const std::vector<char>& keep) {
    NumericTable out;
    for (std::size_t c = 0; c < table.n_cols(); ++c) {
        if (!keep[c]) continue;
        out.names.push_back(table.names[c]);
        out.kinds.push_back(table.kinds[c]);
        out.columns.push_back(table.columns[c]);
    }
    return out;
}

}  // namespace

NumericTable drop_low_variance(const NumericTable& table, double threshold,
                               std::vector<std::string>* removed) {
    std::vector<char> keep(table.n_cols(), 1);
    for (std::size_t c = 0; c < table.n_cols(); ++c) {
        if (sample_std(table.columns[c]) < threshold) {
            keep[c] = 0;
            if (removed) removed->push_back(table.names[c]);
        }
    }
    return keep_columns(table, keep);
}

NumericTable drop_correlated(const NumericTable& table, double threshold,
                             std::vector<std::string>* removed) {
    const std::size_t D = table.n_cols();
    std::vector<char> keep(D, 1);
    for (std::size_t i = 0; i < D; ++i) {
        if (!keep[i]) continue;
        for (std::size_t j = i + 1; j < D; ++j) {
            if (!keep[j]) continue;
            if (std::abs(pearson(table.columns[i], table.columns[j])) > threshold) {
                keep[j] = 0;
                if (removed) removed->push_back(table.names[j]);
            }
        }
    }
    return keep_columns(table, keep);
}

NumericTable minmax_scale(const NumericTable& table, ScalingParams& params) {
    params.min.assign(table.n_cols(), 0.0);
    params.range.assign(table.n_cols(), 1.0);
    NumericTable out = table;
    for (std::size_t c = 0; c < table.n_cols(); ++c) {
        const auto& col = table.columns[c];
        if (col.empty()) continue;
        double lo = *std::min_element(col.begin(), col.end());
        double hi = *std::max_element(col.begin(), col.end());
        params.min[c] = lo;
        params.range[c] = hi > lo ? hi - lo : 1.0;
        for (double& v : out.columns[c]) v = (v - lo) / params.range[c];
    }
    return out;
}

namespace {

Dataset subset(const Dataset& data, const std::vector<std::size_t>& idx) {
    Dataset out;
    out.meta = data.meta;
    out.scaling = data.scaling;
    out.X = Matrix(idx.size(), data.n_features());
    out.y.reserve(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        std::copy(data.X.row(idx[r]), data.X.row(idx[r]) + data.n_features(), out.X.row(r));
        out.y.push_back(data.y[idx[r]]);
    }
    return out;
}

}  // namespace

SplitResult split_dataset(const Dataset& data, double train_frac, double validation_frac,
                          double test_frac, std::uint64_t seed) {
    if (std::abs(train_frac + validation_frac + test_frac - 1.0) > 1e-9)
        throw std::invalid_argument("split_dataset: fractions must sum to 1");
    const std::size_t n = data.n_samples();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    const std::size_t n_val = static_cast<std::size_t>(validation_frac * n);
    const std::size_t n_test = static_cast<std::size_t>(test_frac * n);
    const std::size_t n_train = n - n_val - n_test;

    SplitResult out;
    out.train_idx.assign(order.begin(), order.begin() + n_train);
    out.validation_idx.assign(order.begin() + n_train, order.begin() + n_train + n_val);
    out.test_idx.assign(order.begin() + n_train + n_val, order.end());
    std::sort(out.train_idx.begin(), out.train_idx.end());
    std::sort(out.validation_idx.begin(), out.validation_idx.end());
    std::sort(out.test_idx.begin(), out.test_idx.end());
    out.train = subset(data, out.train_idx);
    out.validation = subset(data, out.validation_idx);
    out.test = subset(data, out.test_idx);
    return out;
}

RawTable filter_rows(const RawTable& raw, const Schema& schema) {
    if (schema.drop_rows_where.empty()) return raw;
    std::vector<char> drop(raw.n_rows(), 0);
    for (const RowFilter& f : schema.drop_rows_where) {
        int c = raw.find(f.column);
        if (c < 0)
            throw DataError("row filter references unknown column '" + f.column + "'");
        for (std::size_t i = 0; i < raw.n_rows(); ++i)
            if (raw.columns[c][i] == f.equals) drop[i] = 1;
    }
    RawTable out;
    out.names = raw.names;
    out.columns.resize(raw.n_cols());
    for (std::size_t c = 0; c < raw.n_cols(); ++c)
        for (std::size_t i = 0; i < raw.n_rows(); ++i)
            if (!drop[i]) out.columns[c].push_back(raw.columns[c][i]);
    return out;
}

std::vector<FeatureMeta> build_feature_meta(const NumericTable& table, const Schema& schema) {
    std::vector<FeatureMeta> meta;
    meta.reserve(table.n_cols());
    for (std::size_t c = 0; c < table.n_cols(); ++c) {
        FeatureMeta m;
        m.name = table.names[c];
        m.kind = table.kinds[c];
        if (const SchemaColumn* sc = schema.find(m.name)) {
            m.controllable = sc->controllable;
            if (sc->lower) m.raw_lower = *sc->lower;
            if (sc->upper) m.raw_upper = *sc->upper;
            if (m.controllable && m.kind != FeatureKind::Continuous &&
                m.kind != FeatureKind::Integer)
                throw DataError("column '" + m.name +
                                "': controllable features must be continuous or integer");
        }
        meta.push_back(std::move(m));
    }
    return meta;
}

namespace {

std::vector<int> parse_labels(const RawTable& raw, const Schema& schema) {
    if (schema.label.empty())
        throw DataError("schema does not name a label column");
    int c = raw.find(schema.label);
    if (c < 0)
        throw DataError("label column '" + schema.label + "' not found");
    std::vector<int> y(raw.n_rows());
    for (std::size_t i = 0; i < raw.n_rows(); ++i) {
        double v = parse_numeric_cell(raw.columns[c][i], schema.label);
        if (std::isnan(v))
            throw DataError("label column has a missing value at row " + std::to_string(i));
        if (schema.label_zero_one) {
            if (v == 0.0) y[i] = -1;
            else if (v == 1.0) y[i] = 1;
            else throw DataError("label must be 0 or 1 (label_zero_one set)");
        } else {
            if (v == -1.0) y[i] = -1;
            else if (v == 1.0) y[i] = 1;
            else throw DataError("label must be -1 or +1");
        }
    }
    return y;
}

Dataset table_to_dataset(const NumericTable& table, std::vector<int> y,
                         std::vector<FeatureMeta> meta, ScalingParams scaling) {
    Dataset out;
    out.X = Matrix(table.n_rows(), table.n_cols());
    for (std::size_t c = 0; c < table.n_cols(); ++c)
        for (std::size_t i = 0; i < table.n_rows(); ++i) out.X.at(i, c) = table.columns[c][i];
    out.y = std::move(y);
    out.meta = std::move(meta);
    out.scaling = std::move(scaling);
    return out;
}

}  // namespace

Dataset fit_pipeline(const RawTable& raw_in, const Schema& schema, const PipelineOptions& opts,
                     PipelineMeta& meta_out) {
    RawTable raw = filter_rows(raw_in, schema);
    std::vector<int> y = parse_labels(raw, schema);

    meta_out = PipelineMeta{};
    meta_out.options = opts;
    meta_out.schema = schema;

    NumericTable t = one_hot(raw, schema, &meta_out.categories);
    t = impute_knn(t, opts.knn_k);
    t = drop_low_variance(t, opts.variance_threshold, &meta_out.dropped_low_variance);
    t = drop_correlated(t, opts.correlation_threshold, &meta_out.dropped_correlated);
    ScalingParams scaling;
    t = minmax_scale(t, scaling);

    meta_out.features = build_feature_meta(t, schema);
    meta_out.scaling = scaling;

    Dataset data = table_to_dataset(t, std::move(y), meta_out.features, scaling);
    data.validate();
    return data;
}

Dataset apply_pipeline(const RawTable& raw_in, const PipelineMeta& meta) {
    RawTable raw = filter_rows(raw_in, meta.schema);
    std::vector<int> y = parse_labels(raw, meta.schema);

    NumericTable t = one_hot_apply(raw, meta.schema, meta.categories);
    t = impute_knn(t, meta.options.knn_k);

    std::set<std::string> dropped(meta.dropped_low_variance.begin(),
                                  meta.dropped_low_variance.end());
    dropped.insert(meta.dropped_correlated.begin(), meta.dropped_correlated.end());
    std::vector<char> keep(t.n_cols(), 1);
    for (std::size_t c = 0; c < t.n_cols(); ++c)
        if (dropped.count(t.names[c])) keep[c] = 0;
    t = keep_columns(t, keep);

    if (t.n_cols() != meta.features.size())
        throw DataError("apply_pipeline: columns do not match the fitted pipeline");
    for (std::size_t c = 0; c < t.n_cols(); ++c) {
        if (t.names[c] != meta.features[c].name)
            throw DataError("apply_pipeline: column '" + t.names[c] +
                            "' does not match fitted feature '" + meta.features[c].name + "'");
        for (double& v : t.columns[c]) v = meta.scaling.scale(c, v);
    }
    return table_to_dataset(t, std::move(y), meta.features, meta.scaling);
}

}  // namespace psvm
