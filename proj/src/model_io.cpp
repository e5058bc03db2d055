#include "psvm/model_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "psvm/csv.hpp"

namespace psvm {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write '" + path + "'");
    out << text;
}

std::optional<double> ModelFile::threshold() const { return tau; }

void ModelFile::set_threshold(double t) {
    tau = t;
    if (auto* lm = std::get_if<LinearModel>(&model)) lm->threshold = t;
    if (auto* jm = std::get_if<JccModel>(&model))
        for (LinearModel& m : jm->models) m.threshold = t;
}

namespace {

json beta_to_sparse(const LinearModel& m, const std::vector<std::string>& names) {
    json out = json::object();
    for (std::size_t d = 0; d < m.beta.size(); ++d)
        if (m.beta[d] != 0.0) out[names[d]] = m.beta[d];
    return out;
}

std::vector<double> beta_from_sparse(const json& j, const std::vector<std::string>& names) {
    std::vector<double> beta(names.size(), 0.0);
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool found = false;
        for (std::size_t d = 0; d < names.size(); ++d) {
            if (names[d] == it.key()) {
                beta[d] = it.value().get<double>();
                found = true;
                break;
            }
        }
        if (!found)
            throw DataError("model references unknown feature '" + it.key() + "'");
    }
    return beta;
}

json cluster_to_json(const LinearModel& m, const std::vector<std::string>& names) {
    json c;
    c["beta"] = beta_to_sparse(m, names);
    c["beta0"] = m.beta0;
    c["C"] = m.C;
    if (std::isfinite(m.T)) c["T"] = m.T;
    return c;
}

LinearModel cluster_from_json(const json& c, const std::vector<std::string>& names) {
    LinearModel m;
    m.beta = beta_from_sparse(c.at("beta"), names);
    m.beta0 = c.at("beta0").get<double>();
    m.C = c.value("C", 1.0);
    m.T = c.contains("T") ? c.at("T").get<double>()
                          : std::numeric_limits<double>::infinity();
    return m;
}

}  // namespace

std::string model_to_json(const ModelFile& mf) {
    json j;
    j["format_version"] = mf.format_version;
    j["algorithm"] = mf.algorithm;
    j["feature_names"] = mf.feature_names;
    if (mf.tau) j["threshold"] = *mf.tau;
    if (mf.scaling_ref) j["scaling_ref"] = *mf.scaling_ref;
    if (const LinearModel* lm = mf.as_linear()) {
        j["clusters"] = json::array({cluster_to_json(*lm, mf.feature_names)});
    } else if (const JccModel* jm = mf.as_jcc()) {
        json clusters = json::array();
        for (const LinearModel& m : jm->models)
            clusters.push_back(cluster_to_json(m, mf.feature_names));
        j["clusters"] = std::move(clusters);
        j["lambda_neg"] = jm->lambda_neg;
        j["lambda_pos"] = jm->lambda_pos;
        j["budgets"] = jm->budgets;
        j["assignment"] = jm->assignment;
    }
    return j.dump(2) + "\n";
}

ModelFile model_from_json(const std::string& text) {
    json j = json::parse(text);
    ModelFile mf;
    mf.format_version = j.at("format_version").get<int>();
    if (mf.format_version != kModelFormatVersion)
        throw DataError("unsupported model format_version " +
                        std::to_string(mf.format_version));
    mf.algorithm = j.at("algorithm").get<std::string>();
    mf.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    if (j.contains("threshold")) mf.tau = j.at("threshold").get<double>();
    if (j.contains("scaling_ref")) mf.scaling_ref = j.at("scaling_ref").get<std::string>();

    const json& clusters = j.at("clusters");
    if (mf.algorithm == "jcc") {
        JccModel jm;
        for (const json& c : clusters)
            jm.models.push_back(cluster_from_json(c, mf.feature_names));
        jm.lambda_neg = j.at("lambda_neg").get<double>();
        jm.lambda_pos = j.at("lambda_pos").get<double>();
        jm.budgets = j.at("budgets").get<std::vector<double>>();
        if (j.contains("assignment")) jm.assignment = j.at("assignment").get<std::vector<int>>();
        if (mf.tau)
            for (LinearModel& m : jm.models) m.threshold = *mf.tau;
        mf.model = std::move(jm);
    } else if (mf.algorithm == "slsvm" || mf.algorithm == "l2lr") {
        if (clusters.size() != 1)
            throw DataError("model '" + mf.algorithm + "' must have exactly one cluster");
        LinearModel lm = cluster_from_json(clusters[0], mf.feature_names);
        if (mf.tau) lm.threshold = *mf.tau;
        mf.model = std::move(lm);
    } else {
        throw DataError("unknown algorithm '" + mf.algorithm + "'");
    }
    return mf;
}

void save_model(const std::string& path, const ModelFile& mf) {
    write_file(path, model_to_json(mf));
}

ModelFile load_model(const std::string& path) { return model_from_json(read_file(path)); }

namespace {

json schema_to_json_obj(const Schema& s) {
    json j;
    j["format_version"] = 1;
    j["label"] = s.label;
    j["label_zero_one"] = s.label_zero_one;
    json cols = json::array();
    for (const SchemaColumn& c : s.columns) {
        json jc;
        jc["name"] = c.name;
        jc["kind"] = c.kind;
        jc["controllable"] = c.controllable;
        if (c.lower) jc["lower"] = *c.lower;
        if (c.upper) jc["upper"] = *c.upper;
        if (c.direction != "both") jc["direction"] = c.direction;
        cols.push_back(std::move(jc));
    }
    j["columns"] = std::move(cols);
    if (!s.drop_rows_where.empty()) {
        json filters = json::array();
        for (const RowFilter& f : s.drop_rows_where)
            filters.push_back(json{{"column", f.column}, {"equals", f.equals}});
        j["drop_rows_where"] = std::move(filters);
    }
    return j;
}

Schema schema_from_json_obj(const json& j) {
    Schema s;
    s.label = j.at("label").get<std::string>();
    s.label_zero_one = j.value("label_zero_one", false);
    if (j.contains("columns")) {
        for (const json& jc : j.at("columns")) {
            SchemaColumn c;
            c.name = jc.at("name").get<std::string>();
            c.kind = jc.value("kind", std::string("continuous"));
            c.controllable = jc.value("controllable", false);
            if (jc.contains("lower")) c.lower = jc.at("lower").get<double>();
            if (jc.contains("upper")) c.upper = jc.at("upper").get<double>();
            c.direction = jc.value("direction", std::string("both"));
            if (c.direction != "both" && c.direction != "increase" && c.direction != "decrease")
                throw DataError("column '" + c.name + "': bad direction '" + c.direction + "'");
            if (c.lower && c.upper && *c.lower > *c.upper)
                throw DataError("column '" + c.name + "': lower > upper");
            s.columns.push_back(std::move(c));
        }
    }
    if (j.contains("drop_rows_where")) {
        for (const json& jf : j.at("drop_rows_where")) {
            RowFilter f;
            f.column = jf.at("column").get<std::string>();
            f.equals = jf.at("equals").get<std::string>();
            s.drop_rows_where.push_back(std::move(f));
        }
    }
    return s;
}

}  // namespace

Schema schema_from_json(const std::string& text) {
    return schema_from_json_obj(json::parse(text));
}

std::string schema_to_json(const Schema& schema) {
    return schema_to_json_obj(schema).dump(2) + "\n";
}

Schema load_schema(const std::string& path) { return schema_from_json(read_file(path)); }

void save_schema(const std::string& path, const Schema& schema) {
    write_file(path, schema_to_json(schema));
}

namespace {

json feature_meta_to_json(const FeatureMeta& m) {
    json j;
    j["name"] = m.name;
    j["kind"] = to_string(m.kind);
    j["controllable"] = m.controllable;
    if (m.raw_lower) j["raw_lower"] = *m.raw_lower;
    if (m.raw_upper) j["raw_upper"] = *m.raw_upper;
    return j;
}

FeatureMeta feature_meta_from_json(const json& j) {
    FeatureMeta m;
    m.name = j.at("name").get<std::string>();
    m.kind = feature_kind_from_string(j.at("kind").get<std::string>());
    m.controllable = j.value("controllable", false);
    if (j.contains("raw_lower")) m.raw_lower = j.at("raw_lower").get<double>();
    if (j.contains("raw_upper")) m.raw_upper = j.at("raw_upper").get<double>();
    return m;
}

json scaling_to_json(const ScalingParams& s) {
    return json{{"min", s.min}, {"range", s.range}};
}

ScalingParams scaling_from_json(const json& j) {
    ScalingParams s;
    s.min = j.at("min").get<std::vector<double>>();
    s.range = j.at("range").get<std::vector<double>>();
    return s;
}

}  // namespace

std::string pipeline_meta_to_json(const PipelineMeta& meta) {
    json j;
    j["format_version"] = meta.format_version;
    j["options"] = {{"knn_k", meta.options.knn_k},
                    {"variance_threshold", meta.options.variance_threshold},
                    {"correlation_threshold", meta.options.correlation_threshold}};
    j["schema"] = schema_to_json_obj(meta.schema);
    j["categories"] = meta.categories;
    j["dropped_low_variance"] = meta.dropped_low_variance;
    j["dropped_correlated"] = meta.dropped_correlated;
    json feats = json::array();
    for (const FeatureMeta& m : meta.features) feats.push_back(feature_meta_to_json(m));
    j["features"] = std::move(feats);
    j["scaling"] = scaling_to_json(meta.scaling);
    return j.dump(2) + "\n";
}

PipelineMeta pipeline_meta_from_json(const std::string& text) {
    json j = json::parse(text);
    PipelineMeta meta;
    meta.format_version = j.at("format_version").get<int>();
    const json& o = j.at("options");
    meta.options.knn_k = o.at("knn_k").get<int>();
    meta.options.variance_threshold = o.at("variance_threshold").get<double>();
    meta.options.correlation_threshold = o.at("correlation_threshold").get<double>();
    meta.schema = schema_from_json_obj(j.at("schema"));
    meta.categories = j.at("categories").get<CategoryMap>();
    meta.dropped_low_variance = j.at("dropped_low_variance").get<std::vector<std::string>>();
    meta.dropped_correlated = j.at("dropped_correlated").get<std::vector<std::string>>();
    for (const json& jf : j.at("features")) meta.features.push_back(feature_meta_from_json(jf));
    meta.scaling = scaling_from_json(j.at("scaling"));
    return meta;
}

void save_pipeline_meta(const std::string& path, const PipelineMeta& meta) {
    write_file(path, pipeline_meta_to_json(meta));
}

PipelineMeta load_pipeline_meta(const std::string& path) {
    return pipeline_meta_from_json(read_file(path));
}

void save_dataset(const std::string& csv_path, const std::string& meta_path, const Dataset& data,
                  const std::string& label_name) {
    RawTable table;
    for (const FeatureMeta& m : data.meta) table.names.push_back(m.name);
    table.names.push_back(label_name);
    table.columns.resize(table.names.size());
    for (std::size_t c = 0; c < data.n_features(); ++c) {
        table.columns[c].reserve(data.n_samples());
        for (std::size_t i = 0; i < data.n_samples(); ++i)
            table.columns[c].push_back(format_double(data.X.at(i, c)));
    }
    for (std::size_t i = 0; i < data.n_samples(); ++i)
        table.columns.back().push_back(data.y[i] > 0 ? "1" : "-1");
    write_csv(csv_path, table);

    json j;
    j["format_version"] = 1;
    j["label"] = label_name;
    json feats = json::array();
    for (const FeatureMeta& m : data.meta) feats.push_back(feature_meta_to_json(m));
    j["features"] = std::move(feats);
    j["scaling"] = data.scaling ? scaling_to_json(*data.scaling) : json(nullptr);
    write_file(meta_path, j.dump(2) + "\n");
}

Dataset load_dataset(const std::string& csv_path, const std::string& meta_path) {
    json j = json::parse(read_file(meta_path));
    Dataset data;
    for (const json& jf : j.at("features")) data.meta.push_back(feature_meta_from_json(jf));
    if (!j.at("scaling").is_null()) data.scaling = scaling_from_json(j.at("scaling"));
    const std::string label = j.at("label").get<std::string>();

    RawTable table = read_csv(csv_path);
    int label_col = table.find(label);
    if (label_col < 0)
        throw DataError("dataset csv is missing label column '" + label + "'");
    const std::size_t n = table.n_rows();
    data.X = Matrix(n, data.meta.size());
    for (std::size_t d = 0; d < data.meta.size(); ++d) {
        int c = table.find(data.meta[d].name);
        if (c < 0)
            throw DataError("dataset csv is missing feature '" + data.meta[d].name + "'");
        for (std::size_t i = 0; i < n; ++i)
            data.X.at(i, d) = std::stod(table.columns[c][i]);
    }
    data.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = std::stod(table.columns[label_col][i]);
        if (v != 1.0 && v != -1.0)
            throw DataError("dataset label must be -1 or +1");
        data.y[i] = v > 0 ? 1 : -1;
    }
    return data;
}

}  // namespace psvm
