// psvm: sparse prescriptive SVM pipeline
//   gen        synthetic data (planted clusters / controllable hyperplane)
//   preprocess CSV + schema -> scaled feature matrix + pipeline metadata
//   train      slsvm | jcc | l2lr
//   prescribe  per-patient optimal changes to controllable features
//   eval       AUC / calibration / prescription effect comparison

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "psvm/csv.hpp"
#include "psvm/eval.hpp"
#include "psvm/jcc.hpp"
#include "psvm/kernels.hpp"
#include "psvm/model_io.hpp"
#include "psvm/prescribe.hpp"
#include "psvm/preprocess.hpp"
#include "psvm/rng.hpp"
#include "psvm/slsvm.hpp"
#include "psvm/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace psvm;

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("PSVM_OUT_DIR");
    return env && *env ? env : ".";
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

// ---------------------------------------------------------------- gen

struct GenArgs {
    std::string kind = "jcc";
    std::string name;
    std::string out_dir = default_out_dir();
    std::uint64_t seed = 0;
    int L = 2, D = 2, n_pos = 300, n_neg = 300;
    double separation = 8.0, noise_sigma = 1.0;
    int n = 5000;
    std::string beta_csv;
    double beta0 = 0.0;
    int controllable_index = 0;
    double noise = 0.05;
};

void write_raw_csv(const std::string& path, const Dataset& data) {
    RawTable t;
    for (const FeatureMeta& m : data.meta) t.names.push_back(m.name);
    t.names.push_back("label");
    t.columns.resize(t.names.size());
    for (std::size_t c = 0; c < data.n_features(); ++c)
        for (std::size_t i = 0; i < data.n_samples(); ++i)
            t.columns[c].push_back(format_double(data.X.at(i, c)));
    for (int label : data.y) t.columns.back().push_back(label > 0 ? "1" : "-1");
    write_csv(path, t);
}

Schema schema_for(const Dataset& data) {
    Schema s;
    s.label = "label";
    for (const FeatureMeta& m : data.meta) {
        SchemaColumn c;
        c.name = m.name;
        c.kind = to_string(m.kind);
        c.controllable = m.controllable;
        if (m.raw_lower) c.lower = *m.raw_lower;
        if (m.raw_upper) c.upper = *m.raw_upper;
        s.columns.push_back(std::move(c));
    }
    return s;
}

int run_gen(const GenArgs& a) {
    fs::create_directories(a.out_dir);
    const std::string base = a.name.empty() ? (a.kind == "jcc" ? "jcc" : "controllable")
                                            : a.name;
    const fs::path dir(a.out_dir);

    if (a.kind == "jcc") {
        SynthSpec spec;
        spec.L = a.L;
        spec.D = a.D;
        spec.n_pos = a.n_pos;
        spec.n_neg = a.n_neg;
        spec.separation = a.separation;
        spec.noise_sigma = a.noise_sigma;
        spec.seed = a.seed;
        SynthData planted = gen_jcc_data(spec);
        write_raw_csv((dir / (base + ".csv")).string(), planted.data);
        save_schema((dir / (base + ".schema.json")).string(), schema_for(planted.data));
        RawTable clusters;
        clusters.names = {"positive_index", "cluster"};
        clusters.columns.resize(2);
        for (std::size_t p = 0; p < planted.planted.size(); ++p) {
            clusters.columns[0].push_back(std::to_string(p));
            clusters.columns[1].push_back(std::to_string(planted.planted[p]));
        }
        write_csv((dir / (base + ".clusters.csv")).string(), clusters);
        std::cout << "wrote " << (dir / (base + ".csv")).string() << " ("
                  << planted.data.n_samples() << " rows), schema and planted clusters\n";
        return 0;
    }
    if (a.kind == "controllable") {
        ControllableSpec spec;
        spec.D = a.D;
        spec.n = a.n;
        spec.beta = a.beta_csv.empty() ? std::vector<double>() : parse_list(a.beta_csv);
        if (spec.beta.empty()) {
            spec.beta.assign(a.D, 0.0);
            for (int d = 0; d < a.D; ++d) spec.beta[d] = d == 0 ? 3.0 : (d == 1 ? -1.5 : 0.5);
        }
        spec.beta0 = a.beta0;
        spec.controllable_index = static_cast<std::size_t>(a.controllable_index);
        spec.noise_sigma = a.noise;
        spec.seed = a.seed;
        Dataset data = gen_controllable_data(spec);
        write_raw_csv((dir / (base + ".csv")).string(), data);
        save_schema((dir / (base + ".schema.json")).string(), schema_for(data));
        std::cout << "wrote " << (dir / (base + ".csv")).string() << " (" << data.n_samples()
                  << " rows, " << data.count_label(1) << " positive) and schema\n";
        return 0;
    }
    throw std::invalid_argument("gen: unknown kind '" + a.kind + "'");
}

// ---------------------------------------------------------- preprocess

struct PreprocessArgs {
    std::string data_path, schema_path;
    std::string out_dir = default_out_dir();
    std::string name = "data";
    std::string split_csv;  // e.g. 0.6,0.2,0.2
    std::uint64_t seed = 0;
    PipelineOptions options;
};

RawTable select_rows(const RawTable& raw, const std::vector<std::size_t>& idx) {
    RawTable out;
    out.names = raw.names;
    out.columns.resize(raw.n_cols());
    for (std::size_t c = 0; c < raw.n_cols(); ++c)
        for (std::size_t i : idx) out.columns[c].push_back(raw.columns[c][i]);
    return out;
}

int run_preprocess(const PreprocessArgs& a) {
    RawTable raw = read_csv(a.data_path);
    Schema schema = load_schema(a.schema_path);
    fs::create_directories(a.out_dir);
    const fs::path dir(a.out_dir);

    if (a.split_csv.empty()) {
        PipelineMeta meta;
        Dataset data = fit_pipeline(raw, schema, a.options, meta);
        save_dataset((dir / (a.name + ".csv")).string(),
                     (dir / (a.name + ".meta.json")).string(), data, schema.label);
        save_pipeline_meta((dir / (a.name + ".pipeline.json")).string(), meta);
        std::cout << "processed " << data.n_samples() << " rows x " << data.n_features()
                  << " features\n";
        return 0;
    }

    std::vector<double> fracs = parse_list(a.split_csv);
    if (fracs.size() != 3 || std::abs(fracs[0] + fracs[1] + fracs[2] - 1.0) > 1e-9)
        throw std::invalid_argument("--split needs three fractions summing to 1");
    // the splits see raw rows; the pipeline is fitted on train only
    RawTable filtered = filter_rows(raw, schema);
    const std::size_t n = filtered.n_rows();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(a.seed);
    rng.shuffle(order);
    const std::size_t n_val = static_cast<std::size_t>(fracs[1] * n);
    const std::size_t n_test = static_cast<std::size_t>(fracs[2] * n);
    const std::size_t n_train = n - n_val - n_test;
    std::vector<std::size_t> tr(order.begin(), order.begin() + n_train);
    std::vector<std::size_t> va(order.begin() + n_train, order.begin() + n_train + n_val);
    std::vector<std::size_t> te(order.begin() + n_train + n_val, order.end());
    std::sort(tr.begin(), tr.end());
    std::sort(va.begin(), va.end());
    std::sort(te.begin(), te.end());

    Schema no_filters = schema;  // rows were already filtered above
    no_filters.drop_rows_where.clear();
    PipelineMeta meta;
    Dataset train = fit_pipeline(select_rows(filtered, tr), no_filters, a.options, meta);
    Dataset valid = apply_pipeline(select_rows(filtered, va), meta);
    Dataset test = apply_pipeline(select_rows(filtered, te), meta);

    save_dataset((dir / (a.name + ".train.csv")).string(),
                 (dir / (a.name + ".train.meta.json")).string(), train, schema.label);
    save_dataset((dir / (a.name + ".valid.csv")).string(),
                 (dir / (a.name + ".valid.meta.json")).string(), valid, schema.label);
    save_dataset((dir / (a.name + ".test.csv")).string(),
                 (dir / (a.name + ".test.meta.json")).string(), test, schema.label);
    save_pipeline_meta((dir / (a.name + ".pipeline.json")).string(), meta);
    std::cout << "split " << n << " rows into " << train.n_samples() << "/"
              << valid.n_samples() << "/" << test.n_samples() << ", "
              << train.n_features() << " features\n";
    return 0;
}

// --------------------------------------------------------------- train

struct TrainArgs {
    std::string algo;
    std::string data_path, meta_path;
    std::string model_out;
    double C = 1.0;
    double T = 1.0;
    std::string T_sweep;
    int L = 2;
    double lambda_neg = 1.0;
    std::string budgets_csv;
    double reg = 1.0;
    int max_rounds = 30;
    SlsvmOptions inner;
    std::string planted_path;
};

std::vector<std::string> feature_names(const Dataset& data) {
    std::vector<std::string> names;
    for (const FeatureMeta& m : data.meta) names.push_back(m.name);
    return names;
}

int run_train(const TrainArgs& a) {
    Dataset data = load_dataset(a.data_path, a.meta_path);
    ModelFile mf;
    mf.feature_names = feature_names(data);
    mf.scaling_ref = a.meta_path;
    mf.algorithm = a.algo;

    if (!a.T_sweep.empty() && a.algo == "slsvm") {
        SlsvmOptions w = a.inner;
        std::cout << "T sweep (C=" << a.C << "):\n";
        for (double T : parse_list(a.T_sweep)) {
            LinearModel m = train_slsvm(data, a.C, T, a.inner);
            w.pos_weight = w.neg_weight = a.C;
            std::cout << "  T=" << T << "  objective=" << svm_objective(m.beta, m.beta0, data, w)
                      << "  l1=" << l1_norm(m.beta) << "\n";
        }
    }

    if (a.algo == "slsvm") {
        LinearModel m = train_slsvm(data, a.C, a.T, a.inner);
        SlsvmOptions w = a.inner;
        w.pos_weight = w.neg_weight = a.C;
        std::cout << "slsvm: objective=" << svm_objective(m.beta, m.beta0, data, w)
                  << "  l1(beta)=" << l1_norm(m.beta) << " (T=" << a.T << ")\n";
        mf.model = std::move(m);
    } else if (a.algo == "l2lr") {
        LinearModel m = train_l2lr(data, a.reg);
        LogisticEval e = logistic_eval(data.X, data.y, m.beta, m.beta0);
        double g2 = e.gbeta0 * e.gbeta0;
        for (std::size_t d = 0; d < m.beta.size(); ++d) {
            double g = e.gbeta[d] + a.reg * m.beta[d];
            g2 += g * g;
        }
        std::cout << "l2lr: " << (std::sqrt(g2) <= 1e-5 ? "gradient converged" : "NOT converged")
                  << ", |grad|=" << std::sqrt(g2) << "  l1(beta)=" << l1_norm(m.beta) << "\n";
        mf.model = std::move(m);
    } else if (a.algo == "jcc") {
        std::vector<double> budgets =
            a.budgets_csv.empty() ? std::vector<double>{a.T} : parse_list(a.budgets_csv);
        JccTrainOptions opts;
        opts.max_rounds = a.max_rounds;
        opts.inner = a.inner;
        std::vector<double> history;
        JccModel m = train_jcc(data, a.L, a.lambda_neg, budgets, opts, &history);
        std::cout << "jcc: objective=" << jcc_objective(m, data) << " after " << history.size()
                  << " rounds\n";
        for (std::size_t l = 0; l < m.cluster_count(); ++l)
            std::cout << "  cluster " << l << ": l1(beta)=" << l1_norm(m.models[l].beta)
                      << " (T=" << m.budgets[l] << ")\n";
        if (!a.planted_path.empty()) {
            RawTable t = read_csv(a.planted_path);
            int col = t.find("cluster");
            if (col < 0) throw DataError("planted file needs a 'cluster' column");
            std::vector<int> planted;
            for (const std::string& cell : t.columns[col])
                planted.push_back(std::stoi(cell));
            std::cout << "  planted purity=" << cluster_purity(m.assignment, planted, a.L)
                      << "\n";
        }
        mf.model = std::move(m);
    } else {
        throw std::invalid_argument("unknown algo '" + a.algo + "'");
    }
    save_model(a.model_out, mf);
    std::cout << "wrote " << a.model_out << "\n";
    return 0;
}

// ----------------------------------------------------------- prescribe

struct PrescribeArgs {
    std::string model_path, data_path, meta_path;
    std::string out_dir = default_out_dir();
    std::string name = "prescriptions";
    double lambda = 10.0;
    int p = 2;
    std::optional<double> tau;
    std::string lambda_sweep;
    std::string treatment;  // "" or "hct"
    std::string hct_col, sex_col;
    int max_iters = 2000;
};

PrescriptionConfig config_for(const Dataset& data, double lambda, int p, int max_iters) {
    PrescriptionConfig cfg;
    cfg.lambda = lambda;
    cfg.p = p;
    cfg.max_iters = max_iters;
    cfg.bounds.resize(data.n_features());
    for (std::size_t d = 0; d < data.n_features(); ++d) {
        FeatureBounds fb;
        if (data.meta[d].raw_lower && data.meta[d].raw_upper && data.scaling) {
            fb.lower = data.scaling->scale(d, *data.meta[d].raw_lower);
            fb.upper = data.scaling->scale(d, *data.meta[d].raw_upper);
        } else {
            fb.lower = 0.0;
            fb.upper = 1.0;
        }
        cfg.bounds[d] = fb;
    }
    return cfg;
}

std::vector<Prescription> run_batch(const ModelFile& mf, const Dataset& data,
                                    const PrescriptionConfig& cfg, double tau) {
    if (const JccModel* jm = mf.as_jcc()) return batch_prescribe(*jm, data, cfg, tau);
    return batch_prescribe(*mf.as_linear(), data, cfg, tau);
}

int run_prescribe(const PrescribeArgs& a) {
    ModelFile mf = load_model(a.model_path);
    Dataset data = load_dataset(a.data_path, a.meta_path);

    bool any_controllable = false;
    for (const FeatureMeta& m : data.meta) any_controllable |= m.controllable;
    if (!any_controllable)
        throw std::invalid_argument("prescribe: no controllable features in the dataset schema");

    double tau;
    if (a.tau) {
        tau = *a.tau;
    } else if (mf.threshold()) {
        tau = *mf.threshold();
    } else {
        throw std::invalid_argument(
            "prescribe: model has no calibrated threshold; pass --tau or run eval with "
            "--target-rate and --save-calibrated first");
    }

    if (!a.lambda_sweep.empty()) {
        std::cout << "lambda sweep (p=" << a.p << ", tau=" << tau << "):\n";
        for (double lambda : parse_list(a.lambda_sweep)) {
            PrescriptionConfig cfg = config_for(data, lambda, a.p, a.max_iters);
            auto pres = run_batch(mf, data, cfg, tau);
            std::size_t flips = 0;
            double cost = 0.0;
            for (const auto& p : pres) {
                flips += p.flipped;
                cost += p.change_cost;
            }
            std::cout << "  lambda=" << lambda << "  prescribed=" << pres.size()
                      << "  flipped=" << flips << "  mean_cost="
                      << (pres.empty() ? 0.0 : cost / pres.size()) << "\n";
        }
    }

    PrescriptionConfig cfg = config_for(data, a.lambda, a.p, a.max_iters);
    std::vector<Prescription> pres = run_batch(mf, data, cfg, tau);
    fs::create_directories(a.out_dir);
    const fs::path dir(a.out_dir);

    Dataset after;
    std::string csv_text;
    if (a.treatment.empty()) {
        after = apply_prescriptions(data, pres);
        csv_text = prescriptions_to_csv(pres, data);
    } else if (a.treatment == "hct") {
        if (!data.scaling)
            throw DataError("--treatment hct needs scaled data (ScalingParams absent)");
        int hct = -1, sex = -1;
        for (std::size_t d = 0; d < data.meta.size(); ++d) {
            if (data.meta[d].name == a.hct_col) hct = static_cast<int>(d);
            if (data.meta[d].name == a.sex_col) sex = static_cast<int>(d);
        }
        if (hct < 0 || sex < 0)
            throw std::invalid_argument("--treatment hct needs valid --hct-col and --sex-col");

        after = data;
        std::ostringstream out;
        out << "patient_index,cluster,flipped,xi,change_cost,hct_before,hct_prescribed,"
               "bags_baseline,bags,hct_after\n";
        for (Prescription& p : pres) {
            const double before_raw = data.scaling->unscale(hct, p.x[hct]);
            const double target_raw = data.scaling->unscale(hct, p.y[hct]);
            Sex s = data.X.at(p.patient_index, sex) >= 0.5 ? Sex::Female : Sex::Male;
            int base = baseline_bags(s, before_raw);
            int bags = discretize_transfusion(target_raw - before_raw, base);
            std::vector<double> treated = apply_treatment(p.x, hct, bags, *data.scaling);
            std::copy(treated.begin(), treated.end(), after.X.row(p.patient_index));
            out << p.patient_index << "," << p.cluster << "," << (p.flipped ? 1 : 0) << ","
                << format_double(p.xi) << "," << format_double(p.change_cost) << ","
                << format_double(before_raw) << "," << format_double(target_raw) << "," << base
                << "," << bags << "," << format_double(data.scaling->unscale(hct, treated[hct]))
                << "\n";
        }
        csv_text = out.str();
    } else {
        throw std::invalid_argument("unknown treatment '" + a.treatment + "'");
    }

    write_file((dir / (a.name + ".csv")).string(), csv_text);
    save_dataset((dir / (a.name + ".after.csv")).string(),
                 (dir / (a.name + ".after.meta.json")).string(), after);
    std::size_t flips = 0;
    for (const auto& p : pres) flips += p.flipped;
    std::cout << "prescribed " << pres.size() << " patients (" << flips << " flipped), wrote "
              << (dir / (a.name + ".csv")).string() << " and the post-prescription dataset\n";
    return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
    std::vector<std::string> model_paths;
    std::string data_path, meta_path;
    std::string after_path, after_meta_path;
    std::optional<double> target_rate;
    std::string out_path;
    std::string save_calibrated_dir;
};

int run_eval(const EvalArgs& a) {
    Dataset data = load_dataset(a.data_path, a.meta_path);
    std::optional<Dataset> after;
    if (!a.after_path.empty())
        after = load_dataset(a.after_path,
                             a.after_meta_path.empty() ? a.meta_path : a.after_meta_path);

    json out;
    out["format_version"] = 1;
    out["data"] = a.data_path;
    if (a.target_rate) {
        out["calibration"] = {{"target_rate", *a.target_rate}, {"data", a.data_path}};
    }
    json models = json::array();

    for (const std::string& path : a.model_paths) {
        ModelFile mf = load_model(path);
        std::vector<double> scores = mf.as_jcc() ? model_scores(*mf.as_jcc(), data)
                                                 : model_scores(*mf.as_linear(), data);
        json jm;
        jm["file"] = path;
        jm["algorithm"] = mf.algorithm;
        jm["auc"] = auc(scores, data.y);

        double tau = mf.threshold() ? *mf.threshold() : 0.0;
        if (a.target_rate) tau = calibrate_threshold(scores, *a.target_rate);
        jm["threshold"] = tau;
        jm["rate_before"] = positive_rate(scores, tau);

        if (after) {
            std::vector<double> after_scores = mf.as_jcc()
                                                   ? model_scores(*mf.as_jcc(), *after)
                                                   : model_scores(*mf.as_linear(), *after);
            double rate_after = positive_rate(after_scores, tau);
            jm["rate_after"] = rate_after;
            double before = jm["rate_before"].get<double>();
            jm["relative_reduction"] = before > 0.0 ? (before - rate_after) / before : 0.0;
        }

        json roc = json::array();
        for (const RocPoint& p : roc_points(scores, data.y))
            roc.push_back({{"threshold", p.threshold}, {"tpr", p.tpr}, {"fpr", p.fpr}});
        jm["roc"] = std::move(roc);
        models.push_back(jm);

        if (!a.save_calibrated_dir.empty()) {
            fs::create_directories(a.save_calibrated_dir);
            mf.set_threshold(tau);
            fs::path out_model = fs::path(a.save_calibrated_dir) /
                                 fs::path(path).filename();
            save_model(out_model.string(), mf);
        }

        std::cout << mf.algorithm << ": auc=" << jm["auc"].get<double>() << " tau=" << tau
                  << " rate_before=" << jm["rate_before"].get<double>();
        if (after) std::cout << " rate_after=" << jm["rate_after"].get<double>();
        std::cout << "\n";
    }
    out["models"] = std::move(models);
    write_file(a.out_path, out.dump(2) + "\n");
    std::cout << "wrote " << a.out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse prescriptive SVM pipeline"};
    app.require_subcommand(1);

    GenArgs gen;
    CLI::App* cmd_gen = app.add_subcommand("gen", "generate synthetic data");
    cmd_gen->add_option("--preset,--kind", gen.kind, "jcc | controllable")
        ->check(CLI::IsMember({"jcc", "jcc2", "controllable"}));
    cmd_gen->add_option("--name", gen.name, "output base name");
    cmd_gen->add_option("-o,--out-dir", gen.out_dir, "output directory");
    cmd_gen->add_option("--seed", gen.seed);
    cmd_gen->add_option("--L", gen.L, "positive clusters");
    cmd_gen->add_option("--D", gen.D, "dimensions");
    cmd_gen->add_option("--n-pos", gen.n_pos);
    cmd_gen->add_option("--n-neg", gen.n_neg);
    cmd_gen->add_option("--separation", gen.separation);
    cmd_gen->add_option("--noise-sigma", gen.noise_sigma);
    cmd_gen->add_option("--n", gen.n, "rows (controllable kind)");
    cmd_gen->add_option("--beta", gen.beta_csv, "planted weights, comma separated");
    cmd_gen->add_option("--beta0", gen.beta0);
    cmd_gen->add_option("--controllable-index", gen.controllable_index);
    cmd_gen->add_option("--noise", gen.noise);

    PreprocessArgs pre;
    CLI::App* cmd_pre = app.add_subcommand("preprocess", "encode, impute, filter, scale");
    cmd_pre->add_option("--data", pre.data_path)->required();
    cmd_pre->add_option("--schema", pre.schema_path)->required();
    cmd_pre->add_option("-o,--out-dir", pre.out_dir);
    cmd_pre->add_option("--name", pre.name);
    cmd_pre->add_option("--split", pre.split_csv, "train,valid,test fractions");
    cmd_pre->add_option("--seed", pre.seed);
    cmd_pre->add_option("--knn-k", pre.options.knn_k);
    cmd_pre->add_option("--var-threshold", pre.options.variance_threshold);
    cmd_pre->add_option("--corr-threshold", pre.options.correlation_threshold);

    TrainArgs tr;
    CLI::App* cmd_tr = app.add_subcommand("train", "fit a classifier");
    cmd_tr->add_option("--algo", tr.algo)->required()
        ->check(CLI::IsMember({"slsvm", "jcc", "l2lr"}));
    cmd_tr->add_option("--data", tr.data_path)->required();
    cmd_tr->add_option("--meta", tr.meta_path)->required();
    cmd_tr->add_option("-o,--model-out", tr.model_out)->required();
    cmd_tr->add_option("--C", tr.C);
    cmd_tr->add_option("--T", tr.T);
    cmd_tr->add_option("--T-sweep", tr.T_sweep, "comma separated budgets to report");
    cmd_tr->add_option("--L", tr.L);
    cmd_tr->add_option("--lambda-neg", tr.lambda_neg);
    cmd_tr->add_option("--budgets", tr.budgets_csv, "per-cluster budgets");
    cmd_tr->add_option("--reg", tr.reg, "l2lr ridge strength");
    cmd_tr->add_option("--max-rounds", tr.max_rounds);
    cmd_tr->add_option("--max-iters", tr.inner.max_iters);
    cmd_tr->add_option("--step0", tr.inner.step0);
    cmd_tr->add_option("--tol", tr.inner.tol);
    cmd_tr->add_option("--seed", tr.inner.seed);
    cmd_tr->add_option("--planted", tr.planted_path, "planted clusters csv (purity report)");

    PrescribeArgs pr;
    CLI::App* cmd_pr = app.add_subcommand("prescribe", "optimize controllable features");
    cmd_pr->add_option("--model", pr.model_path)->required();
    cmd_pr->add_option("--data", pr.data_path)->required();
    cmd_pr->add_option("--meta", pr.meta_path)->required();
    cmd_pr->add_option("-o,--out-dir", pr.out_dir);
    cmd_pr->add_option("--name", pr.name);
    cmd_pr->add_option("--lambda", pr.lambda);
    cmd_pr->add_option("--p", pr.p)->check(CLI::IsMember({1, 2}));
    double tau_arg = 0.0;
    CLI::Option* tau_opt = cmd_pr->add_option("--tau", tau_arg, "decision threshold");
    cmd_pr->add_option("--lambda-sweep", pr.lambda_sweep);
    cmd_pr->add_option("--treatment", pr.treatment)->check(CLI::IsMember({"hct"}));
    cmd_pr->add_option("--hct-col", pr.hct_col);
    cmd_pr->add_option("--sex-col", pr.sex_col);
    cmd_pr->add_option("--max-iters", pr.max_iters);

    EvalArgs ev;
    CLI::App* cmd_ev = app.add_subcommand("eval", "AUC, calibration, prescription effect");
    cmd_ev->add_option("--model", ev.model_paths)->required()->take_all();
    cmd_ev->add_option("--data", ev.data_path)->required();
    cmd_ev->add_option("--meta", ev.meta_path)->required();
    cmd_ev->add_option("--after", ev.after_path, "post-prescription dataset csv");
    cmd_ev->add_option("--after-meta", ev.after_meta_path);
    double rate_arg = 0.0;
    CLI::Option* rate_opt = cmd_ev->add_option("--target-rate", rate_arg, "calibration target");
    cmd_ev->add_option("-o,--out", ev.out_path)->required();
    cmd_ev->add_option("--save-calibrated", ev.save_calibrated_dir,
                       "write calibrated model copies here");

    try {
        app.parse(argc, argv);
        if (*tau_opt) pr.tau = tau_arg;
        if (*rate_opt) ev.target_rate = rate_arg;
        if (cmd_gen->parsed()) {
            if (gen.kind == "jcc2") {  // preset alias: two planted clusters
                gen.kind = "jcc";
                gen.L = 2;
                gen.D = 2;
            }
            return run_gen(gen);
        }
        if (cmd_pre->parsed()) return run_preprocess(pre);
        if (cmd_tr->parsed()) return run_train(tr);
        if (cmd_pr->parsed()) return run_prescribe(pr);
        if (cmd_ev->parsed()) return run_eval(ev);
        return 2;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
