#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "psvm/model_io.hpp"
#include "psvm/eval.hpp"
#include "psvm/rng.hpp"
#include "test_util.hpp"

using namespace psvm;

TEST_SUITE("model_io") {

TEST_CASE("linear model json round trip reproduces scores exactly") {
    Rng rng(101);
    LinearModel m;
    m.beta = {0.123456789012345, 0.0, -1.0 / 3.0};
    m.beta0 = 0.987654321e-3;
    m.C = 2.5;
    m.T = 1.75;

    ModelFile mf;
    mf.algorithm = "slsvm";
    mf.feature_names = {"a", "b", "c"};
    mf.model = m;
    mf.set_threshold(0.1 + 1e-13);

    ModelFile back = model_from_json(model_to_json(mf));
    REQUIRE(back.as_linear() != nullptr);
    const LinearModel& r = *back.as_linear();
    CHECK(r.beta == m.beta);
    CHECK(r.beta0 == m.beta0);
    CHECK(*back.threshold() == *mf.threshold());
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
        CHECK(score(r, x) == score(m, x));
    }
    // sparse map: zero coefficient omitted from the json text
    CHECK(model_to_json(mf).find("\"b\":") == std::string::npos);
    CHECK(model_to_json(mf).find("\"a\":") != std::string::npos);
}

TEST_CASE("jcc model json round trip") {
    JccModel jm = make_jcc_model(2, 0.8, {1.0, 2.0});
    jm.models[0].beta = {0.5, 0.0};
    jm.models[0].beta0 = -1.0 / 7.0;
    jm.models[1].beta = {0.0, -2.0 / 3.0};
    jm.models[1].beta0 = 0.25;
    jm.assignment = {0, 1, 1, 0};

    ModelFile mf;
    mf.algorithm = "jcc";
    mf.feature_names = {"x0", "x1"};
    mf.model = jm;

    ModelFile back = model_from_json(model_to_json(mf));
    REQUIRE(back.as_jcc() != nullptr);
    const JccModel& r = *back.as_jcc();
    CHECK(r.lambda_pos == jm.lambda_pos);
    CHECK(r.lambda_neg == jm.lambda_neg);
    CHECK(r.budgets == jm.budgets);
    CHECK(r.assignment == jm.assignment);
    Rng rng(102);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        CHECK(predict_jcc(r, x) == predict_jcc(jm, x));
    }
}

TEST_CASE("l2lr model stores an infinite budget as absent") {
    LinearModel m;
    m.beta = {0.4};
    m.beta0 = 0.0;
    m.T = std::numeric_limits<double>::infinity();
    ModelFile mf;
    mf.algorithm = "l2lr";
    mf.feature_names = {"x"};
    mf.model = m;
    std::string text = model_to_json(mf);
    CHECK(text.find("\"T\"") == std::string::npos);
    ModelFile back = model_from_json(text);
    CHECK(std::isinf(back.as_linear()->T));
}

TEST_CASE("model json rejects unknown algorithms and versions") {
    CHECK_THROWS_AS((void)model_from_json(R"({"format_version":1,"algorithm":"forest",
        "feature_names":[],"clusters":[]})"),
                    DataError);
    CHECK_THROWS_AS((void)model_from_json(R"({"format_version":99,"algorithm":"slsvm",
        "feature_names":[],"clusters":[]})"),
                    DataError);
}

TEST_CASE("dataset csv+meta round trip") {
    Rng rng(103);
    Dataset data = testutil::random_instance(rng, 25, 3);
    data.meta[1].controllable = true;
    data.meta[1].kind = FeatureKind::Continuous;
    data.meta[1].raw_lower = 10.0;
    data.meta[1].raw_upper = 60.0;
    ScalingParams scaling;
    scaling.min = {0, 10, -1};
    scaling.range = {1, 50, 2};
    data.scaling = scaling;

    const std::string csv = "/tmp/psvm_ds.csv";
    const std::string meta = "/tmp/psvm_ds.meta.json";
    save_dataset(csv, meta, data);
    Dataset back = load_dataset(csv, meta);
    CHECK(back.X.values == data.X.values);
    CHECK(back.y == data.y);
    REQUIRE(back.scaling.has_value());
    CHECK(back.scaling->min == scaling.min);
    CHECK(back.meta[1].controllable);
    CHECK(*back.meta[1].raw_upper == 60.0);
    std::remove(csv.c_str());
    std::remove(meta.c_str());
}

TEST_CASE("schema json round trip") {
    Schema s;
    s.label = "outcome";
    s.label_zero_one = true;
    s.columns = {{"hct", "continuous", true, 20.0, 60.0, "increase"},
                 {"sex", "categorical", false, {}, {}, "both"}};
    s.drop_rows_where = {{"died", "1"}};
    Schema back = schema_from_json(schema_to_json(s));
    CHECK(back.label == "outcome");
    CHECK(back.label_zero_one);
    REQUIRE(back.columns.size() == 2);
    CHECK(back.columns[0].controllable);
    CHECK(back.columns[0].direction == "increase");
    CHECK(*back.columns[0].lower == 20.0);
    CHECK(back.drop_rows_where.size() == 1);

    CHECK_THROWS_AS((void)schema_from_json(R"({"label":"y","columns":
        [{"name":"a","kind":"continuous","lower":5,"upper":1}]})"),
                    DataError);
}

TEST_CASE("pipeline meta json round trip") {
    PipelineMeta meta;
    meta.options.knn_k = 3;
    meta.schema.label = "y";
    meta.schema.columns = {{"c", "categorical", false, {}, {}, "both"}};
    meta.categories = {{"c", {"A", "B", "<MISSING>"}}};
    meta.dropped_low_variance = {"c=B"};
    meta.dropped_correlated = {};
    FeatureMeta f;
    f.name = "c=A";
    f.kind = FeatureKind::CategoricalExpanded;
    meta.features = {f};
    meta.scaling.min = {0.0};
    meta.scaling.range = {1.0};

    PipelineMeta back = pipeline_meta_from_json(pipeline_meta_to_json(meta));
    CHECK(back.options.knn_k == 3);
    CHECK(back.categories.at("c").size() == 3);
    CHECK(back.dropped_low_variance == meta.dropped_low_variance);
    CHECK(back.features.size() == 1);
    CHECK(back.features[0].name == "c=A");
    CHECK(back.scaling.range == meta.scaling.range);
}

}  // TEST_SUITE
