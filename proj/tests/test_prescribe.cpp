#include <doctest.h>

#include <cmath>

#include "psvm/prescribe.hpp"
#include "psvm/synth.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace psvm;

namespace {

LinearModel one_d_model() {
    LinearModel m;
    m.beta = {1.0};
    m.beta0 = 0.0;
    return m;
}

Prescription run_1d(double lambda, double lo, double hi, double x0 = 2.0, int p = 2) {
    PrescriptionConfig cfg;
    cfg.lambda = lambda;
    cfg.p = p;
    std::vector<double> x{x0}, lower{lo}, upper{hi};
    std::vector<bool> ctrl{true};
    return prescribe(one_d_model(), x, cfg, lower, upper, ctrl);
}

}  // namespace

TEST_SUITE("prescribe") {

TEST_CASE("large lambda flips the 1-D patient at minimum cost") {
    Prescription p = run_1d(100.0, -3.0, 3.0);
    CHECK(p.y[0] == doctest::Approx(-1.0).epsilon(1e-4));
    CHECK(p.xi == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(p.change_cost == doctest::Approx(9.0).epsilon(1e-4));
    CHECK(p.flipped);
}

TEST_CASE("small lambda settles at the interior trade-off") {
    Prescription p = run_1d(1.0, -3.0, 3.0);
    CHECK(p.y[0] == doctest::Approx(1.5).epsilon(1e-4));
    CHECK(p.xi == doctest::Approx(2.5).epsilon(1e-4));
    CHECK(!p.flipped);
}

TEST_CASE("box-blocked flip stops at the cost-minimal boundary") {
    Prescription p = run_1d(100.0, 1.5, 3.0);
    CHECK(p.y[0] == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(p.xi == doctest::Approx(2.5).epsilon(1e-6));
    CHECK(!p.flipped);
}

TEST_CASE("an already-flipped patient is left untouched") {
    PrescriptionConfig cfg;
    cfg.lambda = 50.0;
    std::vector<double> x{-2.0}, lower{-3.0}, upper{3.0};
    std::vector<bool> ctrl{true};
    Prescription p = prescribe(one_d_model(), x, cfg, lower, upper, ctrl);
    CHECK(p.y[0] == -2.0);
    CHECK(p.xi == 0.0);
    CHECK(p.change_cost == 0.0);
    CHECK(p.flipped);
}

TEST_CASE("infeasible bounds are rejected") {
    PrescriptionConfig cfg;
    std::vector<double> x{0.0}, lower{1.0}, upper{0.5};
    std::vector<bool> ctrl{true};
    CHECK_THROWS_AS((void)prescribe(one_d_model(), x, cfg, lower, upper, ctrl),
                    std::invalid_argument);
}

TEST_CASE("pinned coordinates never move and bounds are always respected") {
    Rng rng(61);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t D = 4;
        LinearModel m;
        m.beta.resize(D);
        for (double& b : m.beta) b = rng.uniform(-2.0, 2.0);
        m.beta0 = rng.uniform(-1.0, 1.0);
        std::vector<double> x(D), lower(D), upper(D);
        std::vector<bool> ctrl(D);
        for (std::size_t d = 0; d < D; ++d) {
            x[d] = rng.uniform(-1.0, 1.0);
            ctrl[d] = rng.uniform() < 0.5;
            lower[d] = x[d] - rng.uniform(0.0, 2.0);
            upper[d] = x[d] + rng.uniform(0.0, 2.0);
        }
        PrescriptionConfig cfg;
        cfg.lambda = rng.uniform(0.5, 30.0);
        cfg.p = trial % 2 ? 1 : 2;
        Prescription p = prescribe(m, x, cfg, lower, upper, ctrl);
        for (std::size_t d = 0; d < D; ++d) {
            if (!ctrl[d]) {
                CHECK(p.y[d] == x[d]);
            } else {
                CHECK(p.y[d] >= lower[d] - 1e-12);
                CHECK(p.y[d] <= upper[d] + 1e-12);
            }
        }
        // doing nothing is always feasible, so the solution can't cost more
        double g_y = oracle::prescription_objective_ref(m.beta, m.beta0, x, p.y, cfg.lambda,
                                                        cfg.p);
        double g_x = oracle::prescription_objective_ref(m.beta, m.beta0, x, x, cfg.lambda,
                                                        cfg.p);
        CHECK(g_y <= g_x + 1e-12);
        // xi consistency
        double s = score(m, p.y);
        CHECK(p.xi == doctest::Approx(std::max(0.0, 1.0 + s)).epsilon(1e-9));
    }
}

TEST_CASE("larger lambda pushes the slack down") {
    Rng rng(62);
    for (int trial = 0; trial < 50; ++trial) {
        LinearModel m;
        m.beta = {rng.uniform(0.5, 2.0), rng.uniform(-2.0, -0.5)};
        m.beta0 = rng.uniform(-0.5, 0.5);
        std::vector<double> x{rng.uniform(0.0, 2.0), rng.uniform(-2.0, 0.0)};
        std::vector<double> lower{x[0] - 2.0, x[1] - 2.0};
        std::vector<double> upper{x[0] + 2.0, x[1] + 2.0};
        std::vector<bool> ctrl{true, true};
        double prev_xi = std::numeric_limits<double>::infinity();
        for (double lambda : {0.5, 1.0, 2.0, 5.0, 20.0}) {
            PrescriptionConfig cfg;
            cfg.lambda = lambda;
            Prescription p = prescribe(m, x, cfg, lower, upper, ctrl);
            CHECK(p.xi <= prev_xi + 1e-6);
            prev_xi = p.xi;
        }
    }
}

TEST_CASE("p=2 single-feature solution matches the closed-form two-case analysis") {
    Rng rng(63);
    for (int trial = 0; trial < 100; ++trial) {
        LinearModel m;
        m.beta = {rng.uniform(-2.0, 2.0)};
        if (std::abs(m.beta[0]) < 0.1) m.beta[0] = 0.5;
        m.beta0 = rng.uniform(-1.0, 1.0);
        double x0 = rng.uniform(-2.0, 2.0);
        double lo = x0 - rng.uniform(0.5, 3.0);
        double hi = x0 + rng.uniform(0.5, 3.0);
        double lambda = rng.uniform(0.5, 20.0);

        // case 1: hinge active -> y = clamp(x - lambda*b/2)
        double y1 = std::clamp(x0 - 0.5 * lambda * m.beta[0], lo, hi);
        // case 2: flip boundary -> y with beta0 + b*y = -1, clamped
        double y2 = std::clamp((-1.0 - m.beta0) / m.beta[0], lo, hi);
        std::vector<double> x{x0};
        auto g = [&](double y) {
            std::vector<double> yv{y};
            return oracle::prescription_objective_ref(m.beta, m.beta0, x, yv, lambda, 2);
        };
        double best = std::min({g(y1), g(y2), g(x0)});

        PrescriptionConfig cfg;
        cfg.lambda = lambda;
        std::vector<double> lower{lo}, upper{hi};
        std::vector<bool> ctrl{true};
        Prescription p = prescribe(m, x, cfg, lower, upper, ctrl);
        CHECK(g(p.y[0]) <= best + 1e-6);
        CHECK(g(p.y[0]) >= best - 1e-6);
    }
}

TEST_CASE("solution matches the brute-force grid on random instances") {
    Rng rng(64);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t D = 3;
        LinearModel m;
        m.beta.resize(D);
        for (double& b : m.beta) b = rng.uniform(-2.0, 2.0);
        m.beta0 = rng.uniform(-1.0, 1.0);
        std::vector<double> x(D), lower(D), upper(D);
        std::vector<bool> ctrl(D, false);
        // at most 2 controllable dims
        ctrl[rng.below(D)] = true;
        if (trial % 2) ctrl[(trial + 1) % D] = true;
        for (std::size_t d = 0; d < D; ++d) {
            x[d] = rng.uniform(-1.0, 1.0);
            lower[d] = x[d] - rng.uniform(0.1, 2.0);
            upper[d] = x[d] + rng.uniform(0.1, 2.0);
        }
        PrescriptionConfig cfg;
        cfg.lambda = rng.uniform(0.5, 40.0);
        cfg.p = trial % 3 == 0 ? 1 : 2;
        Prescription p = prescribe(m, x, cfg, lower, upper, ctrl);
        double got = oracle::prescription_objective_ref(m.beta, m.beta0, x, p.y, cfg.lambda,
                                                        cfg.p);
        auto grid = oracle::grid_min_prescription(m.beta, m.beta0, x, cfg.lambda, cfg.p, lower,
                                                  upper, ctrl, 101, 6);
        CHECK(got <= grid.value + 1e-4);
    }
}

TEST_CASE("batch_prescribe covers exactly the predicted positives, in order") {
    ControllableSpec spec;
    spec.D = 3;
    spec.n = 400;
    spec.beta = {2.0, -1.0, 0.5};
    spec.beta0 = -0.5;
    spec.controllable_index = 0;
    spec.seed = 9;
    Dataset data = gen_controllable_data(spec);

    LinearModel m;
    m.beta = {2.0, -1.0, 0.5};
    m.beta0 = -0.5;
    PrescriptionConfig cfg;
    cfg.lambda = 100.0;
    cfg.bounds.assign(3, FeatureBounds{0.0, 1.0, BoundDirection::Both});
    const double tau = 0.0;
    auto pres = batch_prescribe(m, data, cfg, tau);

    std::size_t expected = 0;
    for (std::size_t i = 0; i < data.n_samples(); ++i)
        expected += score(m, data.X.row_span(i)) >= tau;
    CHECK(pres.size() == expected);
    for (std::size_t k = 1; k < pres.size(); ++k)
        CHECK(pres[k].patient_index > pres[k - 1].patient_index);
    for (const Prescription& p : pres) {
        CHECK(score(m, p.x) >= tau);
        CHECK(p.y[1] == p.x[1]);  // non-controllable pinned
        CHECK(p.y[2] == p.x[2]);
    }

    // nobody predicted positive -> empty output
    auto none = batch_prescribe(m, data, cfg, 1e9);
    CHECK(none.empty());
}

TEST_CASE("jcc batch uses the argmax cluster per patient") {
    JccModel jm = make_jcc_model(2, 1.0, {2.0, 2.0});
    jm.models[0].beta = {2.0, 0.0};
    jm.models[0].beta0 = -1.0;
    jm.models[1].beta = {0.0, 2.0};
    jm.models[1].beta0 = -1.0;
    Dataset data =
        testutil::make_dataset({{1.0, 0.0}, {0.0, 1.0}, {0.05, 0.05}}, {1, 1, -1});
    data.meta[0].controllable = true;
    data.meta[1].controllable = true;
    PrescriptionConfig cfg;
    cfg.lambda = 100.0;
    cfg.bounds.assign(2, FeatureBounds{-2.0, 2.0, BoundDirection::Both});
    auto pres = batch_prescribe(jm, data, cfg, 0.0);
    REQUIRE(pres.size() == 2);
    CHECK(pres[0].cluster == 0);
    CHECK(pres[1].cluster == 1);
    for (const auto& p : pres) CHECK(p.flipped);
}

TEST_CASE("baseline transfusion rules at every boundary") {
    CHECK(baseline_bags(Sex::Female, 36.0) == 0);
    CHECK(baseline_bags(Sex::Female, 37.0) == 1);
    CHECK(baseline_bags(Sex::Female, 39.9) == 1);
    CHECK(baseline_bags(Sex::Female, 40.0) == 2);
    CHECK(baseline_bags(Sex::Female, 43.0) == 3);
    CHECK(baseline_bags(Sex::Female, 44.0) == 3);
    CHECK(baseline_bags(Sex::Male, 40.0) == 0);
    CHECK(baseline_bags(Sex::Male, 41.0) == 1);
    CHECK(baseline_bags(Sex::Male, 44.0) == 2);
    CHECK(baseline_bags(Sex::Male, 45.0) == 2);
    CHECK(baseline_bags(Sex::Male, 47.0) == 3);
    CHECK_THROWS_AS((void)baseline_bags(Sex::Male, 0.0), std::invalid_argument);
}

TEST_CASE("transfusion discretization rounds and caps") {
    CHECK(discretize_transfusion(2.9, 0) == 1);
    CHECK(discretize_transfusion(14.0, 0) == 3);
    CHECK(discretize_transfusion(0.0, 2) == 0);
    CHECK(discretize_transfusion(4.5, 0) == 2);   // round half away from zero
    CHECK(discretize_transfusion(-5.0, 0) == 0);  // decreases clamp to zero
    CHECK(discretize_transfusion(9.0, 2) == 1);   // cap at 3 total
    CHECK_THROWS_AS((void)discretize_transfusion(3.0, 4), std::invalid_argument);
}

TEST_CASE("apply_treatment adjusts HCT in raw units") {
    ScalingParams scaling;
    scaling.min = {20.0};
    scaling.range = {40.0};
    std::vector<double> x{0.4};  // raw 36
    auto treated = apply_treatment(x, 0, 2, scaling);
    CHECK(treated[0] == doctest::Approx(0.55).epsilon(1e-12));  // raw 42
    auto none = apply_treatment(x, 0, 0, scaling);
    CHECK(none[0] == 0.4);
    CHECK_THROWS_AS((void)apply_treatment(x, 3, 1, scaling), std::invalid_argument);
}

TEST_CASE("prescriptions export to csv with raw before/after columns") {
    ControllableSpec spec;
    spec.D = 2;
    spec.n = 50;
    spec.beta = {3.0, -1.0};
    spec.beta0 = -0.8;
    spec.controllable_index = 0;
    spec.seed = 4;
    Dataset data = gen_controllable_data(spec);
    LinearModel m;
    m.beta = spec.beta;
    m.beta0 = spec.beta0;
    PrescriptionConfig cfg;
    cfg.lambda = 50.0;
    cfg.bounds.assign(2, FeatureBounds{0.0, 1.0, BoundDirection::Both});
    auto pres = batch_prescribe(m, data, cfg, 0.0);
    REQUIRE(!pres.empty());
    std::string csv = prescriptions_to_csv(pres, data);
    CHECK(csv.rfind("patient_index,cluster,flipped,xi,change_cost,f0_before,f0_after\n", 0) ==
          0);
    std::size_t lines = std::count(csv.begin(), csv.end(), '\n');
    CHECK(lines == pres.size() + 1);

    Dataset after = apply_prescriptions(data, pres);
    CHECK(after.n_samples() == data.n_samples());
    CHECK(after.X.at(pres[0].patient_index, 0) ==
          doctest::Approx(pres[0].y[0]).epsilon(1e-12));
}

}  // TEST_SUITE
