#include <doctest.h>

#include <cmath>

#include "psvm/slsvm.hpp"
#include "psvm/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace psvm;

TEST_SUITE("slsvm") {

TEST_CASE("project_l1 listed examples") {
    std::vector<double> inside{0.3, -0.2};
    CHECK(project_l1(inside, 1.0) == inside);

    std::vector<double> spike{3.0, 0.0};
    auto p = project_l1(spike, 1.0);
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p[1] == 0.0);

    std::vector<double> v{2.0, 1.0};
    auto q = project_l1(v, 2.0);
    CHECK(q[0] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(q[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("project_l1 rejects nonpositive T") {
    std::vector<double> v{1.0};
    CHECK_THROWS_AS((void)project_l1(v, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)project_l1(v, -1.0), std::invalid_argument);
}

TEST_CASE("project_l1 properties: budget, idempotence, sign preservation") {
    Rng rng(21);
    for (int trial = 0; trial < 500; ++trial) {
        std::size_t D = 1 + rng.below(6);
        std::vector<double> v(D);
        for (double& x : v) x = rng.uniform(-4.0, 4.0);
        double T = rng.uniform(0.1, 3.0);
        auto p = project_l1(v, T);
        CHECK(l1_norm(p) <= T + 1e-9);
        auto pp = project_l1(p, T);
        for (std::size_t d = 0; d < D; ++d) {
            CHECK(pp[d] == doctest::Approx(p[d]).epsilon(1e-12));
            if (p[d] != 0.0) CHECK(p[d] * v[d] > 0.0);  // surviving coords keep sign
        }
        if (l1_norm(v) <= T) CHECK(p == v);
    }
}

TEST_CASE("project_l1 agrees with a dense grid search on the 2-D ball") {
    Rng rng(22);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
        double T = rng.uniform(0.2, 2.5);
        auto p = project_l1(v, T);
        auto g = oracle::grid_project_l1_2d(v, T, 400);
        double dist = std::hypot(p[0] - g[0], p[1] - g[1]);
        CHECK(dist <= 1e-2);  // grid spacing bound
        // projection must not be farther from v than the grid point
        double dp = std::hypot(p[0] - v[0], p[1] - v[1]);
        double dg = std::hypot(g[0] - v[0], g[1] - v[1]);
        CHECK(dp <= dg + 1e-12);
    }
}

TEST_CASE("objective listed examples") {
    SlsvmOptions opts;
    opts.pos_weight = 1.0;
    opts.neg_weight = 1.0;
    Dataset two = testutil::make_dataset({{0.0}, {0.0}}, {1, -1});
    std::vector<double> zero{0.0};
    CHECK(svm_objective(zero, 0.0, two, opts) == doctest::Approx(2.0).epsilon(1e-12));

    Dataset margins = testutil::make_dataset({{2.0}, {-2.0}}, {1, -1});
    SlsvmOptions w10;
    w10.pos_weight = 10.0;
    w10.neg_weight = 10.0;
    std::vector<double> half{0.5};
    CHECK(svm_objective(half, 0.0, margins, w10) == doctest::Approx(0.125).epsilon(1e-12));
    // all margins satisfied -> objective is the norm term alone
    CHECK(svm_objective(half, 0.0, margins, w10) ==
          doctest::Approx(0.5 * squared_norm(half)).epsilon(1e-12));
}

TEST_CASE("train recovers the 1-D max-margin separator") {
    Dataset data = testutil::make_dataset({{2.0}, {-2.0}}, {1, -1});
    LinearModel m = train_slsvm(data, 10.0, 10.0);
    CHECK(m.beta[0] == doctest::Approx(0.5).epsilon(1e-2));
    CHECK(m.beta0 == doctest::Approx(0.0).epsilon(1e-2));
    CHECK(l1_norm(m.beta) <= 10.0 + 1e-6);
}

TEST_CASE("train handles a single-class dataset with the degenerate optimum") {
    Dataset all_pos = testutil::make_dataset({{0.4}, {0.9}, {0.1}}, {1, 1, 1});
    LinearModel m = train_slsvm(all_pos, 3.0, 1.0);
    CHECK(m.beta[0] == 0.0);
    CHECK(m.beta0 == 1.0);
    SlsvmOptions opts;
    opts.pos_weight = opts.neg_weight = 3.0;
    CHECK(svm_objective(m.beta, m.beta0, all_pos, opts) == 0.0);

    Dataset all_neg = testutil::make_dataset({{0.4}, {0.9}}, {-1, -1});
    LinearModel mn = train_slsvm(all_neg, 3.0, 1.0);
    CHECK(mn.beta0 == -1.0);
}

TEST_CASE("train rejects an empty dataset") {
    Dataset empty;
    CHECK_THROWS_AS((void)train_slsvm(empty, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("constant second feature earns zero weight") {
    Dataset data = testutil::make_dataset({{1.0, 0.1}, {-1.0, 0.1}}, {1, -1});
    LinearModel m = train_slsvm(data, 10.0, 2.0);
    CHECK(m.beta[0] == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(std::abs(m.beta[1]) <= 1e-2);
    CHECK(m.beta0 == doctest::Approx(0.0).epsilon(2e-2));
}

TEST_CASE("trained objective matches the brute-force grid minimum") {
    Rng rng(31);
    for (int trial = 0; trial < 6; ++trial) {
        std::size_t n = 6 + rng.below(25);
        std::size_t D = 1 + rng.below(3);
        Dataset data = testutil::random_instance(rng, n, D);
        double C = rng.uniform(0.3, 3.0);
        double T = rng.uniform(0.5, 3.0);
        SlsvmOptions opts;
        opts.max_iters = 20000;
        LinearModel m = train_slsvm(data, C, T, opts);
        CHECK(l1_norm(m.beta) <= T + 1e-6);

        SlsvmOptions w;
        w.pos_weight = w.neg_weight = C;
        double trained = svm_objective(m.beta, m.beta0, data, w);
        auto grid = oracle::grid_min_svm(data.X, data.y, C, C, T, 1.0 + T + 1.0,
                                         D >= 3 ? 13 : 21, 9);
        CHECK(trained <= grid.value + 1e-3 * std::max(1.0, grid.value));
        CHECK(grid.value <= trained + 1e-3 * std::max(1.0, trained));
    }
}

TEST_CASE("best objective is monotone in the iteration budget") {
    Rng rng(33);
    Dataset data = testutil::random_instance(rng, 20, 2);
    double prev = std::numeric_limits<double>::infinity();
    SlsvmOptions w;
    w.pos_weight = w.neg_weight = 2.0;
    for (int iters : {10, 50, 200, 1000, 5000}) {
        SlsvmOptions opts;
        opts.max_iters = iters;
        LinearModel m = train_slsvm(data, 2.0, 1.5, opts);
        double obj = svm_objective(m.beta, m.beta0, data, w);
        CHECK(obj <= prev + 1e-12);
        prev = obj;
    }
}

TEST_CASE("shrinking T never decreases the optimal objective") {
    Rng rng(34);
    Dataset data = testutil::random_instance(rng, 24, 2);
    SlsvmOptions opts;
    opts.max_iters = 20000;
    SlsvmOptions w;
    w.pos_weight = w.neg_weight = 2.0;
    double prev = std::numeric_limits<double>::infinity();
    for (double T : {0.25, 0.5, 1.0, 2.0, 4.0}) {  // increasing budgets
        LinearModel m = train_slsvm(data, 2.0, T, opts);
        double obj = svm_objective(m.beta, m.beta0, data, w);
        CHECK(obj <= prev + 1e-4);  // looser budget can only help
        prev = obj;
    }
}

TEST_CASE("training is deterministic") {
    Rng rng(35);
    Dataset data = testutil::random_instance(rng, 30, 3);
    LinearModel a = train_slsvm(data, 1.0, 1.0);
    LinearModel b = train_slsvm(data, 1.0, 1.0);
    CHECK(a.beta == b.beta);
    CHECK(a.beta0 == b.beta0);
}

}  // TEST_SUITE
