// Timing comparison of the OpenMP kernels against their serial references,
// plus the two batch stages built on them.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "psvm/eval.hpp"
#include "psvm/kernels.hpp"
#include "psvm/parallel.hpp"
#include "psvm/prescribe.hpp"
#include "psvm/rng.hpp"
#include "psvm/synth.hpp"

using namespace psvm;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = Clock::now();
        f();
        best = std::min(best, ms_since(t0));
    }
    return best;
}

void report(const std::string& name, double serial_ms, double parallel_ms) {
    std::printf("%-28s serial %9.2f ms   openmp %9.2f ms   speedup %.2fx\n", name.c_str(),
                serial_ms, parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"psvm kernel benchmark"};
    std::size_t n = 200000;
    std::size_t D = 40;
    int reps = 5;
    app.add_option("--n", n, "rows");
    app.add_option("--d", D, "features");
    app.add_option("--reps", reps, "repetitions (best-of)");
    CLI11_PARSE(app, argc, argv);

    std::printf("n=%zu D=%zu threads=%d\n", n, D, max_threads());

    Rng rng(1);
    Matrix X(n, D);
    for (double& v : X.values) v = rng.uniform();
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = i % 7 < 2 ? 1 : -1;
    std::vector<double> beta(D);
    for (double& b : beta) b = rng.uniform(-1.0, 1.0);

    volatile double sink = 0.0;

    double s_scores = time_best_of(reps, [&] { sink += serial::raw_scores(X, beta, 0.1)[0]; });
    double p_scores = time_best_of(reps, [&] { sink += raw_scores(X, beta, 0.1)[0]; });
    report("raw_scores", s_scores, p_scores);

    double s_hinge = time_best_of(
        reps, [&] { sink += serial::hinge_eval(X, y, beta, 0.1, 2.0, 1.0).hinge_sum; });
    double p_hinge =
        time_best_of(reps, [&] { sink += hinge_eval(X, y, beta, 0.1, 2.0, 1.0).hinge_sum; });
    report("hinge_eval", s_hinge, p_hinge);

    double s_log =
        time_best_of(reps, [&] { sink += serial::logistic_eval(X, y, beta, 0.1).loss; });
    double p_log = time_best_of(reps, [&] { sink += logistic_eval(X, y, beta, 0.1).loss; });
    report("logistic_eval", s_log, p_log);

    // batch prescriptions: per-patient independent solves
    ControllableSpec spec;
    spec.D = static_cast<int>(D);
    spec.n = static_cast<int>(n / 20);
    spec.beta.assign(D, 0.0);
    for (std::size_t d = 0; d < D; ++d) spec.beta[d] = d == 0 ? 3.0 : (d % 3 ? 0.4 : -0.6);
    spec.beta0 = -1.2;
    spec.controllable_index = 0;
    spec.seed = 2;
    Dataset pdata = gen_controllable_data(spec);
    LinearModel model;
    model.beta = spec.beta;
    model.beta0 = spec.beta0;
    PrescriptionConfig cfg;
    cfg.lambda = 50.0;
    cfg.bounds.assign(D, FeatureBounds{0.0, 1.0, BoundDirection::Both});
    double p_presc =
        time_best_of(reps, [&] { sink += batch_prescribe(model, pdata, cfg, 0.0).size(); });
    std::printf("%-28s openmp %9.2f ms (%zu patients)\n", "batch_prescribe", p_presc,
                batch_prescribe(model, pdata, cfg, 0.0).size());

    // per-feature Welch ranking
    double p_rank = time_best_of(reps, [&] { sink += rank_features(pdata)[0].p; });
    std::printf("%-28s openmp %9.2f ms (%zu features)\n", "rank_features", p_rank, D);

    (void)sink;
    return 0;
}
