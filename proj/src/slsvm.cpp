#include "psvm/slsvm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "psvm/kernels.hpp"

namespace psvm {

std::vector<double> project_l1(std::span<const double> v, double T) {
    if (T <= 0.0)
        throw std::invalid_argument("project_l1: T must be positive");
    std::vector<double> out(v.begin(), v.end());
    double norm = l1_norm(v);
    if (norm <= T) return out;

    // Find theta >= 0 with sum_d max(0,|v_d|-theta) = T via the sorted
    // cumulative sums of |v|.
    std::vector<double> a(v.size());
    for (std::size_t d = 0; d < v.size(); ++d) a[d] = std::abs(v[d]);
    std::sort(a.begin(), a.end(), std::greater<double>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        cumsum += a[k];
        double candidate = (cumsum - T) / static_cast<double>(k + 1);
        if (k + 1 == a.size() || a[k + 1] <= candidate) {
            theta = candidate;
            break;
        }
    }
    for (std::size_t d = 0; d < out.size(); ++d) {
        double mag = std::abs(out[d]) - theta;
        out[d] = mag > 0.0 ? std::copysign(mag, out[d]) : 0.0;
    }
    return out;
}

double svm_objective(std::span<const double> beta, double beta0, const Dataset& data,
                     const SlsvmOptions& opts) {
    HingeEval ev = hinge_eval(data.X, data.y, beta, beta0, opts.pos_weight, opts.neg_weight);
    return 0.5 * squared_norm(beta) + ev.hinge_sum;
}

namespace {

// Consecutive iterations below tol before the plateau stop triggers.
// Subgradient steps improve the best objective only sporadically, so the
// window scales with the budget.
int plateau_patience(int max_iters) { return std::max(500, max_iters / 10); }

}  // namespace

LinearModel train_weighted(const Dataset& data, double T, const SlsvmOptions& opts) {
    const std::size_t n = data.n_samples();
    const std::size_t D = data.n_features();
    if (n == 0)
        throw std::invalid_argument("train: empty dataset");
    if (T < 0.0)
        throw std::invalid_argument("train: T must be nonnegative");
    if (opts.max_iters < 1 || opts.tol <= 0.0 || opts.step0 <= 0.0)
        throw std::invalid_argument("train: bad options");

    LinearModel model;
    model.C = opts.pos_weight;
    model.T = T;

    const std::size_t n_pos = data.count_label(1);
    const std::size_t n_neg = n - n_pos;
    // Degenerate single-class optimum: zero weights, intercept on the label's
    // margin, objective 0.
    if (n_pos == 0 || n_neg == 0) {
        model.beta.assign(D, 0.0);
        model.beta0 = n_neg == 0 ? 1.0 : -1.0;
        return model;
    }

    std::vector<double> beta(D, 0.0);
    double beta0 = 0.0;
    std::vector<double> best_beta = beta;
    double best_beta0 = beta0;
    double best_obj = std::numeric_limits<double>::infinity();
    int plateau = 0;

    for (int t = 0;; ++t) {
        HingeEval ev = hinge_eval(data.X, data.y, beta, beta0, opts.pos_weight, opts.neg_weight);
        const double obj = 0.5 * squared_norm(beta) + ev.hinge_sum;
        if (obj < best_obj) {
            const double improvement = (best_obj - obj) / std::max(1.0, std::abs(obj));
            plateau = improvement < opts.tol ? plateau + 1 : 0;
            best_obj = obj;
            best_beta = beta;
            best_beta0 = beta0;
        } else {
            ++plateau;
        }
        if (t >= opts.max_iters || plateau >= plateau_patience(opts.max_iters)) break;

        // Normalized step: without the 1/max(1,||g||) factor, a hinge-sum
        // subgradient over n samples is O(n) large and the very first step
        // throws beta onto a vertex of the l1 ball, where it stalls.
        double gnorm2 = ev.gbeta0 * ev.gbeta0;
        for (std::size_t d = 0; d < D; ++d) {
            const double gd = ev.gbeta[d] + beta[d];
            gnorm2 += gd * gd;
        }
        const double step = opts.step0 / (std::sqrt(1.0 + static_cast<double>(t)) *
                                          std::max(1.0, std::sqrt(gnorm2)));
        for (std::size_t d = 0; d < D; ++d) beta[d] -= step * (ev.gbeta[d] + beta[d]);
        beta0 -= step * ev.gbeta0;
        if (T > 0.0) {
            beta = project_l1(beta, T);
        } else {
            std::fill(beta.begin(), beta.end(), 0.0);
        }
    }

    model.beta = std::move(best_beta);
    model.beta0 = best_beta0;
    return model;
}

LinearModel train_slsvm(const Dataset& data, double C, double T, const SlsvmOptions& opts) {
    if (C <= 0.0)
        throw std::invalid_argument("train: C must be positive");
    SlsvmOptions weighted = opts;
    weighted.pos_weight = C;
    weighted.neg_weight = C;
    return train_weighted(data, T, weighted);
}

}  // namespace psvm
