#pragma once

#include <span>
#include <vector>

#include "psvm/core.hpp"
#include "psvm/jcc.hpp"

namespace psvm {

struct RocPoint {
    double threshold = 0.0;
    double tpr = 0.0;
    double fpr = 0.0;
};

// Rank-based AUC with midrank tie correction: P(score+ > score-) + 0.5 P(tie).
// Throws DataError when only one class is present.
double auc(std::span<const double> scores, const std::vector<int>& labels);

// Trapezoidal area under the ROC curve; equals auc() and is kept as the
// second route for cross-checking.
double auc_trapezoid(std::span<const double> scores, const std::vector<int>& labels);

// One point per distinct score threshold, descending (predicted positive
// means score >= threshold).
std::vector<RocPoint> roc_points(std::span<const double> scores, const std::vector<int>& labels);

// tau = k-th largest score with k = round(target_rate*n) clamped to [1,n],
// so that the fraction of scores >= tau is as close as achievable to the
// target; ties can only push the achieved rate up.
double calibrate_threshold(std::span<const double> scores, double target_rate);

double positive_rate(std::span<const double> scores, double tau);

struct WelchResult {
    double t = 0.0;
    double dof = 0.0;
    double p = 1.0;
};

// Welch's two-sample t-test, two-tailed. Degenerate convention when both
// sample variances vanish: p = 1 if the means are equal, else 0.
WelchResult welch_t(std::span<const double> a, std::span<const double> b);

// Regularized incomplete beta I_x(a,b) by Lentz continued fraction,
// target accuracy 1e-12.
double incomplete_beta(double a, double b, double x);

// Student-t CDF at t with dof degrees of freedom.
double student_t_cdf(double t, double dof);

struct FeatureRank {
    std::size_t feature = 0;
    double t = 0.0;
    double p = 1.0;
};

// Welch's test per feature between the positive and negative cohorts,
// ascending p, ties by feature index.
std::vector<FeatureRank> rank_features(const Dataset& data);

struct L2lrOptions {
    int max_iters = 20000;
    double grad_tol = 1e-5;
    double init_step = 1.0;
};

// l2-regularized logistic regression:
// min sum_i log(1+exp(-y_i (beta'x_i + beta0))) + reg*0.5*||beta||^2
// by gradient descent with Armijo backtracking; the intercept is not
// penalized. Stops when ||grad||_2 <= grad_tol.
LinearModel train_l2lr(const Dataset& data, double reg, const L2lrOptions& opts = {});

std::vector<double> model_scores(const LinearModel& model, const Dataset& data);
std::vector<double> model_scores(const JccModel& model, const Dataset& data);

struct RatePair {
    double before = 0.0;
    double after = 0.0;
};

// Predicted-positive rate at tau on the pre- and post-prescription feature
// matrices, using one evaluator (possibly different from the model that
// produced the prescriptions).
RatePair prescriptive_eval(const LinearModel& evaluator, const Dataset& before,
                           const Dataset& after, double tau);
RatePair prescriptive_eval(const JccModel& evaluator, const Dataset& before,
                           const Dataset& after, double tau);

}  // namespace psvm
