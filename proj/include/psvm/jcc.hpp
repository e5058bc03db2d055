#pragma once

#include <span>
#include <vector>

#include "psvm/core.hpp"
#include "psvm/slsvm.hpp"

namespace psvm {

// L per-cluster hyperplanes over a shared negative class. Positive sample i
// (index within the positive subsequence, in dataset row order) belongs to
// cluster assignment[i]. lambda_pos = L * lambda_neg always holds.
struct JccModel {
    std::vector<LinearModel> models;
    std::vector<int> assignment;
    double lambda_neg = 1.0;
    double lambda_pos = 1.0;
    std::vector<double> budgets;

    std::size_t cluster_count() const { return models.size(); }
};

JccModel make_jcc_model(std::size_t L, double lambda_neg, std::vector<double> budgets);

// K-means on the positive samples only: farthest-point seeding then at most
// 50 Lloyd iterations. Deterministic given seed.
std::vector<int> init_assignment(const Matrix& positives, int L, std::uint64_t seed);

// Full objective: sum over clusters of 0.5*||beta^l||^2
// + lambda_pos * hinges of the cluster's positives
// + lambda_neg * hinges of ALL negatives (negatives count once per cluster).
double jcc_objective(const JccModel& model, const Dataset& data);

struct JccTrainOptions {
    int max_rounds = 30;
    SlsvmOptions inner;  // pos/neg weights are overridden by lambda+-
};

// Alternating minimization: per-cluster weighted SVM refits (accepted only
// when the cluster sub-objective does not increase) alternate with
// reassignment of each positive to the cluster with the smallest hinge.
// Stops when assignments are unchanged or max_rounds is reached. When
// objective_history is given it receives the objective after every round.
JccModel train_jcc(const Dataset& data, int L, double lambda_neg, std::vector<double> budgets,
                   const JccTrainOptions& opts, std::vector<double>* objective_history = nullptr);

// max over clusters of that cluster's score; the prediction rule for unseen
// samples. Returns the best score and, via cluster_out, its argmax.
double predict_jcc(const JccModel& model, std::span<const double> x, int* cluster_out = nullptr);

// Fraction of positives whose recovered cluster matches the planted one
// under the best relabeling (exact search over permutations; L <= 8).
double cluster_purity(const std::vector<int>& assignment, const std::vector<int>& planted, int L);

}  // namespace psvm
