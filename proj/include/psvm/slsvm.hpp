#pragma once

#include <span>
#include <vector>

#include "psvm/core.hpp"

namespace psvm {

struct SlsvmOptions {
    int max_iters = 5000;
    double step0 = 1.0;    // initial step size; step_t = step0 / sqrt(1+t)
    double tol = 1e-6;     // relative best-objective improvement threshold
    std::uint64_t seed = 0;
    double pos_weight = 1.0;  // lambda+ role
    double neg_weight = 1.0;  // lambda- role
};

// Euclidean projection onto {u : ||u||_1 <= T} by sort-based soft
// thresholding. Identity when v is already inside the ball.
std::vector<double> project_l1(std::span<const double> v, double T);

// 0.5*||beta||^2 + pos_weight * sum_{y=+1} hinge + neg_weight * sum_{y=-1} hinge.
double svm_objective(std::span<const double> beta, double beta0, const Dataset& data,
                     const SlsvmOptions& opts);

// Projected subgradient descent on the hinge form of the sparse SVM, with
// per-class weights taken from opts. Returns the best iterate seen. beta0 is
// not part of the l1 budget.
LinearModel train_weighted(const Dataset& data, double T, const SlsvmOptions& opts);

// Unweighted sparse SVM: both class weights equal C.
LinearModel train_slsvm(const Dataset& data, double C, double T, const SlsvmOptions& opts = {});

}  // namespace psvm
