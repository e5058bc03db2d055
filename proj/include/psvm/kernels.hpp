#pragma once

#include <span>
#include <vector>

#include "psvm/core.hpp"

namespace psvm {

// Hot inner loops shared by the solvers. Each kernel has an OpenMP version
// here and a plain serial reference in psvm::serial; tests compare the two
// and tools/psvm_bench times them. The OpenMP versions use fixed-chunk
// reductions (see parallel.hpp), so their output is independent of the
// thread count.

// scores[i] = beta0 + beta' X[i].
std::vector<double> raw_scores(const Matrix& X, std::span<const double> beta, double beta0);

// Accumulated hinge losses and their subgradient in one pass:
//   hinge_sum = sum_i w(y_i) * max(0, 1 - y_i s_i)
//   gbeta     = sum over margin-violating i of -w(y_i) y_i x_i
//   gbeta0    = sum over margin-violating i of -w(y_i) y_i
// where w(+1)=wpos, w(-1)=wneg. Samples exactly on the margin (y s == 1)
// contribute nothing to the subgradient.
struct HingeEval {
    double hinge_sum = 0.0;
    std::vector<double> gbeta;
    double gbeta0 = 0.0;
};
HingeEval hinge_eval(const Matrix& X, const std::vector<int>& y, std::span<const double> beta,
                     double beta0, double wpos, double wneg);

// Logistic loss sum_i log(1+exp(-y_i s_i)) and its gradient in one pass
// (regularizer not included).
struct LogisticEval {
    double loss = 0.0;
    std::vector<double> gbeta;
    double gbeta0 = 0.0;
};
LogisticEval logistic_eval(const Matrix& X, const std::vector<int>& y,
                           std::span<const double> beta, double beta0);

namespace serial {

std::vector<double> raw_scores(const Matrix& X, std::span<const double> beta, double beta0);
HingeEval hinge_eval(const Matrix& X, const std::vector<int>& y, std::span<const double> beta,
                     double beta0, double wpos, double wneg);
LogisticEval logistic_eval(const Matrix& X, const std::vector<int>& y,
                           std::span<const double> beta, double beta0);

}  // namespace serial

}  // namespace psvm
