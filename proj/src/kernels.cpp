#include "psvm/kernels.hpp"

#include <cmath>

#include "psvm/parallel.hpp"

namespace psvm {

namespace {

inline double row_score(const Matrix& X, std::size_t i, std::span<const double> beta,
                        double beta0) {
    const double* xi = X.row(i);
    double s = beta0;
    for (std::size_t d = 0; d < X.cols; ++d) s += beta[d] * xi[d];
    return s;
}

// log(1 + exp(z)) without overflow
inline double softplus(double z) {
    double m = z > 0.0 ? z : 0.0;
    return m + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace

std::vector<double> raw_scores(const Matrix& X, std::span<const double> beta, double beta0) {
    std::vector<double> out(X.rows);
    parallel_for(X.rows, [&](std::size_t i) { out[i] = row_score(X, i, beta, beta0); });
    return out;
}

HingeEval hinge_eval(const Matrix& X, const std::vector<int>& y, std::span<const double> beta,
                     double beta0, double wpos, double wneg) {
    const std::size_t D = X.cols;
    std::vector<double> acc = chunked_accumulate(X.rows, D, 2, [&](std::size_t i, double* a) {
        const double s = row_score(X, i, beta, beta0);
        const double yi = static_cast<double>(y[i]);
        const double w = y[i] > 0 ? wpos : wneg;
        const double margin = 1.0 - yi * s;
        if (margin > 0.0) {
            a[D] += w * margin;
            const double g = -w * yi;
            const double* xi = X.row(i);
            for (std::size_t d = 0; d < D; ++d) a[d] += g * xi[d];
            a[D + 1] += g;
        }
    });
    HingeEval out;
    out.gbeta.assign(acc.begin(), acc.begin() + D);
    out.hinge_sum = acc[D];
    out.gbeta0 = acc[D + 1];
    return out;
}

LogisticEval logistic_eval(const Matrix& X, const std::vector<int>& y,
                           std::span<const double> beta, double beta0) {
    const std::size_t D = X.cols;
    std::vector<double> acc = chunked_accumulate(X.rows, D, 2, [&](std::size_t i, double* a) {
        const double s = row_score(X, i, beta, beta0);
        const double yi = static_cast<double>(y[i]);
        a[D] += softplus(-yi * s);
        // d/ds log(1+exp(-ys)) = -y * sigmoid(-ys)
        const double g = -yi / (1.0 + std::exp(yi * s));
        const double* xi = X.row(i);
        for (std::size_t d = 0; d < D; ++d) a[d] += g * xi[d];
        a[D + 1] += g;
    });
    LogisticEval out;
    out.gbeta.assign(acc.begin(), acc.begin() + D);
    out.loss = acc[D];
    out.gbeta0 = acc[D + 1];
    return out;
}

namespace serial {

std::vector<double> raw_scores(const Matrix& X, std::span<const double> beta, double beta0) {
    std::vector<double> out(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) out[i] = row_score(X, i, beta, beta0);
    return out;
}

HingeEval hinge_eval(const Matrix& X, const std::vector<int>& y, std::span<const double> beta,
                     double beta0, double wpos, double wneg) {
    const std::size_t D = X.cols;
    HingeEval out;
    out.gbeta.assign(D, 0.0);
    for (std::size_t i = 0; i < X.rows; ++i) {
        const double s = row_score(X, i, beta, beta0);
        const double yi = static_cast<double>(y[i]);
        const double w = y[i] > 0 ? wpos : wneg;
        const double margin = 1.0 - yi * s;
        if (margin > 0.0) {
            out.hinge_sum += w * margin;
            const double g = -w * yi;
            const double* xi = X.row(i);
            for (std::size_t d = 0; d < D; ++d) out.gbeta[d] += g * xi[d];
            out.gbeta0 += g;
        }
    }
    return out;
}

LogisticEval logistic_eval(const Matrix& X, const std::vector<int>& y,
                           std::span<const double> beta, double beta0) {
    const std::size_t D = X.cols;
    LogisticEval out;
    out.gbeta.assign(D, 0.0);
    for (std::size_t i = 0; i < X.rows; ++i) {
        const double s = row_score(X, i, beta, beta0);
        const double yi = static_cast<double>(y[i]);
        out.loss += softplus(-yi * s);
        const double g = -yi / (1.0 + std::exp(yi * s));
        const double* xi = X.row(i);
        for (std::size_t d = 0; d < D; ++d) out.gbeta[d] += g * xi[d];
        out.gbeta0 += g;
    }
    return out;
}

}  // namespace serial

}  // namespace psvm
