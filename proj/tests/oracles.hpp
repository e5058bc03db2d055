#pragma once

// Independent brute-force and quadrature oracles used to pin expected values.
// Everything here recomputes objectives from scratch with plain loops; none
// of it calls the library's solver paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "psvm/core.hpp"

namespace oracle {

// Objective of the weighted sparse-SVM problem, straight from its definition.
inline double svm_objective_ref(const psvm::Matrix& X, const std::vector<int>& y,
                                std::span<const double> beta, double beta0, double wpos,
                                double wneg) {
    double obj = 0.0;
    for (double b : beta) obj += 0.5 * b * b;
    for (std::size_t i = 0; i < X.rows; ++i) {
        double s = beta0;
        for (std::size_t d = 0; d < X.cols; ++d) s += beta[d] * X.at(i, d);
        double margin = 1.0 - y[i] * s;
        if (margin > 0.0) obj += (y[i] > 0 ? wpos : wneg) * margin;
    }
    return obj;
}

struct GridPoint {
    std::vector<double> coords;  // beta..., beta0 last
    double value = std::numeric_limits<double>::infinity();
};

// Multi-stage dense grid minimization of fn over a box, refining around the
// best point. fn must be convex for the refinement to be sound.
inline GridPoint grid_minimize(std::function<double(std::span<const double>)> fn,
                               std::vector<double> lo, std::vector<double> hi,
                               int points_per_dim, int stages) {
    const std::size_t dims = lo.size();
    GridPoint best;
    best.coords.assign(dims, 0.0);
    for (int stage = 0; stage < stages; ++stage) {
        std::vector<std::size_t> idx(dims, 0);
        std::vector<double> pt(dims);
        GridPoint stage_best;
        for (;;) {
            for (std::size_t d = 0; d < dims; ++d) {
                double t = points_per_dim == 1
                               ? 0.5
                               : static_cast<double>(idx[d]) / (points_per_dim - 1);
                pt[d] = lo[d] + t * (hi[d] - lo[d]);
            }
            double v = fn(pt);
            if (v < stage_best.value) {
                stage_best.value = v;
                stage_best.coords = pt;
            }
            std::size_t d = 0;
            while (d < dims && ++idx[d] == static_cast<std::size_t>(points_per_dim)) {
                idx[d] = 0;
                ++d;
            }
            if (d == dims) break;
        }
        if (stage_best.value < best.value) best = stage_best;
        // shrink the box around the stage best
        for (std::size_t d = 0; d < dims; ++d) {
            double spacing = (hi[d] - lo[d]) / std::max(1, points_per_dim - 1);
            lo[d] = best.coords[d] - 2.0 * spacing;
            hi[d] = best.coords[d] + 2.0 * spacing;
        }
    }
    return best;
}

// Grid minimum of the Eq.-style SVM objective over the l1 ball x intercept
// range. Infeasible grid points (||beta||_1 > T) are skipped.
inline GridPoint grid_min_svm(const psvm::Matrix& X, const std::vector<int>& y, double wpos,
                              double wneg, double T, double beta0_range, int points_per_dim = 17,
                              int stages = 9) {
    const std::size_t D = X.cols;
    std::vector<double> lo(D + 1), hi(D + 1);
    for (std::size_t d = 0; d < D; ++d) {
        lo[d] = -T;
        hi[d] = T;
    }
    lo[D] = -beta0_range;
    hi[D] = beta0_range;
    auto fn = [&](std::span<const double> pt) {
        double l1 = 0.0;
        for (std::size_t d = 0; d < D; ++d) l1 += std::abs(pt[d]);
        if (l1 > T)
            return std::numeric_limits<double>::infinity();
        return svm_objective_ref(X, y, pt.subspan(0, D), pt[D], wpos, wneg);
    };
    return grid_minimize(fn, lo, hi, points_per_dim, stages);
}

// Dense-grid Euclidean projection onto the l1 ball (2-D): the feasible grid
// point closest to v.
inline std::vector<double> grid_project_l1_2d(std::span<const double> v, double T, int steps) {
    double best_d2 = std::numeric_limits<double>::infinity();
    std::vector<double> best(2, 0.0);
    for (int i = 0; i < steps; ++i) {
        double u0 = -T + 2.0 * T * i / (steps - 1);
        for (int j = 0; j < steps; ++j) {
            double u1 = -T + 2.0 * T * j / (steps - 1);
            if (std::abs(u0) + std::abs(u1) > T) continue;
            double d2 = (u0 - v[0]) * (u0 - v[0]) + (u1 - v[1]) * (u1 - v[1]);
            if (d2 < best_d2) {
                best_d2 = d2;
                best = {u0, u1};
            }
        }
    }
    return best;
}

// Prescription objective lambda*max(0,1+beta0+beta'y) + ||y-x||_p^p with
// non-controllable coordinates held at x.
inline double prescription_objective_ref(std::span<const double> beta, double beta0,
                                         std::span<const double> x, std::span<const double> y,
                                         double lambda, int p) {
    double s = beta0;
    double cost = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
        s += beta[d] * y[d];
        double diff = std::abs(y[d] - x[d]);
        cost += p == 2 ? diff * diff : diff;
    }
    return lambda * std::max(0.0, 1.0 + s) + cost;
}

// Grid minimum of the prescription objective over the controllable box
// (at most 2 controllable coordinates).
inline GridPoint grid_min_prescription(std::span<const double> beta, double beta0,
                                       std::span<const double> x, double lambda, int p,
                                       std::span<const double> lower,
                                       std::span<const double> upper,
                                       const std::vector<bool>& controllable,
                                       int points_per_dim = 401, int stages = 6) {
    std::vector<std::size_t> free_dims;
    for (std::size_t d = 0; d < x.size(); ++d)
        if (controllable[d]) free_dims.push_back(d);
    std::vector<double> lo, hi;
    for (std::size_t d : free_dims) {
        lo.push_back(lower[d]);
        hi.push_back(upper[d]);
    }
    std::vector<double> y(x.begin(), x.end());
    auto fn = [&](std::span<const double> pt) {
        for (std::size_t k = 0; k < free_dims.size(); ++k) {
            double v = std::clamp(pt[k], lower[free_dims[k]], upper[free_dims[k]]);
            y[free_dims[k]] = v;
        }
        return prescription_objective_ref(beta, beta0, x, y, lambda, p);
    };
    return grid_minimize(fn, lo, hi, points_per_dim, stages);
}

// Two-tailed Student-t p-value: composite Simpson over [|t|, A] plus an
// asymptotic series for the polynomial tail beyond A (needed because the
// density only decays like u^-(dof+1)).
inline double welch_p_quadrature(double t, double dof) {
    const double a = std::abs(t);
    const double A = a + 1200.0;
    const int n = 600000;  // even
    const double h = (A - a) / n;
    const double log_norm = std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
                            0.5 * std::log(dof * 3.14159265358979323846);
    auto pdf = [&](double u) {
        return std::exp(log_norm - 0.5 * (dof + 1.0) * std::log1p(u * u / dof));
    };
    double sum = pdf(a) + pdf(A);
    for (int i = 1; i < n; ++i) sum += pdf(a + i * h) * (i % 2 ? 4.0 : 2.0);
    double body = sum * h / 3.0;

    // tail: f(u) = K (u^2/dof)^-m (1 - m*dof/u^2 + m(m+1)dof^2/(2u^4) - ...),
    // m = (dof+1)/2, integrated term by term from A
    const double m = 0.5 * (dof + 1.0);
    const double K = std::exp(log_norm) * std::pow(dof, m);
    const double tail = K * (std::pow(A, -dof) / dof -
                             m * dof * std::pow(A, -(dof + 2.0)) / (dof + 2.0) +
                             0.5 * m * (m + 1.0) * dof * dof *
                                 std::pow(A, -(dof + 4.0)) / (dof + 4.0));
    return 2.0 * (body + tail);
}

}  // namespace oracle
