#include "psvm/jcc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "psvm/kernels.hpp"
#include "psvm/rng.hpp"

namespace psvm {

JccModel make_jcc_model(std::size_t L, double lambda_neg, std::vector<double> budgets) {
    if (L < 1)
        throw std::invalid_argument("jcc: L must be >= 1");
    if (lambda_neg <= 0.0)
        throw std::invalid_argument("jcc: lambda_neg must be positive");
    if (budgets.size() == 1 && L > 1)
        budgets.assign(L, budgets[0]);
    if (budgets.size() != L)
        throw std::invalid_argument("jcc: need one budget per cluster");
    JccModel m;
    m.models.assign(L, LinearModel{});
    m.lambda_neg = lambda_neg;
    m.lambda_pos = static_cast<double>(L) * lambda_neg;
    m.budgets = std::move(budgets);
    return m;
}

namespace {

double sq_dist(const double* a, const double* b, std::size_t D) {
    double s = 0.0;
    for (std::size_t d = 0; d < D; ++d) {
        double diff = a[d] - b[d];
        s += diff * diff;
    }
    return s;
}

}  // namespace

std::vector<int> init_assignment(const Matrix& positives, int L, std::uint64_t seed) {
    const std::size_t m = positives.rows;
    const std::size_t D = positives.cols;
    if (L < 1)
        throw std::invalid_argument("init_assignment: L must be >= 1");
    if (static_cast<std::size_t>(L) > m)
        throw std::invalid_argument("init_assignment: more clusters than positive samples");
    if (L == 1) return std::vector<int>(m, 0);

    Rng rng(seed);
    // Farthest-point seeding.
    std::vector<std::vector<double>> centers;
    centers.reserve(L);
    std::size_t first = rng.below(m);
    centers.emplace_back(positives.row(first), positives.row(first) + D);
    std::vector<double> min_d2(m, std::numeric_limits<double>::infinity());
    while (centers.size() < static_cast<std::size_t>(L)) {
        const auto& latest = centers.back();
        std::size_t far_idx = 0;
        double far_d2 = -1.0;
        for (std::size_t i = 0; i < m; ++i) {
            min_d2[i] = std::min(min_d2[i], sq_dist(positives.row(i), latest.data(), D));
            if (min_d2[i] > far_d2) {
                far_d2 = min_d2[i];
                far_idx = i;
            }
        }
        centers.emplace_back(positives.row(far_idx), positives.row(far_idx) + D);
    }

    std::vector<int> assign(m, 0);
    for (int iter = 0; iter < 50; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < m; ++i) {
            int best = 0;
            double best_d2 = std::numeric_limits<double>::infinity();
            for (int l = 0; l < L; ++l) {
                double d2 = sq_dist(positives.row(i), centers[l].data(), D);
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = l;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;
        // Recompute means; an emptied cluster keeps its previous center.
        for (int l = 0; l < L; ++l) {
            std::vector<double> mean(D, 0.0);
            std::size_t count = 0;
            for (std::size_t i = 0; i < m; ++i) {
                if (assign[i] != l) continue;
                const double* xi = positives.row(i);
                for (std::size_t d = 0; d < D; ++d) mean[d] += xi[d];
                ++count;
            }
            if (count == 0) continue;
            for (std::size_t d = 0; d < D; ++d) centers[l][d] = mean[d] / count;
        }
    }
    return assign;
}

namespace {

std::vector<std::size_t> positive_rows(const Dataset& data) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < data.y.size(); ++i)
        if (data.y[i] > 0) rows.push_back(i);
    return rows;
}

// Cluster-l training view: cluster-l positives plus all negatives, original
// row order preserved (for L=1 this reproduces the full dataset exactly).
Dataset cluster_view(const Dataset& data, const std::vector<int>& assignment,
                     const std::vector<std::size_t>& pos_rows, int l) {
    Dataset sub;
    sub.meta = data.meta;
    sub.scaling = data.scaling;
    std::vector<char> in_cluster(data.n_samples(), 0);
    for (std::size_t p = 0; p < pos_rows.size(); ++p)
        if (assignment[p] == l) in_cluster[pos_rows[p]] = 1;
    std::size_t count = 0;
    for (std::size_t i = 0; i < data.n_samples(); ++i)
        if (data.y[i] < 0 || in_cluster[i]) ++count;
    sub.X = Matrix(count, data.n_features());
    sub.y.reserve(count);
    std::size_t r = 0;
    for (std::size_t i = 0; i < data.n_samples(); ++i) {
        if (data.y[i] >= 0 && !in_cluster[i]) continue;
        std::copy(data.X.row(i), data.X.row(i) + data.n_features(), sub.X.row(r));
        sub.y.push_back(data.y[i]);
        ++r;
    }
    return sub;
}

double cluster_sub_objective(const LinearModel& m, const Dataset& view, double lambda_pos,
                             double lambda_neg) {
    HingeEval ev = hinge_eval(view.X, view.y, m.beta, m.beta0, lambda_pos, lambda_neg);
    return 0.5 * squared_norm(m.beta) + ev.hinge_sum;
}

}  // namespace

double jcc_objective(const JccModel& model, const Dataset& data) {
    std::vector<std::size_t> pos_rows = positive_rows(data);
    double total = 0.0;
    for (std::size_t l = 0; l < model.cluster_count(); ++l) {
        Dataset view = cluster_view(data, model.assignment, pos_rows, static_cast<int>(l));
        total += cluster_sub_objective(model.models[l], view, model.lambda_pos, model.lambda_neg);
    }
    return total;
}

JccModel train_jcc(const Dataset& data, int L, double lambda_neg, std::vector<double> budgets,
                   const JccTrainOptions& opts, std::vector<double>* objective_history) {
    if (L < 1)
        throw std::invalid_argument("train_jcc: L must be >= 1");
    const std::size_t n_pos = data.count_label(1);
    const std::size_t n_neg = data.count_label(-1);
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("train_jcc: both classes required");
    if (opts.max_rounds < 1)
        throw std::invalid_argument("train_jcc: max_rounds must be >= 1");

    JccModel model = make_jcc_model(static_cast<std::size_t>(L), lambda_neg, std::move(budgets));
    for (std::size_t l = 0; l < model.cluster_count(); ++l) {
        model.models[l].beta.assign(data.n_features(), 0.0);
        model.models[l].C = model.lambda_pos;
        model.models[l].T = model.budgets[l];
    }

    std::vector<std::size_t> pos_rows = positive_rows(data);
    Matrix positives(pos_rows.size(), data.n_features());
    for (std::size_t p = 0; p < pos_rows.size(); ++p)
        std::copy(data.X.row(pos_rows[p]), data.X.row(pos_rows[p]) + data.n_features(),
                  positives.row(p));
    model.assignment = init_assignment(positives, L, opts.inner.seed);

    SlsvmOptions inner = opts.inner;
    inner.pos_weight = model.lambda_pos;
    inner.neg_weight = model.lambda_neg;

    if (objective_history) objective_history->clear();

    for (int round = 0; round < opts.max_rounds; ++round) {
        // (a) refit each cluster, accepting only non-increasing sub-objectives
        for (int l = 0; l < L; ++l) {
            Dataset view = cluster_view(data, model.assignment, pos_rows, l);
            LinearModel candidate = train_weighted(view, model.budgets[l], inner);
            double cur = cluster_sub_objective(model.models[l], view, model.lambda_pos,
                                               model.lambda_neg);
            double cand = cluster_sub_objective(candidate, view, model.lambda_pos,
                                                model.lambda_neg);
            if (cand <= cur) {
                candidate.C = model.lambda_pos;
                candidate.T = model.budgets[l];
                model.models[l] = std::move(candidate);
            }
        }
        // (b) reassign each positive to its smallest-hinge cluster
        bool changed = false;
        for (std::size_t p = 0; p < pos_rows.size(); ++p) {
            std::span<const double> x{data.X.row(pos_rows[p]), data.n_features()};
            int best = model.assignment[p];
            double best_hinge = std::numeric_limits<double>::infinity();
            for (int l = 0; l < L; ++l) {
                double h = hinge(1, score(model.models[l], x));
                if (h < best_hinge) {
                    best_hinge = h;
                    best = l;
                }
            }
            if (best != model.assignment[p]) {
                model.assignment[p] = best;
                changed = true;
            }
        }
        if (objective_history) objective_history->push_back(jcc_objective(model, data));
        if (!changed) break;
    }
    return model;
}

double predict_jcc(const JccModel& model, std::span<const double> x, int* cluster_out) {
    double best = -std::numeric_limits<double>::infinity();
    int best_l = 0;
    for (std::size_t l = 0; l < model.cluster_count(); ++l) {
        double s = score(model.models[l], x);
        if (s > best) {
            best = s;
            best_l = static_cast<int>(l);
        }
    }
    if (cluster_out) *cluster_out = best_l;
    return best;
}

double cluster_purity(const std::vector<int>& assignment, const std::vector<int>& planted,
                      int L) {
    if (assignment.size() != planted.size())
        throw std::invalid_argument("cluster_purity: size mismatch");
    if (assignment.empty()) return 1.0;
    if (L > 8)
        throw std::invalid_argument("cluster_purity: exact relabeling supported up to L=8");
    std::vector<int> perm(L);
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t best = 0;
    do {
        std::size_t matches = 0;
        for (std::size_t i = 0; i < assignment.size(); ++i)
            if (perm[assignment[i]] == planted[i]) ++matches;
        best = std::max(best, matches);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(assignment.size());
}

}  // namespace psvm
