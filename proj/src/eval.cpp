#include "psvm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "psvm/kernels.hpp"
#include "psvm/parallel.hpp"

namespace psvm {

namespace {

void check_both_classes(const std::vector<int>& labels) {
    bool pos = false, neg = false;
    for (int l : labels) (l > 0 ? pos : neg) = true;
    if (!pos || !neg)
        throw DataError("both classes are required");
}

}  // namespace

double auc(std::span<const double> scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("auc: size mismatch");
    check_both_classes(labels);
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // midranks over tie blocks
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
        i = j + 1;
    }
    double rank_sum_pos = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (labels[k] > 0) {
            rank_sum_pos += rank[k];
            ++n_pos;
        }
    }
    const std::size_t n_neg = n - n_pos;
    return (rank_sum_pos - 0.5 * n_pos * (n_pos + 1)) /
           (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::vector<RocPoint> roc_points(std::span<const double> scores,
                                 const std::vector<int>& labels) {
    check_both_classes(labels);
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    double n_pos = 0, n_neg = 0;
    for (int l : labels) (l > 0 ? n_pos : n_neg) += 1;

    std::vector<RocPoint> out;
    double tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        for (std::size_t k = i; k <= j; ++k) (labels[order[k]] > 0 ? tp : fp) += 1;
        out.push_back({scores[order[i]], tp / n_pos, fp / n_neg});
        i = j + 1;
    }
    return out;
}

double auc_trapezoid(std::span<const double> scores, const std::vector<int>& labels) {
    std::vector<RocPoint> pts = roc_points(scores, labels);
    double area = 0.0;
    double prev_tpr = 0.0, prev_fpr = 0.0;
    for (const RocPoint& p : pts) {
        area += (p.fpr - prev_fpr) * 0.5 * (p.tpr + prev_tpr);
        prev_tpr = p.tpr;
        prev_fpr = p.fpr;
    }
    return area;
}

double calibrate_threshold(std::span<const double> scores, double target_rate) {
    if (scores.empty())
        throw std::invalid_argument("calibrate_threshold: no scores");
    const std::size_t n = scores.size();
    long long k = std::llround(target_rate * static_cast<double>(n));
    k = std::clamp<long long>(k, 1, static_cast<long long>(n));
    std::vector<double> sorted(scores.begin(), scores.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    return sorted[static_cast<std::size_t>(k - 1)];
}

double positive_rate(std::span<const double> scores, double tau) {
    if (scores.empty()) return 0.0;
    std::size_t count = 0;
    for (double s : scores) count += s >= tau;
    return static_cast<double>(count) / static_cast<double>(scores.size());
}

// Lentz's continued fraction for the incomplete beta (Numerical Recipes form).
namespace {

double betacf(double a, double b, double x) {
    constexpr double kEps = 1e-14;
    constexpr double kFpMin = 1e-300;
    constexpr int kMaxIter = 500;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0)
        throw std::invalid_argument("incomplete_beta: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0))
        return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
    if (dof <= 0.0)
        throw std::invalid_argument("student_t_cdf: dof must be positive");
    const double x = dof / (dof + t * t);
    const double tail = 0.5 * incomplete_beta(0.5 * dof, 0.5, x);
    return t >= 0.0 ? 1.0 - tail : tail;
}

WelchResult welch_t(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("welch_t: each sample needs at least 2 values");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / na;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / nb;
    double va = 0.0, vb = 0.0;
    for (double v : a) va += (v - ma) * (v - ma);
    for (double v : b) vb += (v - mb) * (v - mb);
    va /= na - 1.0;
    vb /= nb - 1.0;

    WelchResult out;
    if (va == 0.0 && vb == 0.0) {
        // degenerate convention: equal means -> p=1, else p=0
        out.t = ma == mb ? 0.0
                         : std::copysign(std::numeric_limits<double>::infinity(), ma - mb);
        out.dof = na + nb - 2.0;
        out.p = ma == mb ? 1.0 : 0.0;
        return out;
    }
    const double se2 = va / na + vb / nb;
    out.t = (ma - mb) / std::sqrt(se2);
    out.dof = se2 * se2 /
              (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
    out.p = 2.0 * (1.0 - student_t_cdf(std::abs(out.t), out.dof));
    return out;
}

std::vector<FeatureRank> rank_features(const Dataset& data) {
    check_both_classes(data.y);
    if (data.count_label(1) < 2 || data.count_label(-1) < 2)
        throw DataError("rank_features: each cohort needs at least 2 samples");
    const std::size_t D = data.n_features();
    std::vector<FeatureRank> out(D);
    parallel_for(D, [&](std::size_t d) {
        std::vector<double> pos, neg;
        pos.reserve(data.n_samples());
        neg.reserve(data.n_samples());
        for (std::size_t i = 0; i < data.n_samples(); ++i)
            (data.y[i] > 0 ? pos : neg).push_back(data.X.at(i, d));
        WelchResult w = welch_t(pos, neg);
        out[d] = {d, w.t, w.p};
    });
    std::stable_sort(out.begin(), out.end(), [](const FeatureRank& a, const FeatureRank& b) {
        if (a.p != b.p) return a.p < b.p;
        return a.feature < b.feature;
    });
    return out;
}

LinearModel train_l2lr(const Dataset& data, double reg, const L2lrOptions& opts) {
    check_both_classes(data.y);
    if (reg <= 0.0)
        throw std::invalid_argument("train_l2lr: reg must be positive");
    const std::size_t D = data.n_features();
    std::vector<double> beta(D, 0.0);
    double beta0 = 0.0;

    auto objective = [&](const std::vector<double>& b, double b0) {
        LogisticEval ev = logistic_eval(data.X, data.y, b, b0);
        return ev.loss + 0.5 * reg * squared_norm(b);
    };

    double step = opts.init_step;
    double f = objective(beta, beta0);
    for (int it = 0; it < opts.max_iters; ++it) {
        LogisticEval ev = logistic_eval(data.X, data.y, beta, beta0);
        std::vector<double> g(D);
        for (std::size_t d = 0; d < D; ++d) g[d] = ev.gbeta[d] + reg * beta[d];
        const double g0 = ev.gbeta0;
        const double gnorm2 = squared_norm(g) + g0 * g0;
        if (std::sqrt(gnorm2) <= opts.grad_tol) break;

        // Armijo backtracking on the full gradient step.
        step = std::min(step * 2.0, 1e8);
        std::vector<double> trial(D);
        for (;;) {
            for (std::size_t d = 0; d < D; ++d) trial[d] = beta[d] - step * g[d];
            const double trial0 = beta0 - step * g0;
            const double ft = objective(trial, trial0);
            if (ft <= f - 1e-4 * step * gnorm2) {
                beta = trial;
                beta0 = trial0;
                f = ft;
                break;
            }
            step *= 0.5;
            if (step < 1e-18)
                throw std::runtime_error("train_l2lr: line search failed");
        }
    }

    LinearModel model;
    model.beta = std::move(beta);
    model.beta0 = beta0;
    model.C = reg;
    model.T = std::numeric_limits<double>::infinity();
    return model;
}

std::vector<double> model_scores(const LinearModel& model, const Dataset& data) {
    if (data.n_features() != model.beta.size())
        throw std::invalid_argument("model_scores: dimension mismatch");
    return raw_scores(data.X, model.beta, model.beta0);
}

std::vector<double> model_scores(const JccModel& model, const Dataset& data) {
    std::vector<double> out(data.n_samples());
    parallel_for(data.n_samples(),
                 [&](std::size_t i) { out[i] = predict_jcc(model, data.X.row_span(i)); });
    return out;
}

namespace {

template <typename Model>
RatePair rates(const Model& evaluator, const Dataset& before, const Dataset& after, double tau) {
    std::vector<double> sb = model_scores(evaluator, before);
    std::vector<double> sa = model_scores(evaluator, after);
    return {positive_rate(sb, tau), positive_rate(sa, tau)};
}

}  // namespace

RatePair prescriptive_eval(const LinearModel& evaluator, const Dataset& before,
                           const Dataset& after, double tau) {
    return rates(evaluator, before, after, tau);
}

RatePair prescriptive_eval(const JccModel& evaluator, const Dataset& before,
                           const Dataset& after, double tau) {
    return rates(evaluator, before, after, tau);
}

}  // namespace psvm
