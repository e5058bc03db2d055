#include "psvm/prescribe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "psvm/csv.hpp"
#include "psvm/eval.hpp"
#include "psvm/parallel.hpp"

namespace psvm {

namespace {

constexpr double kFlipTol = 1e-9;

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

struct Instance {
    const LinearModel* model;
    const PrescriptionConfig* cfg;
    std::span<const double> x;
    std::span<const double> lower;
    std::span<const double> upper;
    std::vector<std::size_t> free_dims;  // controllable indices
    double pinned_score = 0.0;           // beta0 + beta' x over pinned coords
};

double eval_objective(const Instance& inst, std::span<const double> y) {
    double s = inst.pinned_score;
    double cost = 0.0;
    for (std::size_t k = 0; k < inst.free_dims.size(); ++k) {
        const std::size_t d = inst.free_dims[k];
        s += inst.model->beta[d] * y[k];
        const double diff = std::abs(y[k] - inst.x[d]);
        cost += inst.cfg->p == 2 ? diff * diff : diff;
    }
    return inst.cfg->lambda * std::max(0.0, 1.0 + s) + cost;
}

double free_score(const Instance& inst, std::span<const double> y) {
    double s = inst.pinned_score;
    for (std::size_t k = 0; k < inst.free_dims.size(); ++k)
        s += inst.model->beta[inst.free_dims[k]] * y[k];
    return s;
}

// Projected subgradient on the free coordinates, best iterate kept.
std::vector<double> solve_iterative(const Instance& inst) {
    const std::size_t m = inst.free_dims.size();
    std::vector<double> y(m), best(m);
    for (std::size_t k = 0; k < m; ++k) y[k] = inst.x[inst.free_dims[k]];
    best = y;
    double best_obj = eval_objective(inst, y);
    std::vector<double> g(m);
    for (int t = 0; t < inst.cfg->max_iters; ++t) {
        const double s = free_score(inst, y);
        double gnorm2 = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t d = inst.free_dims[k];
            g[k] = 0.0;
            if (s > -1.0) g[k] += inst.cfg->lambda * inst.model->beta[d];
            const double diff = y[k] - inst.x[d];
            if (inst.cfg->p == 2) {
                g[k] += 2.0 * diff;
            } else if (diff != 0.0) {
                g[k] += diff > 0.0 ? 1.0 : -1.0;
            }
            gnorm2 += g[k] * g[k];
        }
        // same normalized schedule as the svm solver
        const double step = inst.cfg->step0 / (std::sqrt(1.0 + static_cast<double>(t)) *
                                               std::max(1.0, std::sqrt(gnorm2)));
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t d = inst.free_dims[k];
            y[k] = clamp(y[k] - step * g[k], inst.lower[d], inst.upper[d]);
        }
        const double obj = eval_objective(inst, y);
        if (obj < best_obj) {
            best_obj = obj;
            best = y;
        }
    }
    return best;
}

// Hinge-active regime: minimize lambda*beta'y + ||y-x||_p^p per coordinate.
std::vector<double> candidate_active(const Instance& inst) {
    const std::size_t m = inst.free_dims.size();
    std::vector<double> y(m);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t d = inst.free_dims[k];
        const double b = inst.model->beta[d];
        if (inst.cfg->p == 2) {
            y[k] = clamp(inst.x[d] - 0.5 * inst.cfg->lambda * b, inst.lower[d], inst.upper[d]);
        } else {
            // slope of lambda*b*y +- 1 decides whether moving off x pays
            if (inst.cfg->lambda * b > 1.0)
                y[k] = inst.lower[d];
            else if (inst.cfg->lambda * b < -1.0)
                y[k] = inst.upper[d];
            else
                y[k] = inst.x[d];
        }
    }
    return y;
}

// Flip-boundary regime: minimize ||y-x||_p^p subject to score(y) <= -1 and
// the box. Returns false when the flip is unreachable inside the box.
bool candidate_flip(const Instance& inst, std::vector<double>& out) {
    const std::size_t m = inst.free_dims.size();
    const double target = -1.0 - inst.pinned_score;  // need beta_free' y <= target
    std::vector<double> y(m);
    for (std::size_t k = 0; k < m; ++k) y[k] = inst.x[inst.free_dims[k]];

    double v0 = 0.0;
    double v_min = 0.0;  // smallest reachable beta_free'y
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t d = inst.free_dims[k];
        const double b = inst.model->beta[d];
        v0 += b * y[k];
        v_min += b > 0.0 ? b * inst.lower[d] : b * inst.upper[d];
    }
    if (v0 <= target) {
        out = y;
        return true;
    }
    if (v_min > target) return false;

    if (inst.cfg->p == 2) {
        // y_d(mu) = clamp(x_d - mu*b_d/2); beta'y(mu) is non-increasing, so
        // bisect for the smallest mu reaching the target.
        auto value_at = [&](double mu) {
            double v = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                const std::size_t d = inst.free_dims[k];
                const double b = inst.model->beta[d];
                v += b * clamp(inst.x[d] - 0.5 * mu * b, inst.lower[d], inst.upper[d]);
            }
            return v;
        };
        double hi = 1.0;
        while (value_at(hi) > target) {
            hi *= 2.0;
            if (hi > 1e18) return false;
        }
        double lo = 0.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (value_at(mid) > target ? lo : hi) = mid;
        }
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t d = inst.free_dims[k];
            y[k] = clamp(inst.x[d] - 0.5 * hi * inst.model->beta[d], inst.lower[d],
                         inst.upper[d]);
        }
        out = y;
        return true;
    }

    // p=1: continuous knapsack; spend movement on the largest |beta| first.
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ba = std::abs(inst.model->beta[inst.free_dims[a]]);
        const double bb = std::abs(inst.model->beta[inst.free_dims[b]]);
        if (ba != bb) return ba > bb;
        return a < b;
    });
    double need = v0 - target;
    for (std::size_t k : order) {
        if (need <= 0.0) break;
        const std::size_t d = inst.free_dims[k];
        const double b = inst.model->beta[d];
        if (b == 0.0) continue;
        const double reach = b > 0.0 ? b * (inst.x[d] - inst.lower[d])
                                     : -b * (inst.upper[d] - inst.x[d]);
        if (reach <= 0.0) continue;
        const double use = std::min(reach, need);
        // positive beta moves down, negative beta moves up
        y[k] = b > 0.0 ? inst.x[d] - use / b : inst.x[d] + use / (-b);
        need -= use;
    }
    out = y;
    return true;
}

}  // namespace

Prescription prescribe(const LinearModel& model, std::span<const double> x,
                       const PrescriptionConfig& cfg, std::span<const double> lower,
                       std::span<const double> upper, const std::vector<bool>& controllable) {
    const std::size_t D = model.beta.size();
    if (x.size() != D || lower.size() != D || upper.size() != D || controllable.size() != D)
        throw std::invalid_argument("prescribe: dimension mismatch");
    if (cfg.lambda < 0.0)
        throw std::invalid_argument("prescribe: lambda must be nonnegative");
    if (cfg.p != 1 && cfg.p != 2)
        throw std::invalid_argument("prescribe: p must be 1 or 2");

    Instance inst;
    inst.model = &model;
    inst.cfg = &cfg;
    inst.x = x;
    inst.lower = lower;
    inst.upper = upper;
    inst.pinned_score = model.beta0;
    for (std::size_t d = 0; d < D; ++d) {
        if (controllable[d]) {
            if (lower[d] > upper[d])
                throw std::invalid_argument("prescribe: infeasible bounds");
            inst.free_dims.push_back(d);
        } else {
            inst.pinned_score += model.beta[d] * x[d];
        }
    }

    std::vector<double> best = solve_iterative(inst);
    double best_obj = eval_objective(inst, best);
    auto consider = [&](const std::vector<double>& y) {
        const double obj = eval_objective(inst, y);
        if (obj < best_obj) {
            best_obj = obj;
            best = y;
        }
    };
    consider(candidate_active(inst));
    std::vector<double> flip;
    if (candidate_flip(inst, flip)) consider(flip);

    Prescription out;
    out.x.assign(x.begin(), x.end());
    out.y = out.x;
    for (std::size_t k = 0; k < inst.free_dims.size(); ++k) out.y[inst.free_dims[k]] = best[k];
    const double s = score(model, out.y);
    out.xi = std::max(0.0, 1.0 + s);
    out.flipped = s <= -1.0 + kFlipTol;
    double cost = 0.0;
    for (std::size_t d = 0; d < D; ++d) {
        const double diff = std::abs(out.y[d] - out.x[d]);
        cost += cfg.p == 2 ? diff * diff : diff;
    }
    out.change_cost = cost;
    return out;
}

namespace {

// Per-patient box from the config template; widened when the patient's
// current value drifts outside so y = x stays feasible.
void patient_bounds(const PrescriptionConfig& cfg, const Dataset& data, std::size_t row,
                    std::vector<double>& lower, std::vector<double>& upper,
                    std::vector<bool>& controllable) {
    const std::size_t D = data.n_features();
    lower.assign(D, 0.0);
    upper.assign(D, 0.0);
    controllable.assign(D, false);
    for (std::size_t d = 0; d < D; ++d) {
        controllable[d] = data.meta[d].controllable;
        if (!controllable[d]) continue;
        FeatureBounds fb = d < cfg.bounds.size() ? cfg.bounds[d] : FeatureBounds{};
        const double xd = data.X.at(row, d);
        double lo = fb.lower;
        double hi = fb.upper;
        if (fb.direction == BoundDirection::Increase) lo = xd;
        if (fb.direction == BoundDirection::Decrease) hi = xd;
        lower[d] = std::min(lo, xd);
        upper[d] = std::max(hi, xd);
    }
}

template <typename ScoreFn, typename ModelFn>
std::vector<Prescription> batch_impl(const Dataset& data, const PrescriptionConfig& cfg,
                                     double tau, ScoreFn&& score_of, ModelFn&& model_of) {
    std::vector<std::size_t> selected;
    std::vector<int> clusters;
    for (std::size_t i = 0; i < data.n_samples(); ++i) {
        int cluster = 0;
        if (score_of(i, &cluster) >= tau) {
            selected.push_back(i);
            clusters.push_back(cluster);
        }
    }
    std::vector<Prescription> out(selected.size());
    std::vector<std::string> errors(selected.size());
    parallel_for(selected.size(), [&](std::size_t k) {
        try {
            const std::size_t row = selected[k];
            std::vector<double> lower, upper;
            std::vector<bool> controllable;
            patient_bounds(cfg, data, row, lower, upper, controllable);
            Prescription p = prescribe(model_of(clusters[k]), data.X.row_span(row), cfg, lower,
                                       upper, controllable);
            p.patient_index = row;
            p.cluster = clusters[k];
            out[k] = std::move(p);
        } catch (const std::exception& e) {
            errors[k] = e.what();
        }
    });
    for (const std::string& err : errors)
        if (!err.empty()) throw std::invalid_argument(err);
    return out;
}

}  // namespace

std::vector<Prescription> batch_prescribe(const LinearModel& model, const Dataset& data,
                                          const PrescriptionConfig& cfg, double tau) {
    if (data.n_features() != model.beta.size())
        throw std::invalid_argument("batch_prescribe: dimension mismatch");
    return batch_impl(
        data, cfg, tau,
        [&](std::size_t i, int*) { return score(model, data.X.row_span(i)); },
        [&](int) -> const LinearModel& { return model; });
}

std::vector<Prescription> batch_prescribe(const JccModel& model, const Dataset& data,
                                          const PrescriptionConfig& cfg, double tau) {
    return batch_impl(
        data, cfg, tau,
        [&](std::size_t i, int* cl) { return predict_jcc(model, data.X.row_span(i), cl); },
        [&](int cl) -> const LinearModel& { return model.models[cl]; });
}

int baseline_bags(Sex sex, double hct_raw) {
    if (hct_raw <= 0.0 || hct_raw >= 100.0)
        throw std::invalid_argument("baseline_bags: HCT must be a percentage in (0,100)");
    if (sex == Sex::Female) {
        if (hct_raw < 37.0) return 0;
        if (hct_raw < 40.0) return 1;
        if (hct_raw < 43.0) return 2;
        return 3;
    }
    if (hct_raw < 41.0) return 0;
    if (hct_raw < 44.0) return 1;
    if (hct_raw < 47.0) return 2;
    return 3;
}

int discretize_transfusion(double delta_hct_raw, int baseline) {
    if (baseline < 0 || baseline > 3)
        throw std::invalid_argument("discretize_transfusion: baseline must be in [0,3]");
    const int cap = 3 - baseline;
    int bags = static_cast<int>(std::llround(delta_hct_raw / 3.0));
    return std::clamp(bags, 0, cap);
}

std::vector<double> apply_treatment(std::span<const double> x, std::size_t hct_feature, int bags,
                                    const ScalingParams& scaling) {
    if (bags < 0 || bags > 3)
        throw std::invalid_argument("apply_treatment: bags must be in [0,3]");
    if (hct_feature >= scaling.size())
        throw std::invalid_argument("apply_treatment: no scaling for the HCT feature");
    std::vector<double> out(x.begin(), x.end());
    const double raw = scaling.unscale(hct_feature, x[hct_feature]);
    out[hct_feature] = scaling.scale(hct_feature, raw + 3.0 * bags);
    return out;
}

std::string prescriptions_to_csv(const std::vector<Prescription>& prescriptions,
                                 const Dataset& data) {
    std::vector<std::size_t> ctrl;
    for (std::size_t d = 0; d < data.meta.size(); ++d)
        if (data.meta[d].controllable) ctrl.push_back(d);

    std::string out = "patient_index,cluster,flipped,xi,change_cost";
    for (std::size_t d : ctrl) {
        out += "," + data.meta[d].name + "_before";
        out += "," + data.meta[d].name + "_after";
    }
    out += "\n";
    for (const Prescription& p : prescriptions) {
        out += std::to_string(p.patient_index);
        out += "," + std::to_string(p.cluster);
        out += p.flipped ? ",1" : ",0";
        out += "," + format_double(p.xi);
        out += "," + format_double(p.change_cost);
        for (std::size_t d : ctrl) {
            const double before = data.scaling ? data.scaling->unscale(d, p.x[d]) : p.x[d];
            const double after = data.scaling ? data.scaling->unscale(d, p.y[d]) : p.y[d];
            out += "," + format_double(before);
            out += "," + format_double(after);
        }
        out += "\n";
    }
    return out;
}

Dataset apply_prescriptions(const Dataset& data, const std::vector<Prescription>& prescriptions) {
    Dataset out = data;
    for (const Prescription& p : prescriptions) {
        if (p.y.size() != data.n_features() || p.patient_index >= data.n_samples())
            throw std::invalid_argument("apply_prescriptions: prescription does not match data");
        std::copy(p.y.begin(), p.y.end(), out.X.row(p.patient_index));
    }
    return out;
}

}  // namespace psvm
