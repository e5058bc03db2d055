#include "psvm/synth.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "psvm/rng.hpp"

namespace psvm {

namespace {

std::vector<FeatureMeta> continuous_features(int D) {
    std::vector<FeatureMeta> meta(D);
    for (int d = 0; d < D; ++d) {
        meta[d].name = "f" + std::to_string(d);
        meta[d].kind = FeatureKind::Continuous;
    }
    return meta;
}

}  // namespace

SynthData gen_jcc_data(const SynthSpec& spec) {
    if (spec.L < 1 || spec.D < 1)
        throw std::invalid_argument("gen_jcc_data: L and D must be >= 1");
    if (spec.L > spec.D)
        throw std::invalid_argument("gen_jcc_data: need L <= D (means sit on coordinate axes)");
    if (spec.n_pos < spec.L || spec.n_neg < 1)
        throw std::invalid_argument("gen_jcc_data: need at least L positives and 1 negative");
    if (spec.noise_sigma <= 0.0 || spec.separation <= 0.0)
        throw std::invalid_argument("gen_jcc_data: separation and noise_sigma must be positive");

    const std::size_t n = static_cast<std::size_t>(spec.n_pos + spec.n_neg);
    SynthData out;
    out.data.X = Matrix(n, spec.D);
    out.data.y.reserve(n);
    out.data.meta = continuous_features(spec.D);

    Rng rng(spec.seed);
    std::size_t row = 0;
    // positives first, cluster by cluster; remainder spread over the first clusters
    const int base = spec.n_pos / spec.L;
    const int extra = spec.n_pos % spec.L;
    for (int l = 0; l < spec.L; ++l) {
        const int count = base + (l < extra ? 1 : 0);
        const double mean_dist = spec.separation * spec.noise_sigma;
        for (int i = 0; i < count; ++i) {
            double* x = out.data.X.row(row);
            for (int d = 0; d < spec.D; ++d)
                x[d] = (d == l ? mean_dist : 0.0) + spec.noise_sigma * rng.normal();
            out.data.y.push_back(1);
            out.planted.push_back(l);
            ++row;
        }
    }
    for (int j = 0; j < spec.n_neg; ++j) {
        double* x = out.data.X.row(row);
        for (int d = 0; d < spec.D; ++d) x[d] = spec.noise_sigma * rng.normal();
        out.data.y.push_back(-1);
        ++row;
    }
    return out;
}

Dataset gen_controllable_data(const ControllableSpec& spec) {
    if (spec.D < 1 || spec.n < 1)
        throw std::invalid_argument("gen_controllable_data: D and n must be >= 1");
    if (spec.beta.size() != static_cast<std::size_t>(spec.D))
        throw std::invalid_argument("gen_controllable_data: beta must have D entries");
    if (spec.controllable_index >= static_cast<std::size_t>(spec.D))
        throw std::invalid_argument("gen_controllable_data: controllable_index out of range");
    if (spec.beta[spec.controllable_index] == 0.0)
        throw std::invalid_argument(
            "gen_controllable_data: the controllable feature needs nonzero planted weight");

    Dataset data;
    data.X = Matrix(spec.n, spec.D);
    data.y.reserve(spec.n);
    data.meta = continuous_features(spec.D);
    data.meta[spec.controllable_index].controllable = true;
    data.meta[spec.controllable_index].raw_lower = 0.0;
    data.meta[spec.controllable_index].raw_upper = 1.0;

    Rng rng(spec.seed);
    for (int i = 0; i < spec.n; ++i) {
        double* x = data.X.row(i);
        double s = spec.beta0;
        for (int d = 0; d < spec.D; ++d) {
            x[d] = rng.uniform();
            s += spec.beta[d] * x[d];
        }
        if (spec.noise_sigma > 0.0) s += spec.noise_sigma * rng.normal();
        data.y.push_back(s >= 0.0 ? 1 : -1);
    }
    // features are already in [0,1]; identity scaling keeps raw == scaled
    ScalingParams scaling;
    scaling.min.assign(spec.D, 0.0);
    scaling.range.assign(spec.D, 1.0);
    data.scaling = scaling;
    return data;
}

}  // namespace psvm
