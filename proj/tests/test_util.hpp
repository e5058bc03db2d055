#pragma once

#include <initializer_list>
#include <vector>

#include "psvm/core.hpp"
#include "psvm/rng.hpp"

namespace testutil {

// Dataset from explicit rows/labels, with plain continuous feature metadata.
inline psvm::Dataset make_dataset(const std::vector<std::vector<double>>& rows,
                                  const std::vector<int>& labels) {
    psvm::Dataset data;
    const std::size_t n = rows.size();
    const std::size_t D = n ? rows[0].size() : 0;
    data.X = psvm::Matrix(n, D);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < D; ++d) data.X.at(i, d) = rows[i][d];
    data.y = labels;
    data.meta.resize(D);
    for (std::size_t d = 0; d < D; ++d) {
        data.meta[d].name = "f" + std::to_string(d);
        data.meta[d].kind = psvm::FeatureKind::Continuous;
    }
    return data;
}

// Small random two-class instance with features in [-1,1].
inline psvm::Dataset random_instance(psvm::Rng& rng, std::size_t n, std::size_t D) {
    std::vector<std::vector<double>> rows(n, std::vector<double>(D));
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < D; ++d) rows[i][d] = rng.uniform(-1.0, 1.0);
        labels[i] = i % 2 == 0 ? 1 : -1;  // guarantee both classes
    }
    return make_dataset(rows, labels);
}

}  // namespace testutil
