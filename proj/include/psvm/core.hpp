#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace psvm {

// Thrown for malformed or unusable input data (maps to CLI exit code 3).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), values(r * c, fill) {}

    double* row(std::size_t i) { return values.data() + i * cols; }
    const double* row(std::size_t i) const { return values.data() + i * cols; }
    std::span<const double> row_span(std::size_t i) const { return {row(i), cols}; }

    double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

enum class FeatureKind { Binary, Integer, Continuous, CategoricalExpanded };

std::string to_string(FeatureKind k);
FeatureKind feature_kind_from_string(const std::string& s);

struct FeatureMeta {
    std::string name;
    FeatureKind kind = FeatureKind::Continuous;
    bool controllable = false;
    std::optional<double> raw_lower;
    std::optional<double> raw_upper;
};

// Per-feature affine map to [0,1]: scaled = (raw - min) / range.
// Degenerate features store range = 1 so the map stays invertible.
struct ScalingParams {
    std::vector<double> min;
    std::vector<double> range;

    std::size_t size() const { return min.size(); }
    double scale(std::size_t d, double raw) const { return (raw - min[d]) / range[d]; }
    double unscale(std::size_t d, double scaled) const { return scaled * range[d] + min[d]; }
};

struct Dataset {
    Matrix X;
    std::vector<int> y;  // entries are -1 or +1
    std::vector<FeatureMeta> meta;
    std::optional<ScalingParams> scaling;

    std::size_t n_samples() const { return X.rows; }
    std::size_t n_features() const { return X.cols; }

    std::size_t count_label(int label) const;

    // Checks labels, dimension agreement and (when scaling is present) that
    // every entry lies in [0,1] up to 1e-9. Throws DataError on violation.
    void validate() const;
};

// Separating hyperplane with its training hyperparameters.
// Predicted label is +1 iff score >= threshold (0 when unset).
struct LinearModel {
    std::vector<double> beta;
    double beta0 = 0.0;
    double C = 1.0;
    double T = 1.0;
    std::optional<double> threshold;
};

// beta0 + beta'x. Throws on dimension mismatch.
double score(const LinearModel& model, std::span<const double> x);

// max(0, 1 - label*score); label must be -1 or +1.
double hinge(int label, double score);

double l1_norm(std::span<const double> v);
double squared_norm(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace psvm
