#include "psvm/core.hpp"

#include <algorithm>
#include <cmath>

namespace psvm {

std::string to_string(FeatureKind k) {
    switch (k) {
        case FeatureKind::Binary: return "binary";
        case FeatureKind::Integer: return "integer";
        case FeatureKind::Continuous: return "continuous";
        case FeatureKind::CategoricalExpanded: return "categorical-expanded";
    }
    return "continuous";
}

FeatureKind feature_kind_from_string(const std::string& s) {
    if (s == "binary") return FeatureKind::Binary;
    if (s == "integer") return FeatureKind::Integer;
    if (s == "continuous") return FeatureKind::Continuous;
    if (s == "categorical-expanded") return FeatureKind::CategoricalExpanded;
    throw std::invalid_argument("unknown feature kind: " + s);
}

std::size_t Dataset::count_label(int label) const {
    return static_cast<std::size_t>(std::count(y.begin(), y.end(), label));
}

void Dataset::validate() const {
    if (y.size() != X.rows)
        throw DataError("label count does not match row count");
    if (meta.size() != X.cols)
        throw DataError("feature metadata count does not match column count");
    for (int label : y)
        if (label != -1 && label != 1)
            throw DataError("labels must be -1 or +1");
    for (const FeatureMeta& m : meta) {
        if (m.controllable && m.kind != FeatureKind::Continuous && m.kind != FeatureKind::Integer)
            throw DataError("controllable feature '" + m.name + "' must be continuous or integer");
        if (m.raw_lower && m.raw_upper && *m.raw_lower > *m.raw_upper)
            throw DataError("feature '" + m.name + "' has raw_lower > raw_upper");
    }
    if (scaling) {
        if (scaling->size() != X.cols)
            throw DataError("scaling parameter count does not match column count");
        for (double v : X.values)
            if (v < -1e-9 || v > 1.0 + 1e-9)
                throw DataError("scaled dataset entry outside [0,1]");
    }
}

double score(const LinearModel& model, std::span<const double> x) {
    if (x.size() != model.beta.size())
        throw std::invalid_argument("score: dimension mismatch");
    return model.beta0 + dot(model.beta, x);
}

double hinge(int label, double s) {
    if (label != -1 && label != 1)
        throw std::invalid_argument("hinge: label must be -1 or +1");
    double v = 1.0 - static_cast<double>(label) * s;
    return v > 0.0 ? v : 0.0;
}

double l1_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

double squared_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace psvm
