#pragma once

#include <span>
#include <string>
#include <vector>

#include "psvm/core.hpp"
#include "psvm/jcc.hpp"

namespace psvm {

enum class BoundDirection { Both, Increase, Decrease };

// Per-feature bound template in scaled units; per-patient bounds are derived
// from it (Increase pins the lower bound at the patient's current value,
// Decrease the upper). Non-controllable features are ignored.
struct FeatureBounds {
    double lower = 0.0;
    double upper = 1.0;
    BoundDirection direction = BoundDirection::Both;
};

struct PrescriptionConfig {
    double lambda = 10.0;
    int p = 2;  // norm exponent, 1 or 2
    std::vector<FeatureBounds> bounds;  // one per feature (entries for non-controllable unused)
    int max_iters = 2000;
    double step0 = 0.5;
};

struct Prescription {
    std::size_t patient_index = 0;
    int cluster = 0;
    std::vector<double> x;  // original (scaled units)
    std::vector<double> y;  // prescribed (scaled units)
    double xi = 0.0;             // max(0, 1 + beta0 + beta'y)
    double change_cost = 0.0;    // ||y - x||_p^p
    bool flipped = false;        // beta0 + beta'y <= -1 + 1e-9
};

// Minimizes lambda*max(0, 1+beta0+beta'y) + ||y-x||_p^p over the box
// [lower,upper] with non-controllable coordinates pinned at x. Projected
// subgradient from y=x plus exact closed-form candidates for the
// hinge-active and flip-boundary regimes; the best point wins.
// Throws std::invalid_argument when some lower > upper.
Prescription prescribe(const LinearModel& model, std::span<const double> x,
                       const PrescriptionConfig& cfg, std::span<const double> lower,
                       std::span<const double> upper, const std::vector<bool>& controllable);

// One prescription per sample scoring >= tau, in patient order. JCC samples
// use the cluster attaining their max score. Patients are solved
// independently (and in parallel); the output does not depend on scheduling.
std::vector<Prescription> batch_prescribe(const LinearModel& model, const Dataset& data,
                                          const PrescriptionConfig& cfg, double tau);
std::vector<Prescription> batch_prescribe(const JccModel& model, const Dataset& data,
                                          const PrescriptionConfig& cfg, double tau);

enum class Sex { Female, Male };

// Bags of blood assumed already given, from the patient's raw pre-op HCT.
// Intervals close left: female [37,40) -> 1; male [41,44) -> 1; etc.
int baseline_bags(Sex sex, double hct_raw);

// Bags for a prescribed raw HCT increase: each bag adds ~3 points; rounded
// half away from zero and capped so baseline + bags <= 3.
int discretize_transfusion(double delta_hct_raw, int baseline);

// Returns x with the HCT feature increased by 3*bags raw points, re-scaled.
// Throws when scaling has no entry for the feature.
std::vector<double> apply_treatment(std::span<const double> x, std::size_t hct_feature, int bags,
                                    const ScalingParams& scaling);

// CSV export: patient_index,cluster,flipped,xi,change_cost then raw
// before/after per controllable feature. Values are unscaled when the
// dataset carries ScalingParams.
std::string prescriptions_to_csv(const std::vector<Prescription>& prescriptions,
                                 const Dataset& data);

// Copy of the dataset with prescribed rows replaced by their y vectors.
Dataset apply_prescriptions(const Dataset& data, const std::vector<Prescription>& prescriptions);

}  // namespace psvm
