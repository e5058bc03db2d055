#pragma once

#include <cstdint>
#include <vector>

#include "psvm/core.hpp"

namespace psvm {

// Planted-cluster generator: negatives from one spherical Gaussian at the
// origin, positives from L spherical Gaussians whose means sit on distinct
// coordinate axes at distance separation*noise_sigma. Requires L <= D.
struct SynthSpec {
    int L = 2;
    int D = 2;
    int n_pos = 100;
    int n_neg = 100;
    double separation = 8.0;
    double noise_sigma = 1.0;
    std::uint64_t seed = 0;
};

struct SynthData {
    Dataset data;
    std::vector<int> planted;  // cluster of each positive, in row order of the positives
};

SynthData gen_jcc_data(const SynthSpec& spec);

// Uniform [0,1]^D features labeled by a known hyperplane, with one feature
// flagged controllable (bounds [0,1]) so prescriptions can provably flip
// outcomes. Scaling is the identity, making scaled and raw units coincide.
struct ControllableSpec {
    int D = 4;
    int n = 1000;
    std::vector<double> beta;  // planted hyperplane; size D
    double beta0 = 0.0;
    std::size_t controllable_index = 0;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

Dataset gen_controllable_data(const ControllableSpec& spec);

}  // namespace psvm
