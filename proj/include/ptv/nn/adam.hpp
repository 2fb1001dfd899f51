// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "ptv/nn/layers.hpp"

namespace ptv::nn {

struct AdamConfig {
    double lr = 0.002;
    double beta1 = 0.5;
    double beta2 = 0.9999;
    double eps = 1e-8;
};

// First/second moment buffers aligned with a fixed parameter list.
struct AdamState {
    std::int64_t t = 0;
    std::vector<std::vector<double>> m, v;

    void init(const ParamRefs& params);
    bool matches(const ParamRefs& params) const;
};

// One Adam update with bias correction. lr = 0 leaves parameter values
// bit-identical (moments still advance).
void adam_step(const ParamRefs& params, AdamState& state, const AdamConfig& cfg);

}  // namespace ptv::nn
