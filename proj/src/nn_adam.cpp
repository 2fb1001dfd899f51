// SPDX-License-Identifier: Apache-2.0
#include "ptv/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace ptv::nn {

void AdamState::init(const ParamRefs& params) {
    t = 0;
    m.clear();
    v.clear();
    m.reserve(params.size());
    v.reserve(params.size());
    for (const Param* p : params) {
        m.emplace_back(p->value.size(), 0.0);
        v.emplace_back(p->value.size(), 0.0);
    }
}

bool AdamState::matches(const ParamRefs& params) const {
    if (m.size() != params.size() || v.size() != params.size()) return false;
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (m[i].size() != params[i]->value.size()) return false;
    }
    return true;
}

void adam_step(const ParamRefs& params, AdamState& state, const AdamConfig& cfg) {
    if (!state.matches(params)) throw std::invalid_argument("adam_step: state/parameter shape mismatch");
    state.t += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Param& p = *params[pi];
        std::vector<double>& m = state.m[pi];
        std::vector<double>& v = state.v[pi];
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            const double g = p.grad[i];
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p.value[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
}

}  // namespace ptv::nn
