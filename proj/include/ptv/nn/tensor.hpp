// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

namespace ptv::nn {

// Dense CHW tensor, double precision. One sample per tensor; batches are
// handled by the callers as loops with accumulated gradients.
struct Tensor {
    int c = 0, h = 0, w = 0;
    std::vector<double> data;  // (c*h + y)*w + x

    Tensor() = default;
    Tensor(int c_, int h_, int w_, double fill = 0.0)
        : c(c_), h(h_), w(w_), data(static_cast<std::size_t>(c_) * h_ * w_, fill) {}

    static Tensor zeros_like(const Tensor& t) { return Tensor(t.c, t.h, t.w, 0.0); }

    double& at(int ci, int y, int x) {
        return data[(static_cast<std::size_t>(ci) * h + y) * w + x];
    }
    double at(int ci, int y, int x) const {
        return data[(static_cast<std::size_t>(ci) * h + y) * w + x];
    }

    std::size_t size() const { return data.size(); }
    bool same_shape(const Tensor& o) const { return c == o.c && h == o.h && w == o.w; }
};

// Concatenate along the channel axis; all inputs must share h and w.
Tensor concat_channels(const std::vector<const Tensor*>& parts);

}  // namespace ptv::nn
