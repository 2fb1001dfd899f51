// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ptv/nn/tensor.hpp"
#include "ptv/rng.hpp"

namespace ptv::nn {

// Learnable tensor with its gradient accumulator.
struct Param {
    std::string name;
    std::vector<double> value;
    std::vector<double> grad;

    Param(std::string name_, std::size_t n) : name(std::move(name_)), value(n, 0.0), grad(n, 0.0) {}
};

using ParamRefs = std::vector<Param*>;

void zero_grads(const ParamRefs& params);
std::size_t param_count(const ParamRefs& params);

// Single-slot layer: backward must follow the matching forward (activations
// from the last forward are what backward consumes).
struct Layer {
    virtual ~Layer() = default;
    virtual Tensor forward(const Tensor& x) = 0;
    virtual Tensor backward(const Tensor& dy) = 0;
    virtual void collect_params(ParamRefs& out) {}
};

struct Conv2d : Layer {
    int in_c, out_c, k, stride, pad;
    Param weight;  // out_c x (in_c*k*k), row-major
    Param bias;    // out_c

    Conv2d(const std::string& name, int in_c, int out_c, int k, int stride, int pad, Rng& rng);

    Tensor forward(const Tensor& x) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(ParamRefs& out) override;

private:
    Tensor input_;
    int oh_ = 0, ow_ = 0;
};

struct InstanceNorm : Layer {
    int channels;
    double eps = 1e-5;
    Param gamma, beta;

    explicit InstanceNorm(const std::string& name, int channels);

    Tensor forward(const Tensor& x) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(ParamRefs& out) override;

private:
    Tensor xhat_;
    std::vector<double> inv_std_;
};

struct ReLU : Layer {
    Tensor forward(const Tensor& x) override;
    Tensor backward(const Tensor& dy) override;

private:
    Tensor input_;
};

struct LeakyReLU : Layer {
    double slope;
    explicit LeakyReLU(double slope_ = 0.2) : slope(slope_) {}
    Tensor forward(const Tensor& x) override;
    Tensor backward(const Tensor& dy) override;

private:
    Tensor input_;
};

struct Tanh : Layer {
    Tensor forward(const Tensor& x) override;
    Tensor backward(const Tensor& dy) override;

private:
    Tensor output_;
};

struct Sigmoid : Layer {
    Tensor forward(const Tensor& x) override;
    Tensor backward(const Tensor& dy) override;

private:
    Tensor output_;
};

struct UpsampleNearest2x : Layer {
    Tensor forward(const Tensor& x) override;
    Tensor backward(const Tensor& dy) override;
};

// Ordered layer chain.
struct Sequential : Layer {
    std::vector<std::unique_ptr<Layer>> layers;

    Sequential() = default;
    template <typename L, typename... Args>
    L* emplace(Args&&... args) {
        auto layer = std::make_unique<L>(std::forward<Args>(args)...);
        L* raw = layer.get();
        layers.push_back(std::move(layer));
        return raw;
    }

    Tensor forward(const Tensor& x) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(ParamRefs& out) override;
};

}  // namespace ptv::nn
