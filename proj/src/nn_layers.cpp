// SPDX-License-Identifier: Apache-2.0
#include "ptv/nn/layers.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace ptv::nn {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRow = Eigen::Map<RowMat>;
using MapRowC = Eigen::Map<const RowMat>;

Tensor concat_channels(const std::vector<const Tensor*>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_channels: no inputs");
    const int h = parts[0]->h, w = parts[0]->w;
    int c = 0;
    for (const Tensor* t : parts) {
        if (t->h != h || t->w != w) throw std::invalid_argument("concat_channels: spatial shape mismatch");
        c += t->c;
    }
    Tensor out(c, h, w);
    std::size_t off = 0;
    for (const Tensor* t : parts) {
        std::copy(t->data.begin(), t->data.end(), out.data.begin() + off);
        off += t->data.size();
    }
    return out;
}

void zero_grads(const ParamRefs& params) {
    for (Param* p : params) std::fill(p->grad.begin(), p->grad.end(), 0.0);
}

std::size_t param_count(const ParamRefs& params) {
    std::size_t n = 0;
    for (const Param* p : params) n += p->value.size();
    return n;
}

// ---- Conv2d -----------------------------------------------------------------

namespace {

void im2col(const Tensor& x, int k, int stride, int pad, int oh, int ow, Eigen::MatrixXd& cols) {
    const int rows = x.c * k * k;
    cols.resize(rows, static_cast<Eigen::Index>(oh) * ow);
    for (int ci = 0; ci < x.c; ++ci) {
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                const int r = (ci * k + ky) * k + kx;
                for (int oy = 0; oy < oh; ++oy) {
                    const int iy = oy * stride + ky - pad;
                    for (int ox = 0; ox < ow; ++ox) {
                        const int ix = ox * stride + kx - pad;
                        double v = 0.0;
                        if (iy >= 0 && iy < x.h && ix >= 0 && ix < x.w) v = x.at(ci, iy, ix);
                        cols(r, static_cast<Eigen::Index>(oy) * ow + ox) = v;
                    }
                }
            }
        }
    }
}

void col2im(const Eigen::MatrixXd& cols, int k, int stride, int pad, int oh, int ow, Tensor& dx) {
    for (int ci = 0; ci < dx.c; ++ci) {
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                const int r = (ci * k + ky) * k + kx;
                for (int oy = 0; oy < oh; ++oy) {
                    const int iy = oy * stride + ky - pad;
                    if (iy < 0 || iy >= dx.h) continue;
                    for (int ox = 0; ox < ow; ++ox) {
                        const int ix = ox * stride + kx - pad;
                        if (ix < 0 || ix >= dx.w) continue;
                        dx.at(ci, iy, ix) += cols(r, static_cast<Eigen::Index>(oy) * ow + ox);
                    }
                }
            }
        }
    }
}

}  // namespace

Conv2d::Conv2d(const std::string& name, int in_c_, int out_c_, int k_, int stride_, int pad_, Rng& rng)
    : in_c(in_c_),
      out_c(out_c_),
      k(k_),
      stride(stride_),
      pad(pad_),
      weight(name + ".weight", static_cast<std::size_t>(out_c_) * in_c_ * k_ * k_),
      bias(name + ".bias", static_cast<std::size_t>(out_c_)) {
    for (double& v : weight.value) v = rng.normal(0.0, 0.02);
}

Tensor Conv2d::forward(const Tensor& x) {
    if (x.c != in_c) throw std::invalid_argument("Conv2d: input channel mismatch for " + weight.name);
    input_ = x;
    oh_ = (x.h + 2 * pad - k) / stride + 1;
    ow_ = (x.w + 2 * pad - k) / stride + 1;
    Eigen::MatrixXd cols;
    im2col(x, k, stride, pad, oh_, ow_, cols);

    Tensor out(out_c, oh_, ow_);
    MapRow y(out.data.data(), out_c, static_cast<Eigen::Index>(oh_) * ow_);
    MapRowC w(weight.value.data(), out_c, static_cast<Eigen::Index>(in_c) * k * k);
    y.noalias() = w * cols;
    for (int oc = 0; oc < out_c; ++oc) y.row(oc).array() += bias.value[oc];
    return out;
}

Tensor Conv2d::backward(const Tensor& dy) {
    const Eigen::Index ohw = static_cast<Eigen::Index>(oh_) * ow_;
    MapRowC g(dy.data.data(), out_c, ohw);
    MapRowC w(weight.value.data(), out_c, static_cast<Eigen::Index>(in_c) * k * k);
    MapRow dw(weight.grad.data(), out_c, static_cast<Eigen::Index>(in_c) * k * k);

    // im2col is recomputed from the cached input rather than stored; the
    // cols matrix is the dominant memory cost otherwise.
    Eigen::MatrixXd cols;
    im2col(input_, k, stride, pad, oh_, ow_, cols);

    dw.noalias() += g * cols.transpose();
    for (int oc = 0; oc < out_c; ++oc) bias.grad[oc] += g.row(oc).sum();

    Eigen::MatrixXd dcols = w.transpose() * g;
    Tensor dx = Tensor::zeros_like(input_);
    col2im(dcols, k, stride, pad, oh_, ow_, dx);
    return dx;
}

void Conv2d::collect_params(ParamRefs& out) {
    out.push_back(&weight);
    out.push_back(&bias);
}

// ---- InstanceNorm -----------------------------------------------------------

InstanceNorm::InstanceNorm(const std::string& name, int channels_)
    : channels(channels_), gamma(name + ".gamma", channels_), beta(name + ".beta", channels_) {
    std::fill(gamma.value.begin(), gamma.value.end(), 1.0);
}

Tensor InstanceNorm::forward(const Tensor& x) {
    if (x.c != channels) throw std::invalid_argument("InstanceNorm: channel mismatch for " + gamma.name);
    const int n = x.h * x.w;
    xhat_ = Tensor(x.c, x.h, x.w);
    inv_std_.assign(channels, 0.0);
    Tensor out(x.c, x.h, x.w);
    for (int ci = 0; ci < channels; ++ci) {
        const double* xp = &x.data[static_cast<std::size_t>(ci) * n];
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += xp[i];
        mean /= n;
        double var = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = xp[i] - mean;
            var += d * d;
        }
        var /= n;
        const double inv = 1.0 / std::sqrt(var + eps);
        inv_std_[ci] = inv;
        double* xh = &xhat_.data[static_cast<std::size_t>(ci) * n];
        double* op = &out.data[static_cast<std::size_t>(ci) * n];
        for (int i = 0; i < n; ++i) {
            xh[i] = (xp[i] - mean) * inv;
            op[i] = gamma.value[ci] * xh[i] + beta.value[ci];
        }
    }
    return out;
}

Tensor InstanceNorm::backward(const Tensor& dy) {
    const int n = dy.h * dy.w;
    Tensor dx(dy.c, dy.h, dy.w);
    for (int ci = 0; ci < channels; ++ci) {
        const double* g = &dy.data[static_cast<std::size_t>(ci) * n];
        const double* xh = &xhat_.data[static_cast<std::size_t>(ci) * n];
        double sum_g = 0.0, sum_gx = 0.0;
        for (int i = 0; i < n; ++i) {
            sum_g += g[i];
            sum_gx += g[i] * xh[i];
        }
        gamma.grad[ci] += sum_gx;
        beta.grad[ci] += sum_g;
        const double scale = gamma.value[ci] * inv_std_[ci];
        double* dxp = &dx.data[static_cast<std::size_t>(ci) * n];
        for (int i = 0; i < n; ++i) {
            dxp[i] = scale * (g[i] - sum_g / n - xh[i] * sum_gx / n);
        }
    }
    return dx;
}

void InstanceNorm::collect_params(ParamRefs& out) {
    out.push_back(&gamma);
    out.push_back(&beta);
}

// ---- activations ------------------------------------------------------------

Tensor ReLU::forward(const Tensor& x) {
    input_ = x;
    Tensor out = x;
    for (double& v : out.data) v = v > 0.0 ? v : 0.0;
    return out;
}

Tensor ReLU::backward(const Tensor& dy) {
    Tensor dx = dy;
    for (std::size_t i = 0; i < dx.data.size(); ++i) {
        if (input_.data[i] <= 0.0) dx.data[i] = 0.0;
    }
    return dx;
}

Tensor LeakyReLU::forward(const Tensor& x) {
    input_ = x;
    Tensor out = x;
    for (double& v : out.data) v = v > 0.0 ? v : slope * v;
    return out;
}

Tensor LeakyReLU::backward(const Tensor& dy) {
    Tensor dx = dy;
    for (std::size_t i = 0; i < dx.data.size(); ++i) {
        if (input_.data[i] <= 0.0) dx.data[i] *= slope;
    }
    return dx;
}

Tensor Tanh::forward(const Tensor& x) {
    Tensor out = x;
    for (double& v : out.data) v = std::tanh(v);
    output_ = out;
    return out;
}

Tensor Tanh::backward(const Tensor& dy) {
    Tensor dx = dy;
    for (std::size_t i = 0; i < dx.data.size(); ++i) {
        dx.data[i] *= 1.0 - output_.data[i] * output_.data[i];
    }
    return dx;
}

Tensor Sigmoid::forward(const Tensor& x) {
    Tensor out = x;
    for (double& v : out.data) v = 1.0 / (1.0 + std::exp(-v));
    output_ = out;
    return out;
}

Tensor Sigmoid::backward(const Tensor& dy) {
    Tensor dx = dy;
    for (std::size_t i = 0; i < dx.data.size(); ++i) {
        const double s = output_.data[i];
        dx.data[i] *= s * (1.0 - s);
    }
    return dx;
}

Tensor UpsampleNearest2x::forward(const Tensor& x) {
    Tensor out(x.c, x.h * 2, x.w * 2);
    for (int ci = 0; ci < x.c; ++ci) {
        for (int y = 0; y < out.h; ++y) {
            for (int xx = 0; xx < out.w; ++xx) {
                out.at(ci, y, xx) = x.at(ci, y / 2, xx / 2);
            }
        }
    }
    return out;
}

Tensor UpsampleNearest2x::backward(const Tensor& dy) {
    Tensor dx(dy.c, dy.h / 2, dy.w / 2);
    for (int ci = 0; ci < dy.c; ++ci) {
        for (int y = 0; y < dy.h; ++y) {
            for (int xx = 0; xx < dy.w; ++xx) {
                dx.at(ci, y / 2, xx / 2) += dy.at(ci, y, xx);
            }
        }
    }
    return dx;
}

// ---- Sequential ---------------------------------------------------------

Tensor Sequential::forward(const Tensor& x) {
    Tensor t = x;
    for (auto& layer : layers) t = layer->forward(t);
    return t;
}

Tensor Sequential::backward(const Tensor& dy) {
    Tensor g = dy;
    for (auto it = layers.rbegin(); it != layers.rend(); ++it) g = (*it)->backward(g);
    return g;
}

void Sequential::collect_params(ParamRefs& out) {
    for (auto& layer : layers) layer->collect_params(out);
}

}  // namespace ptv::nn
