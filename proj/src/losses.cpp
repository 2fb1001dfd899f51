// SPDX-License-Identifier: Apache-2.0
#include "ptv/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "ptv/digest.hpp"
#include "ptv/patn.hpp"

namespace ptv::net {

void LossWeights::validate() const {
    if (alpha < 0.0) throw std::invalid_argument("loss weights: alpha must be non-negative");
    if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("loss weights: rho must lie in [0,1]");
    if (l1_weight < 0.0 || perceptual_weight < 0.0) {
        throw std::invalid_argument("loss weights: negative term weight");
    }
}

double clamp_prob(double p) {
    if (p < kProbEps) return kProbEps;
    if (p > 1.0 - kProbEps) return 1.0 - kProbEps;
    return p;
}

double gan_loss(double d_a_real, double d_s_real, double d_a_fake, double d_s_fake, double rho) {
    if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("gan_loss: rho must lie in [0,1]");
    const double ar = clamp_prob(d_a_real);
    const double sr = clamp_prob(d_s_real);
    const double af = clamp_prob(d_a_fake);
    const double sf = clamp_prob(d_s_fake);
    return rho * std::log(ar) + (1.0 - rho) * std::log(sr) + rho * std::log(1.0 - af) +
           (1.0 - rho) * std::log(1.0 - sf);
}

double generator_adversarial(double d_a_fake, double d_s_fake, double rho) {
    if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("generator_adversarial: rho must lie in [0,1]");
    const double af = clamp_prob(d_a_fake);
    const double sf = clamp_prob(d_s_fake);
    return -(rho * std::log(af) + (1.0 - rho) * std::log(sf));
}

namespace {
inline bool inside_clamp(double p) { return p > kProbEps && p < 1.0 - kProbEps; }
}  // namespace

GanLossGrads gan_loss_grads(double d_a_real, double d_s_real, double d_a_fake, double d_s_fake,
                            double rho) {
    GanLossGrads g;
    if (inside_clamp(d_a_real)) g.d_a_real = rho / d_a_real;
    if (inside_clamp(d_s_real)) g.d_s_real = (1.0 - rho) / d_s_real;
    if (inside_clamp(d_a_fake)) g.d_a_fake = -rho / (1.0 - d_a_fake);
    if (inside_clamp(d_s_fake)) g.d_s_fake = -(1.0 - rho) / (1.0 - d_s_fake);
    return g;
}

AdvGrads generator_adversarial_grads(double d_a_fake, double d_s_fake, double rho) {
    AdvGrads g;
    if (inside_clamp(d_a_fake)) g.d_a_fake = -rho / d_a_fake;
    if (inside_clamp(d_s_fake)) g.d_s_fake = -(1.0 - rho) / d_s_fake;
    return g;
}

// ---- FeatureProbe -------------------------------------------------------

FeatureProbe::FeatureProbe(int in_channels, std::uint64_t seed) : id_("conv-probe-v1") {
    Rng rng(seed);
    net_.emplace<nn::Conv2d>("probe.conv1", in_channels, 8, 3, 2, 1, rng);
    net_.emplace<nn::Tanh>();
    net_.emplace<nn::Conv2d>("probe.conv2", 8, 16, 3, 2, 1, rng);
    net_.emplace<nn::Tanh>();
}

nn::Tensor FeatureProbe::features(const nn::Tensor& img01) {
    return net_.forward(img01);
}

nn::Tensor FeatureProbe::input_grad(const nn::Tensor& d_features) {
    return net_.backward(d_features);
}

std::string FeatureProbe::params_digest() const {
    nn::ParamRefs refs;
    const_cast<nn::Sequential&>(net_).collect_params(refs);
    std::string bytes;
    for (const nn::Param* p : refs) {
        bytes.append(reinterpret_cast<const char*>(p->value.data()), p->value.size() * sizeof(double));
    }
    return sha256_hex(bytes);
}

// ---- combined L1 --------------------------------------------------------

double combined_l1_loss(const nn::Tensor& generated, const nn::Tensor& target,
                        const LossWeights& w, FeatureProbe* probe) {
    if (!generated.same_shape(target)) throw std::invalid_argument("combined_l1_loss: dimension mismatch");
    double pixel = 0.0;
    for (std::size_t i = 0; i < generated.data.size(); ++i) {
        pixel += std::abs(generated.data[i] - target.data[i]);
    }
    pixel /= static_cast<double>(generated.data.size());
    double loss = w.l1_weight * pixel;
    if (w.perceptual_weight > 0.0) {
        if (probe == nullptr) throw std::invalid_argument("combined_l1_loss: perceptual term needs a probe");
        const nn::Tensor fg = probe->features(generated);
        const nn::Tensor ft = probe->features(target);
        double feat = 0.0;
        for (std::size_t i = 0; i < fg.data.size(); ++i) feat += std::abs(fg.data[i] - ft.data[i]);
        feat /= static_cast<double>(fg.data.size());
        loss += w.perceptual_weight * feat;
    }
    return loss;
}

double combined_l1_loss(const Image& generated, const Image& target, const LossWeights& w,
                        FeatureProbe* probe) {
    return combined_l1_loss(image_to_tensor(generated), image_to_tensor(target), w, probe);
}

double combined_l1_with_grad(const nn::Tensor& generated, const nn::Tensor& target,
                             const LossWeights& w, FeatureProbe* probe, nn::Tensor& d_generated) {
    if (!generated.same_shape(target)) throw std::invalid_argument("combined_l1_with_grad: dimension mismatch");
    const double n = static_cast<double>(generated.data.size());
    d_generated = nn::Tensor::zeros_like(generated);
    double pixel = 0.0;
    for (std::size_t i = 0; i < generated.data.size(); ++i) {
        const double d = generated.data[i] - target.data[i];
        pixel += std::abs(d);
        d_generated.data[i] = w.l1_weight * (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) / n;
    }
    double loss = w.l1_weight * pixel / n;
    if (w.perceptual_weight > 0.0) {
        if (probe == nullptr) throw std::invalid_argument("combined_l1_with_grad: perceptual term needs a probe");
        // Target features first; the probe caches the most recent forward,
        // which must be the generated branch for input_grad.
        const nn::Tensor ft = probe->features(target);
        const nn::Tensor fg = probe->features(generated);
        const double m = static_cast<double>(fg.data.size());
        nn::Tensor d_feat = nn::Tensor::zeros_like(fg);
        double feat = 0.0;
        for (std::size_t i = 0; i < fg.data.size(); ++i) {
            const double d = fg.data[i] - ft.data[i];
            feat += std::abs(d);
            d_feat.data[i] = w.perceptual_weight * (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) / m;
        }
        loss += w.perceptual_weight * feat / m;
        const nn::Tensor d_in = probe->input_grad(d_feat);
        for (std::size_t i = 0; i < d_generated.data.size(); ++i) d_generated.data[i] += d_in.data[i];
    }
    return loss;
}

ObjectiveValue total_objective(const std::vector<SampleForLoss>& batch, const LossWeights& w,
                               FeatureProbe* probe) {
    if (batch.empty()) throw std::invalid_argument("total_objective: empty batch");
    w.validate();
    ObjectiveValue out;
    double gan_acc = 0.0;
    for (const SampleForLoss& s : batch) {
        out.adv_component += generator_adversarial(s.d_a_fake, s.d_s_fake, w.rho);
        gan_acc += gan_loss(s.d_a_real, s.d_s_real, s.d_a_fake, s.d_s_fake, w.rho);
        if (s.generated == nullptr || s.target == nullptr) {
            throw std::invalid_argument("total_objective: sample missing image tensors");
        }
        out.l1_component += combined_l1_loss(*s.generated, *s.target, w, probe);
    }
    const double b = static_cast<double>(batch.size());
    out.adv_component /= b;
    out.l1_component /= b;
    out.generator_loss = w.alpha * out.adv_component + out.l1_component;
    out.discriminator_loss = -gan_acc / b;
    if (!std::isfinite(out.generator_loss) || !std::isfinite(out.discriminator_loss)) {
        throw std::runtime_error("total_objective: non-finite loss (gen=" +
                                 std::to_string(out.generator_loss) +
                                 ", disc=" + std::to_string(out.discriminator_loss) + ")");
    }
    return out;
}

}  // namespace ptv::net
