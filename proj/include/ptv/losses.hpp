// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ptv/image.hpp"
#include "ptv/nn/layers.hpp"

namespace ptv::net {

struct LossWeights {
    double alpha = 0.5;             // GAN weight
    double rho = 0.5;               // appearance/shape discriminator balance
    double l1_weight = 1.0;
    double perceptual_weight = 0.0;

    void validate() const;  // alpha >= 0, rho in [0,1]
};

// Probabilities are clamped to [eps, 1-eps] before any log.
inline constexpr double kProbEps = 1e-7;
double clamp_prob(double p);

// rho-weighted two-discriminator GAN value (the quantity the discriminators
// ascend): rho*log D_A(real) + (1-rho)*log D_S(real)
//        + rho*log(1-D_A(fake)) + (1-rho)*log(1-D_S(fake)).
double gan_loss(double d_a_real, double d_s_real, double d_a_fake, double d_s_fake, double rho);

// Non-saturating generator adversarial term: -(rho*log D_A(fake) + (1-rho)*log D_S(fake)).
double generator_adversarial(double d_a_fake, double d_s_fake, double rho);

// Exact derivatives of the losses above w.r.t. the raw probabilities
// (zero where clamping is active, matching finite differences).
struct GanLossGrads {
    double d_a_real = 0.0, d_s_real = 0.0, d_a_fake = 0.0, d_s_fake = 0.0;
};
GanLossGrads gan_loss_grads(double d_a_real, double d_s_real, double d_a_fake, double d_s_fake,
                            double rho);

struct AdvGrads {
    double d_a_fake = 0.0, d_s_fake = 0.0;
};
AdvGrads generator_adversarial_grads(double d_a_fake, double d_s_fake, double rho);

// Fixed, seeded convolutional feature extractor backing the perceptual
// terms. Parameters are frozen; gradients flow to inputs only.
class FeatureProbe {
public:
    explicit FeatureProbe(int in_channels = 3, std::uint64_t seed = 0x70726f6265ULL);

    nn::Tensor features(const nn::Tensor& img01);
    // d(input) for the most recent features() call.
    nn::Tensor input_grad(const nn::Tensor& d_features);

    const std::string& id() const { return id_; }
    std::string params_digest() const;

private:
    std::string id_;
    nn::Sequential net_;
};

// l1_weight * mean|g - t| + perceptual_weight * mean|probe(g) - probe(t)|.
// probe may be null when perceptual_weight is 0.
double combined_l1_loss(const nn::Tensor& generated, const nn::Tensor& target,
                        const LossWeights& w, FeatureProbe* probe = nullptr);
double combined_l1_loss(const Image& generated, const Image& target, const LossWeights& w,
                        FeatureProbe* probe = nullptr);
// Same value, also producing d(loss)/d(generated).
double combined_l1_with_grad(const nn::Tensor& generated, const nn::Tensor& target,
                             const LossWeights& w, FeatureProbe* probe, nn::Tensor& d_generated);

// Per-sample network outputs feeding the full objective.
struct SampleForLoss {
    double d_a_real = 0.5, d_s_real = 0.5, d_a_fake = 0.5, d_s_fake = 0.5;
    const nn::Tensor* generated = nullptr;
    const nn::Tensor* target = nullptr;
};

struct ObjectiveValue {
    double generator_loss = 0.0;      // alpha*adv + combined L1
    double discriminator_loss = 0.0;  // -gan_loss
    double adv_component = 0.0;
    double l1_component = 0.0;
};

// Batch means of the adversarial and reconstruction terms. Throws
// std::runtime_error with a diagnostic when any component is non-finite.
ObjectiveValue total_objective(const std::vector<SampleForLoss>& batch, const LossWeights& w,
                               FeatureProbe* probe = nullptr);

}  // namespace ptv::net
