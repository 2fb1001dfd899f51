// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ptv/image.hpp"
#include "ptv/nn/layers.hpp"
#include "ptv/pose.hpp"

namespace ptv::net {

// Architecture knobs. The topology is fixed (stem + two downsampling stages,
// attention blocks, two upsampling stages); width and block count scale.
struct PatnScale {
    int base = 16;          // stem width; blocks run at base*4
    int blocks = 9;
    int img_channels = 3;
    int pose_channels = 36;  // source + target heatmap stacks

    bool operator==(const PatnScale&) const = default;
};

// One pose-attentional transfer block. The pose pathway evolves residually;
// the image pathway is updated under a sigmoid attention mask derived from
// the pose pathway.
struct PatbBlock {
    nn::Sequential img_block, pose_block, attn;

    PatbBlock(const std::string& name, int channels, Rng& rng);

    // Returns (image features, pose features); shapes preserved.
    std::pair<nn::Tensor, nn::Tensor> forward(const nn::Tensor& img_f, const nn::Tensor& pose_f);
    // d(inputs) from d(outputs); call right after the matching forward.
    std::pair<nn::Tensor, nn::Tensor> backward(const nn::Tensor& d_img_out, const nn::Tensor& d_pose_out);
    void collect_params(nn::ParamRefs& out);

private:
    nn::Tensor img_in_, img_conv_, mask_;
};

// Pose-attentional transfer generator: dual-pathway encoder, a chain of
// attention blocks, image-pathway decoder. Inputs and outputs are [0,1]
// image tensors; internal range mapping is handled here.
class PatnGenerator {
public:
    PatnGenerator(const PatnScale& scale, Rng& rng);

    // img: [0,1] tensor (img_channels, H, W), H and W divisible by 4;
    // pose: (pose_channels, H, W). Output in [0,1], same spatial shape.
    nn::Tensor forward(const nn::Tensor& img, const nn::Tensor& pose);
    // Backprop from d(output image); accumulates parameter gradients.
    void backward(const nn::Tensor& d_out);

    nn::ParamRefs params();
    const PatnScale& scale() const { return scale_; }

private:
    PatnScale scale_;
    nn::Sequential img_enc_, pose_enc_, dec_;
    std::vector<std::unique_ptr<PatbBlock>> blocks_;
};

// Conv-stack discriminator ending in a 1-channel map, mean-pooled through a
// terminal sigmoid. No normalization at the final stage.
class Discriminator {
public:
    Discriminator(const std::string& name, int in_channels, int base, Rng& rng);

    // Probability strictly inside (0,1).
    double forward(const nn::Tensor& x);
    // d(input) from d(probability); call right after the matching forward.
    nn::Tensor backward(double d_prob);

    nn::ParamRefs params();
    int in_channels() const { return in_channels_; }

private:
    int in_channels_;
    nn::Sequential body_;
    nn::Tensor map_;
    double prob_ = 0.5;
};

enum class DiscKind { appearance, shape };

// The two conditional discriminators of the GAN objective: appearance
// conditions on the source image, shape on the target pose heatmaps.
struct DualDiscriminators {
    Discriminator appearance;  // concat(source image, candidate) -> 6 ch
    Discriminator shape;       // concat(target heatmaps, candidate) -> 21 ch

    DualDiscriminators(int base, int pose_channels, Rng& rng);
};

// ---- tensor/image bridging --------------------------------------------------

nn::Tensor image_to_tensor(const Image& img);
Image tensor_to_image(const nn::Tensor& t);
nn::Tensor heatmaps_to_tensor(const pose::HeatmapStack& stack);

// Discriminator input assembly. Images are remapped to [-1,1]; heatmaps pass
// through. The candidate occupies the last 3 channels.
nn::Tensor make_appearance_input(const nn::Tensor& source_img01, const nn::Tensor& candidate01);
nn::Tensor make_shape_input(const nn::Tensor& target_heatmaps, const nn::Tensor& candidate01);
// Gradient w.r.t. the [0,1] candidate from a discriminator-input gradient.
nn::Tensor candidate_grad_from_input(const nn::Tensor& d_input);

// Frame-level wrapper enforcing the 256x192 contract.
Image generator_forward(PatnGenerator& gen, const Image& source_image,
                        const pose::HeatmapStack& source_pose,
                        const pose::HeatmapStack& target_pose);

// Frame-level discriminator application per the objective's conditioning.
double discriminator_forward(DualDiscriminators& d, DiscKind which, const Image& source_image,
                             const pose::HeatmapStack& target_pose, const Image& candidate);

}  // namespace ptv::net
