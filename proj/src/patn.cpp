// SPDX-License-Identifier: Apache-2.0
#include "ptv/patn.hpp"

#include <cmath>
#include <stdexcept>

namespace ptv::net {

using nn::Conv2d;
using nn::InstanceNorm;
using nn::LeakyReLU;
using nn::ReLU;
using nn::Sequential;
using nn::Sigmoid;
using nn::Tensor;
using nn::UpsampleNearest2x;

// ---- PatbBlock ----------------------------------------------------------

PatbBlock::PatbBlock(const std::string& name, int channels, Rng& rng) {
    img_block.emplace<Conv2d>(name + ".img.conv1", channels, channels, 3, 1, 1, rng);
    img_block.emplace<InstanceNorm>(name + ".img.norm1", channels);
    img_block.emplace<ReLU>();
    img_block.emplace<Conv2d>(name + ".img.conv2", channels, channels, 3, 1, 1, rng);
    img_block.emplace<InstanceNorm>(name + ".img.norm2", channels);

    pose_block.emplace<Conv2d>(name + ".pose.conv1", channels, channels, 3, 1, 1, rng);
    pose_block.emplace<InstanceNorm>(name + ".pose.norm1", channels);
    pose_block.emplace<ReLU>();
    pose_block.emplace<Conv2d>(name + ".pose.conv2", channels, channels, 3, 1, 1, rng);
    pose_block.emplace<InstanceNorm>(name + ".pose.norm2", channels);

    attn.emplace<Conv2d>(name + ".attn.proj", channels, channels, 3, 1, 1, rng);
    attn.emplace<Sigmoid>();
}

std::pair<Tensor, Tensor> PatbBlock::forward(const Tensor& img_f, const Tensor& pose_f) {
    if (!img_f.same_shape(pose_f)) {
        throw std::invalid_argument("PatbBlock: image/pose feature shapes misaligned");
    }
    img_in_ = img_f;
    Tensor pose_res = pose_block.forward(pose_f);
    Tensor pose_out = pose_f;
    for (std::size_t i = 0; i < pose_out.data.size(); ++i) pose_out.data[i] += pose_res.data[i];

    mask_ = attn.forward(pose_out);
    img_conv_ = img_block.forward(img_f);

    Tensor img_out = img_f;
    for (std::size_t i = 0; i < img_out.data.size(); ++i) {
        img_out.data[i] += mask_.data[i] * img_conv_.data[i];
    }
    return {std::move(img_out), std::move(pose_out)};
}

std::pair<Tensor, Tensor> PatbBlock::backward(const Tensor& d_img_out, const Tensor& d_pose_out) {
    Tensor d_conv = d_img_out;
    Tensor d_mask = d_img_out;
    for (std::size_t i = 0; i < d_conv.data.size(); ++i) {
        d_conv.data[i] *= mask_.data[i];
        d_mask.data[i] *= img_conv_.data[i];
    }

    Tensor d_pose_total = d_pose_out;
    {
        Tensor from_attn = attn.backward(d_mask);
        for (std::size_t i = 0; i < d_pose_total.data.size(); ++i) d_pose_total.data[i] += from_attn.data[i];
    }

    Tensor d_img_in = img_block.backward(d_conv);
    for (std::size_t i = 0; i < d_img_in.data.size(); ++i) d_img_in.data[i] += d_img_out.data[i];

    Tensor d_pose_in = pose_block.backward(d_pose_total);
    for (std::size_t i = 0; i < d_pose_in.data.size(); ++i) d_pose_in.data[i] += d_pose_total.data[i];

    return {std::move(d_img_in), std::move(d_pose_in)};
}

void PatbBlock::collect_params(nn::ParamRefs& out) {
    img_block.collect_params(out);
    pose_block.collect_params(out);
    attn.collect_params(out);
}

// ---- PatnGenerator --------------------------------------------------------

namespace {

void build_encoder(Sequential& enc, const std::string& name, int in_c, int base, Rng& rng) {
    enc.emplace<Conv2d>(name + ".stem", in_c, base, 3, 1, 1, rng);
    enc.emplace<InstanceNorm>(name + ".stem_norm", base);
    enc.emplace<ReLU>();
    enc.emplace<Conv2d>(name + ".down1", base, base * 2, 3, 2, 1, rng);
    enc.emplace<InstanceNorm>(name + ".down1_norm", base * 2);
    enc.emplace<ReLU>();
    enc.emplace<Conv2d>(name + ".down2", base * 2, base * 4, 3, 2, 1, rng);
    enc.emplace<InstanceNorm>(name + ".down2_norm", base * 4);
    enc.emplace<ReLU>();
}

}  // namespace

PatnGenerator::PatnGenerator(const PatnScale& scale, Rng& rng) : scale_(scale) {
    if (scale.base < 1 || scale.blocks < 1) throw std::invalid_argument("PatnGenerator: invalid scale");
    build_encoder(img_enc_, "g.img_enc", scale.img_channels, scale.base, rng);
    build_encoder(pose_enc_, "g.pose_enc", scale.pose_channels, scale.base, rng);
    const int bc = scale.base * 4;
    for (int i = 0; i < scale.blocks; ++i) {
        blocks_.push_back(std::make_unique<PatbBlock>("g.patb" + std::to_string(i), bc, rng));
    }
    dec_.emplace<UpsampleNearest2x>();
    dec_.emplace<Conv2d>("g.dec.up1", bc, scale.base * 2, 3, 1, 1, rng);
    dec_.emplace<InstanceNorm>("g.dec.up1_norm", scale.base * 2);
    dec_.emplace<ReLU>();
    dec_.emplace<UpsampleNearest2x>();
    dec_.emplace<Conv2d>("g.dec.up2", scale.base * 2, scale.base, 3, 1, 1, rng);
    dec_.emplace<InstanceNorm>("g.dec.up2_norm", scale.base);
    dec_.emplace<ReLU>();
    dec_.emplace<Conv2d>("g.dec.out", scale.base, scale.img_channels, 3, 1, 1, rng);
    dec_.emplace<nn::Tanh>();
}

Tensor PatnGenerator::forward(const Tensor& img, const Tensor& pose) {
    if (img.c != scale_.img_channels || pose.c != scale_.pose_channels) {
        throw std::invalid_argument("PatnGenerator: channel mismatch");
    }
    if (img.h != pose.h || img.w != pose.w || img.h % 4 != 0 || img.w % 4 != 0) {
        throw std::invalid_argument("PatnGenerator: spatial shape mismatch (H and W must match and divide by 4)");
    }
    Tensor img_in = img;
    for (double& v : img_in.data) v = 2.0 * v - 1.0;

    Tensor f = img_enc_.forward(img_in);
    Tensor p = pose_enc_.forward(pose);
    for (auto& block : blocks_) {
        auto [nf, np] = block->forward(f, p);
        f = std::move(nf);
        p = std::move(np);
    }
    Tensor out = dec_.forward(f);
    for (double& v : out.data) v = (v + 1.0) * 0.5;
    return out;
}

void PatnGenerator::backward(const Tensor& d_out) {
    Tensor g = d_out;
    for (double& v : g.data) v *= 0.5;  // d(out01)/d(tanh)
    Tensor gf = dec_.backward(g);
    Tensor gp(gf.c, gf.h, gf.w, 0.0);  // pose pathway ends at the last block
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) {
        auto [nf, np] = (*it)->backward(gf, gp);
        gf = std::move(nf);
        gp = std::move(np);
    }
    img_enc_.backward(gf);
    pose_enc_.backward(gp);
}

nn::ParamRefs PatnGenerator::params() {
    nn::ParamRefs out;
    img_enc_.collect_params(out);
    pose_enc_.collect_params(out);
    for (auto& b : blocks_) b->collect_params(out);
    dec_.collect_params(out);
    return out;
}

// ---- Discriminator ----------------------------------------------------------

Discriminator::Discriminator(const std::string& name, int in_channels, int base, Rng& rng)
    : in_channels_(in_channels) {
    body_.emplace<Conv2d>(name + ".conv1", in_channels, base, 3, 2, 1, rng);
    body_.emplace<LeakyReLU>(0.2);
    body_.emplace<Conv2d>(name + ".conv2", base, base * 2, 3, 2, 1, rng);
    body_.emplace<InstanceNorm>(name + ".norm2", base * 2);
    body_.emplace<LeakyReLU>(0.2);
    body_.emplace<Conv2d>(name + ".conv3", base * 2, base * 4, 3, 2, 1, rng);
    body_.emplace<InstanceNorm>(name + ".norm3", base * 4);
    body_.emplace<LeakyReLU>(0.2);
    body_.emplace<Conv2d>(name + ".out", base * 4, 1, 3, 1, 1, rng);
}

double Discriminator::forward(const Tensor& x) {
    if (x.c != in_channels_) throw std::invalid_argument("Discriminator: conditioning channel mismatch");
    map_ = body_.forward(x);
    double mean = 0.0;
    for (double v : map_.data) mean += v;
    mean /= static_cast<double>(map_.data.size());
    prob_ = 1.0 / (1.0 + std::exp(-mean));
    return prob_;
}

Tensor Discriminator::backward(double d_prob) {
    const double d_logit = d_prob * prob_ * (1.0 - prob_);
    Tensor d_map(map_.c, map_.h, map_.w, d_logit / static_cast<double>(map_.data.size()));
    return body_.backward(d_map);
}

nn::ParamRefs Discriminator::params() {
    nn::ParamRefs out;
    body_.collect_params(out);
    return out;
}

DualDiscriminators::DualDiscriminators(int base, int pose_channels, Rng& rng)
    : appearance("d_app", 6, base, rng), shape("d_shape", pose_channels / 2 + 3, base, rng) {}

// ---- bridging -----------------------------------------------------------

nn::Tensor image_to_tensor(const Image& img) {
    Tensor t(3, img.h, img.w);
    t.data = img.data;
    return t;
}

Image tensor_to_image(const nn::Tensor& t) {
    if (t.c != 3) throw std::invalid_argument("tensor_to_image: expected 3 channels");
    Image img(t.h, t.w);
    img.data = t.data;
    img.clamp01();
    return img;
}

nn::Tensor heatmaps_to_tensor(const pose::HeatmapStack& stack) {
    if (stack.channels.empty()) throw std::invalid_argument("heatmaps_to_tensor: empty stack");
    const int h = stack.channels[0].h, w = stack.channels[0].w;
    Tensor t(static_cast<int>(stack.channels.size()), h, w);
    std::size_t off = 0;
    for (const GrayF& ch : stack.channels) {
        std::copy(ch.data.begin(), ch.data.end(), t.data.begin() + off);
        off += ch.data.size();
    }
    return t;
}

nn::Tensor make_appearance_input(const Tensor& source_img01, const Tensor& candidate01) {
    Tensor src = source_img01;
    for (double& v : src.data) v = 2.0 * v - 1.0;
    Tensor cand = candidate01;
    for (double& v : cand.data) v = 2.0 * v - 1.0;
    return nn::concat_channels({&src, &cand});
}

nn::Tensor make_shape_input(const Tensor& target_heatmaps, const Tensor& candidate01) {
    Tensor cand = candidate01;
    for (double& v : cand.data) v = 2.0 * v - 1.0;
    return nn::concat_channels({&target_heatmaps, &cand});
}

nn::Tensor candidate_grad_from_input(const Tensor& d_input) {
    if (d_input.c < 3) throw std::invalid_argument("candidate_grad_from_input: too few channels");
    Tensor out(3, d_input.h, d_input.w);
    const std::size_t plane = static_cast<std::size_t>(d_input.h) * d_input.w;
    const std::size_t off = (static_cast<std::size_t>(d_input.c) - 3) * plane;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = 2.0 * d_input.data[off + i];  // chain through 2x-1
    }
    return out;
}

Image generator_forward(PatnGenerator& gen, const Image& source_image,
                        const pose::HeatmapStack& source_pose,
                        const pose::HeatmapStack& target_pose) {
    if (!source_image.is_frame()) throw std::invalid_argument("generator_forward: source image must be 256x192");
    if (source_pose.channels.size() != pose::kNumJoints ||
        target_pose.channels.size() != pose::kNumJoints) {
        throw std::invalid_argument("generator_forward: heatmap stacks must have 18 channels");
    }
    Tensor src_hm = heatmaps_to_tensor(source_pose);
    Tensor tgt_hm = heatmaps_to_tensor(target_pose);
    Tensor poses = nn::concat_channels({&src_hm, &tgt_hm});
    Tensor out = gen.forward(image_to_tensor(source_image), poses);
    return tensor_to_image(out);
}

double discriminator_forward(DualDiscriminators& d, DiscKind which, const Image& source_image,
                             const pose::HeatmapStack& target_pose, const Image& candidate) {
    if (!candidate.is_frame()) throw std::invalid_argument("discriminator_forward: candidate must be 256x192");
    const Tensor cand = image_to_tensor(candidate);
    if (which == DiscKind::appearance) {
        if (!source_image.is_frame()) {
            throw std::invalid_argument("discriminator_forward: appearance conditioning must be an image");
        }
        return d.appearance.forward(make_appearance_input(image_to_tensor(source_image), cand));
    }
    if (target_pose.channels.size() != pose::kNumJoints) {
        throw std::invalid_argument("discriminator_forward: shape conditioning must be a heatmap stack");
    }
    return d.shape.forward(make_shape_input(heatmaps_to_tensor(target_pose), cand));
}

}  // namespace ptv::net
