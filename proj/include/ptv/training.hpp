// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ptv/image.hpp"
#include "ptv/losses.hpp"
#include "ptv/nn/adam.hpp"
#include "ptv/patn.hpp"
#include "ptv/pose.hpp"

namespace ptv::train {

struct TrainConfig {
    double lr_initial = 0.002;
    double adam_beta1 = 0.5;
    double adam_beta2 = 0.9999;
    double alpha = 0.5;  // GAN weight in the full objective
    double rho = 0.5;    // discriminator balance
    double l1_weight = 1.0;
    double perceptual_weight = 0.0;
    double lambda1 = 1.0, lambda2 = 1.0, lambda3 = 0.0;  // texture warp-loss weights
    int epochs_general = 200;
    int epochs_specialized = 20;
    int batch_size = 8;
    std::string decay_schedule = "linear_half";  // or "constant"
    std::uint64_t seed = 0;
    net::PatnScale arch{};   // generator width/blocks
    int disc_base = 16;
    double heatmap_sigma = 6.0;
    int checkpoint_every = 0;  // epochs between periodic checkpoints; 0 = final only
    int pair_limit = 0;        // cap on training pairs; 0 = unlimited
    int specialized_groups = 100;

    void validate() const;
    net::LossWeights loss_weights() const;
};

// LR as a pure function of the epoch index: constant for the first half,
// then linear decay to zero at the end.
double lr_schedule(const TrainConfig& cfg, int epoch, int total_epochs);

struct TrainingPair {
    Image source_image;
    pose::Pose source_pose;
    Image target_image;
    pose::Pose target_pose;
    std::string garment_id;
    std::string model_id;
};

struct LossRecord {
    std::int64_t step = 0;
    int epoch = 0;
    double lr = 0.0;
    double gen_total = 0.0;
    double gen_adv = 0.0;
    double l1 = 0.0;
    double disc_loss = 0.0;
    bool finite = true;
    std::string note;
    double wall_ms = 0.0;
};

// The checkpointable training unit: networks, optimizer moments, counters,
// loss history, RNG stream.
struct TrainState {
    net::PatnScale arch{};
    int disc_base = 16;
    std::unique_ptr<net::PatnGenerator> gen;
    std::unique_ptr<net::DualDiscriminators> disc;
    nn::AdamState opt_g, opt_d;
    std::int64_t step = 0;
    int epoch = 0;
    double lr = 0.0;
    std::vector<LossRecord> history;
    Rng rng;

    static TrainState fresh(const net::PatnScale& arch, int disc_base, std::uint64_t seed);
    nn::ParamRefs gen_params() const;
    nn::ParamRefs disc_params() const;
};

// One discriminator update followed by one generator update over the batch.
// Non-finite losses abort the step, restore the pre-step state bit-exactly,
// and return a diagnostic record with finite = false.
LossRecord training_step(TrainState& state, const std::vector<TrainingPair>& batch,
                         const TrainConfig& cfg);

struct PhaseResult {
    std::string checkpoint_path;
    std::vector<LossRecord> records;
};

// General pose-transfer phase: epochs_general epochs over the dataset with
// the decay schedule, periodic checkpoints, final checkpoint tagged
// phase = "general".
PhaseResult train_general(const std::vector<TrainingPair>& dataset, const TrainConfig& cfg,
                          const std::string& out_dir);

// Specialized fine-tuning phase starting from a base checkpoint; the output
// checkpoint records the base's content hash as its parent.
PhaseResult train_specialized(const std::string& base_checkpoint,
                              const std::vector<TrainingPair>& garment_pairs,
                              const TrainConfig& cfg, const std::string& out_dir);

}  // namespace ptv::train
