// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "ptv/training.hpp"

namespace ptv::train {

// Checkpoint = binary parameter/moment blob (<path>) plus a JSON sidecar
// (<path>.json) carrying schema version, architecture, counters, loss
// weights, RNG state, and the blob's SHA-256 content hash.
struct CheckpointMeta {
    int schema_version = 1;
    std::string phase = "init";  // init | general | specialized
    int epoch = 0;
    std::int64_t step = 0;
    double lr = 0.0;
    net::PatnScale arch{};
    int disc_base = 16;
    net::LossWeights weights{};
    bool rho_in_gan_loss = true;  // recorded interpretation of the rho placement
    std::int64_t opt_g_t = 0, opt_d_t = 0;
    std::string rng_state;
    std::string content_hash;
    std::string parent_hash;  // empty for roots
    std::size_t param_count = 0;
};

// Atomic (write-temp-then-rename) save of the full training state. On I/O
// failure, partial files are removed and std::runtime_error is thrown.
void save_checkpoint(const std::string& path, const TrainState& state,
                     const net::LossWeights& weights, const std::string& phase,
                     const std::string& parent_hash = "");

// Rebuilds a TrainState bit-exactly (parameters, moments, counters, RNG).
// Architecture mismatches against the stored tensor table raise
// std::runtime_error naming the offending shapes.
TrainState load_checkpoint(const std::string& path, CheckpointMeta* meta_out = nullptr);

CheckpointMeta read_checkpoint_meta(const std::string& path);

}  // namespace ptv::train
