// SPDX-License-Identifier: Apache-2.0
#include "ptv/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "ptv/checkpoint.hpp"

namespace ptv::train {

namespace fs = std::filesystem;

void TrainConfig::validate() const {
    if (!(lr_initial > 0.0)) throw std::invalid_argument("train config: lr_initial must be positive");
    if (adam_beta1 < 0.0 || adam_beta1 >= 1.0 || adam_beta2 < 0.0 || adam_beta2 >= 1.0) {
        throw std::invalid_argument("train config: betas must lie in [0,1)");
    }
    if (epochs_general < 1 || epochs_specialized < 0) {
        throw std::invalid_argument("train config: epoch counts out of range");
    }
    if (batch_size < 1) throw std::invalid_argument("train config: batch_size must be >= 1");
    if (decay_schedule != "linear_half" && decay_schedule != "constant") {
        throw std::invalid_argument("train config: unknown decay schedule '" + decay_schedule + "'");
    }
    loss_weights().validate();
}

net::LossWeights TrainConfig::loss_weights() const {
    net::LossWeights w;
    w.alpha = alpha;
    w.rho = rho;
    w.l1_weight = l1_weight;
    w.perceptual_weight = perceptual_weight;
    return w;
}

double lr_schedule(const TrainConfig& cfg, int epoch, int total_epochs) {
    if (epoch < 0 || total_epochs < 1) throw std::invalid_argument("lr_schedule: bad epoch index");
    if (cfg.decay_schedule == "constant") return cfg.lr_initial;
    const int half = total_epochs / 2;
    if (epoch < half || total_epochs == 1) return cfg.lr_initial;
    return cfg.lr_initial * static_cast<double>(total_epochs - epoch) /
           static_cast<double>(total_epochs - half);
}

TrainState TrainState::fresh(const net::PatnScale& arch, int disc_base, std::uint64_t seed) {
    TrainState s;
    s.arch = arch;
    s.disc_base = disc_base;
    s.rng = Rng(seed);
    s.gen = std::make_unique<net::PatnGenerator>(arch, s.rng);
    s.disc = std::make_unique<net::DualDiscriminators>(disc_base, arch.pose_channels, s.rng);
    s.opt_g.init(s.gen_params());
    s.opt_d.init(s.disc_params());
    return s;
}

nn::ParamRefs TrainState::gen_params() const {
    return gen->params();
}

nn::ParamRefs TrainState::disc_params() const {
    nn::ParamRefs out = disc->appearance.params();
    for (nn::Param* p : disc->shape.params()) out.push_back(p);
    return out;
}

namespace {

// Bit-exact copy of everything a failed step must roll back.
struct StateSnapshot {
    std::vector<std::vector<double>> g_values, d_values;
    nn::AdamState opt_g, opt_d;
    std::int64_t step;
    int epoch;
    double lr;
    std::string rng;

    static StateSnapshot capture(const TrainState& s) {
        StateSnapshot snap;
        for (nn::Param* p : s.gen_params()) snap.g_values.push_back(p->value);
        for (nn::Param* p : s.disc_params()) snap.d_values.push_back(p->value);
        snap.opt_g = s.opt_g;
        snap.opt_d = s.opt_d;
        snap.step = s.step;
        snap.epoch = s.epoch;
        snap.lr = s.lr;
        snap.rng = s.rng.serialize();
        return snap;
    }

    void restore(TrainState& s) const {
        auto gp = s.gen_params();
        for (std::size_t i = 0; i < gp.size(); ++i) gp[i]->value = g_values[i];
        auto dp = s.disc_params();
        for (std::size_t i = 0; i < dp.size(); ++i) dp[i]->value = d_values[i];
        s.opt_g = opt_g;
        s.opt_d = opt_d;
        s.step = step;
        s.epoch = epoch;
        s.lr = lr;
        s.rng.deserialize(rng);
    }
};

struct PreparedPair {
    nn::Tensor source_img;   // [0,1]
    nn::Tensor target_img;   // [0,1]
    nn::Tensor pose_concat;  // source + target heatmaps
    nn::Tensor target_hm;    // target heatmaps only
};

PreparedPair prepare(const TrainingPair& pair, double heatmap_sigma) {
    PreparedPair p;
    p.source_img = net::image_to_tensor(pair.source_image);
    p.target_img = net::image_to_tensor(pair.target_image);
    const pose::HeatmapStack src_hm = pose::encode_heatmaps(pair.source_pose, heatmap_sigma);
    const pose::HeatmapStack tgt_hm = pose::encode_heatmaps(pair.target_pose, heatmap_sigma);
    const nn::Tensor s = net::heatmaps_to_tensor(src_hm);
    p.target_hm = net::heatmaps_to_tensor(tgt_hm);
    p.pose_concat = nn::concat_channels({&s, &p.target_hm});
    return p;
}

}  // namespace

LossRecord training_step(TrainState& state, const std::vector<TrainingPair>& batch,
                         const TrainConfig& cfg) {
    if (batch.empty()) throw std::invalid_argument("training_step: empty batch");
    if (!state.gen || !state.disc) throw std::invalid_argument("training_step: uninitialized state");
    const auto t0 = std::chrono::steady_clock::now();

    const net::LossWeights w = cfg.loss_weights();
    w.validate();
    const double B = static_cast<double>(batch.size());
    const nn::AdamConfig adam{state.lr, cfg.adam_beta1, cfg.adam_beta2, 1e-8};

    const StateSnapshot snapshot = StateSnapshot::capture(state);
    LossRecord rec;
    rec.step = state.step + 1;
    rec.epoch = state.epoch;
    rec.lr = state.lr;

    auto fail = [&](const std::string& why) {
        snapshot.restore(state);
        rec.step = state.step;
        rec.finite = false;
        rec.note = why;
        const auto t1 = std::chrono::steady_clock::now();
        rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        return rec;
    };

    std::vector<PreparedPair> prepped;
    prepped.reserve(batch.size());
    for (const TrainingPair& pair : batch) {
        if (!pair.source_image.is_frame() || !pair.target_image.is_frame()) {
            throw std::invalid_argument("training_step: pair images must be 256x192");
        }
        prepped.push_back(prepare(pair, cfg.heatmap_sigma));
    }

    std::unique_ptr<net::FeatureProbe> probe;
    if (w.perceptual_weight > 0.0) probe = std::make_unique<net::FeatureProbe>(state.arch.img_channels);

    // ---- discriminator phase ----
    const nn::ParamRefs d_params = state.disc_params();
    const nn::ParamRefs g_params = state.gen_params();
    nn::zero_grads(d_params);
    double gan_acc = 0.0;
    for (const PreparedPair& p : prepped) {
        const nn::Tensor fake = state.gen->forward(p.source_img, p.pose_concat);

        const double a_real = state.disc->appearance.forward(net::make_appearance_input(p.source_img, p.target_img));
        const net::GanLossGrads gr = gan_loss_grads(a_real, 0.5, 0.5, 0.5, w.rho);
        state.disc->appearance.backward(-gr.d_a_real / B);  // d(-gan)/d(a_real)

        const double s_real = state.disc->shape.forward(net::make_shape_input(p.target_hm, p.target_img));
        const net::GanLossGrads gs = gan_loss_grads(0.5, s_real, 0.5, 0.5, w.rho);
        state.disc->shape.backward(-gs.d_s_real / B);

        const double a_fake = state.disc->appearance.forward(net::make_appearance_input(p.source_img, fake));
        const net::GanLossGrads gf = gan_loss_grads(0.5, 0.5, a_fake, 0.5, w.rho);
        state.disc->appearance.backward(-gf.d_a_fake / B);

        const double s_fake = state.disc->shape.forward(net::make_shape_input(p.target_hm, fake));
        const net::GanLossGrads gsf = gan_loss_grads(0.5, 0.5, 0.5, s_fake, w.rho);
        state.disc->shape.backward(-gsf.d_s_fake / B);

        gan_acc += net::gan_loss(a_real, s_real, a_fake, s_fake, w.rho);
    }
    rec.disc_loss = -gan_acc / B;
    if (!std::isfinite(rec.disc_loss)) return fail("non-finite discriminator loss");
    adam_step(d_params, state.opt_d, adam);

    // ---- generator phase ----
    nn::zero_grads(g_params);
    nn::zero_grads(d_params);
    double adv_acc = 0.0, l1_acc = 0.0;
    for (const PreparedPair& p : prepped) {
        const nn::Tensor fake = state.gen->forward(p.source_img, p.pose_concat);

        const double a_fake = state.disc->appearance.forward(net::make_appearance_input(p.source_img, fake));
        const net::AdvGrads ag = generator_adversarial_grads(a_fake, 0.5, w.rho);
        nn::Tensor d_fake = net::candidate_grad_from_input(
            state.disc->appearance.backward(w.alpha * ag.d_a_fake / B));

        const double s_fake = state.disc->shape.forward(net::make_shape_input(p.target_hm, fake));
        const net::AdvGrads sg = generator_adversarial_grads(0.5, s_fake, w.rho);
        {
            const nn::Tensor d_shape = net::candidate_grad_from_input(
                state.disc->shape.backward(w.alpha * sg.d_s_fake / B));
            for (std::size_t i = 0; i < d_fake.data.size(); ++i) d_fake.data[i] += d_shape.data[i];
        }

        nn::Tensor d_l1;
        const double l1 = net::combined_l1_with_grad(fake, p.target_img, w, probe.get(), d_l1);
        for (std::size_t i = 0; i < d_fake.data.size(); ++i) d_fake.data[i] += d_l1.data[i] / B;

        adv_acc += net::generator_adversarial(a_fake, s_fake, w.rho);
        l1_acc += l1;
        state.gen->backward(d_fake);
    }
    rec.gen_adv = adv_acc / B;
    rec.l1 = l1_acc / B;
    rec.gen_total = w.alpha * rec.gen_adv + rec.l1;
    if (!std::isfinite(rec.gen_total)) return fail("non-finite generator loss");
    adam_step(g_params, state.opt_g, adam);

    state.step += 1;
    const auto t1 = std::chrono::steady_clock::now();
    rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    state.history.push_back(rec);
    return rec;
}

namespace {

void append_log(const std::string& out_dir, const LossRecord& rec) {
    std::ofstream log(fs::path(out_dir) / "training_log.jsonl", std::ios::app);
    log << "{\"step\":" << rec.step << ",\"epoch\":" << rec.epoch << ",\"lr\":" << rec.lr
        << ",\"gen_total\":" << rec.gen_total << ",\"gen_adv\":" << rec.gen_adv
        << ",\"l1\":" << rec.l1 << ",\"disc\":" << rec.disc_loss
        << ",\"finite\":" << (rec.finite ? "true" : "false") << ",\"wall_ms\":" << rec.wall_ms
        << "}\n";
}

PhaseResult run_phase(TrainState& state, const std::vector<TrainingPair>& dataset,
                      const TrainConfig& cfg, int epochs, const std::string& out_dir,
                      const std::string& phase, const std::string& parent_hash) {
    fs::create_directories(out_dir);
    PhaseResult result;
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        state.epoch = epoch;
        state.lr = lr_schedule(cfg, epoch, epochs);
        // seeded in-epoch shuffle from the state's RNG stream
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = state.rng.next_u64() % i;
            std::swap(order[i - 1], order[j]);
        }
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            std::vector<TrainingPair> batch;
            batch.reserve(end - start);
            for (std::size_t i = start; i < end; ++i) batch.push_back(dataset[order[i]]);
            const LossRecord rec = training_step(state, batch, cfg);
            append_log(out_dir, rec);
            result.records.push_back(rec);
            if (!rec.finite) {
                throw std::runtime_error("training aborted: " + rec.note + " at step " +
                                         std::to_string(rec.step));
            }
        }
        if (cfg.checkpoint_every > 0 && (epoch + 1) % cfg.checkpoint_every == 0 && epoch + 1 < epochs) {
            const std::string path = (fs::path(out_dir) / ("epoch_" + std::to_string(epoch + 1) + ".ckpt")).string();
            save_checkpoint(path, state, cfg.loss_weights(), phase, parent_hash);
        }
    }
    const std::string final_path = (fs::path(out_dir) / (phase + ".ckpt")).string();
    save_checkpoint(final_path, state, cfg.loss_weights(), phase, parent_hash);
    result.checkpoint_path = final_path;
    return result;
}

}  // namespace

PhaseResult train_general(const std::vector<TrainingPair>& dataset, const TrainConfig& cfg,
                          const std::string& out_dir) {
    cfg.validate();
    if (dataset.empty()) throw std::invalid_argument("train_general: empty dataset");
    TrainState state = TrainState::fresh(cfg.arch, cfg.disc_base, cfg.seed);
    return run_phase(state, dataset, cfg, cfg.epochs_general, out_dir, "general", "");
}

PhaseResult train_specialized(const std::string& base_checkpoint,
                              const std::vector<TrainingPair>& garment_pairs,
                              const TrainConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    if (garment_pairs.empty()) throw std::invalid_argument("train_specialized: empty garment pairs");
    CheckpointMeta meta;
    TrainState state = load_checkpoint(base_checkpoint, &meta);
    if (!(state.arch == cfg.arch) || state.disc_base != cfg.disc_base) {
        throw std::runtime_error(
            "train_specialized: architecture mismatch with base checkpoint (base=" +
            std::to_string(state.arch.base) + "/blocks=" + std::to_string(state.arch.blocks) +
            " vs config base=" + std::to_string(cfg.arch.base) +
            "/blocks=" + std::to_string(cfg.arch.blocks) + ")");
    }
    // Transfer learning: parameters carry over, optimizer moments restart.
    state.opt_g.init(state.gen_params());
    state.opt_d.init(state.disc_params());
    state.step = 0;
    return run_phase(state, garment_pairs, cfg, cfg.epochs_specialized, out_dir, "specialized",
                     meta.content_hash);
}

}  // namespace ptv::train
