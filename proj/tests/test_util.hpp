// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include "ptv/image.hpp"
#include "ptv/pose.hpp"
#include "ptv/rng.hpp"

namespace testutil {

// Independent direct evaluation of the keypoint-similarity formula:
// sum_i exp(-d_i^2 / (2 (s k_i)^2)) delta(v_i > 0) / sum_i delta(v_i > 0),
// gated on the user pose's visibility flags. Candidate joints with v = 0
// contribute the distance to their frame-clamped coordinates.
inline double oks_reference(const ptv::pose::Pose& user, const ptv::pose::Pose& cand, double s,
                            const ptv::pose::SigmaTable& sig) {
    double num = 0.0;
    double den = 0.0;
    for (int i = 0; i < ptv::pose::kNumJoints; ++i) {
        if (user.joints[i].v <= 0) continue;
        double cx = cand.joints[i].x;
        double cy = cand.joints[i].y;
        if (cand.joints[i].v <= 0) {
            cx = std::min(std::max(cx, 0.0), double(ptv::kFrameW - 1));
            cy = std::min(std::max(cy, 0.0), double(ptv::kFrameH - 1));
        }
        const double dx = user.joints[i].x - cx;
        const double dy = user.joints[i].y - cy;
        const double denom = 2.0 * (s * sig.k[i]) * (s * sig.k[i]);
        num += std::exp(-(dx * dx + dy * dy) / denom);
        den += 1.0;
    }
    return num / den;
}

inline ptv::pose::Pose random_pose(ptv::Rng& rng, bool all_visible = true) {
    ptv::pose::Pose p;
    for (auto& j : p.joints) {
        j.x = rng.uniform(0.0, ptv::kFrameW - 1.0);
        j.y = rng.uniform(0.0, ptv::kFrameH - 1.0);
        j.v = all_visible ? 2 : (rng.uniform() < 0.2 ? 0 : 2);
    }
    return p;
}

inline ptv::Image random_image(ptv::Rng& rng, int h = ptv::kFrameH, int w = ptv::kFrameW) {
    ptv::Image img(h, w);
    for (double& v : img.data) v = rng.uniform();
    return img;
}

// Smooth low-frequency image for warp round-trip checks.
inline ptv::Image smooth_image(int h = ptv::kFrameH, int w = ptv::kFrameW) {
    ptv::Image img(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            img.at(0, y, x) = 0.5 + 0.5 * std::sin(2.0 * M_PI * x / w);
            img.at(1, y, x) = 0.5 + 0.5 * std::cos(2.0 * M_PI * y / h);
            img.at(2, y, x) = static_cast<double>(x + y) / (h + w);
        }
    }
    return img;
}

}  // namespace testutil
