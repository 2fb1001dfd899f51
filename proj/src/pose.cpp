// SPDX-License-Identifier: Apache-2.0
#include "ptv/pose.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

using nlohmann::json;

namespace ptv::pose {

const std::array<const char*, kNumJoints> kJointNames = {
    "nose",      "neck",      "r_shoulder", "r_elbow", "r_wrist", "l_shoulder",
    "l_elbow",   "l_wrist",   "r_hip",      "r_knee",  "r_ankle", "l_hip",
    "l_knee",    "l_ankle",   "r_eye",      "l_eye",   "r_ear",   "l_ear",
};

int Pose::visible_count() const {
    int n = 0;
    for (const auto& j : joints) n += j.v > 0 ? 1 : 0;
    return n;
}

SigmaTable SigmaTable::coco_default() {
    SigmaTable t;
    t.k = {
        0.026,  // nose
        0.079,  // neck (shoulder constant)
        0.079, 0.072, 0.062,  // right shoulder, elbow, wrist
        0.079, 0.072, 0.062,  // left shoulder, elbow, wrist
        0.107, 0.087, 0.089,  // right hip, knee, ankle
        0.107, 0.087, 0.089,  // left hip, knee, ankle
        0.025, 0.025,         // eyes
        0.035, 0.035,         // ears
    };
    return t;
}

void SigmaTable::validate() const {
    for (int i = 0; i < kNumJoints; ++i) {
        if (!(k[i] > 0.0)) {
            throw std::invalid_argument(std::string("sigma table: non-positive constant for joint ") +
                                        kJointNames[i]);
        }
    }
}

ParsedPose load_pose(const std::string& annotation_text) {
    json doc;
    try {
        doc = json::parse(annotation_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("pose record: invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("keypoints")) {
        throw std::invalid_argument("pose record: missing field 'keypoints'");
    }
    const json& kps = doc["keypoints"];
    if (!kps.is_array() || kps.size() != kNumJoints) {
        throw std::invalid_argument("pose record: field 'keypoints': expected 18 joints, got " +
                                    std::to_string(kps.is_array() ? kps.size() : 0));
    }
    ParsedPose out;
    for (int i = 0; i < kNumJoints; ++i) {
        const json& trip = kps[i];
        const std::string where = std::string("keypoints[") + std::to_string(i) + "] (" + kJointNames[i] + ")";
        if (!trip.is_array() || trip.size() != 3) {
            throw std::invalid_argument("pose record: field " + where + ": expected [x, y, v] triplet");
        }
        if (!trip[0].is_number() || !trip[1].is_number()) {
            throw std::invalid_argument("pose record: field " + where + ": non-numeric coordinate");
        }
        if (!trip[2].is_number_integer()) {
            throw std::invalid_argument("pose record: field " + where + ": non-integer visibility flag");
        }
        Keypoint kp;
        kp.x = trip[0].get<double>();
        kp.y = trip[1].get<double>();
        kp.v = trip[2].get<int>();
        if (kp.v < 0 || kp.v > 2) {
            throw std::invalid_argument("pose record: field " + where + ": visibility flag not in {0,1,2}");
        }
        if (kp.v > 0) {
            const double cx = std::clamp(kp.x, 0.0, static_cast<double>(kFrameW - 1));
            const double cy = std::clamp(kp.y, 0.0, static_cast<double>(kFrameH - 1));
            if (cx != kp.x || cy != kp.y) {
                out.warnings.push_back(where + ": out-of-frame coordinate clamped");
                kp.x = cx;
                kp.y = cy;
            }
        }
        out.pose.joints[i] = kp;
    }
    return out;
}

std::string pose_to_json(const Pose& pose) {
    json kps = json::array();
    for (const auto& j : pose.joints) kps.push_back({j.x, j.y, j.v});
    json doc;
    doc["keypoints"] = kps;
    return doc.dump();
}

double oks(const Pose& user, const Pose& candidate, double scale, const SigmaTable& sigmas) {
    if (!(scale > 0.0)) throw std::invalid_argument("oks: scale must be positive");
    sigmas.validate();
    double num = 0.0;
    int den = 0;
    for (int i = 0; i < kNumJoints; ++i) {
        const Keypoint& u = user.joints[i];
        if (u.v <= 0) continue;
        Keypoint c = candidate.joints[i];
        if (c.v <= 0) {
            // Candidate-side invisibility: distance to clamped coordinates,
            // a soft penalty rather than exclusion.
            c.x = std::clamp(c.x, 0.0, static_cast<double>(kFrameW - 1));
            c.y = std::clamp(c.y, 0.0, static_cast<double>(kFrameH - 1));
        }
        const double dx = u.x - c.x;
        const double dy = u.y - c.y;
        const double d2 = dx * dx + dy * dy;
        const double sk = scale * sigmas.k[i];
        num += std::exp(-d2 / (2.0 * sk * sk));
        den += 1;
    }
    if (den == 0) throw std::domain_error("oks: no visible keypoints in user pose");
    return num / static_cast<double>(den);
}

double pose_scale(const Pose& user) {
    double min_x = std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_x = -std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();
    int seen = 0;
    for (const auto& j : user.joints) {
        if (j.v <= 0) continue;
        min_x = std::min(min_x, j.x);
        max_x = std::max(max_x, j.x);
        min_y = std::min(min_y, j.y);
        max_y = std::max(max_y, j.y);
        ++seen;
    }
    if (seen == 0) throw std::domain_error("pose_scale: no visible keypoints");
    const double s = std::sqrt((max_x - min_x) * (max_y - min_y));
    return std::max(s, 1.0);
}

SelectionResult select_model_image(const Pose& user, const std::vector<CatalogEntry>& catalog,
                                   const std::string& garment_id, double scale,
                                   const SigmaTable& sigmas) {
    bool found = false;
    SelectionResult best;
    best.score = -1.0;
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        if (catalog[i].garment_id != garment_id) continue;
        found = true;
        const double s = oks(user, catalog[i].pose, scale, sigmas);
        if (s > best.score) {
            best.score = s;
            best.catalog_index = i;
        }
    }
    if (!found) throw std::invalid_argument("select_model_image: no candidates for garment '" + garment_id + "'");
    return best;
}

HeatmapStack encode_heatmaps(const Pose& pose, double sigma_px) {
    if (!(sigma_px > 0.0)) throw std::invalid_argument("encode_heatmaps: sigma_px must be positive");
    HeatmapStack stack;
    stack.sigma_px = sigma_px;
    stack.channels.assign(kNumJoints, GrayF(kFrameH, kFrameW, 0.0));
    const double inv = 1.0 / (2.0 * sigma_px * sigma_px);
    for (int i = 0; i < kNumJoints; ++i) {
        const Keypoint& j = pose.joints[i];
        if (j.v <= 0) continue;
        const double cx = std::lround(std::clamp(j.x, 0.0, static_cast<double>(kFrameW - 1)));
        const double cy = std::lround(std::clamp(j.y, 0.0, static_cast<double>(kFrameH - 1)));
        GrayF& ch = stack.channels[i];
        for (int y = 0; y < kFrameH; ++y) {
            for (int x = 0; x < kFrameW; ++x) {
                const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                ch.at(y, x) = std::exp(-d2 * inv);
            }
        }
    }
    return stack;
}

}  // namespace ptv::pose
