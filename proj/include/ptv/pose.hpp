// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "ptv/image.hpp"

namespace ptv::pose {

inline constexpr int kNumJoints = 18;

// 18-joint body convention (OpenPose ordering): nose, neck, then right/left
// shoulder-elbow-wrist, right/left hip-knee-ankle, eyes, ears.
extern const std::array<const char*, kNumJoints> kJointNames;

struct Keypoint {
    double x = 0.0;
    double y = 0.0;
    int v = 0;  // 0 = unlabeled, 1/2 = labeled
};

struct Pose {
    std::array<Keypoint, kNumJoints> joints{};

    int visible_count() const;
};

// Per-joint OKS falloff constants.
struct SigmaTable {
    std::array<double, kNumJoints> k{};

    // COCO keypoint constants; the neck (absent from COCO) takes the
    // shoulder constant 0.079.
    static SigmaTable coco_default();
    void validate() const;  // throws std::invalid_argument on non-positive entry
};

struct CatalogEntry {
    Image image;
    Pose pose;
    SegMask seg_mask;
    std::string garment_id;
    std::string model_id;
};

struct HeatmapStack {
    std::vector<GrayF> channels;  // 18 planes, frame-sized
    double sigma_px = 0.0;
};

// ---- pose annotation parsing ----------------------------------------------

struct ParsedPose {
    Pose pose;
    std::vector<std::string> warnings;  // e.g. out-of-frame clamps
};

// Parses one pose record: JSON object {"keypoints": [[x,y,v] * 18]}.
// Out-of-frame labeled keypoints are clamped to the frame and reported.
// Throws std::invalid_argument naming the offending field on malformed input.
ParsedPose load_pose(const std::string& annotation_text);

std::string pose_to_json(const Pose& pose);

// ---- similarity -------------------------------------------------------------

// Object keypoint similarity between a user pose and a candidate, gated on
// the user's visibility flags. Throws std::domain_error when the user has no
// visible keypoints, std::invalid_argument when scale <= 0.
double oks(const Pose& user, const Pose& candidate, double scale, const SigmaTable& sigmas);

// Object scale: sqrt(w*h) of the tight bounding box of the user's visible
// keypoints, floored at 1.0.
double pose_scale(const Pose& user);

struct SelectionResult {
    std::size_t catalog_index = 0;
    double score = 0.0;
};

// Argmax of oks over catalog entries with the requested garment id. Ties
// break toward the lowest catalog index.
SelectionResult select_model_image(const Pose& user, const std::vector<CatalogEntry>& catalog,
                                   const std::string& garment_id, double scale,
                                   const SigmaTable& sigmas);

// ---- heatmap encoding -------------------------------------------------------

// Per-joint Gaussian heatmaps on the 256x192 frame. Visible joints peak at
// exactly 1 at the rounded keypoint pixel; invisible joints yield zero planes.
HeatmapStack encode_heatmaps(const Pose& pose, double sigma_px);

}  // namespace ptv::pose
