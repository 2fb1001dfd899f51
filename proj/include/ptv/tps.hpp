// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include "ptv/image.hpp"

namespace ptv::warp {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Fitted thin-plate-spline map, affine + radial decomposition with the
// kernel U(r) = r^2 log r^2, U(0) = 0.
struct TpsTransform {
    std::vector<Point> control_src;
    std::vector<Point> control_dst;
    // Row-major 2x3: [ax, bx, cx; ay, by, cy] so that the affine part of the
    // map is (ax + bx*x + cx*y, ay + by*x + cy*y).
    std::array<double, 6> affine{};
    std::vector<std::array<double, 2>> radial_weights;  // N x (wx, wy)
    double regularization = 0.0;

    static TpsTransform identity();
};

// Solves the TPS interpolation system. Exact at control points when
// regularization is 0. Throws std::invalid_argument on mismatched sizes,
// N < 3, or collinear/degenerate source points.
TpsTransform fit_tps(const std::vector<Point>& src, const std::vector<Point>& dst,
                     double regularization = 0.0);

Point transform_point(const TpsTransform& t, const Point& p);

// Bending-energy term w^T K w summed over both coordinates.
double bending_energy(const TpsTransform& t);

// Backward warp with bilinear sampling: out(p) = img(t(p)); samples mapped
// outside the frame produce `fill`.
Image apply_tps(const TpsTransform& t, const Image& img, double fill = 0.0);

// Same geometry for label masks, nearest-neighbor lookup.
SegMask apply_tps_mask(const TpsTransform& t, const SegMask& mask, std::uint8_t fill = 0);

// ---- feathered compositing --------------------------------------------------

// Binary mask blurred with an isotropic Gaussian (sigma = radius/2) truncated
// at Euclidean radius `radius`; radius 0 returns the mask unchanged. Border
// handling replicates edge values, so the frame edge is never a blend seam.
GrayF feather_alpha(const GrayF& mask, int radius);

// alpha*donor + (1-alpha)*base with alpha = feather_alpha(mask, radius).
// Pixels farther than `radius` from any mask boundary are exactly base
// (mask 0) or exactly donor (mask 1).
Image gaussian_feather_composite(const Image& base, const Image& donor, const GrayF& mask,
                                 int radius);

}  // namespace ptv::warp
