// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace ptv {

// Working frame shared by every pipeline stage.
inline constexpr int kFrameH = 256;
inline constexpr int kFrameW = 192;

// Planar RGB raster, values in [0,1]. Channel-major layout: (c*h + y)*w + x.
struct Image {
    int h = 0, w = 0;
    std::vector<double> data;  // 3*h*w

    Image() = default;
    Image(int h_, int w_, double fill = 0.0) : h(h_), w(w_), data(3u * h_ * w_, fill) {}

    static Image frame(double fill = 0.0) { return Image(kFrameH, kFrameW, fill); }

    double& at(int c, int y, int x) { return data[(static_cast<std::size_t>(c) * h + y) * w + x]; }
    double at(int c, int y, int x) const { return data[(static_cast<std::size_t>(c) * h + y) * w + x]; }

    bool same_shape(const Image& o) const { return h == o.h && w == o.w; }
    bool is_frame() const { return h == kFrameH && w == kFrameW; }
    std::size_t size() const { return data.size(); }

    void clamp01();
};

// Single-channel real raster (heatmap channel, alpha plane, luminance).
struct GrayF {
    int h = 0, w = 0;
    std::vector<double> data;

    GrayF() = default;
    GrayF(int h_, int w_, double fill = 0.0) : h(h_), w(w_), data(static_cast<std::size_t>(h_) * w_, fill) {}

    double& at(int y, int x) { return data[static_cast<std::size_t>(y) * w + x]; }
    double at(int y, int x) const { return data[static_cast<std::size_t>(y) * w + x]; }
    bool same_shape(const GrayF& o) const { return h == o.h && w == o.w; }
};

// Per-pixel semantic labels over the human-parsing label set.
struct SegMask {
    int h = 0, w = 0;
    std::vector<std::uint8_t> labels;

    SegMask() = default;
    SegMask(int h_, int w_, std::uint8_t fill = 0) : h(h_), w(w_), labels(static_cast<std::size_t>(h_) * w_, fill) {}

    static SegMask frame(std::uint8_t fill = 0) { return SegMask(kFrameH, kFrameW, fill); }

    std::uint8_t& at(int y, int x) { return labels[static_cast<std::size_t>(y) * w + x]; }
    std::uint8_t at(int y, int x) const { return labels[static_cast<std::size_t>(y) * w + x]; }
    bool same_shape(const SegMask& o) const { return h == o.h && w == o.w; }
    bool is_frame() const { return h == kFrameH && w == kFrameW; }
};

// Bilinear sample of one channel at real-valued coordinates; out-of-frame
// regions contribute `fill`.
double sample_bilinear(const Image& img, int c, double x, double y, double fill);

// Nearest-neighbor label lookup; out-of-frame returns `fill`.
std::uint8_t sample_nearest(const SegMask& mask, double x, double y, std::uint8_t fill);

// Center-crop to the target aspect ratio, then bilinear resize.
Image crop_resize(const Image& src, int out_h, int out_w);
SegMask crop_resize_mask(const SegMask& src, int out_h, int out_w);

// Coordinate mapping used by crop_resize: output pixel -> source pixel.
// Exposed so pose annotations can be remapped consistently with the raster.
struct CropResizeMap {
    double scale_x = 1.0, scale_y = 1.0;  // output -> source
    double off_x = 0.0, off_y = 0.0;      // crop offset in source pixels
    void to_source(double ox, double oy, double& sx, double& sy) const {
        sx = off_x + (ox + 0.5) * scale_x - 0.5;
        sy = off_y + (oy + 0.5) * scale_y - 0.5;
    }
    void to_output(double sx, double sy, double& ox, double& oy) const {
        ox = (sx - off_x + 0.5) / scale_x - 0.5;
        oy = (sy - off_y + 0.5) / scale_y - 0.5;
    }
};
CropResizeMap crop_resize_map(int src_h, int src_w, int out_h, int out_w);

// Luminance plane, ITU-R 601 weighting.
GrayF luminance(const Image& img);

double mean_abs_diff(const Image& a, const Image& b);

}  // namespace ptv
