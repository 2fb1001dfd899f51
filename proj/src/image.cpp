// SPDX-License-Identifier: Apache-2.0
#include "ptv/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ptv {

void Image::clamp01() {
    for (double& v : data) v = std::clamp(v, 0.0, 1.0);
}

double sample_bilinear(const Image& img, int c, double x, double y, double fill) {
    if (x < -0.5 || y < -0.5 || x > img.w - 0.5 || y > img.h - 0.5) return fill;
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    auto texel = [&](int yy, int xx) -> double {
        if (xx < 0 || yy < 0 || xx >= img.w || yy >= img.h) return fill;
        return img.at(c, yy, xx);
    };
    const double top = texel(y0, x0) * (1.0 - fx) + texel(y0, x0 + 1) * fx;
    const double bot = texel(y0 + 1, x0) * (1.0 - fx) + texel(y0 + 1, x0 + 1) * fx;
    return top * (1.0 - fy) + bot * fy;
}

std::uint8_t sample_nearest(const SegMask& mask, double x, double y, std::uint8_t fill) {
    const int xi = static_cast<int>(std::lround(x));
    const int yi = static_cast<int>(std::lround(y));
    if (xi < 0 || yi < 0 || xi >= mask.w || yi >= mask.h) return fill;
    return mask.at(yi, xi);
}

CropResizeMap crop_resize_map(int src_h, int src_w, int out_h, int out_w) {
    // Crop the largest centered window with the output aspect ratio.
    const double want = static_cast<double>(out_w) / out_h;
    double crop_w = static_cast<double>(src_w);
    double crop_h = static_cast<double>(src_h);
    if (crop_w / crop_h > want) {
        crop_w = crop_h * want;
    } else {
        crop_h = crop_w / want;
    }
    CropResizeMap m;
    m.off_x = (src_w - crop_w) / 2.0;
    m.off_y = (src_h - crop_h) / 2.0;
    m.scale_x = crop_w / out_w;
    m.scale_y = crop_h / out_h;
    return m;
}

Image crop_resize(const Image& src, int out_h, int out_w) {
    const CropResizeMap m = crop_resize_map(src.h, src.w, out_h, out_w);
    Image out(out_h, out_w);
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < out_h; ++y) {
            for (int x = 0; x < out_w; ++x) {
                double sx = 0, sy = 0;
                m.to_source(x, y, sx, sy);
                out.at(c, y, x) = sample_bilinear(src, c, std::clamp(sx, 0.0, src.w - 1.0),
                                                  std::clamp(sy, 0.0, src.h - 1.0), 0.0);
            }
        }
    }
    return out;
}

SegMask crop_resize_mask(const SegMask& src, int out_h, int out_w) {
    const CropResizeMap m = crop_resize_map(src.h, src.w, out_h, out_w);
    SegMask out(out_h, out_w);
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            double sx = 0, sy = 0;
            m.to_source(x, y, sx, sy);
            out.at(y, x) = sample_nearest(src, std::clamp(sx, 0.0, src.w - 1.0),
                                          std::clamp(sy, 0.0, src.h - 1.0), 0);
        }
    }
    return out;
}

GrayF luminance(const Image& img) {
    GrayF out(img.h, img.w);
    for (int y = 0; y < img.h; ++y) {
        for (int x = 0; x < img.w; ++x) {
            out.at(y, x) = 0.299 * img.at(0, y, x) + 0.587 * img.at(1, y, x) + 0.114 * img.at(2, y, x);
        }
    }
    return out;
}

double mean_abs_diff(const Image& a, const Image& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("mean_abs_diff: image dimensions differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) acc += std::abs(a.data[i] - b.data[i]);
    return acc / static_cast<double>(a.data.size());
}

}  // namespace ptv
