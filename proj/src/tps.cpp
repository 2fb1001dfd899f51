// SPDX-License-Identifier: Apache-2.0
#include "ptv/tps.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace ptv::warp {

namespace {

// U(r) = r^2 log r^2 on the squared distance, with U(0) = 0.
inline double kernel_r2(double r2) {
    return r2 > 0.0 ? r2 * std::log(r2) : 0.0;
}

bool collinear(const std::vector<Point>& pts) {
    // Largest doubled triangle area over point triples anchored at the two
    // farthest-apart points.
    std::size_t a = 0, b = 1;
    double best = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double dx = pts[i].x - pts[j].x;
            const double dy = pts[i].y - pts[j].y;
            const double d2 = dx * dx + dy * dy;
            if (d2 > best) {
                best = d2;
                a = i;
                b = j;
            }
        }
    }
    if (best <= 0.0) return true;  // all points coincide
    const double span = std::sqrt(best);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double area2 = std::abs((pts[b].x - pts[a].x) * (pts[i].y - pts[a].y) -
                                      (pts[b].y - pts[a].y) * (pts[i].x - pts[a].x));
        if (area2 / span > 1e-9 * span) return false;
    }
    return true;
}

}  // namespace

TpsTransform TpsTransform::identity() {
    TpsTransform t;
    t.affine = {0.0, 1.0, 0.0, 0.0, 0.0, 1.0};
    return t;
}

TpsTransform fit_tps(const std::vector<Point>& src, const std::vector<Point>& dst,
                     double regularization) {
    const std::size_t n = src.size();
    if (n != dst.size()) throw std::invalid_argument("fit_tps: control point counts differ");
    if (n < 3) throw std::invalid_argument("fit_tps: need at least 3 control points");
    if (regularization < 0.0) throw std::invalid_argument("fit_tps: negative regularization");
    if (collinear(src)) throw std::invalid_argument("fit_tps: source control points are collinear");

    const Eigen::Index N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(N + 3, N + 3);
    for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index j = 0; j < N; ++j) {
            const double dx = src[i].x - src[j].x;
            const double dy = src[i].y - src[j].y;
            L(i, j) = kernel_r2(dx * dx + dy * dy);
        }
        L(i, i) += regularization;
        L(i, N) = 1.0;
        L(i, N + 1) = src[i].x;
        L(i, N + 2) = src[i].y;
        L(N, i) = 1.0;
        L(N + 1, i) = src[i].x;
        L(N + 2, i) = src[i].y;
    }
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(N + 3, 2);
    for (Eigen::Index i = 0; i < N; ++i) {
        rhs(i, 0) = dst[i].x;
        rhs(i, 1) = dst[i].y;
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(L);
    if (!lu.isInvertible()) {
        throw std::invalid_argument("fit_tps: singular system (degenerate control points)");
    }
    const Eigen::MatrixXd sol = lu.solve(rhs);

    TpsTransform t;
    t.control_src = src;
    t.control_dst = dst;
    t.regularization = regularization;
    t.radial_weights.resize(n);
    for (Eigen::Index i = 0; i < N; ++i) {
        t.radial_weights[i] = {sol(i, 0), sol(i, 1)};
    }
    t.affine = {sol(N, 0), sol(N + 1, 0), sol(N + 2, 0),
                sol(N, 1), sol(N + 1, 1), sol(N + 2, 1)};
    return t;
}

Point transform_point(const TpsTransform& t, const Point& p) {
    double ox = t.affine[0] + t.affine[1] * p.x + t.affine[2] * p.y;
    double oy = t.affine[3] + t.affine[4] * p.x + t.affine[5] * p.y;
    for (std::size_t i = 0; i < t.control_src.size(); ++i) {
        const double dx = p.x - t.control_src[i].x;
        const double dy = p.y - t.control_src[i].y;
        const double u = kernel_r2(dx * dx + dy * dy);
        ox += t.radial_weights[i][0] * u;
        oy += t.radial_weights[i][1] * u;
    }
    return {ox, oy};
}

double bending_energy(const TpsTransform& t) {
    const std::size_t n = t.control_src.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = t.control_src[i].x - t.control_src[j].x;
            const double dy = t.control_src[i].y - t.control_src[j].y;
            const double u = kernel_r2(dx * dx + dy * dy);
            acc += u * (t.radial_weights[i][0] * t.radial_weights[j][0] +
                        t.radial_weights[i][1] * t.radial_weights[j][1]);
        }
    }
    return acc;
}

Image apply_tps(const TpsTransform& t, const Image& img, double fill) {
    Image out(img.h, img.w, fill);
    for (int y = 0; y < img.h; ++y) {
        for (int x = 0; x < img.w; ++x) {
            const Point q = transform_point(t, {static_cast<double>(x), static_cast<double>(y)});
            for (int c = 0; c < 3; ++c) out.at(c, y, x) = sample_bilinear(img, c, q.x, q.y, fill);
        }
    }
    return out;
}

SegMask apply_tps_mask(const TpsTransform& t, const SegMask& mask, std::uint8_t fill) {
    SegMask out(mask.h, mask.w, fill);
    for (int y = 0; y < mask.h; ++y) {
        for (int x = 0; x < mask.w; ++x) {
            const Point q = transform_point(t, {static_cast<double>(x), static_cast<double>(y)});
            out.at(y, x) = sample_nearest(mask, q.x, q.y, fill);
        }
    }
    return out;
}

GrayF feather_alpha(const GrayF& mask, int radius) {
    if (radius < 0) throw std::invalid_argument("feather_alpha: negative radius");
    if (radius == 0) return mask;

    // Circularly truncated kernel keeps the blend band inside the Euclidean
    // radius, which is what the conservation contract measures.
    const double sigma = radius / 2.0;
    const int k = radius;
    std::vector<double> weights;
    weights.reserve((2 * k + 1) * (2 * k + 1));
    double wsum = 0.0;
    for (int dy = -k; dy <= k; ++dy) {
        for (int dx = -k; dx <= k; ++dx) {
            const double d2 = dx * dx + dy * dy;
            const double w = d2 <= static_cast<double>(radius) * radius
                                 ? std::exp(-d2 / (2.0 * sigma * sigma))
                                 : 0.0;
            weights.push_back(w);
            wsum += w;
        }
    }

    // Normalization happens after accumulation: a neighborhood of uniform
    // mask value m sums to wsum*m in the same addition order as wsum itself,
    // so alpha is exactly 0 or 1 there.
    GrayF out(mask.h, mask.w);
    for (int y = 0; y < mask.h; ++y) {
        for (int x = 0; x < mask.w; ++x) {
            double acc = 0.0;
            std::size_t wi = 0;
            for (int dy = -k; dy <= k; ++dy) {
                const int yy = std::clamp(y + dy, 0, mask.h - 1);
                for (int dx = -k; dx <= k; ++dx, ++wi) {
                    const int xx = std::clamp(x + dx, 0, mask.w - 1);
                    acc += weights[wi] * mask.at(yy, xx);
                }
            }
            out.at(y, x) = acc / wsum;
        }
    }
    return out;
}

Image gaussian_feather_composite(const Image& base, const Image& donor, const GrayF& mask,
                                 int radius) {
    if (!base.same_shape(donor)) {
        throw std::invalid_argument("gaussian_feather_composite: base/donor dimensions differ");
    }
    if (mask.h != base.h || mask.w != base.w) {
        throw std::invalid_argument("gaussian_feather_composite: mask dimensions differ");
    }
    const GrayF alpha = feather_alpha(mask, radius);
    Image out(base.h, base.w);
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < base.h; ++y) {
            for (int x = 0; x < base.w; ++x) {
                const double a = alpha.at(y, x);
                out.at(c, y, x) = a * donor.at(c, y, x) + (1.0 - a) * base.at(c, y, x);
            }
        }
    }
    return out;
}

}  // namespace ptv::warp
