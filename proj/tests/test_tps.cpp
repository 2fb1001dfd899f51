// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ptv/tps.hpp"
#include "test_util.hpp"

using namespace ptv;
using namespace ptv::warp;

namespace {

std::vector<Point> random_points(Rng& rng, int n) {
    std::vector<Point> pts(n);
    for (auto& p : pts) {
        p.x = rng.uniform(10.0, kFrameW - 10.0);
        p.y = rng.uniform(10.0, kFrameH - 10.0);
    }
    return pts;
}

bool degenerate(const std::vector<Point>& pts) {
    // duplicated or collinear sets are invalid fixtures for exactness checks
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y;
            if (dx * dx + dy * dy < 4.0) return true;
        }
    }
    double area = 0.0;
    for (std::size_t k = 2; k < pts.size(); ++k) {
        area = std::max(area, std::abs((pts[1].x - pts[0].x) * (pts[k].y - pts[0].y) -
                                       (pts[1].y - pts[0].y) * (pts[k].x - pts[0].x)));
    }
    return area < 25.0;
}

}  // namespace

TEST_SUITE("tps") {

TEST_CASE("identity fit has identity affine and vanishing radial weights") {
    Rng rng(11);
    std::vector<Point> src;
    do {
        src = random_points(rng, 6);
    } while (degenerate(src));
    const TpsTransform t = fit_tps(src, src, 0.0);
    CHECK(t.affine[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(t.affine[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(t.affine[2] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(t.affine[3] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(t.affine[4] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(t.affine[5] == doctest::Approx(1.0).epsilon(1e-9));
    for (const auto& w : t.radial_weights) {
        CHECK(std::abs(w[0]) <= 1e-10);
        CHECK(std::abs(w[1]) <= 1e-10);
    }
}

TEST_CASE("pure translation maps every queried point by the offset") {
    Rng rng(13);
    std::vector<Point> src;
    do {
        src = random_points(rng, 5);
    } while (degenerate(src));
    std::vector<Point> dst = src;
    for (auto& p : dst) p.x += 10.0;
    const TpsTransform t = fit_tps(src, dst, 0.0);
    for (int rep = 0; rep < 20; ++rep) {
        const Point q{rng.uniform(0.0, kFrameW - 1.0), rng.uniform(0.0, kFrameH - 1.0)};
        const Point m = transform_point(t, q);
        CHECK(m.x == doctest::Approx(q.x + 10.0).epsilon(1e-6));
        CHECK(m.y == doctest::Approx(q.y).epsilon(1e-6));
    }
}

TEST_CASE("random control sets interpolate exactly at regularization zero") {
    Rng rng(17);
    for (int rep = 0; rep < 25; ++rep) {
        const int n = rng.uniform_int(3, 25);
        std::vector<Point> src, dst;
        do {
            src = random_points(rng, n);
        } while (degenerate(src));
        dst = src;
        for (auto& p : dst) {
            p.x += rng.uniform(-15.0, 15.0);
            p.y += rng.uniform(-15.0, 15.0);
        }
        const TpsTransform t = fit_tps(src, dst, 0.0);
        for (int i = 0; i < n; ++i) {
            const Point m = transform_point(t, src[i]);
            CHECK(std::abs(m.x - dst[i].x) < 1e-6);
            CHECK(std::abs(m.y - dst[i].y) < 1e-6);
        }
        // side conditions: radial weights orthogonal to 1, x, y
        double s0 = 0, sx = 0, sy = 0, t0 = 0, tx = 0, ty = 0;
        for (int i = 0; i < n; ++i) {
            s0 += t.radial_weights[i][0];
            sx += t.radial_weights[i][0] * src[i].x;
            sy += t.radial_weights[i][0] * src[i].y;
            t0 += t.radial_weights[i][1];
            tx += t.radial_weights[i][1] * src[i].x;
            ty += t.radial_weights[i][1] * src[i].y;
        }
        CHECK(std::abs(s0) < 1e-8);
        CHECK(std::abs(sx) < 1e-8);
        CHECK(std::abs(sy) < 1e-8);
        CHECK(std::abs(t0) < 1e-8);
        CHECK(std::abs(tx) < 1e-8);
        CHECK(std::abs(ty) < 1e-8);
    }
}

TEST_CASE("three control points give an exactly affine map") {
    Rng rng(19);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<Point> src;
        do {
            src = random_points(rng, 3);
        } while (degenerate(src));
        std::vector<Point> dst = src;
        for (auto& p : dst) {
            p.x += rng.uniform(-20.0, 20.0);
            p.y += rng.uniform(-20.0, 20.0);
        }
        const TpsTransform t = fit_tps(src, dst, 0.0);
        for (const auto& w : t.radial_weights) {
            CHECK(std::abs(w[0]) <= 1e-10);
            CHECK(std::abs(w[1]) <= 1e-10);
        }
    }
}

TEST_CASE("degenerate inputs are rejected") {
    std::vector<Point> line = {{10, 10}, {20, 20}, {30, 30}, {40, 40}};
    CHECK_THROWS_AS(fit_tps(line, line, 0.0), std::invalid_argument);

    std::vector<Point> two = {{10, 10}, {20, 25}};
    CHECK_THROWS_AS(fit_tps(two, two, 0.0), std::invalid_argument);

    std::vector<Point> src = {{10, 10}, {100, 15}, {50, 120}};
    std::vector<Point> dst = {{10, 10}, {100, 15}};
    CHECK_THROWS_AS(fit_tps(src, dst, 0.0), std::invalid_argument);
}

TEST_CASE("regularization monotonically non-increases bending energy") {
    Rng rng(23);
    std::vector<Point> src;
    do {
        src = random_points(rng, 12);
    } while (degenerate(src));
    std::vector<Point> dst = src;
    for (auto& p : dst) {
        p.x += rng.uniform(-25.0, 25.0);
        p.y += rng.uniform(-25.0, 25.0);
    }
    double prev = std::numeric_limits<double>::infinity();
    for (const double reg : {0.0, 0.5, 2.0, 10.0, 100.0}) {
        const double e = bending_energy(fit_tps(src, dst, reg));
        CHECK(e <= prev + 1e-9);
        prev = e;
    }
}

TEST_CASE("apply_tps identity and integer shift") {
    Rng rng(29);
    const Image img = testutil::random_image(rng);

    const Image same = apply_tps(TpsTransform::identity(), img);
    double max_diff = 0.0;
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        max_diff = std::max(max_diff, std::abs(same.data[i] - img.data[i]));
    }
    CHECK(max_diff <= 1e-6);

    // transform maps output coords to input coords: +10 shifts content left
    TpsTransform shift = TpsTransform::identity();
    shift.affine[0] = 10.0;
    const Image shifted = apply_tps(shift, img, 0.25);
    for (int y = 0; y < img.h; ++y) {
        for (int x = 0; x < img.w; ++x) {
            for (int c = 0; c < 3; ++c) {
                if (x + 10 < img.w) {
                    CHECK(shifted.at(c, y, x) == doctest::Approx(img.at(c, y, x + 10)).epsilon(1e-12));
                } else {
                    CHECK(shifted.at(c, y, x) == 0.25);
                }
            }
        }
    }
}

TEST_CASE("warp then inverse-fitted warp approximates identity on smooth images") {
    Rng rng(37);
    std::vector<Point> src;
    do {
        src = random_points(rng, 8);
    } while (degenerate(src));
    std::vector<Point> dst = src;
    for (auto& p : dst) {
        p.x += rng.uniform(-6.0, 6.0);
        p.y += rng.uniform(-6.0, 6.0);
    }
    const Image img = testutil::smooth_image();
    const TpsTransform fwd = fit_tps(src, dst, 0.0);
    const TpsTransform inv = fit_tps(dst, src, 0.0);
    const Image round = apply_tps(inv, apply_tps(fwd, img));

    double acc = 0.0;
    int count = 0;
    for (int c = 0; c < 3; ++c) {
        for (int y = 24; y < kFrameH - 24; ++y) {
            for (int x = 24; x < kFrameW - 24; ++x) {
                acc += std::abs(round.at(c, y, x) - img.at(c, y, x));
                ++count;
            }
        }
    }
    CHECK(acc / count < 0.01);
}

TEST_CASE("feathered composite honors masks and stays in range") {
    Rng rng(41);
    const Image base = testutil::random_image(rng);
    const Image donor = testutil::random_image(rng);

    GrayF zeros(kFrameH, kFrameW, 0.0);
    const Image keep = gaussian_feather_composite(base, donor, zeros, 3);
    CHECK(keep.data == base.data);

    GrayF ones(kFrameH, kFrameW, 1.0);
    const Image swap = gaussian_feather_composite(base, donor, ones, 0);
    CHECK(swap.data == donor.data);

    // idempotence with uniform masks at nonzero radius too
    const Image swap_f = gaussian_feather_composite(base, donor, ones, 5);
    CHECK(swap_f.data == donor.data);

    GrayF bad(10, 10, 0.0);
    CHECK_THROWS_AS(gaussian_feather_composite(base, donor, bad, 2), std::invalid_argument);
}

TEST_CASE("half-plane feather follows the direct convolution profile") {
    const int radius = 4;
    GrayF mask(kFrameH, kFrameW, 0.0);
    const int edge = 96;  // mask = 1 where x >= edge
    for (int y = 0; y < kFrameH; ++y) {
        for (int x = edge; x < kFrameW; ++x) mask.at(y, x) = 1.0;
    }
    const GrayF alpha = feather_alpha(mask, radius);

    // direct truncated-Gaussian convolution at a row far from the border
    const double sigma = radius / 2.0;
    const int y0 = kFrameH / 2;
    for (int x = edge - 2 * radius; x <= edge + 2 * radius; ++x) {
        double acc = 0.0, wsum = 0.0;
        for (int dy = -radius; dy <= radius; ++dy) {
            for (int dx = -radius; dx <= radius; ++dx) {
                const double d2 = dx * dx + dy * dy;
                if (d2 > radius * radius) continue;
                const double w = std::exp(-d2 / (2.0 * sigma * sigma));
                wsum += w;
                if (x + dx >= edge) acc += w;
            }
        }
        CHECK(alpha.at(y0, x) == doctest::Approx(acc / wsum).epsilon(1e-9));
    }

    // beyond the radius the blend is exact
    Rng rng(43);
    const Image base = testutil::random_image(rng);
    const Image donor = testutil::random_image(rng);
    const Image out = gaussian_feather_composite(base, donor, mask, radius);
    for (int y = 0; y < kFrameH; ++y) {
        for (int c = 0; c < 3; ++c) {
            for (int x = 0; x < edge - radius - 1; ++x) {
                CHECK(out.at(c, y, x) == base.at(c, y, x));
            }
            for (int x = edge + radius + 1; x < kFrameW; ++x) {
                CHECK(out.at(c, y, x) == donor.at(c, y, x));
            }
        }
    }

    // range preservation
    for (double v : out.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

}  // TEST_SUITE
