// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ptv/pose.hpp"
#include "test_util.hpp"

using namespace ptv;
using namespace ptv::pose;

namespace {

std::string valid_record() {
    Pose p;
    for (int i = 0; i < kNumJoints; ++i) {
        p.joints[i] = {10.0 + i, 20.0 + 2.0 * i, 2};
    }
    return pose_to_json(p);
}

}  // namespace

TEST_SUITE("pose") {

TEST_CASE("load_pose round-trips a valid record") {
    const ParsedPose parsed = load_pose(valid_record());
    CHECK(parsed.warnings.empty());
    CHECK(parsed.pose.joints[0].x == doctest::Approx(10.0));
    CHECK(parsed.pose.joints[17].y == doctest::Approx(54.0));
    CHECK(parsed.pose.visible_count() == 18);

    const ParsedPose again = load_pose(pose_to_json(parsed.pose));
    for (int i = 0; i < kNumJoints; ++i) {
        CHECK(again.pose.joints[i].x == parsed.pose.joints[i].x);
        CHECK(again.pose.joints[i].y == parsed.pose.joints[i].y);
    }
}

TEST_CASE("load_pose rejects wrong joint counts") {
    CHECK_THROWS_WITH_AS(load_pose(R"({"keypoints": [[1,2,1]]})"),
                         doctest::Contains("expected 18 joints"), std::invalid_argument);
}

TEST_CASE("load_pose rejects non-numeric coordinates naming the field") {
    std::string text = R"({"keypoints": [)";
    for (int i = 0; i < 18; ++i) {
        text += i == 3 ? R"([1, "oops", 1])" : "[1, 2, 1]";
        if (i != 17) text += ",";
    }
    text += "]}";
    CHECK_THROWS_WITH_AS(load_pose(text), doctest::Contains("keypoints[3]"), std::invalid_argument);
}

TEST_CASE("load_pose clamps out-of-frame labeled keypoints and reports it") {
    Pose p;
    for (auto& j : p.joints) j = {50.0, 60.0, 1};
    p.joints[4].x = 500.0;
    const ParsedPose parsed = load_pose(pose_to_json(p));
    CHECK(parsed.pose.joints[4].x == doctest::Approx(191.0));
    REQUIRE(parsed.warnings.size() == 1);
    CHECK(parsed.warnings[0].find("keypoints[4]") != std::string::npos);
}

TEST_CASE("oks identity is exactly one") {
    Rng rng(7);
    const SigmaTable sig = SigmaTable::coco_default();
    for (int rep = 0; rep < 20; ++rep) {
        const Pose p = testutil::random_pose(rng, false);
        if (p.visible_count() == 0) continue;
        CHECK(oks(p, p, rng.uniform(1.0, 100.0), sig) == 1.0);
    }
}

TEST_CASE("oks single-joint hand values") {
    const SigmaTable sig = SigmaTable::coco_default();
    const double s = 40.0;

    Pose user;
    user.joints[2] = {50.0, 50.0, 2};  // only the right shoulder visible
    Pose cand = user;
    cand.joints[2].x = 50.0 + s * sig.k[2];  // d = s*k
    CHECK(oks(user, cand, s, sig) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));

    // Two visible joints: one exact, one at d = s*k.
    user.joints[5] = {100.0, 80.0, 1};
    cand.joints[5] = user.joints[5];
    const double expected = (1.0 + std::exp(-0.5)) / 2.0;
    CHECK(oks(user, cand, s, sig) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("oks rejects all-invisible user poses and bad scales") {
    const SigmaTable sig = SigmaTable::coco_default();
    Pose blank;
    Pose other = blank;
    CHECK_THROWS_AS(oks(blank, other, 10.0, sig), std::domain_error);
    Pose one;
    one.joints[0].v = 1;
    CHECK_THROWS_AS(oks(one, other, 0.0, sig), std::invalid_argument);
}

TEST_CASE("oks properties: translation invariance, symmetry, monotonicity") {
    Rng rng(21);
    const SigmaTable sig = SigmaTable::coco_default();
    for (int rep = 0; rep < 50; ++rep) {
        Pose a = testutil::random_pose(rng);
        Pose b = testutil::random_pose(rng);
        const double s = rng.uniform(5.0, 80.0);
        const double base = oks(a, b, s, sig);

        // same-offset translation of both poses (coordinates may leave the
        // frame; distances are what matter)
        Pose a2 = a, b2 = b;
        const double ox = rng.uniform(-20.0, 20.0), oy = rng.uniform(-20.0, 20.0);
        for (int i = 0; i < kNumJoints; ++i) {
            a2.joints[i].x += ox;
            a2.joints[i].y += oy;
            b2.joints[i].x += ox;
            b2.joints[i].y += oy;
        }
        CHECK(oks(a2, b2, s, sig) == doctest::Approx(base).epsilon(1e-12));

        // symmetry under identical visibility flags
        CHECK(oks(b, a, s, sig) == doctest::Approx(base).epsilon(1e-12));

        // increasing one distance never increases the score
        Pose worse = b;
        const int j = rng.uniform_int(0, kNumJoints - 1);
        worse.joints[j].x += (worse.joints[j].x >= a.joints[j].x) ? 15.0 : -15.0;
        worse.joints[j].y += (worse.joints[j].y >= a.joints[j].y) ? 15.0 : -15.0;
        CHECK(oks(a, worse, s, sig) <= base + 1e-15);
    }
}

TEST_CASE("oks matches the independent direct evaluation") {
    Rng rng(99);
    const SigmaTable sig = SigmaTable::coco_default();
    for (int rep = 0; rep < 200; ++rep) {
        const Pose a = testutil::random_pose(rng, false);
        const Pose b = testutil::random_pose(rng, false);
        if (a.visible_count() == 0) continue;
        const double s = rng.uniform(1.0, 120.0);
        CHECK(oks(a, b, s, sig) == doctest::Approx(testutil::oks_reference(a, b, s, sig)).epsilon(1e-12));
    }
}

TEST_CASE("pose_scale is the keypoint bbox size with a floor of one") {
    Pose p;
    p.joints[0] = {10.0, 20.0, 2};
    p.joints[1] = {40.0, 100.0, 2};
    CHECK(pose_scale(p) == doctest::Approx(std::sqrt(30.0 * 80.0)));
    Pose tiny;
    tiny.joints[0] = {10.0, 20.0, 2};
    CHECK(pose_scale(tiny) == 1.0);  // degenerate bbox floors at 1
}

TEST_CASE("select_model_image basics") {
    Rng rng(5);
    const SigmaTable sig = SigmaTable::coco_default();
    const Pose user = testutil::random_pose(rng);
    const double s = pose_scale(user);

    std::vector<CatalogEntry> catalog(1);
    catalog[0].pose = testutil::random_pose(rng);
    catalog[0].garment_id = "g1";
    const SelectionResult only = select_model_image(user, catalog, "g1", s, sig);
    CHECK(only.catalog_index == 0);
    CHECK(only.score == doctest::Approx(oks(user, catalog[0].pose, s, sig)));

    // ties break to the lowest index
    catalog.push_back(catalog[0]);
    const SelectionResult tie = select_model_image(user, catalog, "g1", s, sig);
    CHECK(tie.catalog_index == 0);

    CHECK_THROWS_WITH_AS(select_model_image(user, catalog, "missing", s, sig),
                         doctest::Contains("no candidates"), std::invalid_argument);
}

TEST_CASE("select_model_image agrees with brute force on random catalogs") {
    Rng rng(31);
    const SigmaTable sig = SigmaTable::coco_default();
    for (int rep = 0; rep < 40; ++rep) {
        const Pose user = testutil::random_pose(rng);
        const double s = pose_scale(user);
        const int n = rng.uniform_int(1, 12);
        std::vector<CatalogEntry> catalog(n);
        for (auto& e : catalog) {
            e.pose = testutil::random_pose(rng);
            e.garment_id = "g";
        }
        std::size_t best = 0;
        double best_score = -1.0;
        for (std::size_t i = 0; i < catalog.size(); ++i) {
            const double sc = testutil::oks_reference(user, catalog[i].pose, s, sig);
            if (sc > best_score) {
                best_score = sc;
                best = i;
            }
        }
        const SelectionResult got = select_model_image(user, catalog, "g", s, sig);
        CHECK(got.catalog_index == best);
        CHECK(got.score == doctest::Approx(best_score).epsilon(1e-12));
    }
}

TEST_CASE("encode_heatmaps peaks, gating, and falloff") {
    Pose p;
    p.joints[3] = {96.0, 128.0, 2};
    const double sigma = 6.0;
    const HeatmapStack stack = encode_heatmaps(p, sigma);
    REQUIRE(stack.channels.size() == 18);

    const GrayF& ch = stack.channels[3];
    CHECK(ch.at(128, 96) == 1.0);
    int argmax_x = -1, argmax_y = -1;
    double best = -1.0;
    for (int y = 0; y < kFrameH; ++y) {
        for (int x = 0; x < kFrameW; ++x) {
            if (ch.at(y, x) > best) {
                best = ch.at(y, x);
                argmax_x = x;
                argmax_y = y;
            }
            CHECK(ch.at(y, x) <= 1.0);
        }
    }
    CHECK(argmax_x == 96);
    CHECK(argmax_y == 128);

    // pixel at exactly sigma distance
    CHECK(ch.at(128, 96 + static_cast<int>(sigma)) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));

    // invisible joints produce identically zero channels, visible never do
    for (int i = 0; i < kNumJoints; ++i) {
        double sum = 0.0;
        for (double v : stack.channels[i].data) sum += v;
        if (p.joints[i].v > 0) {
            CHECK(sum > 0.0);
        } else {
            CHECK(sum == 0.0);
        }
    }
}

}  // TEST_SUITE
