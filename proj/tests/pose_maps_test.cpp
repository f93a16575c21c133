// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "csivid/binio.hpp"
#include "csivid/pose_maps.hpp"
#include "csivid/rng.hpp"
#include "testutil.hpp"

namespace csivid {
namespace {

Skeleton single_keypoint(KeypointKind kind, double x, double y) {
    Skeleton s;
    s.at(kind) = {x, y, true, 1.0};
    return s;
}

/// Upright stick figure with all 14 keypoints at integer pixel positions.
Skeleton standing_figure(double ox, double oy) {
    using K = KeypointKind;
    Skeleton s;
    const auto put = [&](K k, double x, double y) { s.at(k) = {x, y, true, 1.0}; };
    put(K::kNose, ox, oy);
    put(K::kNeck, ox, oy + 6);
    put(K::kRShoulder, ox - 5, oy + 6);
    put(K::kRElbow, ox - 6, oy + 13);
    put(K::kRWrist, ox - 6, oy + 20);
    put(K::kLShoulder, ox + 5, oy + 6);
    put(K::kLElbow, ox + 6, oy + 13);
    put(K::kLWrist, ox + 6, oy + 20);
    put(K::kRHip, ox - 3, oy + 20);
    put(K::kRKnee, ox - 3, oy + 28);
    put(K::kLHip, ox + 3, oy + 20);
    put(K::kLKnee, ox + 3, oy + 28);
    put(K::kRAnkle, ox - 3, oy + 36);
    put(K::kLAnkle, ox + 3, oy + 36);
    return s;
}

TEST(Topology, CanonicalIsASpanningTree) {
    const auto& topo = LimbTopology::canonical();
    EXPECT_EQ(LimbTopology::kNumLimbs, 13);
    EXPECT_EQ(kNumPafChannels, 26);
    // 13 edges over 14 nodes touching every keypoint exactly forms a tree
    std::set<int> touched;
    std::vector<int> parent(kNumKeypoints);
    for (int i = 0; i < kNumKeypoints; ++i) parent[static_cast<std::size_t>(i)] = i;
    const auto find = [&](int i) {
        while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)];
        return i;
    };
    for (const auto& [a, b] : topo.limbs) {
        touched.insert(static_cast<int>(a));
        touched.insert(static_cast<int>(b));
        const int ra = find(static_cast<int>(a));
        const int rb = find(static_cast<int>(b));
        EXPECT_NE(ra, rb) << "limb closes a cycle";
        parent[static_cast<std::size_t>(ra)] = rb;
    }
    EXPECT_EQ(touched.size(), static_cast<std::size_t>(kNumKeypoints));
}

TEST(Topology, KeypointNames) {
    EXPECT_EQ(keypoint_name(KeypointKind::kNose), "Nose");
    EXPECT_EQ(keypoint_name(KeypointKind::kNeck), "Neck");
    EXPECT_EQ(keypoint_name(KeypointKind::kLAnkle), "LAnkle");
}

TEST(RenderJhm, GaussianOracleAtIntegerKeypoint) {
    const auto s = single_keypoint(KeypointKind::kNose, 10.0, 7.0);
    const auto jhm = render_jhm(std::vector<Skeleton>{s}, 2.0, 16, 24);
    EXPECT_DOUBLE_EQ(jhm.at(0, 7, 10), 1.0);
    EXPECT_DOUBLE_EQ(jhm.at(0, 7, 11), std::exp(-1.0 / 8.0));
    EXPECT_DOUBLE_EQ(jhm.at(0, 9, 10), std::exp(-4.0 / 8.0));
    EXPECT_DOUBLE_EQ(jhm.at(0, 9, 11), std::exp(-5.0 / 8.0));
}

TEST(RenderJhm, SubpixelKeypoint) {
    const auto s = single_keypoint(KeypointKind::kNeck, 10.5, 7.0);
    const auto jhm = render_jhm(std::vector<Skeleton>{s}, 2.0, 16, 24);
    EXPECT_DOUBLE_EQ(jhm.at(1, 7, 10), std::exp(-0.25 / 8.0));
    EXPECT_DOUBLE_EQ(jhm.at(1, 7, 11), std::exp(-0.25 / 8.0));
}

TEST(RenderJhm, OverlapMergesByMaxNotSum) {
    const auto a = single_keypoint(KeypointKind::kNose, 5.0, 4.0);
    const auto b = single_keypoint(KeypointKind::kNose, 9.0, 4.0);
    const auto jhm = render_jhm(std::vector<Skeleton>{a, b}, 2.0, 9, 16);
    // midpoint is 2 px from both peaks
    EXPECT_DOUBLE_EQ(jhm.at(0, 4, 7), std::exp(-4.0 / 8.0));
}

TEST(RenderJhm, InvisibleKeypointLeavesChannelEmpty) {
    Skeleton s = single_keypoint(KeypointKind::kNose, 5.0, 5.0);
    const auto jhm = render_jhm(std::vector<Skeleton>{s}, 2.0, 12, 12);
    for (int y = 0; y < 12; ++y) {
        for (int x = 0; x < 12; ++x) EXPECT_EQ(jhm.at(1, y, x), 0.0);
    }
}

TEST(RenderJhm, ValuesStayInUnitInterval) {
    Rng rng(11);
    std::vector<Skeleton> persons;
    for (int p = 0; p < 4; ++p) {
        Skeleton s;
        for (auto& j : s.joints) j = {rng.uniform(0.0, 32.0), rng.uniform(0.0, 24.0), true, 1.0};
        persons.push_back(s);
    }
    const auto jhm = render_jhm(persons, 2.0, 24, 32);
    for (const double v : jhm.data) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(RenderPaf, HorizontalLimbUnitVector) {
    using K = KeypointKind;
    Skeleton s;
    s.at(K::kRShoulder) = {2.0, 5.0, true, 1.0};
    s.at(K::kRElbow) = {12.0, 5.0, true, 1.0};
    const auto paf = render_paf(std::vector<Skeleton>{s}, LimbTopology::canonical(), 2.0, 16, 16);
    // limb 2 is RShoulder -> RElbow, channels 4 and 5
    EXPECT_DOUBLE_EQ(paf.at(4, 5, 7), 1.0);
    EXPECT_DOUBLE_EQ(paf.at(5, 5, 7), 0.0);
    EXPECT_DOUBLE_EQ(paf.at(4, 7, 7), 1.0);   // 2 px off axis, still inside
    EXPECT_DOUBLE_EQ(paf.at(4, 8, 7), 0.0);   // 3 px off axis, outside
    EXPECT_DOUBLE_EQ(paf.at(4, 5, 14), 1.0);  // 2 px past the far endpoint
    EXPECT_DOUBLE_EQ(paf.at(4, 5, 15), 0.0);
}

TEST(RenderPaf, DiagonalLimbUnitVector) {
    using K = KeypointKind;
    Skeleton s;
    s.at(K::kNeck) = {3.0, 3.0, true, 1.0};
    s.at(K::kNose) = {9.0, 9.0, true, 1.0};
    const auto paf = render_paf(std::vector<Skeleton>{s}, LimbTopology::canonical(), 2.0, 16, 16);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    EXPECT_DOUBLE_EQ(paf.at(0, 6, 6), inv_sqrt2);
    EXPECT_DOUBLE_EQ(paf.at(1, 6, 6), inv_sqrt2);
}

TEST(RenderPaf, OpposingLimbsAverageToZero) {
    using K = KeypointKind;
    Skeleton right, left;
    right.at(K::kRShoulder) = {2.0, 5.0, true, 1.0};
    right.at(K::kRElbow) = {12.0, 5.0, true, 1.0};
    left.at(K::kRShoulder) = {12.0, 5.0, true, 1.0};
    left.at(K::kRElbow) = {2.0, 5.0, true, 1.0};
    const auto paf = render_paf(std::vector<Skeleton>{right, left}, LimbTopology::canonical(), 2.0,
                                16, 16);
    EXPECT_DOUBLE_EQ(paf.at(4, 5, 7), 0.0);
    EXPECT_DOUBLE_EQ(paf.at(5, 5, 7), 0.0);
}

TEST(RenderPaf, InvisibleEndpointSkipsLimb) {
    using K = KeypointKind;
    Skeleton s;
    s.at(K::kRShoulder) = {2.0, 5.0, true, 1.0};
    s.at(K::kRElbow) = {12.0, 5.0, false, 0.0};
    const auto paf = render_paf(std::vector<Skeleton>{s}, LimbTopology::canonical(), 2.0, 16, 16);
    for (const double v : paf.data) EXPECT_EQ(v, 0.0);
}

TEST(RenderPaf, VectorMagnitudeBounded) {
    Rng rng(13);
    std::vector<Skeleton> persons;
    for (int p = 0; p < 3; ++p) {
        Skeleton s;
        for (auto& j : s.joints) j = {rng.uniform(0.0, 31.0), rng.uniform(0.0, 23.0), true, 1.0};
        persons.push_back(s);
    }
    const auto paf = render_paf(persons, LimbTopology::canonical(), 2.0, 24, 32);
    for (int l = 0; l < LimbTopology::kNumLimbs; ++l) {
        for (int y = 0; y < 24; ++y) {
            for (int x = 0; x < 32; ++x) {
                const double vx = paf.at(2 * l, y, x);
                const double vy = paf.at(2 * l + 1, y, x);
                EXPECT_LE(vx * vx + vy * vy, 1.0 + 1e-12);
            }
        }
    }
}

Jhm blank_jhm(int h, int w) {
    Jhm jhm;
    jhm.height = h;
    jhm.width = w;
    jhm.data.assign(static_cast<std::size_t>(kNumKeypoints) * h * w, 0.0);
    return jhm;
}

TEST(NmsPeaks, FindsIsolatedMaxima) {
    auto jhm = blank_jhm(10, 10);
    jhm.at(0, 3, 4) = 0.9;
    jhm.at(0, 3, 5) = 0.5;
    jhm.at(0, 7, 8) = 0.8;
    const auto peaks = nms_peaks(jhm, 0, 0.1);
    ASSERT_EQ(peaks.size(), 2u);
    EXPECT_EQ(peaks[0].x, 4.0);
    EXPECT_EQ(peaks[0].y, 3.0);
    EXPECT_DOUBLE_EQ(peaks[0].score, 0.9);
    EXPECT_EQ(peaks[1].x, 8.0);
    EXPECT_EQ(peaks[1].y, 7.0);
}

TEST(NmsPeaks, ThresholdExcludesWeakMaxima) {
    auto jhm = blank_jhm(10, 10);
    jhm.at(0, 3, 4) = 0.9;
    jhm.at(0, 7, 8) = 0.05;
    EXPECT_EQ(nms_peaks(jhm, 0, 0.1).size(), 1u);
    // the threshold comparison is strict
    auto flat = blank_jhm(10, 10);
    flat.at(0, 5, 5) = 0.1;
    EXPECT_TRUE(nms_peaks(flat, 0, 0.1).empty());
}

TEST(NmsPeaks, PlateauCollapsesToLexMin) {
    auto jhm = blank_jhm(10, 10);
    // 2x2 plateau
    jhm.at(0, 4, 4) = 0.7;
    jhm.at(0, 4, 5) = 0.7;
    jhm.at(0, 5, 4) = 0.7;
    jhm.at(0, 5, 5) = 0.7;
    const auto peaks = nms_peaks(jhm, 0, 0.1);
    ASSERT_EQ(peaks.size(), 1u);
    EXPECT_EQ(peaks[0].x, 4.0);
    EXPECT_EQ(peaks[0].y, 4.0);
}

TEST(NmsPeaks, SeparatePlateausStayDistinct) {
    auto jhm = blank_jhm(10, 16);
    jhm.at(0, 2, 2) = 0.6;
    jhm.at(0, 2, 3) = 0.6;
    jhm.at(0, 2, 12) = 0.6;
    jhm.at(0, 2, 13) = 0.6;
    const auto peaks = nms_peaks(jhm, 0, 0.1);
    ASSERT_EQ(peaks.size(), 2u);
    EXPECT_EQ(peaks[0].x, 2.0);
    EXPECT_EQ(peaks[1].x, 12.0);
}

TEST(NmsPeaks, EdgePeakUsesInBoundsNeighborsOnly) {
    auto jhm = blank_jhm(8, 8);
    jhm.at(0, 0, 0) = 0.5;
    const auto peaks = nms_peaks(jhm, 0, 0.1);
    ASSERT_EQ(peaks.size(), 1u);
    EXPECT_EQ(peaks[0].x, 0.0);
    EXPECT_EQ(peaks[0].y, 0.0);
}

TEST(PafLineScore, PerfectlyAlignedLimbScoresOne) {
    using K = KeypointKind;
    Skeleton s;
    s.at(K::kRShoulder) = {2.0, 5.0, true, 1.0};
    s.at(K::kRElbow) = {12.0, 5.0, true, 1.0};
    const auto paf = render_paf(std::vector<Skeleton>{s}, LimbTopology::canonical(), 2.0, 16, 16);
    const PeakCandidate a{2.0, 5.0, 1.0};
    const PeakCandidate b{12.0, 5.0, 1.0};
    EXPECT_NEAR(paf_line_score(a, b, paf, 2, 10), 1.0, 1e-12);
    // reversed direction scores -1
    EXPECT_NEAR(paf_line_score(b, a, paf, 2, 10), -1.0, 1e-12);
}

TEST(PafLineScore, DegenerateSegmentScoresZero) {
    Paf paf;
    paf.height = 8;
    paf.width = 8;
    paf.data.assign(static_cast<std::size_t>(kNumPafChannels) * 64, 1.0);
    const PeakCandidate a{3.0, 3.0, 1.0};
    const PeakCandidate b{3.5, 3.0, 1.0};
    EXPECT_EQ(paf_line_score(a, b, paf, 0, 10), 0.0);
}

TEST(PafLineScore, EmptyFieldScoresZero) {
    Paf paf;
    paf.height = 8;
    paf.width = 8;
    paf.data.assign(static_cast<std::size_t>(kNumPafChannels) * 64, 0.0);
    const PeakCandidate a{1.0, 1.0, 1.0};
    const PeakCandidate b{6.0, 6.0, 1.0};
    EXPECT_EQ(paf_line_score(a, b, paf, 0, 10), 0.0);
}

TEST(Assemble, RecoversTwoSeparatedFigures) {
    const auto left = standing_figure(12.0, 4.0);
    const auto right = standing_figure(52.0, 4.0);
    const std::vector<Skeleton> persons{left, right};
    const auto jhm = render_jhm(persons, 2.0, 48, 64);
    const auto paf = render_paf(persons, LimbTopology::canonical(), 2.0, 48, 64);
    const auto out = assemble_skeletons(jhm, paf, LimbTopology::canonical());
    ASSERT_EQ(out.size(), 2u);
    // output order follows the smallest peak id, so the left figure is first
    for (int k = 0; k < kNumKeypoints; ++k) {
        const auto kind = static_cast<KeypointKind>(k);
        EXPECT_TRUE(out[0].at(kind).visible);
        EXPECT_DOUBLE_EQ(out[0].at(kind).x, left.at(kind).x);
        EXPECT_DOUBLE_EQ(out[0].at(kind).y, left.at(kind).y);
        EXPECT_TRUE(out[1].at(kind).visible);
        EXPECT_DOUBLE_EQ(out[1].at(kind).x, right.at(kind).x);
        EXPECT_DOUBLE_EQ(out[1].at(kind).y, right.at(kind).y);
    }
}

TEST(Assemble, SingleFigureRoundTrip) {
    const auto person = standing_figure(20.0, 4.0);
    const std::vector<Skeleton> persons{person};
    const auto jhm = render_jhm(persons, 2.0, 48, 40);
    const auto paf = render_paf(persons, LimbTopology::canonical(), 2.0, 48, 40);
    const auto out = assemble_skeletons(jhm, paf, LimbTopology::canonical());
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].visible_count(), kNumKeypoints);
}

TEST(Assemble, GroupsBelowMinKeypointsDropped) {
    using K = KeypointKind;
    Skeleton s;
    s.at(K::kNose) = {10.0, 5.0, true, 1.0};
    s.at(K::kNeck) = {10.0, 11.0, true, 1.0};
    const std::vector<Skeleton> persons{s};
    const auto jhm = render_jhm(persons, 2.0, 24, 24);
    const auto paf = render_paf(persons, LimbTopology::canonical(), 2.0, 24, 24);
    const auto out = assemble_skeletons(jhm, paf, LimbTopology::canonical());
    EXPECT_TRUE(out.empty());  // two connected keypoints sit below the default minimum of 3
}

TEST(Assemble, EmptyMapsGiveNoSkeletons) {
    const auto jhm = blank_jhm(16, 16);
    Paf paf;
    paf.height = 16;
    paf.width = 16;
    paf.data.assign(static_cast<std::size_t>(kNumPafChannels) * 256, 0.0);
    EXPECT_TRUE(assemble_skeletons(jhm, paf, LimbTopology::canonical()).empty());
}

TEST(VisibleCount, CountsOnlyVisible) {
    Skeleton s;
    EXPECT_EQ(s.visible_count(), 0);
    s.at(KeypointKind::kNose) = {1.0, 1.0, true, 1.0};
    s.at(KeypointKind::kNeck) = {1.0, 2.0, true, 1.0};
    EXPECT_EQ(s.visible_count(), 2);
}

TEST(MapFiles, JhmRoundTripExactForF32Values) {
    test::TempDir dir;
    Rng rng(17);
    Jhm jhm;
    jhm.height = 6;
    jhm.width = 7;
    jhm.data.resize(static_cast<std::size_t>(kNumKeypoints) * 42);
    for (auto& v : jhm.data) v = static_cast<float>(rng.uniform());
    const auto path = dir / "maps.jhm";
    write_jhm_file(path, jhm);
    const auto back = read_jhm_file(path);
    EXPECT_EQ(back.height, 6);
    EXPECT_EQ(back.width, 7);
    EXPECT_EQ(back.data, jhm.data);
}

TEST(MapFiles, PafRoundTrip) {
    test::TempDir dir;
    Paf paf;
    paf.height = 4;
    paf.width = 5;
    paf.data.resize(static_cast<std::size_t>(kNumPafChannels) * 20);
    for (std::size_t i = 0; i < paf.data.size(); ++i) {
        paf.data[i] = static_cast<float>(std::sin(static_cast<double>(i)));
    }
    const auto path = dir / "maps.paf";
    write_paf_file(path, paf);
    EXPECT_EQ(read_paf_file(path).data, paf.data);
}

TEST(MapFiles, ChannelCountMismatchThrows) {
    test::TempDir dir;
    Jhm jhm;
    jhm.height = 2;
    jhm.width = 2;
    jhm.data.assign(static_cast<std::size_t>(kNumKeypoints) * 4, 0.0);
    const auto path = dir / "maps.jhm";
    write_jhm_file(path, jhm);
    EXPECT_THROW(read_paf_file(path), ShapeMismatch);
}

TEST(MapFiles, TrailingBytesRejected) {
    test::TempDir dir;
    Jhm jhm;
    jhm.height = 2;
    jhm.width = 2;
    jhm.data.assign(static_cast<std::size_t>(kNumKeypoints) * 4, 0.25);
    const auto path = dir / "maps.jhm";
    write_jhm_file(path, jhm);
    auto bytes = read_file(path);
    bytes.push_back(0);
    write_file_atomic(path, bytes);
    EXPECT_THROW(read_jhm_file(path), TruncatedRecord);
}

}  // namespace
}  // namespace csivid
