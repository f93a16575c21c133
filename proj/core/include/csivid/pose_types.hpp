// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "csivid/errors.hpp"

namespace csivid {

/// The 14 tracked body keypoints. Channel c of a JHM corresponds to kind c.
enum class KeypointKind : int {
    kNose = 0,
    kNeck,
    kRShoulder,
    kRElbow,
    kRWrist,
    kLShoulder,
    kLElbow,
    kLWrist,
    kRHip,
    kRKnee,
    kLHip,
    kLKnee,
    kRAnkle,
    kLAnkle,
};

constexpr int kNumKeypoints = 14;

std::string_view keypoint_name(KeypointKind kind);

struct Keypoint {
    double x = 0.0;
    double y = 0.0;
    bool visible = false;
    double confidence = 0.0;
};

/// One person's 2-D keypoints in pixel coordinates.
struct Skeleton {
    std::array<Keypoint, kNumKeypoints> joints{};

    Keypoint& at(KeypointKind k) { return joints[static_cast<std::size_t>(k)]; }
    const Keypoint& at(KeypointKind k) const { return joints[static_cast<std::size_t>(k)]; }
    int visible_count() const;
};

/// The limb tree connecting the 14 keypoints; limb l occupies PAF channels
/// (2l, 2l+1) = (x, y) components.
struct LimbTopology {
    static constexpr int kNumLimbs = 13;
    std::array<std::pair<KeypointKind, KeypointKind>, kNumLimbs> limbs;

    /// The neck-rooted spanning tree used throughout this project.
    static const LimbTopology& canonical();
};

constexpr int kNumPafChannels = 2 * LimbTopology::kNumLimbs;

/// 14-channel joint heat map, values in [0, 1].
struct Jhm {
    int height = 0;
    int width = 0;
    std::vector<double> data;  // kNumKeypoints * height * width

    double at(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    double& at(int c, int y, int x) {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
};

/// 26-channel part affinity field; rendered fields keep per-pixel limb
/// vector magnitude <= 1.
struct Paf {
    int height = 0;
    int width = 0;
    std::vector<double> data;  // kNumPafChannels * height * width

    double at(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    double& at(int c, int y, int x) {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
};

}  // namespace csivid
