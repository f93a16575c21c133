// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "csivid/csi.hpp"
#include "csivid/image.hpp"
#include "csivid/kvconfig.hpp"
#include "csivid/pose_types.hpp"

namespace csivid {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

double norm(const Vec3& v);
double distance(const Vec3& a, const Vec3& b);

/// Room, radio and capture geometry for one simulated session. Antenna
/// arrays are linear (3 elements, `antenna_spacing_m` apart along x), the
/// transmitter left of the room midline near the y=0 wall, the receiver
/// right of the midline near the far wall. The lateral and height offsets
/// between the arrays keep mirror-image walker positions distinguishable
/// in the channel amplitudes.
struct SceneConfig {
    double room_w = 8.0;   // x extent, meters
    double room_d = 16.0;  // y extent
    double room_h = 3.0;   // z extent
    double antenna_spacing_m = 0.026;
    double carrier_hz = 5.6e9;
    double bandwidth_hz = 20e6;
    int n_subcarriers = 30;
    double csi_rate_hz = 100.0;
    double fps = 7.5;
    int n_persons = 1;
    double duration_s = 10.0;
    std::uint64_t seed = 0;
    int frame_height = 128;
    int frame_width = 256;
    double limb_thickness_px = 3.0;
    double v_max = 3.0;  // m/s bound on any keypoint

    std::array<Vec3, 3> tx_antennas() const;
    std::array<Vec3, 3> rx_antennas() const;

    /// Subcarrier frequency f_k = carrier - bw/2 + k * bw / (n - 1).
    double subcarrier_hz(int k) const;

    /// Throws UsageError / GeometryError on out-of-range settings.
    void validate() const;
};

SceneConfig scene_from_kv(const KvConfig& kv);
KvConfig scene_to_kv(const SceneConfig& scene);

/// Pinhole camera on the receiver wall looking down -y. u grows with -x
/// (mirror view), v grows downward.
struct CameraModel {
    Vec3 position;
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
};

CameraModel default_camera(const SceneConfig& scene);

/// Projects a world point; `visible` is false behind the camera or outside
/// the frame bounds.
Keypoint project_point(const CameraModel& cam, const Vec3& p);

/// 3-D body pose: one world point per keypoint kind.
struct PersonPose3 {
    std::array<Vec3, kNumKeypoints> joints{};

    const Vec3& at(KeypointKind k) const { return joints[static_cast<std::size_t>(k)]; }
    Vec3& at(KeypointKind k) { return joints[static_cast<std::size_t>(k)]; }
};

/// Segment lengths (meters) shared by every simulated person.
struct BodyShape {
    double hip_half_width = 0.11;
    double shoulder_half_width = 0.19;
    double hip_height = 0.92;
    double spine = 0.52;       // hip center to neck
    double neck_to_nose = 0.17;
    double upper_arm = 0.28;
    double forearm = 0.26;
    double thigh = 0.45;
    double shin = 0.42;
};

enum class ActionKind { kWalk = 0, kSit, kWave, kDrift };

/// Person i performs action i mod 4. Deterministic in (scene.seed, i, t).
ActionKind person_action(int person_index);
PersonPose3 person_pose(const SceneConfig& scene, int person_index, double t);

/// Scatterer positions for the radio model: the 13 limb midpoints in
/// canonical limb order, then the head (nose). 14 per person.
constexpr int kScatterersPerPerson = 14;
std::array<Vec3, kScatterersPerPerson> body_scatterers(const PersonPose3& pose);

/// One CSI tick: all person poses at that instant.
struct SceneTick {
    std::int64_t timestamp_us = 0;
    std::vector<PersonPose3> poses;
};

/// One video frame: projected 2-D skeletons at that instant.
struct SceneFrame {
    std::int64_t frame_id = 0;
    std::int64_t timestamp_us = 0;
    std::vector<Skeleton> persons;
    std::vector<PersonPose3> poses;
};

struct Trajectories {
    std::vector<SceneTick> ticks;    // CSI grid, llround(1e6 / rate) us apart
    std::vector<SceneFrame> frames;  // video grid, llround(m * 1e6 / fps)
};

Trajectories gen_trajectories(const SceneConfig& scene);

/// Static multipath plus per-person body scattering.
struct StaticPath {
    double delay_s = 0.0;
    Complex gain;
};

struct ChannelModel {
    std::vector<StaticPath> static_paths;
    std::array<Complex, kScatterersPerPerson> scatterer_gains;
    double noise_std = 0.0;  // total complex noise std per sample

    ChannelModel();
    static ChannelModel default_office();
};

/// Frequency response for one (tx, rx, subcarrier) triple given the
/// scatterer positions; exposed for closed-form checks.
Complex channel_response(const Vec3& tx, const Vec3& rx, double freq_hz,
                         const ChannelModel& channel, const std::vector<PersonPose3>& poses);

/// Simulates every tick. Noise draws come from Rng::forked(scene.seed, salt)
/// in tick / tx / rx / subcarrier order, so equal seeds give equal streams.
/// Throws GeometryError if any joint leaves the room.
CsiSequence simulate_csi(const SceneConfig& scene, const ChannelModel& channel,
                         const Trajectories& traj);

/// Fixed background gradient; person pixels always differ from it.
Image render_background(int height, int width);

/// Identity color for person i (stable palette).
std::array<std::uint8_t, 3> identity_color(int person_index);

struct RenderedFrame {
    Image frame;                     // RGB
    std::vector<std::uint8_t> mask;  // 0/1, exactly the painted pixels
};

/// Stick figures over the background, persons drawn in ascending index
/// order (later overwrites). No anti-aliasing; the mask is exactly the set
/// of painted pixels.
RenderedFrame render_frame(const SceneConfig& scene, const std::vector<Skeleton>& persons);

/// Writes csi.csil, frames/NNNNNN.png, masks/NNNNNN.png, keypoints.jsonl,
/// meta.txt and background.png under `dir`. Reruns with the same scene and
/// channel are byte-identical.
void emit_dataset(const SceneConfig& scene, const ChannelModel& channel,
                  const std::filesystem::path& dir);

}  // namespace csivid
