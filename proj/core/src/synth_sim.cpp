// SPDX-License-Identifier: Apache-2.0
#include "csivid/synth_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "csivid/binio.hpp"
#include "csivid/csil.hpp"
#include "csivid/dataset.hpp"
#include "csivid/errors.hpp"
#include "csivid/rng.hpp"

namespace csivid {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSpeedOfLight = 299792458.0;
constexpr std::uint64_t kPersonSalt = 1000;
constexpr std::uint64_t kNoiseSalt = 0xC51;

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

double norm(const Vec3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

std::array<Vec3, 3> SceneConfig::tx_antennas() const {
    const double cx = room_w * 0.36;
    std::array<Vec3, 3> a;
    for (int i = 0; i < 3; ++i) {
        a[static_cast<std::size_t>(i)] = {cx + (i - 1) * antenna_spacing_m, 0.3, 1.1};
    }
    return a;
}

std::array<Vec3, 3> SceneConfig::rx_antennas() const {
    const double cx = room_w * 0.57;
    std::array<Vec3, 3> a;
    for (int i = 0; i < 3; ++i) {
        a[static_cast<std::size_t>(i)] = {cx + (i - 1) * antenna_spacing_m, room_d - 0.3, 1.3};
    }
    return a;
}

double SceneConfig::subcarrier_hz(int k) const {
    return carrier_hz - bandwidth_hz * 0.5 +
           static_cast<double>(k) * bandwidth_hz / (n_subcarriers - 1);
}

void SceneConfig::validate() const {
    if (n_persons < 0 || n_persons > 3) {
        throw UsageError("n_persons must be in [0, 3], got " + std::to_string(n_persons));
    }
    if (n_subcarriers < 2) throw UsageError("need at least 2 subcarriers");
    if (csi_rate_hz <= 0.0 || fps <= 0.0 || duration_s <= 0.0) {
        throw UsageError("rates and duration must be positive");
    }
    if (carrier_hz <= 0.0 || bandwidth_hz <= 0.0 || bandwidth_hz >= carrier_hz) {
        throw UsageError("carrier / bandwidth out of range");
    }
    if (frame_height < 8 || frame_width < 8) throw UsageError("frame too small");
    if (limb_thickness_px <= 0.0 || v_max <= 0.0) {
        throw UsageError("limb thickness and v_max must be positive");
    }
    if (room_w < 3.0 || room_d < 6.0 || room_h < 2.2) {
        throw GeometryError("room too small for the scripted motions");
    }
}

SceneConfig scene_from_kv(const KvConfig& kv) {
    SceneConfig s;
    s.room_w = kv.get_double("room_w", s.room_w);
    s.room_d = kv.get_double("room_d", s.room_d);
    s.room_h = kv.get_double("room_h", s.room_h);
    s.antenna_spacing_m = kv.get_double("antenna_spacing_m", s.antenna_spacing_m);
    s.carrier_hz = kv.get_double("carrier_hz", s.carrier_hz);
    s.bandwidth_hz = kv.get_double("bandwidth_hz", s.bandwidth_hz);
    s.n_subcarriers = static_cast<int>(kv.get_int("n_subcarriers", s.n_subcarriers));
    s.csi_rate_hz = kv.get_double("csi_rate_hz", s.csi_rate_hz);
    s.fps = kv.get_double("fps", s.fps);
    s.n_persons = static_cast<int>(kv.get_int("n_persons", s.n_persons));
    s.duration_s = kv.get_double("duration_s", s.duration_s);
    s.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<std::int64_t>(s.seed)));
    s.frame_height = static_cast<int>(kv.get_int("frame_height", s.frame_height));
    s.frame_width = static_cast<int>(kv.get_int("frame_width", s.frame_width));
    s.limb_thickness_px = kv.get_double("limb_thickness_px", s.limb_thickness_px);
    s.v_max = kv.get_double("v_max", s.v_max);
    return s;
}

KvConfig scene_to_kv(const SceneConfig& s) {
    KvConfig kv;
    kv.set("room_w", fmt_g(s.room_w));
    kv.set("room_d", fmt_g(s.room_d));
    kv.set("room_h", fmt_g(s.room_h));
    kv.set("antenna_spacing_m", fmt_g(s.antenna_spacing_m));
    kv.set("carrier_hz", fmt_g(s.carrier_hz));
    kv.set("bandwidth_hz", fmt_g(s.bandwidth_hz));
    kv.set("n_subcarriers", std::to_string(s.n_subcarriers));
    kv.set("csi_rate_hz", fmt_g(s.csi_rate_hz));
    kv.set("fps", fmt_g(s.fps));
    kv.set("n_persons", std::to_string(s.n_persons));
    kv.set("duration_s", fmt_g(s.duration_s));
    kv.set("seed", std::to_string(s.seed));
    kv.set("frame_height", std::to_string(s.frame_height));
    kv.set("frame_width", std::to_string(s.frame_width));
    kv.set("limb_thickness_px", fmt_g(s.limb_thickness_px));
    kv.set("v_max", fmt_g(s.v_max));
    return kv;
}

CameraModel default_camera(const SceneConfig& scene) {
    CameraModel cam;
    cam.position = {scene.room_w * 0.5, scene.room_d - 0.1, 1.2};
    cam.fx = 0.625 * scene.frame_width;
    cam.fy = cam.fx;
    cam.cx = 0.5 * scene.frame_width;
    cam.cy = scene.frame_height / 3.0;
    return cam;
}

Keypoint project_point(const CameraModel& cam, const Vec3& p) {
    Keypoint kp;
    const double depth = cam.position.y - p.y;
    if (depth < 0.05) {
        kp.x = -1e9;
        kp.y = -1e9;
        kp.visible = false;
        return kp;
    }
    kp.x = cam.cx + cam.fx * (cam.position.x - p.x) / depth;
    kp.y = cam.cy - cam.fy * (p.z - cam.position.z) / depth;
    kp.visible = true;
    kp.confidence = 1.0;
    return kp;
}

ActionKind person_action(int person_index) {
    return static_cast<ActionKind>(person_index % 4);
}

namespace {

struct Frame3 {
    Vec3 f;   // facing direction, horizontal
    Vec3 r;   // to the person's right
    Vec3 up;  // +z
};

Frame3 heading_frame(double theta) {
    return {{std::cos(theta), std::sin(theta), 0.0},
            {std::sin(theta), -std::cos(theta), 0.0},
            {0.0, 0.0, 1.0}};
}

// Swing angles are measured from straight down in the facing/up plane.
Vec3 swing_dir(const Frame3& fr, double angle) {
    return fr.f * std::sin(angle) - fr.up * std::cos(angle);
}

void place_leg(PersonPose3& pose, const Frame3& fr, const BodyShape& body, KeypointKind hip,
               KeypointKind knee, KeypointKind ankle, double thigh_angle, double shin_angle) {
    pose.at(knee) = pose.at(hip) + swing_dir(fr, thigh_angle) * body.thigh;
    pose.at(ankle) = pose.at(knee) + swing_dir(fr, shin_angle) * body.shin;
}

void place_arm(PersonPose3& pose, const Frame3& fr, const BodyShape& body, KeypointKind shoulder,
               KeypointKind elbow, KeypointKind wrist, double swing, double side) {
    const double out = 0.15;  // slight outward splay keeps arms off the torso
    const Vec3 axial = swing_dir(fr, swing);
    pose.at(elbow) = pose.at(shoulder) +
                     (axial * std::cos(out) + fr.r * (side * std::sin(out))) * body.upper_arm;
    const Vec3 axial2 = swing_dir(fr, swing + 0.35);
    pose.at(wrist) = pose.at(elbow) +
                     (axial2 * std::cos(out) + fr.r * (side * std::sin(out))) * body.forearm;
}

PersonPose3 assemble(const BodyShape& body, const Vec3& hip_center, double theta) {
    using K = KeypointKind;
    const Frame3 fr = heading_frame(theta);
    PersonPose3 pose;
    pose.at(K::kRHip) = hip_center + fr.r * body.hip_half_width;
    pose.at(K::kLHip) = hip_center - fr.r * body.hip_half_width;
    pose.at(K::kNeck) = hip_center + fr.up * body.spine;
    const double tilt = 0.3;  // nose sits forward of the neck
    pose.at(K::kNose) = pose.at(K::kNeck) + fr.up * (body.neck_to_nose * std::cos(tilt)) +
                        fr.f * (body.neck_to_nose * std::sin(tilt));
    const Vec3 shoulder_base = pose.at(K::kNeck) - fr.up * 0.02;
    pose.at(K::kRShoulder) = shoulder_base + fr.r * body.shoulder_half_width;
    pose.at(K::kLShoulder) = shoulder_base - fr.r * body.shoulder_half_width;
    return pose;
}

}  // namespace

PersonPose3 person_pose(const SceneConfig& scene, int person_index, double t) {
    using K = KeypointKind;
    const BodyShape body;
    Rng pr = Rng::forked(scene.seed, kPersonSalt + static_cast<std::uint64_t>(person_index));
    const double ph0 = pr.uniform(0.0, 2.0 * kPi);
    const double ph1 = pr.uniform(0.0, 2.0 * kPi);
    const double ph2 = pr.uniform(0.0, 2.0 * kPi);
    const double ph3 = pr.uniform(0.0, 2.0 * kPi);

    const double cx0 = scene.room_w * 0.5;
    const double reach = std::min(1.4, 0.3 * scene.room_w);
    const ActionKind action = person_action(person_index);

    Vec3 hip{cx0, scene.room_d - 3.6, 0.92};
    double theta = kPi / 2.0;
    double thigh_r = 0.0, shin_r = 0.0, thigh_l = 0.0, shin_l = 0.0;
    double arm_r = 0.0, arm_l = 0.0;
    bool wave_right_arm = false;
    double wave_chi = 0.0;

    switch (action) {
        case ActionKind::kWalk: {
            const double a = std::min(1.7, 0.3 * scene.room_w);
            const double b = std::min(1.6, 0.1 * scene.room_d);
            const double w1 = 2.0 * kPi / 24.0;
            const double w2 = 2.0 * kPi / 10.3;
            const double lam1 = w1 * t + ph0;
            const double lam2 = w2 * t + ph1;
            hip.x = cx0 + a * (0.62 * std::cos(lam1) + 0.38 * std::cos(lam2));
            hip.y = scene.room_d - 4.1 + b * (0.62 * std::sin(lam1) - 0.38 * std::sin(lam2));
            const double vx = -a * (0.62 * w1 * std::sin(lam1) + 0.38 * w2 * std::sin(lam2));
            const double vy = b * (0.62 * w1 * std::cos(lam1) - 0.38 * w2 * std::cos(lam2));
            theta = std::atan2(vy, vx);
            const double gait = 2.0 * kPi * 1.3 * t + ph0;
            thigh_r = 0.2618 * std::sin(gait);
            thigh_l = 0.2618 * std::sin(gait + kPi);
            shin_r = 0.5 * thigh_r;
            shin_l = 0.5 * thigh_l;
            arm_r = 0.35 * std::sin(gait + kPi);
            arm_l = 0.35 * std::sin(gait);
            break;
        }
        case ActionKind::kSit: {
            hip.x = cx0 - reach;
            hip.y = scene.room_d - 3.3;
            hip.z = 0.55;
            const Frame3 sway = heading_frame(kPi / 2.0);
            hip = hip + sway.r * (0.02 * std::sin(2.0 * kPi * 0.25 * t + ph0));
            theta = kPi / 2.0 + 0.06 * std::sin(2.0 * kPi * 0.2 * t + ph1);
            thigh_r = thigh_l = kPi / 2.0;  // thighs horizontal
            shin_r = shin_l = 0.15;
            arm_r = 0.08 * std::sin(2.0 * kPi * 0.4 * t + ph2);
            arm_l = -arm_r;
            break;
        }
        case ActionKind::kWave: {
            hip.x = cx0 + reach;
            hip.y = scene.room_d - 3.5;
            const Frame3 sway = heading_frame(kPi / 2.0);
            hip = hip + sway.r * (0.015 * std::sin(2.0 * kPi * 0.3 * t + ph1));
            theta = kPi / 2.0 + 0.05 * std::sin(2.0 * kPi * 0.25 * t + ph2);
            arm_l = 0.08 * std::sin(2.0 * kPi * 0.5 * t + ph0);
            wave_right_arm = true;
            wave_chi = 0.9 + 0.45 * std::sin(2.0 * kPi * 1.8 * t + ph0);
            break;
        }
        case ActionKind::kDrift: {
            const double ax = std::min(1.2, 0.28 * scene.room_w);
            const double ay = std::min(0.8, 0.05 * scene.room_d);
            hip.x = cx0 + ax * std::sin(2.0 * kPi * t / 17.0 + ph1);
            hip.y = scene.room_d - 3.6 + ay * std::sin(2.0 * kPi * t / 13.0 + ph2);
            theta = kPi / 2.0 + 0.5 * std::sin(2.0 * kPi * t / 19.0 + ph3);
            arm_r = 0.07 * std::sin(2.0 * kPi * 0.35 * t + ph0);
            arm_l = -arm_r;
            break;
        }
    }

    PersonPose3 pose = assemble(body, hip, theta);
    const Frame3 fr = heading_frame(theta);
    place_leg(pose, fr, body, K::kRHip, K::kRKnee, K::kRAnkle, thigh_r, shin_r);
    place_leg(pose, fr, body, K::kLHip, K::kLKnee, K::kLAnkle, thigh_l, shin_l);
    place_arm(pose, fr, body, K::kLShoulder, K::kLElbow, K::kLWrist, arm_l, -1.0);
    if (wave_right_arm) {
        const double raise = 1.2;
        pose.at(K::kRElbow) = pose.at(K::kRShoulder) +
                              (fr.up * std::cos(raise) + fr.r * std::sin(raise)) * body.upper_arm;
        pose.at(K::kRWrist) = pose.at(K::kRElbow) +
                              (fr.up * std::cos(wave_chi) + fr.r * std::sin(wave_chi)) *
                                  body.forearm;
    } else {
        place_arm(pose, fr, body, K::kRShoulder, K::kRElbow, K::kRWrist, arm_r, 1.0);
    }
    return pose;
}

std::array<Vec3, kScatterersPerPerson> body_scatterers(const PersonPose3& pose) {
    std::array<Vec3, kScatterersPerPerson> out;
    const LimbTopology& topo = LimbTopology::canonical();
    for (int l = 0; l < LimbTopology::kNumLimbs; ++l) {
        const auto [a, b] = topo.limbs[static_cast<std::size_t>(l)];
        out[static_cast<std::size_t>(l)] = (pose.at(a) + pose.at(b)) * 0.5;
    }
    out[13] = pose.at(KeypointKind::kNose);
    return out;
}

Trajectories gen_trajectories(const SceneConfig& scene) {
    scene.validate();
    Trajectories traj;
    const auto step_us = static_cast<std::int64_t>(std::llround(1e6 / scene.csi_rate_hz));
    const auto n_ticks = static_cast<std::int64_t>(std::llround(scene.duration_s * scene.csi_rate_hz));
    const auto n_frames = static_cast<std::int64_t>(std::llround(scene.duration_s * scene.fps));
    const CameraModel cam = default_camera(scene);

    traj.ticks.reserve(static_cast<std::size_t>(n_ticks));
    for (std::int64_t n = 0; n < n_ticks; ++n) {
        SceneTick tick;
        tick.timestamp_us = n * step_us;
        const double t = static_cast<double>(tick.timestamp_us) * 1e-6;
        for (int i = 0; i < scene.n_persons; ++i) tick.poses.push_back(person_pose(scene, i, t));
        traj.ticks.push_back(std::move(tick));
    }

    traj.frames.reserve(static_cast<std::size_t>(n_frames));
    for (std::int64_t m = 0; m < n_frames; ++m) {
        SceneFrame frame;
        frame.frame_id = m;
        frame.timestamp_us = static_cast<std::int64_t>(std::llround(static_cast<double>(m) * 1e6 / scene.fps));
        const double t = static_cast<double>(frame.timestamp_us) * 1e-6;
        for (int i = 0; i < scene.n_persons; ++i) {
            const PersonPose3 pose = person_pose(scene, i, t);
            Skeleton skel;
            for (int k = 0; k < kNumKeypoints; ++k) {
                Keypoint kp = project_point(cam, pose.joints[static_cast<std::size_t>(k)]);
                if (kp.visible) {
                    kp.visible = kp.x >= 0.0 && kp.x <= scene.frame_width - 1 && kp.y >= 0.0 &&
                                 kp.y <= scene.frame_height - 1;
                    kp.confidence = kp.visible ? 1.0 : 0.0;
                }
                skel.joints[static_cast<std::size_t>(k)] = kp;
            }
            frame.persons.push_back(skel);
            frame.poses.push_back(pose);
        }
        traj.frames.push_back(std::move(frame));
    }
    return traj;
}

ChannelModel::ChannelModel() { scatterer_gains.fill(Complex(1.0, 0.0)); }

ChannelModel ChannelModel::default_office() {
    ChannelModel ch;
    ch.static_paths = {{30e-9, Complex(0.8, 0.3)},
                       {50e-9, Complex(-0.25, 0.45)},
                       {80e-9, Complex(0.15, -0.2)}};
    ch.noise_std = 0.01;
    return ch;
}

Complex channel_response(const Vec3& tx, const Vec3& rx, double freq_hz,
                         const ChannelModel& channel, const std::vector<PersonPose3>& poses) {
    Complex h(0.0, 0.0);
    for (const StaticPath& p : channel.static_paths) {
        h += p.gain * std::polar(1.0, -2.0 * kPi * freq_hz * p.delay_s);
    }
    for (const PersonPose3& pose : poses) {
        const auto scat = body_scatterers(pose);
        for (int s = 0; s < kScatterersPerPerson; ++s) {
            const Vec3& pt = scat[static_cast<std::size_t>(s)];
            const double d = distance(tx, pt) + distance(pt, rx);
            h += channel.scatterer_gains[static_cast<std::size_t>(s)] * (1.0 / d) *
                 std::polar(1.0, -2.0 * kPi * freq_hz * d / kSpeedOfLight);
        }
    }
    return h;
}

CsiSequence simulate_csi(const SceneConfig& scene, const ChannelModel& channel,
                         const Trajectories& traj) {
    scene.validate();
    CsiSequence seq;
    seq.header.nominal_rate_hz = scene.csi_rate_hz;
    seq.header.n_tx = 3;
    seq.header.n_rx = 3;
    seq.header.n_c = scene.n_subcarriers;

    const auto tx = scene.tx_antennas();
    const auto rx = scene.rx_antennas();
    std::vector<double> freqs(static_cast<std::size_t>(scene.n_subcarriers));
    for (int k = 0; k < scene.n_subcarriers; ++k) {
        freqs[static_cast<std::size_t>(k)] = scene.subcarrier_hz(k);
    }
    Rng noise = Rng::forked(scene.seed, kNoiseSalt);
    const double comp_std = channel.noise_std / std::sqrt(2.0);

    seq.records.reserve(traj.ticks.size());
    for (const SceneTick& tick : traj.ticks) {
        for (const PersonPose3& pose : tick.poses) {
            for (const Vec3& j : pose.joints) {
                if (j.x < 0.0 || j.x > scene.room_w || j.y < 0.0 || j.y > scene.room_d ||
                    j.z < 0.0 || j.z > scene.room_h) {
                    throw GeometryError("person outside room at t=" +
                                        std::to_string(tick.timestamp_us) + "us");
                }
            }
        }
        CsiMeasurement m;
        m.timestamp_us = tick.timestamp_us;
        m.n_tx = 3;
        m.n_rx = 3;
        m.n_c = scene.n_subcarriers;
        m.values.resize(static_cast<std::size_t>(9) * scene.n_subcarriers);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                for (int k = 0; k < scene.n_subcarriers; ++k) {
                    Complex h = channel_response(tx[static_cast<std::size_t>(a)],
                                                 rx[static_cast<std::size_t>(b)],
                                                 freqs[static_cast<std::size_t>(k)], channel,
                                                 tick.poses);
                    if (channel.noise_std > 0.0) {
                        const double re = noise.normal(0.0, comp_std);
                        const double im = noise.normal(0.0, comp_std);
                        h += Complex(re, im);
                    }
                    m.at(a, b, k) = h;
                }
            }
        }
        seq.records.push_back(std::move(m));
    }
    return seq;
}

Image render_background(int height, int width) {
    Image img = Image::filled(height, width, 3, 0);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            img.at(y, x, 0) = static_cast<std::uint8_t>(38 + (y * 40) / height);
            img.at(y, x, 1) = static_cast<std::uint8_t>(44 + (y * 30) / height);
            img.at(y, x, 2) = static_cast<std::uint8_t>(52 + (x * 10) / width);
        }
    }
    return img;
}

std::array<std::uint8_t, 3> identity_color(int person_index) {
    static constexpr std::array<std::array<std::uint8_t, 3>, 3> kPalette = {{
        {230, 60, 50},
        {60, 160, 230},
        {240, 200, 60},
    }};
    return kPalette[static_cast<std::size_t>(person_index) % kPalette.size()];
}

namespace {

bool sane_coord(const Keypoint& kp, int height, int width) {
    const double bound = 16.0 * std::max(height, width);
    return std::abs(kp.x) < bound && std::abs(kp.y) < bound;
}

void paint_segment(Image& img, std::vector<std::uint8_t>& mask, double ax, double ay, double bx,
                   double by, double radius, const std::array<std::uint8_t, 3>& color) {
    const int h = img.height;
    const int w = img.width;
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(ax, bx) - radius - 1.0)));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(std::max(ax, bx) + radius + 1.0)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(ay, by) - radius - 1.0)));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(std::max(ay, by) + radius + 1.0)));
    const double dx = bx - ax;
    const double dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            double ex = x - ax;
            double ey = y - ay;
            if (len2 > 1e-12) {
                const double u = std::clamp((ex * dx + ey * dy) / len2, 0.0, 1.0);
                ex -= u * dx;
                ey -= u * dy;
            }
            if (ex * ex + ey * ey <= radius * radius) {
                img.at(y, x, 0) = color[0];
                img.at(y, x, 1) = color[1];
                img.at(y, x, 2) = color[2];
                mask[static_cast<std::size_t>(y) * w + x] = 1;
            }
        }
    }
}

}  // namespace

RenderedFrame render_frame(const SceneConfig& scene, const std::vector<Skeleton>& persons) {
    RenderedFrame out;
    const int h = scene.frame_height;
    const int w = scene.frame_width;
    out.frame = render_background(h, w);
    out.mask.assign(static_cast<std::size_t>(h) * w, 0);
    const double radius = scene.limb_thickness_px * 0.5;
    const LimbTopology& topo = LimbTopology::canonical();
    for (std::size_t i = 0; i < persons.size(); ++i) {
        const Skeleton& s = persons[i];
        const auto color = identity_color(static_cast<int>(i));
        for (const auto& [ka, kb] : topo.limbs) {
            const Keypoint& a = s.at(ka);
            const Keypoint& b = s.at(kb);
            if (!sane_coord(a, h, w) || !sane_coord(b, h, w)) continue;
            paint_segment(out.frame, out.mask, a.x, a.y, b.x, b.y, radius, color);
        }
        const Keypoint& nose = s.at(KeypointKind::kNose);
        if (sane_coord(nose, h, w)) {
            paint_segment(out.frame, out.mask, nose.x, nose.y, nose.x, nose.y, 1.6 * radius,
                          color);
        }
    }
    return out;
}

void emit_dataset(const SceneConfig& scene, const ChannelModel& channel,
                  const std::filesystem::path& dir) {
    scene.validate();
    std::filesystem::create_directories(dir / "frames");
    std::filesystem::create_directories(dir / "masks");

    const Trajectories traj = gen_trajectories(scene);
    const CsiSequence csi = simulate_csi(scene, channel, traj);
    write_csil_file(dir / "csi.csil", csi);

    std::vector<FrameAnnotation> annotations;
    annotations.reserve(traj.frames.size());
    for (const SceneFrame& frame : traj.frames) {
        const RenderedFrame rendered = render_frame(scene, frame.persons);
        write_png(frame_png_path(dir, frame.frame_id), rendered.frame);
        write_png(mask_png_path(dir, frame.frame_id),
                  mask_to_image(rendered.mask, scene.frame_height, scene.frame_width));
        annotations.push_back({frame.frame_id, frame.timestamp_us, frame.persons});
    }
    write_keypoints_jsonl(dir / "keypoints.jsonl", annotations);
    write_png(dir / "background.png", render_background(scene.frame_height, scene.frame_width));

    KvConfig meta;
    meta.set("fps", fmt_g(scene.fps));
    meta.set("rate_hz", fmt_g(scene.csi_rate_hz));
    meta.set("width", std::to_string(scene.frame_width));
    meta.set("height", std::to_string(scene.frame_height));
    meta.set("n_persons", std::to_string(scene.n_persons));
    meta.set("duration_s", fmt_g(scene.duration_s));
    meta.set("seed", std::to_string(scene.seed));
    meta.set("n_frames", std::to_string(traj.frames.size()));
    meta.set("n_records", std::to_string(csi.records.size()));
    write_file_atomic(dir / "meta.txt", meta.to_string());
}

}  // namespace csivid
