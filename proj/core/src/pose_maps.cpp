// SPDX-License-Identifier: Apache-2.0
#include "csivid/pose_maps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "csivid/binio.hpp"

namespace csivid {

namespace {

constexpr std::string_view kKeypointNames[kNumKeypoints] = {
    "Nose",      "Neck",   "RShoulder", "RElbow", "RWrist", "LShoulder", "LElbow",
    "LWrist",    "RHip",   "RKnee",     "LHip",   "LKnee",  "RAnkle",    "LAnkle"};

}  // namespace

std::string_view keypoint_name(KeypointKind kind) {
    return kKeypointNames[static_cast<std::size_t>(kind)];
}

int Skeleton::visible_count() const {
    int n = 0;
    for (const auto& j : joints) n += j.visible ? 1 : 0;
    return n;
}

const LimbTopology& LimbTopology::canonical() {
    using K = KeypointKind;
    static const LimbTopology topo{{{
        {K::kNeck, K::kNose},
        {K::kNeck, K::kRShoulder},
        {K::kRShoulder, K::kRElbow},
        {K::kRElbow, K::kRWrist},
        {K::kNeck, K::kLShoulder},
        {K::kLShoulder, K::kLElbow},
        {K::kLElbow, K::kLWrist},
        {K::kNeck, K::kRHip},
        {K::kRHip, K::kRKnee},
        {K::kRKnee, K::kRAnkle},
        {K::kNeck, K::kLHip},
        {K::kLHip, K::kLKnee},
        {K::kLKnee, K::kLAnkle},
    }}};
    return topo;
}

Jhm render_jhm(std::span<const Skeleton> persons, double sigma, int height, int width) {
    Jhm jhm;
    jhm.height = height;
    jhm.width = width;
    jhm.data.assign(static_cast<std::size_t>(kNumKeypoints) * height * width, 0.0);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (int c = 0; c < kNumKeypoints; ++c) {
        for (const auto& person : persons) {
            const auto& kp = person.joints[static_cast<std::size_t>(c)];
            if (!kp.visible) continue;
            for (int y = 0; y < height; ++y) {
                const double dy = y - kp.y;
                for (int x = 0; x < width; ++x) {
                    const double dx = x - kp.x;
                    const double g = std::exp(-(dx * dx + dy * dy) * inv);
                    auto& cell = jhm.at(c, y, x);
                    if (g > cell) cell = g;
                }
            }
        }
    }
    return jhm;
}

Paf render_paf(std::span<const Skeleton> persons, const LimbTopology& topology, double width_px,
               int height, int width) {
    Paf paf;
    paf.height = height;
    paf.width = width;
    paf.data.assign(static_cast<std::size_t>(kNumPafChannels) * height * width, 0.0);
    std::vector<int> counts(static_cast<std::size_t>(height) * width);

    for (int l = 0; l < LimbTopology::kNumLimbs; ++l) {
        std::fill(counts.begin(), counts.end(), 0);
        const auto [ka, kb] = topology.limbs[static_cast<std::size_t>(l)];
        for (const auto& person : persons) {
            const auto& a = person.at(ka);
            const auto& b = person.at(kb);
            if (!a.visible || !b.visible) continue;
            const double vx = b.x - a.x;
            const double vy = b.y - a.y;
            const double len = std::hypot(vx, vy);
            if (len < 1e-9) continue;
            const double ux = vx / len;
            const double uy = vy / len;

            const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - width_px)));
            const int y1 = std::min(height - 1,
                                    static_cast<int>(std::ceil(std::max(a.y, b.y) + width_px)));
            const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - width_px)));
            const int x1 = std::min(width - 1,
                                    static_cast<int>(std::ceil(std::max(a.x, b.x) + width_px)));
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    // distance from pixel center to the segment
                    const double px = x - a.x;
                    const double py = y - a.y;
                    const double t = std::clamp((px * vx + py * vy) / (len * len), 0.0, 1.0);
                    const double dx = px - t * vx;
                    const double dy = py - t * vy;
                    if (dx * dx + dy * dy > width_px * width_px) continue;
                    paf.at(2 * l, y, x) += ux;
                    paf.at(2 * l + 1, y, x) += uy;
                    ++counts[static_cast<std::size_t>(y) * width + x];
                }
            }
        }
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const int n = counts[static_cast<std::size_t>(y) * width + x];
                if (n > 1) {
                    paf.at(2 * l, y, x) /= n;
                    paf.at(2 * l + 1, y, x) /= n;
                }
            }
        }
    }
    return paf;
}

std::vector<PeakCandidate> nms_peaks(const Jhm& jhm, int channel, double threshold) {
    const int h = jhm.height;
    const int w = jhm.width;
    const auto val = [&](int y, int x) { return jhm.at(channel, y, x); };

    // candidate = above threshold and >= every in-bounds 8-neighbour
    std::vector<std::uint8_t> cand(static_cast<std::size_t>(h) * w, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double v = val(y, x);
            if (!(v > threshold)) continue;
            bool is_peak = true;
            for (int dy = -1; dy <= 1 && is_peak; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dy == 0 && dx == 0) continue;
                    const int ny = y + dy;
                    const int nx = x + dx;
                    if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
                    if (val(ny, nx) > v) {
                        is_peak = false;
                        break;
                    }
                }
            }
            if (is_peak) cand[static_cast<std::size_t>(y) * w + x] = 1;
        }
    }

    // collapse equal-valued 8-connected candidate plateaus to their
    // lexicographic minimum via union-find
    std::vector<int> parent(static_cast<std::size_t>(h) * w);
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](int i) {
        while (parent[static_cast<std::size_t>(i)] != i) {
            parent[static_cast<std::size_t>(i)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
            i = parent[static_cast<std::size_t>(i)];
        }
        return i;
    };
    const auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent[static_cast<std::size_t>(b)] = a;  // keep the smaller index as root
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int i = y * w + x;
            if (!cand[static_cast<std::size_t>(i)]) continue;
            for (int dy = 0; dy <= 1; ++dy) {
                for (int dx = (dy == 0 ? 1 : -1); dx <= 1; ++dx) {
                    const int ny = y + dy;
                    const int nx = x + dx;
                    if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
                    const int j = ny * w + nx;
                    if (cand[static_cast<std::size_t>(j)] && val(ny, nx) == val(y, x)) unite(i, j);
                }
            }
        }
    }

    std::vector<PeakCandidate> peaks;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int i = y * w + x;
            if (cand[static_cast<std::size_t>(i)] && find(i) == i) {
                peaks.push_back({static_cast<double>(x), static_cast<double>(y), val(y, x)});
            }
        }
    }
    return peaks;
}

namespace {

double sample_bilinear(const Paf& paf, int channel, double x, double y) {
    const int w = paf.width;
    const int h = paf.height;
    const double cx = std::clamp(x, 0.0, static_cast<double>(w - 1));
    const double cy = std::clamp(y, 0.0, static_cast<double>(h - 1));
    const int x0 = std::min(static_cast<int>(cx), w - 1);
    const int y0 = std::min(static_cast<int>(cy), h - 1);
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double wx = cx - x0;
    const double wy = cy - y0;
    const double top = paf.at(channel, y0, x0) + wx * (paf.at(channel, y0, x1) - paf.at(channel, y0, x0));
    const double bot = paf.at(channel, y1, x0) + wx * (paf.at(channel, y1, x1) - paf.at(channel, y1, x0));
    return top + wy * (bot - top);
}

}  // namespace

double paf_line_score(const PeakCandidate& a, const PeakCandidate& b, const Paf& paf, int limb,
                      int n_samples) {
    const double vx = b.x - a.x;
    const double vy = b.y - a.y;
    const double len = std::hypot(vx, vy);
    if (len < 1.0) return 0.0;
    const double ux = vx / len;
    const double uy = vy / len;
    double acc = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double t = static_cast<double>(i) / (n_samples - 1);
        const double px = a.x + t * vx;
        const double py = a.y + t * vy;
        acc += ux * sample_bilinear(paf, 2 * limb, px, py) +
               uy * sample_bilinear(paf, 2 * limb + 1, px, py);
    }
    return acc / n_samples;
}

std::vector<Skeleton> assemble_skeletons(const Jhm& jhm, const Paf& paf,
                                         const LimbTopology& topology,
                                         const AssemblyParams& params) {
    // peaks per kind, with global ids
    struct GlobalPeak {
        PeakCandidate p;
        int kind;
    };
    std::vector<GlobalPeak> all_peaks;
    std::array<std::vector<int>, kNumKeypoints> by_kind;  // global ids per kind
    for (int c = 0; c < kNumKeypoints; ++c) {
        for (const auto& p : nms_peaks(jhm, c, params.nms_threshold)) {
            by_kind[static_cast<std::size_t>(c)].push_back(static_cast<int>(all_peaks.size()));
            all_peaks.push_back({p, c});
        }
    }

    // greedy per-limb matching
    struct Candidate {
        double score;
        int index;  // position in generation order, the deterministic tiebreak
        int pa;
        int pb;
    };
    std::vector<std::pair<int, int>> accepted;  // connected peak id pairs
    for (int l = 0; l < LimbTopology::kNumLimbs; ++l) {
        const auto [ka, kb] = topology.limbs[static_cast<std::size_t>(l)];
        const auto& peaks_a = by_kind[static_cast<std::size_t>(ka)];
        const auto& peaks_b = by_kind[static_cast<std::size_t>(kb)];
        std::vector<Candidate> cands;
        cands.reserve(peaks_a.size() * peaks_b.size());
        for (const int pa : peaks_a) {
            for (const int pb : peaks_b) {
                const double s = paf_line_score(all_peaks[static_cast<std::size_t>(pa)].p,
                                                all_peaks[static_cast<std::size_t>(pb)].p, paf, l,
                                                params.n_samples);
                if (s < params.score_threshold) continue;
                cands.push_back({s, static_cast<int>(cands.size()), pa, pb});
            }
        }
        std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
            if (x.score != y.score) return x.score > y.score;
            return x.index < y.index;
        });
        std::vector<std::uint8_t> used_a(all_peaks.size(), 0), used_b(all_peaks.size(), 0);
        for (const auto& c : cands) {
            if (used_a[static_cast<std::size_t>(c.pa)] || used_b[static_cast<std::size_t>(c.pb)]) continue;
            used_a[static_cast<std::size_t>(c.pa)] = 1;
            used_b[static_cast<std::size_t>(c.pb)] = 1;
            accepted.emplace_back(c.pa, c.pb);
        }
    }

    // merge accepted limbs into person groups
    std::vector<int> parent(all_peaks.size());
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](int i) {
        while (parent[static_cast<std::size_t>(i)] != i) {
            parent[static_cast<std::size_t>(i)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
            i = parent[static_cast<std::size_t>(i)];
        }
        return i;
    };
    for (const auto& [a, b] : accepted) {
        const int ra = find(a);
        const int rb = find(b);
        if (ra != rb) parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
    }

    // groups in order of their smallest peak id
    std::vector<int> group_root;
    std::vector<Skeleton> skeletons;
    for (int i = 0; i < static_cast<int>(all_peaks.size()); ++i) {
        if (find(i) == i) group_root.push_back(i);
    }
    for (const int root : group_root) {
        Skeleton s;
        int n_visible = 0;
        for (int i = 0; i < static_cast<int>(all_peaks.size()); ++i) {
            if (find(i) != root) continue;
            const auto& gp = all_peaks[static_cast<std::size_t>(i)];
            auto& joint = s.joints[static_cast<std::size_t>(gp.kind)];
            if (joint.visible && joint.confidence >= gp.p.score) continue;
            if (!joint.visible) ++n_visible;
            joint = {gp.p.x, gp.p.y, true, gp.p.score};
        }
        if (n_visible >= params.min_keypoints) skeletons.push_back(s);
    }
    return skeletons;
}

void write_map_file(const std::filesystem::path& path, int channels, int height, int width,
                    std::span<const double> data) {
    if (data.size() != static_cast<std::size_t>(channels) * height * width) {
        throw ShapeMismatch("map data size does not match declared dimensions");
    }
    ByteWriter out;
    out.write_u16(static_cast<std::uint16_t>(channels));
    out.write_u16(static_cast<std::uint16_t>(height));
    out.write_u16(static_cast<std::uint16_t>(width));
    for (const double v : data) out.write_f32(static_cast<float>(v));
    write_file_atomic(path, out.bytes());
}

MapFile read_map_file(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    ByteReader in(bytes);
    MapFile m;
    m.channels = in.read_u16();
    m.height = in.read_u16();
    m.width = in.read_u16();
    const std::size_t n = static_cast<std::size_t>(m.channels) * m.height * m.width;
    m.data.resize(n);
    for (std::size_t i = 0; i < n; ++i) m.data[i] = in.read_f32();
    if (!in.at_end()) throw TruncatedRecord("trailing bytes in map file " + path.string());
    return m;
}

void write_jhm_file(const std::filesystem::path& path, const Jhm& jhm) {
    write_map_file(path, kNumKeypoints, jhm.height, jhm.width, jhm.data);
}

Jhm read_jhm_file(const std::filesystem::path& path) {
    auto m = read_map_file(path);
    if (m.channels != kNumKeypoints) throw ShapeMismatch("not a JHM file: " + path.string());
    return Jhm{m.height, m.width, std::move(m.data)};
}

void write_paf_file(const std::filesystem::path& path, const Paf& paf) {
    write_map_file(path, kNumPafChannels, paf.height, paf.width, paf.data);
}

Paf read_paf_file(const std::filesystem::path& path) {
    auto m = read_map_file(path);
    if (m.channels != kNumPafChannels) throw ShapeMismatch("not a PAF file: " + path.string());
    return Paf{m.height, m.width, std::move(m.data)};
}

}  // namespace csivid
