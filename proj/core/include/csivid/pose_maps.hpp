// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "csivid/pose_types.hpp"

namespace csivid {

/// Renders Gaussian keypoint peaks: channel c at pixel p is the max over
/// persons of exp(-|p - x_c|^2 / (2 sigma^2)) for visible keypoints of kind
/// c, zero where no person has that kind visible.
Jhm render_jhm(std::span<const Skeleton> persons, double sigma, int height, int width);

/// Renders limb direction fields: pixels within `width_px` of a limb segment
/// (both endpoints visible) get the unit vector along the limb; pixels
/// covered by several persons get the average of the contributing vectors.
Paf render_paf(std::span<const Skeleton> persons, const LimbTopology& topology, double width_px,
               int height, int width);

struct PeakCandidate {
    double x = 0.0;
    double y = 0.0;
    double score = 0.0;
};

/// Local maxima of one JHM channel: pixels >= all 8 neighbours and > the
/// threshold. Equal-valued plateau pixels collapse to the lexicographically
/// smallest (row, col) of the connected plateau. Scan-order output.
std::vector<PeakCandidate> nms_peaks(const Jhm& jhm, int channel, double threshold);

/// Mean over n_samples points, spaced uniformly on the segment a->b, of the
/// dot product between the bilinearly sampled PAF limb vector and the unit
/// vector a->b. Returns 0 when |a - b| < 1 px.
double paf_line_score(const PeakCandidate& a, const PeakCandidate& b, const Paf& paf, int limb,
                      int n_samples);

struct AssemblyParams {
    double nms_threshold = 0.1;
    double score_threshold = 0.05;
    int n_samples = 10;
    int min_keypoints = 3;
};

/// Decodes JHMs/PAFs into per-person skeletons: per limb, all candidate peak
/// pairs are scored and accepted greedily in descending score order (ties
/// broken by candidate index), each peak used at most once per limb; accepted
/// limbs merge into connected groups, and groups with at least
/// `min_keypoints` become skeletons. Keypoint confidence is the peak score.
std::vector<Skeleton> assemble_skeletons(const Jhm& jhm, const Paf& paf,
                                         const LimbTopology& topology,
                                         const AssemblyParams& params = {});

// Cached map files: channels u16, H u16, W u16, then channels*H*W f32
// little-endian, channel-major.
void write_map_file(const std::filesystem::path& path, int channels, int height, int width,
                    std::span<const double> data);
struct MapFile {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;
};
MapFile read_map_file(const std::filesystem::path& path);

void write_jhm_file(const std::filesystem::path& path, const Jhm& jhm);
Jhm read_jhm_file(const std::filesystem::path& path);
void write_paf_file(const std::filesystem::path& path, const Paf& paf);
Paf read_paf_file(const std::filesystem::path& path);

}  // namespace csivid
