// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "csivid/pose_types.hpp"

namespace csivid {

/// Greedy one-to-one pairing of predicted and ground-truth skeletons by
/// ascending mean distance over the ground truth's visible keypoints.
struct MatchResult {
    std::vector<std::pair<int, int>> pairs;  // (gt index, pred index)
    std::vector<int> unmatched_gt;
    std::vector<int> unmatched_pred;
};

/// Mean distance between a ground-truth skeleton and a prediction, averaged
/// over the ground truth's visible keypoints. Infinity when none are visible.
double mean_keypoint_distance(const Skeleton& gt, const Skeleton& pred);

MatchResult match_instances(const std::vector<Skeleton>& gt, const std::vector<Skeleton>& pred);

/// Ground truth and predictions for one frame.
struct FramePoses {
    std::vector<Skeleton> gt;
    std::vector<Skeleton> pred;
};

struct PckPoint {
    double alpha = 0.0;
    double value = 0.0;
    std::int64_t hits = 0;
    std::int64_t total = 0;
};

/// Keypoint correctness at threshold alpha * d, where d is the diagonal of
/// the tight bounding box of the ground truth's visible keypoints. The
/// boundary counts as a hit. Keypoints invisible in the ground truth are
/// excluded; every visible keypoint of an unmatched ground-truth skeleton
/// counts as a miss. Throws NoInstances when no visible ground-truth
/// keypoint exists anywhere.
double pck(std::span<const FramePoses> frames, double alpha);

std::vector<double> default_pck_alphas();
std::vector<PckPoint> pck_curve(std::span<const FramePoses> frames,
                                std::span<const double> alphas);

/// Intersection over union of two same-sized binary masks (nonzero = set).
/// Two empty masks score 1.0.
double mask_iou(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

double mean_iou(std::span<const double> per_frame_ious);

struct CurvePoint {
    double alpha = 0.0;
    double value = 0.0;
};

/// Fraction of frames whose IoU clears each threshold. The boundary counts
/// (IoU >= alpha) unless `strict`, which switches to IoU > alpha.
std::vector<double> default_iou_alphas();
std::vector<CurvePoint> iou_curve(std::span<const double> per_frame_ious,
                                  std::span<const double> alphas, bool strict = false);

/// Versioned evaluation summary. Serialization is deterministic and keeps
/// full double precision; files appear atomically or not at all.
struct EvalReport {
    int version = 1;
    std::int64_t n_frames = 0;
    std::vector<PckPoint> pck;
    std::vector<CurvePoint> iou_curve;
    double mean_iou = 0.0;
    std::map<std::string, double> extras;
};

constexpr const char* kEvalReportSchema = "csivid-eval-report";

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);
void write_report(const std::filesystem::path& path, const EvalReport& report);
EvalReport read_report(const std::filesystem::path& path);

}  // namespace csivid
