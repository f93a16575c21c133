// SPDX-License-Identifier: Apache-2.0
#include "csivid/eval_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "csivid/binio.hpp"
#include "csivid/errors.hpp"

namespace csivid {

namespace {

using nlohmann::json;

double visible_bbox_diagonal(const Skeleton& gt) {
    double min_x = std::numeric_limits<double>::infinity();
    double min_y = min_x;
    double max_x = -min_x;
    double max_y = -min_x;
    bool any = false;
    for (const Keypoint& kp : gt.joints) {
        if (!kp.visible) continue;
        any = true;
        min_x = std::min(min_x, kp.x);
        max_x = std::max(max_x, kp.x);
        min_y = std::min(min_y, kp.y);
        max_y = std::max(max_y, kp.y);
    }
    if (!any) return 0.0;
    return std::hypot(max_x - min_x, max_y - min_y);
}

}  // namespace

double mean_keypoint_distance(const Skeleton& gt, const Skeleton& pred) {
    double sum = 0.0;
    int n = 0;
    for (int k = 0; k < kNumKeypoints; ++k) {
        const Keypoint& g = gt.joints[static_cast<std::size_t>(k)];
        if (!g.visible) continue;
        const Keypoint& p = pred.joints[static_cast<std::size_t>(k)];
        sum += std::hypot(p.x - g.x, p.y - g.y);
        ++n;
    }
    if (n == 0) return std::numeric_limits<double>::infinity();
    return sum / n;
}

MatchResult match_instances(const std::vector<Skeleton>& gt, const std::vector<Skeleton>& pred) {
    struct Candidate {
        double dist;
        int g;
        int p;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(gt.size() * pred.size());
    for (int g = 0; g < static_cast<int>(gt.size()); ++g) {
        for (int p = 0; p < static_cast<int>(pred.size()); ++p) {
            const double d = mean_keypoint_distance(gt[static_cast<std::size_t>(g)],
                                                    pred[static_cast<std::size_t>(p)]);
            if (std::isfinite(d)) candidates.push_back({d, g, p});
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                         if (a.dist != b.dist) return a.dist < b.dist;
                         if (a.g != b.g) return a.g < b.g;
                         return a.p < b.p;
                     });
    std::vector<bool> g_used(gt.size(), false), p_used(pred.size(), false);
    MatchResult out;
    for (const Candidate& c : candidates) {
        if (g_used[static_cast<std::size_t>(c.g)] || p_used[static_cast<std::size_t>(c.p)]) {
            continue;
        }
        g_used[static_cast<std::size_t>(c.g)] = true;
        p_used[static_cast<std::size_t>(c.p)] = true;
        out.pairs.emplace_back(c.g, c.p);
    }
    for (int g = 0; g < static_cast<int>(gt.size()); ++g) {
        if (!g_used[static_cast<std::size_t>(g)]) out.unmatched_gt.push_back(g);
    }
    for (int p = 0; p < static_cast<int>(pred.size()); ++p) {
        if (!p_used[static_cast<std::size_t>(p)]) out.unmatched_pred.push_back(p);
    }
    return out;
}

std::vector<double> default_pck_alphas() { return {0.05, 0.1, 0.2, 0.3, 0.5}; }

std::vector<PckPoint> pck_curve(std::span<const FramePoses> frames,
                                std::span<const double> alphas) {
    std::vector<PckPoint> curve;
    curve.reserve(alphas.size());
    for (const double a : alphas) curve.push_back({a, 0.0, 0, 0});

    for (const FramePoses& frame : frames) {
        const MatchResult match = match_instances(frame.gt, frame.pred);
        std::vector<int> pred_of(frame.gt.size(), -1);
        for (const auto& [g, p] : match.pairs) pred_of[static_cast<std::size_t>(g)] = p;
        for (std::size_t g = 0; g < frame.gt.size(); ++g) {
            const Skeleton& gt = frame.gt[g];
            const double diag = visible_bbox_diagonal(gt);
            for (int k = 0; k < kNumKeypoints; ++k) {
                const Keypoint& kp = gt.joints[static_cast<std::size_t>(k)];
                if (!kp.visible) continue;
                double dist = std::numeric_limits<double>::infinity();
                if (pred_of[g] >= 0) {
                    const Keypoint& pp =
                        frame.pred[static_cast<std::size_t>(pred_of[g])].joints[static_cast<std::size_t>(k)];
                    dist = std::hypot(pp.x - kp.x, pp.y - kp.y);
                }
                for (PckPoint& point : curve) {
                    ++point.total;
                    if (dist <= point.alpha * diag) ++point.hits;
                }
            }
        }
    }
    if (!curve.empty() && curve.front().total == 0) {
        throw NoInstances("no visible ground-truth keypoints to score");
    }
    for (PckPoint& point : curve) {
        point.value = static_cast<double>(point.hits) / static_cast<double>(point.total);
    }
    return curve;
}

double pck(std::span<const FramePoses> frames, double alpha) {
    const double alphas[1] = {alpha};
    return pck_curve(frames, alphas).front().value;
}

double mask_iou(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    if (a.size() != b.size()) {
        throw ShapeMismatch("mask sizes differ: " + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()));
    }
    std::int64_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool in_a = a[i] != 0;
        const bool in_b = b[i] != 0;
        inter += (in_a && in_b) ? 1 : 0;
        uni += (in_a || in_b) ? 1 : 0;
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double mean_iou(std::span<const double> per_frame_ious) {
    if (per_frame_ious.empty()) throw NoInstances("no frames to average");
    double sum = 0.0;
    for (const double v : per_frame_ious) sum += v;
    return sum / static_cast<double>(per_frame_ious.size());
}

std::vector<double> default_iou_alphas() {
    std::vector<double> alphas;
    for (int i = 1; i <= 19; ++i) alphas.push_back(0.05 * i);
    return alphas;
}

std::vector<CurvePoint> iou_curve(std::span<const double> per_frame_ious,
                                  std::span<const double> alphas, bool strict) {
    if (per_frame_ious.empty()) throw NoInstances("no frames to score");
    std::vector<CurvePoint> curve;
    curve.reserve(alphas.size());
    for (const double a : alphas) {
        std::int64_t hits = 0;
        for (const double iou : per_frame_ious) {
            if (strict ? (iou > a) : (iou >= a)) ++hits;
        }
        curve.push_back({a, static_cast<double>(hits) / static_cast<double>(per_frame_ious.size())});
    }
    return curve;
}

std::string report_to_json(const EvalReport& report) {
    json doc;
    doc["schema"] = kEvalReportSchema;
    doc["version"] = report.version;
    doc["n_frames"] = report.n_frames;
    json pck_arr = json::array();
    for (const PckPoint& p : report.pck) {
        pck_arr.push_back({{"alpha", p.alpha}, {"value", p.value}, {"hits", p.hits}, {"total", p.total}});
    }
    doc["pck"] = std::move(pck_arr);
    json iou_arr = json::array();
    for (const CurvePoint& p : report.iou_curve) {
        iou_arr.push_back({{"alpha", p.alpha}, {"value", p.value}});
    }
    doc["iou_curve"] = std::move(iou_arr);
    doc["mean_iou"] = report.mean_iou;
    doc["extras"] = report.extras;
    return doc.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed evaluation report: ") + e.what());
    }
    if (!doc.contains("schema") || doc["schema"].get<std::string>() != kEvalReportSchema) {
        throw IoError("not an evaluation report");
    }
    EvalReport report;
    report.version = doc["version"].get<int>();
    if (report.version != 1) {
        throw IoError("unsupported report version " + std::to_string(report.version));
    }
    report.n_frames = doc["n_frames"].get<std::int64_t>();
    for (const json& p : doc["pck"]) {
        report.pck.push_back({p["alpha"].get<double>(), p["value"].get<double>(),
                              p["hits"].get<std::int64_t>(), p["total"].get<std::int64_t>()});
    }
    for (const json& p : doc["iou_curve"]) {
        report.iou_curve.push_back({p["alpha"].get<double>(), p["value"].get<double>()});
    }
    report.mean_iou = doc["mean_iou"].get<double>();
    if (doc.contains("extras")) {
        for (const auto& [key, value] : doc["extras"].items()) {
            report.extras[key] = value.get<double>();
        }
    }
    return report;
}

void write_report(const std::filesystem::path& path, const EvalReport& report) {
    write_file_atomic(path, report_to_json(report));
}

EvalReport read_report(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    return report_from_json(std::string(bytes.begin(), bytes.end()));
}

}  // namespace csivid
