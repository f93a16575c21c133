// SPDX-License-Identifier: Apache-2.0
//
// csivid: turns WiFi channel sweeps into pose maps and rendered frames.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
// Diagnostics are single machine-parsable lines on stderr.

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <functional>
#include <map>
#include <optional>
#include <type_traits>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "csivid/binio.hpp"
#include "csivid/checkpoint.hpp"
#include "csivid/csil.hpp"
#include "csivid/dataset.hpp"
#include "csivid/errors.hpp"
#include "csivid/eval_metrics.hpp"
#include "csivid/image.hpp"
#include "csivid/networks.hpp"
#include "csivid/pose_maps.hpp"
#include "csivid/preprocess.hpp"
#include "csivid/synth_sim.hpp"
#include "csivid/train.hpp"

#ifndef CSIVID_VERSION_STRING
#define CSIVID_VERSION_STRING "unknown"
#endif

namespace fs = std::filesystem;
using namespace csivid;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

std::int64_t now_us() {
    return std::chrono::duration_cast<std::chrono::microseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

std::string one_line(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

void print_error(const char* kind, const std::string& message) {
    std::cerr << "csivid: error kind=" << kind << " msg=\"" << one_line(message) << "\"\n";
}

/// Exclusive advisory lock on an output directory; released on process exit.
class DirLock {
  public:
    explicit DirLock(const fs::path& dir) {
        fs::create_directories(dir);
        path_ = dir / ".csivid.lock";
        fd_ = ::open(path_.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
        if (fd_ < 0) throw IoError("cannot open lock file " + path_.string());
        if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
            ::close(fd_);
            fd_ = -1;
            throw IoError("another csivid run holds the lock on " + path_.string());
        }
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;
    ~DirLock() {
        if (fd_ >= 0) ::close(fd_);
    }

  private:
    fs::path path_;
    int fd_ = -1;
};

struct RunInfo {
    std::string subcommand;
    std::string config_path;
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::int64_t started_us = 0;
};

void write_manifest(const fs::path& out_dir, const RunInfo& info) {
    nlohmann::json doc;
    doc["schema"] = "csivid-run-manifest";
    doc["version"] = 1;
    doc["subcommand"] = info.subcommand;
    doc["config"] = info.config_path;
    doc["seed"] = info.seed;
    doc["inputs"] = info.inputs;
    doc["outputs"] = info.outputs;
    doc["tool_version"] = CSIVID_VERSION_STRING;
    doc["started_us"] = info.started_us;
    doc["finished_us"] = now_us();
    write_file_atomic(out_dir / "manifest.json", doc.dump(2) + "\n");
}

Tensor input_to_tensor(const InputTensor& in) {
    Tensor t({in.channels, in.height, in.width});
    t.data.assign(in.data.begin(), in.data.end());
    return t;
}

/// Corner-aligned rescale of skeleton coordinates between grids.
std::vector<Skeleton> rescale_skeletons(const std::vector<Skeleton>& persons, int src_h,
                                        int src_w, int dst_h, int dst_w) {
    const double sx = (src_w > 1) ? static_cast<double>(dst_w - 1) / (src_w - 1) : 0.0;
    const double sy = (src_h > 1) ? static_cast<double>(dst_h - 1) / (src_h - 1) : 0.0;
    std::vector<Skeleton> out = persons;
    for (Skeleton& s : out) {
        for (Keypoint& kp : s.joints) {
            kp.x *= sx;
            kp.y *= sy;
        }
    }
    return out;
}

// ----------------------------------------------------------------- synth --

struct SynthOpts {
    std::string out;
    SceneConfig scene;
    double noise_std = 0.01;
};

void run_synth(const SynthOpts& opt, RunInfo info) {
    opt.scene.validate();
    DirLock lock(opt.out);
    ChannelModel channel = ChannelModel::default_office();
    channel.noise_std = opt.noise_std;
    emit_dataset(opt.scene, channel, opt.out);
    info.seed = opt.scene.seed;
    info.outputs = {opt.out + "/csi.csil", opt.out + "/frames", opt.out + "/masks",
                    opt.out + "/keypoints.jsonl", opt.out + "/meta.txt"};
    write_manifest(opt.out, info);
}

// ------------------------------------------------------------ preprocess --

struct PreprocessOpts {
    std::string in;
    std::string out;
    PreprocessParams params;
    std::string alignment = "first";
};

void run_preprocess(const PreprocessOpts& opt, RunInfo info) {
    PreprocessParams params = opt.params;
    if (opt.alignment == "first") {
        params.alignment = WindowAlignment::kFirstAtOrAfter;
    } else if (opt.alignment == "uniform") {
        params.alignment = WindowAlignment::kUniformSubsample;
    } else {
        throw UsageError("alignment must be 'first' or 'uniform'");
    }
    DirLock lock(opt.out);
    const Dataset ds = load_dataset(opt.in);
    const PreprocessedSet set = preprocess_dataset(ds, params);
    write_preprocessed_file(fs::path(opt.out) / "tensors.bin", set);

    KvConfig summary;
    summary.set("c_in", std::to_string(set.c_in));
    summary.set("h_in", std::to_string(set.h_in));
    summary.set("w_in", std::to_string(set.w_in));
    summary.set("n_frames", std::to_string(set.frames.size()));
    summary.set("frame_width", std::to_string(set.frame_width));
    summary.set("frame_height", std::to_string(set.frame_height));
    write_file_atomic(fs::path(opt.out) / "meta.txt", summary.to_string());

    info.inputs = {opt.in};
    info.outputs = {opt.out + "/tensors.bin", opt.out + "/meta.txt"};
    write_manifest(opt.out, info);
}

// ---------------------------------------------------------------- training --

struct TrainCommonOpts {
    std::string out;
    int epochs = 20;
    int batch = 8;
    double lr = 0.0;  // filled per subcommand default
    int lr_drop_every = 5;
    double lr_drop_factor = 0.1;
    int threads = 1;
    bool float32 = false;
    std::uint64_t seed = 0;
    double sigma = 2.0;
    double paf_width = 2.0;
};

struct TrainMapperOpts {
    std::string cache;
    TrainCommonOpts common;
    int map_h = 32;
    int map_w = 64;
    double train_fraction = 0.75;
};

void write_train_log(const fs::path& path, const std::vector<EpochLog>& epochs,
                     const char* key_a, const char* key_b) {
    std::string text;
    for (const EpochLog& log : epochs) {
        text += epoch_log_json(log, key_a, key_b);
        text += '\n';
    }
    write_file_atomic(path, text);
}

void run_train_mapper(const TrainMapperOpts& opt, RunInfo info) {
    DirLock lock(opt.common.out);
    const PreprocessedSet set = read_preprocessed_file(fs::path(opt.cache) / "tensors.bin");
    const auto samples = to_mapper_samples(set, opt.map_h, opt.map_w);
    const auto [train, test] = split_dataset(samples, opt.train_fraction);
    if (train.empty()) throw EmptyInputs("no training samples after the split");

    MapperTrainConfig cfg;
    cfg.arch.c_in = set.c_in;
    cfg.arch.h_in = set.h_in;
    cfg.arch.w_in = set.w_in;
    cfg.arch.h_map = opt.map_h;
    cfg.arch.w_map = opt.map_w;
    cfg.schedule.base_lr = opt.common.lr;
    cfg.schedule.drop_every = opt.common.lr_drop_every;
    cfg.schedule.drop_factor = opt.common.lr_drop_factor;
    cfg.epochs = opt.common.epochs;
    cfg.batch_size = opt.common.batch;
    cfg.n_threads = opt.common.threads;
    cfg.seed = opt.common.seed;
    cfg.use_float32 = opt.common.float32;
    cfg.jhm_sigma = opt.common.sigma;
    cfg.paf_width = opt.common.paf_width;

    const TrainResult result = train_mapper(train, cfg, [](const EpochLog& log) {
        std::cout << epoch_log_json(log, "loss_jhm", "loss_paf") << "\n";
    });
    write_checkpoint(fs::path(opt.common.out) / "mapper.ckpt", result.checkpoint);
    write_train_log(fs::path(opt.common.out) / "train_log.jsonl", result.epochs, "loss_jhm",
                    "loss_paf");

    info.seed = opt.common.seed;
    info.inputs = {opt.cache + "/tensors.bin"};
    info.outputs = {opt.common.out + "/mapper.ckpt", opt.common.out + "/train_log.jsonl"};
    write_manifest(opt.common.out, info);
}

struct TrainGeneratorOpts {
    std::string data;
    TrainCommonOpts common;
    int map_h = 32;
    int map_w = 64;
    double train_fraction = 0.75;
    int max_pairs = 0;  // 0 = all
    std::int64_t identity_frame = -1;  // -1 = first annotated frame
};

void run_train_generator(const TrainGeneratorOpts& opt, RunInfo info) {
    DirLock lock(opt.common.out);
    const Dataset ds = load_dataset(opt.data);
    if (ds.annotations.empty()) throw EmptyInputs("dataset has no annotated frames");

    std::vector<std::int64_t> ids;
    ids.reserve(ds.annotations.size());
    for (const FrameAnnotation& f : ds.annotations) ids.push_back(f.frame_id);
    const auto [train_ids, test_ids] = split_dataset(ids, opt.train_fraction);
    std::vector<std::int64_t> use = train_ids;
    if (opt.max_pairs > 0 && static_cast<int>(use.size()) > opt.max_pairs) {
        use.resize(static_cast<std::size_t>(opt.max_pairs));
    }
    if (use.empty()) throw EmptyInputs("no training frames after the split");

    const std::int64_t identity_id =
        opt.identity_frame >= 0 ? opt.identity_frame : ds.annotations.front().frame_id;
    const Image identity_img = load_frame(ds, identity_id);
    Tensor identity({3, ds.frame_height, ds.frame_width});
    {
        const auto planar = image_to_planar(identity_img);
        identity.data.assign(planar.begin(), planar.end());
    }
    const fs::path bg_path = fs::path(opt.data) / "background.png";
    if (!fs::exists(bg_path)) {
        throw IoError("missing " + bg_path.string() +
                      "; the generator objective needs a person-free background frame");
    }
    const Image bg_img = read_png(bg_path);
    if (bg_img.height != ds.frame_height || bg_img.width != ds.frame_width ||
        bg_img.channels != 3) {
        throw ShapeMismatch("background.png does not match the frame dimensions");
    }
    Tensor background({3, ds.frame_height, ds.frame_width});
    {
        const auto planar = image_to_planar(bg_img);
        background.data.assign(planar.begin(), planar.end());
    }

    const auto samples = to_generator_samples(ds, use);

    GeneratorTrainConfig cfg;
    cfg.arch.h_frame = ds.frame_height;
    cfg.arch.w_frame = ds.frame_width;
    cfg.map_h = opt.map_h;
    cfg.map_w = opt.map_w;
    cfg.schedule.base_lr = opt.common.lr;
    cfg.schedule.drop_every = opt.common.lr_drop_every;
    cfg.schedule.drop_factor = opt.common.lr_drop_factor;
    cfg.epochs = opt.common.epochs;
    cfg.batch_size = opt.common.batch;
    cfg.n_threads = opt.common.threads;
    cfg.seed = opt.common.seed;
    cfg.use_float32 = opt.common.float32;
    cfg.jhm_sigma = opt.common.sigma;
    cfg.paf_width = opt.common.paf_width;

    const TrainResult result = train_generator(samples, identity, background, cfg,
                                               [](const EpochLog& log) {
                                                   std::cout << epoch_log_json(log, "loss_fore",
                                                                               "loss_back")
                                                             << "\n";
                                               });
    write_checkpoint(fs::path(opt.common.out) / "generator.ckpt", result.checkpoint);
    write_train_log(fs::path(opt.common.out) / "train_log.jsonl", result.epochs, "loss_fore",
                    "loss_back");

    info.seed = opt.common.seed;
    info.inputs = {opt.data};
    info.outputs = {opt.common.out + "/generator.ckpt", opt.common.out + "/train_log.jsonl"};
    write_manifest(opt.common.out, info);
}

// ------------------------------------------------------------------ infer --

struct InferOpts {
    std::string cache;
    std::string mapper;
    std::string generator;
    std::string out;
    std::string split = "test";
    double train_fraction = 0.75;
    AssemblyParams assembly;
    std::uint64_t seed = 0;
};

void run_infer(const InferOpts& opt, RunInfo info) {
    DirLock lock(opt.out);
    const PreprocessedSet set = read_preprocessed_file(fs::path(opt.cache) / "tensors.bin");
    const auto [n_train, n_test] = split_sizes(set.frames.size(), opt.train_fraction);
    std::size_t begin = 0, end = set.frames.size();
    if (opt.split == "train") {
        end = n_train;
    } else if (opt.split == "test") {
        begin = n_train;
    } else if (opt.split != "all") {
        throw UsageError("split must be train, test or all");
    }
    if (begin == end) throw EmptyInputs("selected split is empty");

    const Checkpoint mapper_ckpt = read_checkpoint(opt.mapper);
    const MapperConfig arch = mapper_config_from_meta(mapper_ckpt.meta);
    if (arch.c_in != set.c_in || arch.h_in != set.h_in || arch.w_in != set.w_in) {
        throw ShapeMismatch("checkpoint input shape does not match the tensor cache");
    }
    const Tensor& mean = mapper_ckpt.extra.at("input_mean");
    const Tensor& stddev = mapper_ckpt.extra.at("input_std");

    std::optional<Checkpoint> gen_ckpt;
    std::optional<GeneratorConfig> gen_arch;
    const Tensor* identity = nullptr;
    if (!opt.generator.empty()) {
        gen_ckpt = read_checkpoint(opt.generator);
        gen_arch = generator_config_from_meta(gen_ckpt->meta);
        identity = &gen_ckpt->extra.at("identity_frame");
        fs::create_directories(fs::path(opt.out) / "pred_frames");
    }

    std::vector<FrameAnnotation> predictions;
    const LimbTopology& topo = LimbTopology::canonical();
    ConvWorkspace<double> ws;
    for (std::size_t i = begin; i < end; ++i) {
        const PreprocessedFrame& frame = set.frames[i];
        const Tensor input = normalize_input(input_to_tensor(frame.input), mean, stddev);
        const MapperOutput<double> maps =
            mapper_forward<double>(input, mapper_ckpt.params, arch, nullptr, &ws);
        const Jhm jhm = to_jhm(maps.jhm);
        const Paf paf = to_paf(maps.paf);
        const auto skeletons = assemble_skeletons(jhm, paf, topo, opt.assembly);
        FrameAnnotation ann;
        ann.frame_id = frame.frame_id;
        ann.timestamp_us = frame.timestamp_us;
        ann.persons = rescale_skeletons(skeletons, arch.h_map, arch.w_map, set.frame_height,
                                        set.frame_width);
        predictions.push_back(std::move(ann));

        if (gen_ckpt) {
            const Tensor synth = generator_forward<double>(
                maps.jhm, maps.paf, std::vector<const Tensor*>{identity}, gen_ckpt->params,
                *gen_arch, nullptr, &ws);
            const Image img = planar_to_image(synth.data, 3, gen_arch->h_frame,
                                              gen_arch->w_frame);
            char stem[16];
            std::snprintf(stem, sizeof(stem), "%06lld",
                          static_cast<long long>(frame.frame_id));
            write_png(fs::path(opt.out) / "pred_frames" / (std::string(stem) + ".png"), img);
        }
    }
    write_keypoints_jsonl(fs::path(opt.out) / "keypoints.jsonl", predictions);

    info.seed = opt.seed;
    info.inputs = {opt.cache + "/tensors.bin", opt.mapper};
    if (!opt.generator.empty()) info.inputs.push_back(opt.generator);
    info.outputs = {opt.out + "/keypoints.jsonl"};
    if (!opt.generator.empty()) info.outputs.push_back(opt.out + "/pred_frames");
    write_manifest(opt.out, info);
}

// ------------------------------------------------------------------- eval --

struct EvalOpts {
    std::string data;
    std::string pred;
    std::string out;
    double mask_threshold = 0.1;
    bool strict_iou = false;
    std::uint64_t seed = 0;
};

void run_eval(const EvalOpts& opt, RunInfo info) {
    const fs::path out_path(opt.out);
    const fs::path out_dir = out_path.parent_path().empty() ? "." : out_path.parent_path();
    DirLock lock(out_dir);

    const Dataset ds = load_dataset(opt.data);
    std::map<std::int64_t, const FrameAnnotation*> gt_by_id;
    for (const FrameAnnotation& f : ds.annotations) gt_by_id[f.frame_id] = &f;

    const auto predictions = read_keypoints_jsonl(fs::path(opt.pred) / "keypoints.jsonl");
    if (predictions.empty()) throw EmptyInputs("prediction file has no frames");

    std::vector<FramePoses> frames;
    frames.reserve(predictions.size());
    for (const FrameAnnotation& pred : predictions) {
        const auto it = gt_by_id.find(pred.frame_id);
        if (it == gt_by_id.end()) {
            throw IoError("no ground truth for predicted frame " +
                          std::to_string(pred.frame_id));
        }
        frames.push_back({it->second->persons, pred.persons});
    }

    EvalReport report;
    report.n_frames = static_cast<std::int64_t>(frames.size());
    const auto pck_alphas = default_pck_alphas();
    report.pck = pck_curve(frames, pck_alphas);

    const fs::path pred_frames_dir = fs::path(opt.pred) / "pred_frames";
    const fs::path bg_path = fs::path(opt.data) / "background.png";
    bool mask_eval = fs::exists(pred_frames_dir) && fs::exists(bg_path);
    if (mask_eval) {
        const Image bg = read_png(bg_path);
        std::vector<double> ious;
        ious.reserve(predictions.size());
        const int thr = static_cast<int>(std::lround(opt.mask_threshold * 255.0));
        for (const FrameAnnotation& pred : predictions) {
            const fs::path img_path =
                pred_frames_dir / frame_png_path(opt.pred, pred.frame_id).filename();
            if (!fs::exists(img_path)) {
                throw IoError("missing predicted frame " + img_path.string());
            }
            const Image img = read_png(img_path);
            if (img.height != bg.height || img.width != bg.width) {
                throw ShapeMismatch("predicted frame size differs from the background");
            }
            std::vector<std::uint8_t> pred_mask(
                static_cast<std::size_t>(img.height) * img.width, 0);
            for (int y = 0; y < img.height; ++y) {
                for (int x = 0; x < img.width; ++x) {
                    int diff = 0;
                    for (int c = 0; c < 3; ++c) {
                        diff = std::max(diff, std::abs(static_cast<int>(img.at(y, x, c)) -
                                                       static_cast<int>(bg.at(y, x, c))));
                    }
                    if (diff > thr) {
                        pred_mask[static_cast<std::size_t>(y) * img.width + x] = 1;
                    }
                }
            }
            const auto gt_mask = load_mask(ds, pred.frame_id);
            ious.push_back(mask_iou(pred_mask, gt_mask));
        }
        report.iou_curve = iou_curve(ious, default_iou_alphas(), opt.strict_iou);
        report.mean_iou = mean_iou(ious);
    }
    report.extras["mask_eval"] = mask_eval ? 1.0 : 0.0;
    report.extras["n_gt_frames"] = static_cast<double>(ds.annotations.size());

    write_report(out_path, report);

    info.seed = opt.seed;
    info.inputs = {opt.data, opt.pred};
    info.outputs = {opt.out};
    write_manifest(out_dir, info);
}

// ------------------------------------------------------------------ render --

struct RenderOpts {
    std::string data;
    std::string out;
    int map_h = 32;
    int map_w = 64;
    double sigma = 2.0;
    double paf_width = 2.0;
    int max_frames = 8;
    std::uint64_t seed = 0;
};

Image gray_map(const std::vector<double>& values, int height, int width) {
    Image img = Image::filled(height, width, 1, 0);
    for (int i = 0; i < height * width; ++i) {
        const double v = std::clamp(values[static_cast<std::size_t>(i)], 0.0, 1.0);
        img.data[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
    return img;
}

void run_render(const RenderOpts& opt, RunInfo info) {
    DirLock lock(opt.out);
    const Dataset ds = load_dataset(opt.data);
    const LimbTopology& topo = LimbTopology::canonical();
    SceneConfig stick_scene;
    stick_scene.frame_height = ds.frame_height;
    stick_scene.frame_width = ds.frame_width;

    int rendered = 0;
    for (const FrameAnnotation& ann : ds.annotations) {
        if (opt.max_frames > 0 && rendered >= opt.max_frames) break;
        const auto grid = skeletons_to_grid(ann.persons, ds.frame_height, ds.frame_width,
                                            opt.map_h, opt.map_w);
        const Jhm jhm = render_jhm(grid, opt.sigma, opt.map_h, opt.map_w);
        const Paf paf = render_paf(grid, topo, opt.paf_width, opt.map_h, opt.map_w);

        std::vector<double> jhm_max(static_cast<std::size_t>(opt.map_h) * opt.map_w, 0.0);
        for (int c = 0; c < kNumKeypoints; ++c) {
            for (int i = 0; i < opt.map_h * opt.map_w; ++i) {
                jhm_max[static_cast<std::size_t>(i)] =
                    std::max(jhm_max[static_cast<std::size_t>(i)],
                             jhm.data[static_cast<std::size_t>(c) * opt.map_h * opt.map_w + i]);
            }
        }
        std::vector<double> paf_mag(static_cast<std::size_t>(opt.map_h) * opt.map_w, 0.0);
        for (int l = 0; l < LimbTopology::kNumLimbs; ++l) {
            for (int i = 0; i < opt.map_h * opt.map_w; ++i) {
                const double vx =
                    paf.data[static_cast<std::size_t>(2 * l) * opt.map_h * opt.map_w + i];
                const double vy =
                    paf.data[static_cast<std::size_t>(2 * l + 1) * opt.map_h * opt.map_w + i];
                paf_mag[static_cast<std::size_t>(i)] =
                    std::max(paf_mag[static_cast<std::size_t>(i)], std::hypot(vx, vy));
            }
        }
        char stem[16];
        std::snprintf(stem, sizeof(stem), "%06lld", static_cast<long long>(ann.frame_id));
        write_png(fs::path(opt.out) / (std::string("jhm_") + stem + ".png"),
                  gray_map(jhm_max, opt.map_h, opt.map_w));
        write_png(fs::path(opt.out) / (std::string("paf_") + stem + ".png"),
                  gray_map(paf_mag, opt.map_h, opt.map_w));
        const RenderedFrame rf = render_frame(stick_scene, ann.persons);
        write_png(fs::path(opt.out) / (std::string("stick_") + stem + ".png"), rf.frame);
        ++rendered;
    }
    if (rendered == 0) throw EmptyInputs("no annotated frames to render");

    info.seed = opt.seed;
    info.inputs = {opt.data};
    info.outputs = {opt.out};
    write_manifest(opt.out, info);
}

// ------------------------------------------------------- config handling --
// Config files are plain key=value lines; keys mirror the long flag names
// without the leading dashes. Command-line flags win over config values and
// unknown keys are usage errors.

struct ConfigBinding {
    std::string key;
    std::function<void(const std::string&)> apply;
};

template <typename T>
ConfigBinding bind_number(const char* key, T* target) {
    return {key, [key = std::string(key), target](const std::string& raw) {
                try {
                    if constexpr (std::is_floating_point_v<T>) {
                        *target = static_cast<T>(std::stod(raw));
                    } else {
                        *target = static_cast<T>(std::stoll(raw));
                    }
                } catch (const std::exception&) {
                    throw UsageError("bad value for config key '" + key + "': " + raw);
                }
            }};
}

ConfigBinding bind_string(const char* key, std::string* target) {
    return {key, [target](const std::string& raw) { *target = raw; }};
}

ConfigBinding bind_bool(const char* key, bool* target) {
    return {key, [key = std::string(key), target](const std::string& raw) {
                if (raw == "1" || raw == "true") {
                    *target = true;
                } else if (raw == "0" || raw == "false") {
                    *target = false;
                } else {
                    throw UsageError("bad value for config key '" + key + "': " + raw);
                }
            }};
}

void apply_config(const CLI::App* sub, const std::string& path,
                  const std::vector<ConfigBinding>& bindings) {
    if (path.empty()) return;
    KvConfig kv;
    try {
        kv = KvConfig::load(path);
    } catch (const Error&) {
        throw UsageError("cannot read config file " + path);
    }
    for (const auto& [key, value] : kv.values()) {
        const auto it = std::find_if(bindings.begin(), bindings.end(),
                                     [&key](const ConfigBinding& b) { return b.key == key; });
        if (it == bindings.end()) {
            throw UsageError("unknown config key '" + key + "' in " + path);
        }
        if (sub->count("--" + key) > 0) continue;  // command line wins
        it->apply(value);
    }
}

std::vector<ConfigBinding> train_common_bindings(TrainCommonOpts& opts) {
    return {
        bind_string("out", &opts.out),
        bind_number("epochs", &opts.epochs),
        bind_number("batch", &opts.batch),
        bind_number("lr", &opts.lr),
        bind_number("lr-drop-every", &opts.lr_drop_every),
        bind_number("lr-drop-factor", &opts.lr_drop_factor),
        bind_number("threads", &opts.threads),
        bind_bool("float32", &opts.float32),
        bind_number("seed", &opts.seed),
        bind_number("sigma", &opts.sigma),
        bind_number("paf-width", &opts.paf_width),
    };
}

void add_train_common(CLI::App* sub, TrainCommonOpts& opts, double default_lr) {
    opts.lr = default_lr;
    sub->add_option("--out", opts.out, "output directory")->required();
    sub->add_option("--epochs", opts.epochs, "training epochs");
    sub->add_option("--batch", opts.batch, "mini-batch size");
    sub->add_option("--lr", opts.lr, "base learning rate");
    sub->add_option("--lr-drop-every", opts.lr_drop_every, "epochs between learning-rate drops");
    sub->add_option("--lr-drop-factor", opts.lr_drop_factor, "learning-rate drop factor");
    sub->add_option("--threads", opts.threads, "worker threads (results are thread-count invariant)");
    sub->add_flag("--float32", opts.float32, "train in single precision");
    sub->add_option("--seed", opts.seed, "parameter init / shuffle seed");
    sub->add_option("--sigma", opts.sigma, "heat-map Gaussian sigma (map pixels)");
    sub->add_option("--paf-width", opts.paf_width, "affinity field half-width (map pixels)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"WiFi channel sweeps to pose maps and rendered frames"};
    app.set_version_flag("--version", CSIVID_VERSION_STRING);
    app.require_subcommand(1);

    SynthOpts synth;
    std::string synth_config;
    CLI::App* synth_cmd = app.add_subcommand("synth", "simulate a recording session");
    synth_cmd->add_option("--config", synth_config, "key=value config file");
    synth_cmd->add_option("--out", synth.out, "output dataset directory")->required();
    synth_cmd->add_option("--seed", synth.scene.seed, "simulation seed");
    synth_cmd->add_option("--persons", synth.scene.n_persons, "number of persons (0-3)");
    synth_cmd->add_option("--duration", synth.scene.duration_s, "seconds of capture");
    synth_cmd->add_option("--frame-height", synth.scene.frame_height, "frame height px");
    synth_cmd->add_option("--frame-width", synth.scene.frame_width, "frame width px");
    synth_cmd->add_option("--rate", synth.scene.csi_rate_hz, "CSI rate Hz");
    synth_cmd->add_option("--fps", synth.scene.fps, "video frame rate");
    synth_cmd->add_option("--subcarriers", synth.scene.n_subcarriers, "subcarrier count");
    synth_cmd->add_option("--carrier", synth.scene.carrier_hz, "carrier frequency Hz");
    synth_cmd->add_option("--bandwidth", synth.scene.bandwidth_hz, "bandwidth Hz");
    synth_cmd->add_option("--room-w", synth.scene.room_w, "room width m");
    synth_cmd->add_option("--room-d", synth.scene.room_d, "room depth m");
    synth_cmd->add_option("--room-h", synth.scene.room_h, "room height m");
    synth_cmd->add_option("--thickness", synth.scene.limb_thickness_px, "limb thickness px");
    synth_cmd->add_option("--noise", synth.noise_std, "complex noise std");

    PreprocessOpts preprocess;
    std::string pre_config;
    std::uint64_t preprocess_seed = 0;
    CLI::App* pre_cmd = app.add_subcommand("preprocess", "CSI stream to input tensors");
    pre_cmd->add_option("--config", pre_config, "key=value config file");
    pre_cmd->add_option("--in", preprocess.in, "dataset directory")->required();
    pre_cmd->add_option("--out", preprocess.out, "cache directory")->required();
    pre_cmd->add_option("--h-in", preprocess.params.h_in, "input tensor height");
    pre_cmd->add_option("--w-in", preprocess.params.w_in, "input tensor width");
    pre_cmd->add_option("--k", preprocess.params.window_k, "CSI samples per frame window");
    pre_cmd->add_option("--alignment", preprocess.alignment, "window alignment: first|uniform");
    pre_cmd->add_option("--hampel-window", preprocess.params.hampel_window, "outlier window");
    pre_cmd->add_option("--hampel-mads", preprocess.params.hampel_n_mads, "outlier threshold");
    pre_cmd->add_option("--seed", preprocess_seed, "accepted for interface symmetry");

    TrainMapperOpts tm;
    std::string tm_config;
    CLI::App* tm_cmd = app.add_subcommand("train-mapper", "train the CSI to pose-map network");
    tm_cmd->add_option("--config", tm_config, "key=value config file");
    tm_cmd->add_option("--cache", tm.cache, "preprocess output directory")->required();
    add_train_common(tm_cmd, tm.common, 1e-4);
    tm_cmd->add_option("--map-h", tm.map_h, "output map height");
    tm_cmd->add_option("--map-w", tm.map_w, "output map width");
    tm_cmd->add_option("--train-fraction", tm.train_fraction, "chronological train split");

    TrainGeneratorOpts tg;
    std::string tg_config;
    CLI::App* tg_cmd = app.add_subcommand("train-generator", "train the frame synthesis network");
    tg_cmd->add_option("--config", tg_config, "key=value config file");
    tg_cmd->add_option("--data", tg.data, "dataset directory")->required();
    add_train_common(tg_cmd, tg.common, 1e-3);
    tg_cmd->add_option("--map-h", tg.map_h, "conditioning map height");
    tg_cmd->add_option("--map-w", tg.map_w, "conditioning map width");
    tg_cmd->add_option("--train-fraction", tg.train_fraction, "chronological train split");
    tg_cmd->add_option("--max-pairs", tg.max_pairs, "cap on training pairs (0 = all)");
    tg_cmd->add_option("--identity-frame", tg.identity_frame,
                       "identity frame id (-1 = first annotated frame)");

    InferOpts infer;
    std::string infer_config;
    CLI::App* infer_cmd = app.add_subcommand("infer", "predict maps, skeletons and frames");
    infer_cmd->add_option("--config", infer_config, "key=value config file");
    infer_cmd->add_option("--cache", infer.cache, "preprocess output directory")->required();
    infer_cmd->add_option("--mapper", infer.mapper, "mapper checkpoint")->required();
    infer_cmd->add_option("--generator", infer.generator, "generator checkpoint (optional)");
    infer_cmd->add_option("--out", infer.out, "output directory")->required();
    infer_cmd->add_option("--split", infer.split, "train|test|all");
    infer_cmd->add_option("--train-fraction", infer.train_fraction, "chronological split used");
    infer_cmd->add_option("--nms", infer.assembly.nms_threshold, "peak threshold");
    infer_cmd->add_option("--score", infer.assembly.score_threshold, "limb score threshold");
    infer_cmd->add_option("--min-keypoints", infer.assembly.min_keypoints,
                          "minimum keypoints per skeleton");
    infer_cmd->add_option("--seed", infer.seed, "accepted for interface symmetry");

    EvalOpts eval;
    std::string eval_config;
    CLI::App* eval_cmd = app.add_subcommand("eval", "score predictions against ground truth");
    eval_cmd->add_option("--config", eval_config, "key=value config file");
    eval_cmd->add_option("--data", eval.data, "dataset directory")->required();
    eval_cmd->add_option("--pred", eval.pred, "infer output directory")->required();
    eval_cmd->add_option("--out", eval.out, "report path (json)")->required();
    eval_cmd->add_option("--mask-threshold", eval.mask_threshold,
                         "background-difference mask threshold (0-1)");
    eval_cmd->add_flag("--strict-iou", eval.strict_iou, "count IoU > alpha instead of >=");
    eval_cmd->add_option("--seed", eval.seed, "accepted for interface symmetry");

    RenderOpts render;
    std::string render_config;
    CLI::App* render_cmd = app.add_subcommand("render", "rasterize ground-truth maps and sticks");
    render_cmd->add_option("--config", render_config, "key=value config file");
    render_cmd->add_option("--data", render.data, "dataset directory")->required();
    render_cmd->add_option("--out", render.out, "output directory")->required();
    render_cmd->add_option("--map-h", render.map_h, "map height");
    render_cmd->add_option("--map-w", render.map_w, "map width");
    render_cmd->add_option("--sigma", render.sigma, "heat-map sigma");
    render_cmd->add_option("--paf-width", render.paf_width, "affinity half-width");
    render_cmd->add_option("--frames", render.max_frames, "max frames to render (0 = all)");
    render_cmd->add_option("--seed", render.seed, "accepted for interface symmetry");


    std::vector<ConfigBinding> synth_binds = {
        bind_number("seed", &synth.scene.seed),
        bind_number("persons", &synth.scene.n_persons),
        bind_number("duration", &synth.scene.duration_s),
        bind_number("frame-height", &synth.scene.frame_height),
        bind_number("frame-width", &synth.scene.frame_width),
        bind_number("rate", &synth.scene.csi_rate_hz),
        bind_number("fps", &synth.scene.fps),
        bind_number("subcarriers", &synth.scene.n_subcarriers),
        bind_number("carrier", &synth.scene.carrier_hz),
        bind_number("bandwidth", &synth.scene.bandwidth_hz),
        bind_number("room-w", &synth.scene.room_w),
        bind_number("room-d", &synth.scene.room_d),
        bind_number("room-h", &synth.scene.room_h),
        bind_number("thickness", &synth.scene.limb_thickness_px),
        bind_number("noise", &synth.noise_std),
    };
    std::vector<ConfigBinding> pre_binds = {
        bind_number("h-in", &preprocess.params.h_in),
        bind_number("w-in", &preprocess.params.w_in),
        bind_number("k", &preprocess.params.window_k),
        bind_string("alignment", &preprocess.alignment),
        bind_number("hampel-window", &preprocess.params.hampel_window),
        bind_number("hampel-mads", &preprocess.params.hampel_n_mads),
        bind_number("seed", &preprocess_seed),
    };
    std::vector<ConfigBinding> tm_binds = train_common_bindings(tm.common);
    tm_binds.push_back(bind_number("map-h", &tm.map_h));
    tm_binds.push_back(bind_number("map-w", &tm.map_w));
    tm_binds.push_back(bind_number("train-fraction", &tm.train_fraction));
    std::vector<ConfigBinding> tg_binds = train_common_bindings(tg.common);
    tg_binds.push_back(bind_number("map-h", &tg.map_h));
    tg_binds.push_back(bind_number("map-w", &tg.map_w));
    tg_binds.push_back(bind_number("train-fraction", &tg.train_fraction));
    tg_binds.push_back(bind_number("max-pairs", &tg.max_pairs));
    tg_binds.push_back(bind_number("identity-frame", &tg.identity_frame));
    std::vector<ConfigBinding> infer_binds = {
        bind_string("split", &infer.split),
        bind_number("train-fraction", &infer.train_fraction),
        bind_number("nms", &infer.assembly.nms_threshold),
        bind_number("score", &infer.assembly.score_threshold),
        bind_number("min-keypoints", &infer.assembly.min_keypoints),
        bind_number("seed", &infer.seed),
    };
    std::vector<ConfigBinding> eval_binds = {
        bind_number("mask-threshold", &eval.mask_threshold),
        bind_bool("strict-iou", &eval.strict_iou),
        bind_number("seed", &eval.seed),
    };
    std::vector<ConfigBinding> render_binds = {
        bind_number("map-h", &render.map_h),
        bind_number("map-w", &render.map_w),
        bind_number("sigma", &render.sigma),
        bind_number("paf-width", &render.paf_width),
        bind_number("frames", &render.max_frames),
        bind_number("seed", &render.seed),
    };

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("usage", e.what());
        return kExitUsage;
    }

    RunInfo info;
    info.started_us = now_us();
    try {
        if (synth_cmd->parsed()) {
            info.subcommand = "synth";
            info.config_path = synth_config;
            apply_config(synth_cmd, synth_config, synth_binds);
            run_synth(synth, info);
        } else if (pre_cmd->parsed()) {
            info.subcommand = "preprocess";
            info.config_path = pre_config;
            apply_config(pre_cmd, pre_config, pre_binds);
            info.seed = preprocess_seed;
            run_preprocess(preprocess, info);
        } else if (tm_cmd->parsed()) {
            info.subcommand = "train-mapper";
            info.config_path = tm_config;
            apply_config(tm_cmd, tm_config, tm_binds);
            run_train_mapper(tm, info);
        } else if (tg_cmd->parsed()) {
            info.subcommand = "train-generator";
            info.config_path = tg_config;
            apply_config(tg_cmd, tg_config, tg_binds);
            run_train_generator(tg, info);
        } else if (infer_cmd->parsed()) {
            info.subcommand = "infer";
            info.config_path = infer_config;
            apply_config(infer_cmd, infer_config, infer_binds);
            run_infer(infer, info);
        } else if (eval_cmd->parsed()) {
            info.subcommand = "eval";
            info.config_path = eval_config;
            apply_config(eval_cmd, eval_config, eval_binds);
            run_eval(eval, info);
        } else if (render_cmd->parsed()) {
            info.subcommand = "render";
            info.config_path = render_config;
            apply_config(render_cmd, render_config, render_binds);
            run_render(render, info);
        }
    } catch (const UsageError& e) {
        print_error("usage", e.what());
        return kExitUsage;
    } catch (const NonFiniteLoss& e) {
        print_error("numeric", e.what());
        return kExitNumeric;
    } catch (const NonFiniteGradient& e) {
        print_error("numeric", e.what());
        return kExitNumeric;
    } catch (const Error& e) {
        print_error("data", e.what());
        return kExitData;
    } catch (const std::exception& e) {
        print_error("data", e.what());
        return kExitData;
    }
    return kExitOk;
}
