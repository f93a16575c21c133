// SPDX-License-Identifier: Apache-2.0
#include "csivid/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "csivid/binio.hpp"
#include "csivid/csil.hpp"
#include "csivid/errors.hpp"

namespace csivid {

namespace {

using nlohmann::json;

constexpr char kCacheMagic[4] = {'C', 'V', 'T', 'C'};
constexpr std::uint16_t kCacheVersion = 1;

std::string frame_stem(std::int64_t frame_id) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06lld", static_cast<long long>(frame_id));
    return buf;
}

json skeleton_to_json(const Skeleton& s) {
    json arr = json::array();
    for (const Keypoint& kp : s.joints) {
        arr.push_back(json::array({kp.x, kp.y, kp.visible ? 1 : 0}));
    }
    return arr;
}

Skeleton skeleton_from_json(const json& arr, const std::filesystem::path& path) {
    if (!arr.is_array() || arr.size() != static_cast<std::size_t>(kNumKeypoints)) {
        throw IoError("bad keypoint count in " + path.string());
    }
    Skeleton s;
    for (int k = 0; k < kNumKeypoints; ++k) {
        const json& t = arr[static_cast<std::size_t>(k)];
        if (!t.is_array() || t.size() != 3) {
            throw IoError("bad keypoint triple in " + path.string());
        }
        Keypoint& kp = s.joints[static_cast<std::size_t>(k)];
        kp.x = t[0].get<double>();
        kp.y = t[1].get<double>();
        kp.visible = t[2].get<double>() != 0.0;
        kp.confidence = kp.visible ? 1.0 : 0.0;
    }
    return s;
}

}  // namespace

void write_keypoints_jsonl(const std::filesystem::path& path,
                           std::span<const FrameAnnotation> frames) {
    std::string out;
    for (const FrameAnnotation& f : frames) {
        json obj;
        obj["frame_id"] = f.frame_id;
        obj["timestamp_us"] = f.timestamp_us;
        json persons = json::array();
        for (const Skeleton& s : f.persons) persons.push_back(skeleton_to_json(s));
        obj["persons"] = std::move(persons);
        out += obj.dump();
        out += '\n';
    }
    write_file_atomic(path, out);
}

std::vector<FrameAnnotation> read_keypoints_jsonl(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    std::string text(bytes.begin(), bytes.end());
    std::istringstream in(text);
    std::vector<FrameAnnotation> frames;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw IoError("malformed annotation line " + std::to_string(frames.size() + 1) +
                          " in " + path.string() + ": " + e.what());
        }
        if (!obj.contains("frame_id") || !obj.contains("timestamp_us") ||
            !obj.contains("persons")) {
            throw IoError("missing annotation field in " + path.string());
        }
        FrameAnnotation f;
        f.frame_id = obj["frame_id"].get<std::int64_t>();
        f.timestamp_us = obj["timestamp_us"].get<std::int64_t>();
        for (const json& p : obj["persons"]) f.persons.push_back(skeleton_from_json(p, path));
        frames.push_back(std::move(f));
    }
    return frames;
}

std::filesystem::path frame_png_path(const std::filesystem::path& dir, std::int64_t frame_id) {
    return dir / "frames" / (frame_stem(frame_id) + ".png");
}

std::filesystem::path mask_png_path(const std::filesystem::path& dir, std::int64_t frame_id) {
    return dir / "masks" / (frame_stem(frame_id) + ".png");
}

Dataset load_dataset(const std::filesystem::path& dir) {
    Dataset ds;
    ds.dir = dir;
    ds.csi = read_csil_file(dir / "csi.csil");
    ds.annotations = read_keypoints_jsonl(dir / "keypoints.jsonl");
    ds.meta = KvConfig::load(dir / "meta.txt");
    ds.fps = ds.meta.get_double("fps");
    ds.rate_hz = ds.meta.get_double("rate_hz");
    ds.frame_width = static_cast<int>(ds.meta.get_int("width"));
    ds.frame_height = static_cast<int>(ds.meta.get_int("height"));
    if (ds.fps <= 0.0 || ds.rate_hz <= 0.0 || ds.frame_width <= 0 || ds.frame_height <= 0) {
        throw IoError("invalid meta.txt in " + dir.string());
    }
    return ds;
}

Image load_frame(const Dataset& ds, std::int64_t frame_id) {
    Image img = read_png(frame_png_path(ds.dir, frame_id));
    if (img.height != ds.frame_height || img.width != ds.frame_width || img.channels != 3) {
        throw ShapeMismatch("frame " + frame_stem(frame_id) + " does not match meta dimensions");
    }
    return img;
}

std::vector<std::uint8_t> load_mask(const Dataset& ds, std::int64_t frame_id) {
    Image img = read_png(mask_png_path(ds.dir, frame_id));
    if (img.height != ds.frame_height || img.width != ds.frame_width) {
        throw ShapeMismatch("mask " + frame_stem(frame_id) + " does not match meta dimensions");
    }
    return image_to_mask(img);
}

PreprocessedSet preprocess_dataset(const Dataset& ds, const PreprocessParams& params) {
    if (params.window_k <= 0 || params.h_in <= 0 || params.w_in <= 0) {
        throw UsageError("preprocess parameters must be positive");
    }
    const CsiSequence cleaned =
        remove_outliers(ds.csi, params.hampel_window, params.hampel_n_mads);
    const CsiSequence resampled = resample_uniform(cleaned, ds.rate_hz);

    std::vector<FrameIndexEntry> index;
    index.reserve(ds.annotations.size());
    for (const FrameAnnotation& f : ds.annotations) {
        index.push_back({f.frame_id, f.timestamp_us});
    }
    const auto period_us = static_cast<std::int64_t>(std::llround(1e6 / ds.fps));
    const std::vector<CsiWindow> windows =
        pair_windows(resampled, index, params.window_k, params.alignment, period_us);

    std::map<std::int64_t, const FrameAnnotation*> by_id;
    for (const FrameAnnotation& f : ds.annotations) by_id[f.frame_id] = &f;

    PreprocessedSet set;
    set.c_in = ds.csi.header.n_tx * ds.csi.header.n_rx;
    set.h_in = params.h_in;
    set.w_in = params.w_in;
    set.frame_width = ds.frame_width;
    set.frame_height = ds.frame_height;
    set.fps = ds.fps;
    set.rate_hz = ds.rate_hz;
    for (const CsiWindow& w : windows) {
        PreprocessedFrame pf;
        pf.frame_id = w.frame_id;
        const FrameAnnotation& ann = *by_id.at(w.frame_id);
        pf.timestamp_us = ann.timestamp_us;
        pf.input = to_input_tensor(w, params.h_in, params.w_in);
        pf.persons = ann.persons;
        set.frames.push_back(std::move(pf));
    }
    return set;
}

std::vector<std::uint8_t> write_preprocessed(const PreprocessedSet& set) {
    ByteWriter w;
    w.write_raw(kCacheMagic, 4);
    w.write_u16(kCacheVersion);
    w.write_u16(static_cast<std::uint16_t>(set.c_in));
    w.write_u16(static_cast<std::uint16_t>(set.h_in));
    w.write_u16(static_cast<std::uint16_t>(set.w_in));
    w.write_u16(static_cast<std::uint16_t>(set.frame_width));
    w.write_u16(static_cast<std::uint16_t>(set.frame_height));
    w.write_f64(set.fps);
    w.write_f64(set.rate_hz);
    w.write_u32(static_cast<std::uint32_t>(set.frames.size()));
    const std::size_t plane = static_cast<std::size_t>(set.c_in) * set.h_in * set.w_in;
    for (const PreprocessedFrame& f : set.frames) {
        if (f.input.data.size() != plane) {
            throw DimensionMismatch("input tensor does not match cache dimensions");
        }
        w.write_u64(static_cast<std::uint64_t>(f.frame_id));
        w.write_u64(static_cast<std::uint64_t>(f.timestamp_us));
        w.write_u16(static_cast<std::uint16_t>(f.persons.size()));
        for (const Skeleton& s : f.persons) {
            for (const Keypoint& kp : s.joints) {
                w.write_f64(kp.x);
                w.write_f64(kp.y);
                w.write_u8(kp.visible ? 1 : 0);
            }
        }
        for (const double v : f.input.data) w.write_f64(v);
    }
    return w.take();
}

PreprocessedSet parse_preprocessed(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    char magic[4];
    r.read_raw(magic, 4);
    if (std::memcmp(magic, kCacheMagic, 4) != 0) {
        throw BadMagic("not a preprocessed tensor cache");
    }
    const std::uint16_t version = r.read_u16();
    if (version != kCacheVersion) {
        throw BadMagic("unsupported cache version " + std::to_string(version));
    }
    PreprocessedSet set;
    set.c_in = r.read_u16();
    set.h_in = r.read_u16();
    set.w_in = r.read_u16();
    set.frame_width = r.read_u16();
    set.frame_height = r.read_u16();
    set.fps = r.read_f64();
    set.rate_hz = r.read_f64();
    const std::uint32_t n = r.read_u32();
    const std::size_t plane = static_cast<std::size_t>(set.c_in) * set.h_in * set.w_in;
    set.frames.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        PreprocessedFrame f;
        f.frame_id = static_cast<std::int64_t>(r.read_u64());
        f.timestamp_us = static_cast<std::int64_t>(r.read_u64());
        const std::uint16_t n_persons = r.read_u16();
        f.persons.resize(n_persons);
        for (Skeleton& s : f.persons) {
            for (Keypoint& kp : s.joints) {
                kp.x = r.read_f64();
                kp.y = r.read_f64();
                kp.visible = r.read_u8() != 0;
                kp.confidence = kp.visible ? 1.0 : 0.0;
            }
        }
        f.input.frame_id = f.frame_id;
        f.input.channels = set.c_in;
        f.input.height = set.h_in;
        f.input.width = set.w_in;
        f.input.data.resize(plane);
        for (double& v : f.input.data) v = r.read_f64();
        set.frames.push_back(std::move(f));
    }
    if (!r.at_end()) throw TruncatedRecord("trailing bytes after tensor cache");
    return set;
}

void write_preprocessed_file(const std::filesystem::path& path, const PreprocessedSet& set) {
    write_file_atomic(path, write_preprocessed(set));
}

PreprocessedSet read_preprocessed_file(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    return parse_preprocessed(bytes);
}

std::vector<MapperSample> to_mapper_samples(const PreprocessedSet& set, int map_h, int map_w) {
    std::vector<MapperSample> samples;
    samples.reserve(set.frames.size());
    for (const PreprocessedFrame& f : set.frames) {
        MapperSample s;
        s.input = Tensor({set.c_in, set.h_in, set.w_in});
        s.input.data.assign(f.input.data.begin(), f.input.data.end());
        s.persons =
            skeletons_to_grid(f.persons, set.frame_height, set.frame_width, map_h, map_w);
        samples.push_back(std::move(s));
    }
    return samples;
}

std::vector<GeneratorSample> to_generator_samples(const Dataset& ds,
                                                  std::span<const std::int64_t> frame_ids) {
    std::map<std::int64_t, const FrameAnnotation*> by_id;
    for (const FrameAnnotation& f : ds.annotations) by_id[f.frame_id] = &f;
    std::vector<GeneratorSample> samples;
    samples.reserve(frame_ids.size());
    for (const std::int64_t id : frame_ids) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) {
            throw IoError("no annotation for frame " + std::to_string(id));
        }
        GeneratorSample s;
        s.persons = it->second->persons;
        const Image img = load_frame(ds, id);
        const std::vector<double> planar = image_to_planar(img);
        s.frame = Tensor({3, ds.frame_height, ds.frame_width});
        s.frame.data.assign(planar.begin(), planar.end());
        s.mask = load_mask(ds, id);
        samples.push_back(std::move(s));
    }
    return samples;
}

}  // namespace csivid
