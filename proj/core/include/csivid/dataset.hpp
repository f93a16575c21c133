// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "csivid/csi.hpp"
#include "csivid/image.hpp"
#include "csivid/kvconfig.hpp"
#include "csivid/pose_types.hpp"
#include "csivid/preprocess.hpp"
#include "csivid/train.hpp"

namespace csivid {

/// Ground-truth annotations for one video frame. Keypoints are in frame
/// pixel coordinates.
struct FrameAnnotation {
    std::int64_t frame_id = 0;
    std::int64_t timestamp_us = 0;
    std::vector<Skeleton> persons;
};

/// One annotation object per line:
///   {"frame_id":N,"timestamp_us":T,"persons":[[[x,y,v] x14] per person]}
/// The reader rejects malformed lines and wrong keypoint counts.
void write_keypoints_jsonl(const std::filesystem::path& path,
                           std::span<const FrameAnnotation> frames);
std::vector<FrameAnnotation> read_keypoints_jsonl(const std::filesystem::path& path);

/// An on-disk recording session:
///   csi.csil           raw CSI stream
///   frames/NNNNNN.png  RGB video frames
///   masks/NNNNNN.png   0/255 person masks
///   keypoints.jsonl    per-frame annotations
///   meta.txt           fps, rate_hz, width, height (key=value)
/// Frames and masks stay on disk; load them per frame as needed.
struct Dataset {
    std::filesystem::path dir;
    CsiSequence csi;
    std::vector<FrameAnnotation> annotations;
    double fps = 0.0;
    double rate_hz = 0.0;
    int frame_width = 0;
    int frame_height = 0;
    KvConfig meta;
};

Dataset load_dataset(const std::filesystem::path& dir);

std::filesystem::path frame_png_path(const std::filesystem::path& dir, std::int64_t frame_id);
std::filesystem::path mask_png_path(const std::filesystem::path& dir, std::int64_t frame_id);

Image load_frame(const Dataset& ds, std::int64_t frame_id);
std::vector<std::uint8_t> load_mask(const Dataset& ds, std::int64_t frame_id);

/// Settings for the CSI -> input-tensor pipeline.
struct PreprocessParams {
    int hampel_window = 11;
    double hampel_n_mads = 3.0;
    int window_k = 5;
    WindowAlignment alignment = WindowAlignment::kFirstAtOrAfter;
    int h_in = 64;
    int w_in = 128;
};

/// One aligned (input tensor, annotation) pair.
struct PreprocessedFrame {
    std::int64_t frame_id = 0;
    std::int64_t timestamp_us = 0;
    InputTensor input;
    std::vector<Skeleton> persons;  // frame pixel coordinates
};

/// The full preprocessed session, self-describing enough to train from
/// without the source directory.
struct PreprocessedSet {
    int c_in = 0;
    int h_in = 0;
    int w_in = 0;
    int frame_width = 0;
    int frame_height = 0;
    double fps = 0.0;
    double rate_hz = 0.0;
    std::vector<PreprocessedFrame> frames;
};

/// Amplitude cleaning, uniform resampling, window pairing and tensorization
/// for every frame with a complete CSI window. Frames near the stream end
/// without K samples are dropped.
PreprocessedSet preprocess_dataset(const Dataset& ds, const PreprocessParams& params);

/// Binary cache for a PreprocessedSet ("CVTC" container, little-endian).
std::vector<std::uint8_t> write_preprocessed(const PreprocessedSet& set);
PreprocessedSet parse_preprocessed(std::span<const std::uint8_t> bytes);
void write_preprocessed_file(const std::filesystem::path& path, const PreprocessedSet& set);
PreprocessedSet read_preprocessed_file(const std::filesystem::path& path);

/// Mapper training pairs: keypoints rescaled from frame pixels to the map
/// grid (corner-aligned).
std::vector<MapperSample> to_mapper_samples(const PreprocessedSet& set, int map_h, int map_w);

/// Generator training pairs for the given frame ids: ground-truth frame and
/// mask from disk, keypoints kept at frame scale.
std::vector<GeneratorSample> to_generator_samples(const Dataset& ds,
                                                  std::span<const std::int64_t> frame_ids);

}  // namespace csivid
