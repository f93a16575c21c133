// SPDX-License-Identifier: Apache-2.0
#include "csivid/dataset.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "csivid/binio.hpp"
#include "csivid/errors.hpp"
#include "csivid/synth_sim.hpp"

namespace csivid {
namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const char* name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<FrameAnnotation> two_frames() {
    std::vector<FrameAnnotation> frames(2);
    frames[0].frame_id = 0;
    frames[0].timestamp_us = 0;
    Skeleton s;
    for (int k = 0; k < kNumKeypoints; ++k) {
        s.joints[static_cast<std::size_t>(k)] = {10.5 + k, 20.25 + 2 * k, (k % 3) != 0,
                                                 (k % 3) != 0 ? 1.0 : 0.0};
    }
    frames[0].persons = {s};
    frames[1].frame_id = 1;
    frames[1].timestamp_us = 133333;
    return frames;
}

TEST(KeypointsJsonl, RoundTripPreservesEverything) {
    const fs::path dir = temp_dir("csivid_jsonl");
    const auto frames = two_frames();
    write_keypoints_jsonl(dir / "keypoints.jsonl", frames);
    const auto back = read_keypoints_jsonl(dir / "keypoints.jsonl");
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].frame_id, 0);
    EXPECT_EQ(back[1].timestamp_us, 133333);
    ASSERT_EQ(back[0].persons.size(), 1u);
    EXPECT_TRUE(back[1].persons.empty());
    for (int k = 0; k < kNumKeypoints; ++k) {
        const Keypoint& a = frames[0].persons[0].joints[static_cast<std::size_t>(k)];
        const Keypoint& b = back[0].persons[0].joints[static_cast<std::size_t>(k)];
        EXPECT_EQ(a.x, b.x);
        EXPECT_EQ(a.y, b.y);
        EXPECT_EQ(a.visible, b.visible);
    }
    fs::remove_all(dir);
}

TEST(KeypointsJsonl, KnownLineParses) {
    const fs::path dir = temp_dir("csivid_jsonl_line");
    std::string line = R"({"frame_id":5,"timestamp_us":666667,"persons":[[)";
    for (int k = 0; k < kNumKeypoints; ++k) {
        line += "[1.5,2.5,1]";
        if (k + 1 < kNumKeypoints) line += ",";
    }
    line += "]]}\n";
    write_file_atomic(dir / "keypoints.jsonl", line);
    const auto frames = read_keypoints_jsonl(dir / "keypoints.jsonl");
    ASSERT_EQ(frames.size(), 1u);
    EXPECT_EQ(frames[0].frame_id, 5);
    EXPECT_EQ(frames[0].persons[0].at(KeypointKind::kNose).x, 1.5);
    EXPECT_TRUE(frames[0].persons[0].at(KeypointKind::kNose).visible);
    fs::remove_all(dir);
}

TEST(KeypointsJsonl, RejectsMalformedLines) {
    const fs::path dir = temp_dir("csivid_jsonl_bad");
    write_file_atomic(dir / "keypoints.jsonl", std::string("{not json\n"));
    EXPECT_THROW(read_keypoints_jsonl(dir / "keypoints.jsonl"), IoError);
    write_file_atomic(dir / "keypoints.jsonl",
                      std::string(R"({"frame_id":0,"timestamp_us":0,"persons":[[[1,2,1]]]})") +
                          "\n");
    EXPECT_THROW(read_keypoints_jsonl(dir / "keypoints.jsonl"), IoError);
    fs::remove_all(dir);
}

TEST(PathHelpers, SixDigitNames) {
    EXPECT_EQ(frame_png_path("d", 3).string(), "d/frames/000003.png");
    EXPECT_EQ(mask_png_path("d", 123456).string(), "d/masks/123456.png");
}

class PipelineFixture : public ::testing::Test {
  protected:
    static void SetUpTestSuite() {
        dir_ = new fs::path(temp_dir("csivid_dataset_pipeline"));
        SceneConfig scene;
        scene.duration_s = 12.0;
        scene.n_persons = 1;
        scene.seed = 11;
        scene.frame_height = 64;
        scene.frame_width = 128;
        emit_dataset(scene, ChannelModel::default_office(), *dir_);
    }
    static void TearDownTestSuite() {
        fs::remove_all(*dir_);
        delete dir_;
        dir_ = nullptr;
    }
    static fs::path* dir_;
};

fs::path* PipelineFixture::dir_ = nullptr;

TEST_F(PipelineFixture, PreprocessPairsEveryCoveredFrame) {
    const Dataset ds = load_dataset(*dir_);
    PreprocessParams params;
    params.h_in = 16;
    params.w_in = 32;
    const PreprocessedSet set = preprocess_dataset(ds, params);
    EXPECT_EQ(set.c_in, 9);
    EXPECT_EQ(set.h_in, 16);
    EXPECT_EQ(set.w_in, 32);
    EXPECT_EQ(set.frame_width, 128);
    EXPECT_EQ(set.frame_height, 64);
    // 12 s -> 90 frames; the last frame at 11.867 s still has 5 CSI samples
    // at or after it (stream runs to 11.99 s).
    EXPECT_EQ(set.frames.size(), 90u);
    for (const PreprocessedFrame& f : set.frames) {
        EXPECT_EQ(f.input.channels, 9);
        EXPECT_EQ(f.input.height, 16);
        EXPECT_EQ(f.input.width, 32);
        EXPECT_EQ(f.persons.size(), 1u);
        for (const double v : f.input.data) EXPECT_TRUE(std::isfinite(v));
    }
}

TEST_F(PipelineFixture, CacheRoundTripIsExact) {
    const Dataset ds = load_dataset(*dir_);
    PreprocessParams params;
    params.h_in = 8;
    params.w_in = 16;
    const PreprocessedSet set = preprocess_dataset(ds, params);
    const auto bytes = write_preprocessed(set);
    const PreprocessedSet back = parse_preprocessed(bytes);
    ASSERT_EQ(back.frames.size(), set.frames.size());
    EXPECT_EQ(back.c_in, set.c_in);
    EXPECT_EQ(back.fps, set.fps);
    EXPECT_EQ(back.rate_hz, set.rate_hz);
    for (std::size_t i = 0; i < set.frames.size(); ++i) {
        EXPECT_EQ(back.frames[i].frame_id, set.frames[i].frame_id);
        EXPECT_EQ(back.frames[i].timestamp_us, set.frames[i].timestamp_us);
        EXPECT_EQ(back.frames[i].input.data, set.frames[i].input.data);
        ASSERT_EQ(back.frames[i].persons.size(), set.frames[i].persons.size());
        for (std::size_t p = 0; p < set.frames[i].persons.size(); ++p) {
            for (int k = 0; k < kNumKeypoints; ++k) {
                const Keypoint& a = set.frames[i].persons[p].joints[static_cast<std::size_t>(k)];
                const Keypoint& b = back.frames[i].persons[p].joints[static_cast<std::size_t>(k)];
                EXPECT_EQ(a.x, b.x);
                EXPECT_EQ(a.y, b.y);
                EXPECT_EQ(a.visible, b.visible);
            }
        }
    }
    // Serialization is stable byte-for-byte.
    EXPECT_EQ(write_preprocessed(back), bytes);
}

TEST_F(PipelineFixture, CacheFileRejectsCorruption) {
    const Dataset ds = load_dataset(*dir_);
    PreprocessParams params;
    params.h_in = 8;
    params.w_in = 16;
    const PreprocessedSet set = preprocess_dataset(ds, params);
    auto bytes = write_preprocessed(set);
    bytes[0] = 'X';
    EXPECT_THROW(parse_preprocessed(bytes), BadMagic);
    auto truncated = write_preprocessed(set);
    truncated.resize(truncated.size() - 7);
    EXPECT_THROW(parse_preprocessed(truncated), TruncatedRecord);
}

TEST_F(PipelineFixture, MapperSamplesScaleKeypointsToTheGrid) {
    const Dataset ds = load_dataset(*dir_);
    PreprocessParams params;
    params.h_in = 8;
    params.w_in = 16;
    const PreprocessedSet set = preprocess_dataset(ds, params);
    const auto samples = to_mapper_samples(set, 32, 64);
    ASSERT_EQ(samples.size(), set.frames.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        EXPECT_EQ(samples[i].input.shape, (std::vector<int>{9, 8, 16}));
        ASSERT_EQ(samples[i].persons.size(), 1u);
        for (int k = 0; k < kNumKeypoints; ++k) {
            const Keypoint& src = set.frames[i].persons[0].joints[static_cast<std::size_t>(k)];
            const Keypoint& dst = samples[i].persons[0].joints[static_cast<std::size_t>(k)];
            EXPECT_NEAR(dst.x, src.x * 63.0 / 127.0, 1e-12);
            EXPECT_NEAR(dst.y, src.y * 31.0 / 63.0, 1e-12);
            EXPECT_EQ(dst.visible, src.visible);
        }
    }
}

TEST_F(PipelineFixture, GeneratorSamplesCarryFramesAndMasks) {
    const Dataset ds = load_dataset(*dir_);
    const std::vector<std::int64_t> ids = {0, 5, 10};
    const auto samples = to_generator_samples(ds, ids);
    ASSERT_EQ(samples.size(), 3u);
    for (const GeneratorSample& s : samples) {
        EXPECT_EQ(s.frame.shape, (std::vector<int>{3, 64, 128}));
        EXPECT_EQ(s.mask.size(), 64u * 128u);
        EXPECT_EQ(s.persons.size(), 1u);
        int on = 0;
        for (const std::uint8_t m : s.mask) on += m;
        EXPECT_GT(on, 10);
        for (const double v : s.frame.data) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
    }
    EXPECT_THROW(to_generator_samples(ds, std::vector<std::int64_t>{9999}), IoError);
}

TEST(DatasetErrors, MissingDirectoryThrows) {
    EXPECT_THROW(load_dataset("/nonexistent/csivid"), IoError);
}

}  // namespace
}  // namespace csivid
