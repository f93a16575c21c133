// SPDX-License-Identifier: Apache-2.0
//
// End-to-end tests for the csivid command line tool. Each test shells out to
// the real binary, so these cover argument parsing, exit codes, config file
// merging, output locking and rerun determinism in one place.

#include <fcntl.h>
#include <sys/file.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(CSIVID_BIN) + " " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) return {};
    RunResult result;
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) result.output.append(buf, n);
    const int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

int count_lines(const std::string& text) {
    int lines = 0;
    for (char c : text) {
        if (c == '\n') ++lines;
    }
    return lines;
}

class CliPipeline : public ::testing::Test {
  protected:
    static void SetUpTestSuite() {
        work_ = fs::temp_directory_path() / "csivid_cli_test";
        fs::remove_all(work_);
        fs::create_directories(work_);
        setup_log_.clear();
        setup_ok_ = true;
        step("synth --out " + dir("data") +
             " --seed 5 --persons 1 --duration 8 --frame-height 32 --frame-width 64");
        step("preprocess --in " + dir("data") + " --out " + dir("cache") +
             " --h-in 16 --w-in 32");
        step("train-mapper --cache " + dir("cache") + " --out " + dir("mk") +
             " --epochs 1 --batch 8 --map-h 8 --map-w 16");
        step("train-generator --data " + dir("data") + " --out " + dir("gk") +
             " --epochs 1 --batch 4 --map-h 8 --map-w 16 --max-pairs 10");
        step("infer --cache " + dir("cache") + " --mapper " + dir("mk") +
             "/mapper.ckpt --generator " + dir("gk") + "/generator.ckpt --out " +
             dir("pred_a"));
        step("infer --cache " + dir("cache") + " --mapper " + dir("mk") +
             "/mapper.ckpt --generator " + dir("gk") + "/generator.ckpt --out " +
             dir("pred_b"));
        step("eval --data " + dir("data") + " --pred " + dir("pred_a") + " --out " +
             dir("evalout") + "/report.json");
        step("render --data " + dir("data") + " --out " + dir("viz") +
             " --frames 2 --map-h 8 --map-w 16");
    }

    static void step(const std::string& args) {
        if (!setup_ok_) return;
        const RunResult r = run(args);
        if (r.exit_code != 0) {
            setup_ok_ = false;
            setup_log_ = "command failed (" + std::to_string(r.exit_code) + "): " + args +
                         "\n" + r.output;
        }
    }

    static std::string dir(const char* name) { return (work_ / name).string(); }

    void SetUp() override { ASSERT_TRUE(setup_ok_) << setup_log_; }

    static fs::path work_;
    static bool setup_ok_;
    static std::string setup_log_;
};

fs::path CliPipeline::work_;
bool CliPipeline::setup_ok_ = false;
std::string CliPipeline::setup_log_;

TEST_F(CliPipeline, ProducesExpectedFiles) {
    EXPECT_TRUE(fs::exists(work_ / "data" / "csi.csil"));
    EXPECT_TRUE(fs::exists(work_ / "data" / "background.png"));
    EXPECT_TRUE(fs::exists(work_ / "cache" / "tensors.bin"));
    EXPECT_TRUE(fs::exists(work_ / "mk" / "mapper.ckpt"));
    EXPECT_TRUE(fs::exists(work_ / "mk" / "train_log.jsonl"));
    EXPECT_TRUE(fs::exists(work_ / "gk" / "generator.ckpt"));
    EXPECT_TRUE(fs::exists(work_ / "pred_a" / "keypoints.jsonl"));
    EXPECT_TRUE(fs::exists(work_ / "pred_a" / "pred_frames"));
    EXPECT_TRUE(fs::exists(work_ / "evalout" / "report.json"));
    EXPECT_TRUE(fs::exists(work_ / "viz" / "stick_000000.png"));
    EXPECT_TRUE(fs::exists(work_ / "viz" / "jhm_000001.png"));
    EXPECT_TRUE(fs::exists(work_ / "viz" / "paf_000001.png"));
}

TEST_F(CliPipeline, ManifestRecordsRun) {
    for (const char* name : {"data", "cache", "mk", "gk", "pred_a", "evalout", "viz"}) {
        const fs::path path = work_ / name / "manifest.json";
        ASSERT_TRUE(fs::exists(path)) << path;
        const auto doc = nlohmann::json::parse(slurp(path));
        EXPECT_EQ(doc.at("schema"), "csivid-run-manifest") << path;
        EXPECT_EQ(doc.at("version"), 1) << path;
        EXPECT_GE(doc.at("finished_us").get<std::int64_t>(),
                  doc.at("started_us").get<std::int64_t>())
            << path;
    }
    const auto synth_doc = nlohmann::json::parse(slurp(work_ / "data" / "manifest.json"));
    EXPECT_EQ(synth_doc.at("subcommand"), "synth");
    EXPECT_EQ(synth_doc.at("seed"), 5);
}

TEST_F(CliPipeline, InferRerunIsByteIdentical) {
    EXPECT_EQ(slurp(work_ / "pred_a" / "keypoints.jsonl"),
              slurp(work_ / "pred_b" / "keypoints.jsonl"));
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(work_ / "pred_a" / "pred_frames")) {
        const fs::path twin = work_ / "pred_b" / "pred_frames" / entry.path().filename();
        ASSERT_TRUE(fs::exists(twin));
        EXPECT_EQ(slurp(entry.path()), slurp(twin)) << entry.path();
        ++compared;
    }
    EXPECT_GT(compared, 0);

    // Manifests agree on everything except timestamps and the output paths
    // themselves.
    const auto doc_a = nlohmann::json::parse(slurp(work_ / "pred_a" / "manifest.json"));
    const auto doc_b = nlohmann::json::parse(slurp(work_ / "pred_b" / "manifest.json"));
    for (const char* key : {"schema", "version", "subcommand", "seed", "config",
                            "tool_version", "inputs"}) {
        EXPECT_EQ(doc_a.at(key), doc_b.at(key)) << key;
    }
}

TEST_F(CliPipeline, EvalReportHasCurves) {
    const auto doc = nlohmann::json::parse(slurp(work_ / "evalout" / "report.json"));
    EXPECT_EQ(doc.at("schema"), "csivid-eval-report");
    EXPECT_FALSE(doc.at("pck").empty());
    EXPECT_FALSE(doc.at("iou_curve").empty());
    EXPECT_GE(doc.at("mean_iou").get<double>(), 0.0);
}

TEST_F(CliPipeline, ConfigFileSuppliesValues) {
    const fs::path conf = work_ / "epochs.conf";
    std::ofstream(conf) << "epochs=1\nbatch=4\n";
    const RunResult r = run("train-mapper --cache " + dir("cache") + " --out " +
                            dir("mk_conf") + " --map-h 8 --map-w 16 --config " +
                            conf.string());
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_EQ(count_lines(slurp(work_ / "mk_conf" / "train_log.jsonl")), 1);
}

TEST_F(CliPipeline, CommandLineBeatsConfigFile) {
    const fs::path conf = work_ / "epochs3.conf";
    std::ofstream(conf) << "epochs=3\n";
    const RunResult r = run("train-mapper --cache " + dir("cache") + " --out " +
                            dir("mk_cli") + " --map-h 8 --map-w 16 --epochs 1 --config " +
                            conf.string());
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_EQ(count_lines(slurp(work_ / "mk_cli" / "train_log.jsonl")), 1);
}

TEST_F(CliPipeline, UnknownConfigKeyIsUsageError) {
    const fs::path conf = work_ / "bad.conf";
    std::ofstream(conf) << "bogus_key=1\n";
    const RunResult r = run("synth --out " + dir("x_badconf") + " --config " + conf.string());
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.output.find("kind=usage"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("bogus_key"), std::string::npos) << r.output;
}

TEST_F(CliPipeline, LockedOutputDirectoryIsRefused) {
    const fs::path lock_dir = work_ / "locked";
    fs::create_directories(lock_dir);
    const int fd = ::open((lock_dir / ".csivid.lock").c_str(), O_CREAT | O_RDWR, 0644);
    ASSERT_GE(fd, 0);
    ASSERT_EQ(::flock(fd, LOCK_EX | LOCK_NB), 0);
    const RunResult r = run("synth --out " + lock_dir.string() + " --duration 1 --seed 5");
    ::close(fd);
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.output.find("kind=data"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("lock"), std::string::npos) << r.output;
}

TEST(CliErrors, UnknownSubcommandIsUsage) {
    const RunResult r = run("frobnicate");
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.output.find("kind=usage"), std::string::npos) << r.output;
}

TEST(CliErrors, MissingRequiredOptionIsUsage) {
    const RunResult r = run("preprocess --in somewhere");
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.output.find("kind=usage"), std::string::npos) << r.output;
}

TEST(CliErrors, MissingDatasetIsDataError) {
    const fs::path out = fs::temp_directory_path() / "csivid_cli_missing";
    fs::remove_all(out);
    const RunResult r =
        run("preprocess --in /nonexistent/dataset --out " + out.string());
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.output.find("kind=data"), std::string::npos) << r.output;
}

TEST(CliErrors, InvalidSceneIsUsage) {
    const fs::path out = fs::temp_directory_path() / "csivid_cli_badscene";
    fs::remove_all(out);
    const RunResult r = run("synth --out " + out.string() + " --persons 9");
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.output.find("kind=usage"), std::string::npos) << r.output;
}

TEST(CliErrors, HelpAndVersionSucceed) {
    EXPECT_EQ(run("--help").exit_code, 0);
    const RunResult ver = run("--version");
    EXPECT_EQ(ver.exit_code, 0);
    EXPECT_FALSE(ver.output.empty());
}

}  // namespace
