// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the hot paths: convolution kernels, the CSI
// preprocessing chain, pose map rendering / decoding, the channel simulator
// and full network forward passes.

#include <benchmark/benchmark.h>

#include <vector>

#include "csivid/networks.hpp"
#include "csivid/nn_ops.hpp"
#include "csivid/pose_maps.hpp"
#include "csivid/preprocess.hpp"
#include "csivid/rng.hpp"
#include "csivid/synth_sim.hpp"
#include "csivid/train.hpp"

using namespace csivid;

namespace {

Tensor random_tensor(const std::vector<int>& shape, Rng& rng) {
    Tensor t(shape);
    for (double& v : t.data) v = rng.uniform(-1.0, 1.0);
    return t;
}

TensorF random_tensor_f(const std::vector<int>& shape, Rng& rng) {
    TensorF t(shape);
    for (float& v : t.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    return t;
}

void BM_Conv2dForward(benchmark::State& state) {
    Rng rng(1);
    const Tensor x = random_tensor({16, 16, 32}, rng);
    const Tensor w = random_tensor({32, 16, 3, 3}, rng);
    const Tensor b = random_tensor({32}, rng);
    ConvWorkspace<double> ws;
    for (auto _ : state) {
        benchmark::DoNotOptimize(conv2d(x, w, b, 1, 1, &ws));
    }
}
BENCHMARK(BM_Conv2dForward);

void BM_Conv2dForwardF32(benchmark::State& state) {
    Rng rng(1);
    const TensorF x = random_tensor_f({16, 16, 32}, rng);
    const TensorF w = random_tensor_f({32, 16, 3, 3}, rng);
    const TensorF b = random_tensor_f({32}, rng);
    ConvWorkspace<float> ws;
    for (auto _ : state) {
        benchmark::DoNotOptimize(conv2d(x, w, b, 1, 1, &ws));
    }
}
BENCHMARK(BM_Conv2dForwardF32);

void BM_Conv2dBackward(benchmark::State& state) {
    Rng rng(2);
    const Tensor x = random_tensor({16, 16, 32}, rng);
    const Tensor w = random_tensor({32, 16, 3, 3}, rng);
    const Tensor b = random_tensor({32}, rng);
    const Tensor d_out = random_tensor(conv2d(x, w, b, 1, 1).shape, rng);
    Tensor dx(x.shape), dw(w.shape), db(b.shape);
    ConvWorkspace<double> ws;
    for (auto _ : state) {
        std::fill(dx.data.begin(), dx.data.end(), 0.0);
        std::fill(dw.data.begin(), dw.data.end(), 0.0);
        std::fill(db.data.begin(), db.data.end(), 0.0);
        conv2d_backward(x, w, d_out, 1, 1, &dx, &dw, &db, &ws);
        benchmark::DoNotOptimize(dx.data.data());
    }
}
BENCHMARK(BM_Conv2dBackward);

CsiSequence synthetic_sequence(int n_records) {
    Rng rng(3);
    CsiSequence seq;
    seq.header = {100.0, 3, 3, 30};
    for (int i = 0; i < n_records; ++i) {
        CsiMeasurement m;
        m.timestamp_us = 10000LL * i + rng.uniform_int(400);
        m.n_tx = 3;
        m.n_rx = 3;
        m.n_c = 30;
        m.values.reserve(270);
        for (int v = 0; v < 270; ++v) {
            m.values.emplace_back(rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0));
        }
        seq.records.push_back(std::move(m));
    }
    return seq;
}

void BM_HampelFilter(benchmark::State& state) {
    const CsiSequence seq = synthetic_sequence(1000);
    for (auto _ : state) {
        benchmark::DoNotOptimize(remove_outliers(seq, 11, 3.0));
    }
}
BENCHMARK(BM_HampelFilter)->Unit(benchmark::kMillisecond);

void BM_ResampleUniform(benchmark::State& state) {
    const CsiSequence seq = synthetic_sequence(1000);
    for (auto _ : state) {
        benchmark::DoNotOptimize(resample_uniform(seq, 100.0));
    }
}
BENCHMARK(BM_ResampleUniform)->Unit(benchmark::kMillisecond);

std::vector<Skeleton> bench_skeletons() {
    Rng rng(4);
    Skeleton s;
    for (auto& j : s.joints) {
        j.x = rng.uniform(6.0, 58.0);
        j.y = rng.uniform(4.0, 28.0);
        j.visible = true;
    }
    return {s};
}

void BM_RenderJhm(benchmark::State& state) {
    const auto persons = bench_skeletons();
    for (auto _ : state) {
        benchmark::DoNotOptimize(render_jhm(persons, 2.0, 32, 64));
    }
}
BENCHMARK(BM_RenderJhm);

void BM_RenderPaf(benchmark::State& state) {
    const auto persons = bench_skeletons();
    const LimbTopology& topo = LimbTopology::canonical();
    for (auto _ : state) {
        benchmark::DoNotOptimize(render_paf(persons, topo, 2.0, 32, 64));
    }
}
BENCHMARK(BM_RenderPaf);

void BM_AssembleSkeletons(benchmark::State& state) {
    const auto persons = bench_skeletons();
    const LimbTopology& topo = LimbTopology::canonical();
    const Jhm jhm = render_jhm(persons, 2.0, 32, 64);
    const Paf paf = render_paf(persons, topo, 2.0, 32, 64);
    const AssemblyParams ap;
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble_skeletons(jhm, paf, topo, ap));
    }
}
BENCHMARK(BM_AssembleSkeletons);

void BM_ChannelTick(benchmark::State& state) {
    SceneConfig scene;
    scene.n_persons = 1;
    const ChannelModel channel = ChannelModel::default_office();
    const PersonPose3 pose = person_pose(scene, 0, 1.0);
    const std::vector<PersonPose3> poses = {pose};
    const auto txs = scene.tx_antennas();
    const auto rxs = scene.rx_antennas();
    for (auto _ : state) {
        Complex acc(0.0, 0.0);
        for (const auto& tx : txs) {
            for (const auto& rx : rxs) {
                for (int k = 0; k < scene.n_subcarriers; ++k) {
                    acc += channel_response(tx, rx, scene.subcarrier_hz(k), channel, poses);
                }
            }
        }
        benchmark::DoNotOptimize(acc);
    }
}
BENCHMARK(BM_ChannelTick);

void BM_MapperForward(benchmark::State& state) {
    MapperConfig cfg;
    cfg.c_in = 9;
    cfg.h_in = 16;
    cfg.w_in = 32;
    cfg.enc1_channels = 16;
    cfg.enc2_channels = 32;
    cfg.enc3_channels = 64;
    cfg.n_residual_blocks = 3;
    cfg.head_channels = 24;
    cfg.h_map = 32;
    cfg.w_map = 64;
    const ParamSet params = init_mapper_params(cfg, 5);
    Rng rng(6);
    const Tensor x = random_tensor({cfg.c_in, cfg.h_in, cfg.w_in}, rng);
    ConvWorkspace<double> ws;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mapper_forward<double>(x, params, cfg, nullptr, &ws));
    }
}
BENCHMARK(BM_MapperForward)->Unit(benchmark::kMillisecond);

void BM_GeneratorForward(benchmark::State& state) {
    GeneratorConfig cfg;
    cfg.h_frame = 32;
    cfg.w_frame = 64;
    cfg.enc1_channels = 8;
    cfg.enc2_channels = 16;
    cfg.enc3_channels = 24;
    cfg.n_residual_blocks = 1;
    const ParamSet params = init_generator_params(cfg, 7);
    Rng rng(8);
    const Tensor jhm = random_tensor({kNumKeypoints, 16, 32}, rng);
    const Tensor paf = random_tensor({kNumPafChannels, 16, 32}, rng);
    const Tensor identity = random_tensor({3, cfg.h_frame, cfg.w_frame}, rng);
    ConvWorkspace<double> ws;
    for (auto _ : state) {
        benchmark::DoNotOptimize(generator_forward<double>(
            jhm, paf, std::vector<const Tensor*>{&identity}, params, cfg, nullptr, &ws));
    }
}
BENCHMARK(BM_GeneratorForward)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
