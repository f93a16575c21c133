// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "csivid/nn_ops.hpp"
#include "csivid/pose_types.hpp"
#include "csivid/rng.hpp"
#include "csivid/tensor.hpp"

namespace csivid {

// Cross-modal mapper: CSI input tensor -> JHM + PAF heads. Auto-encoder
// trunk (two stride-2 7x7 convs, one 3x3, residual stack) with two decoder
// heads that resize to the map grid.
struct MapperConfig {
    int c_in = 9;
    int h_in = 64;
    int w_in = 128;
    int enc1_channels = 32;
    int enc2_channels = 64;
    int enc3_channels = 128;
    int n_residual_blocks = 4;
    int head_channels = 24;
    int h_map = 32;
    int w_map = 64;
};

// Frame generator: JHM + PAF + identity frame(s) -> RGB frame. Same trunk
// shape as the mapper but fewer residual blocks and a symmetric decoder.
struct GeneratorConfig {
    int h_frame = 128;
    int w_frame = 256;
    int n_identity_frames = 1;
    int enc1_channels = 32;
    int enc2_channels = 64;
    int enc3_channels = 128;
    int n_residual_blocks = 2;

    int input_channels() const { return kNumKeypoints + kNumPafChannels + 3 * n_identity_frames; }
};

struct LossWeights {
    double lambda_jhm = 1.0;
    double lambda_paf = 1.0;
    double lambda_fore = 1.0;
    double lambda_back = 0.5;
    double alpha_jhm = 1.0;
    double beta_jhm = 1.0;
    double alpha_paf = 1.0;
    double beta_paf = 0.5;
};

/// Attention weight w = alpha*|target| + beta can multiply the error inside
/// the square, (w*d)^2, or outside, w*d^2.
enum class WeightMode { kInsideSquare, kOutsideSquare };

/// Seeded parameter creation; fan-in-scaled normal weights, zero biases.
/// Initialization order is fixed, so a given seed always produces the same
/// parameter values.
ParamSet init_mapper_params(const MapperConfig& cfg, std::uint64_t seed);
ParamSet init_generator_params(const GeneratorConfig& cfg, std::uint64_t seed);

/// Activations saved by the forward pass for the matching backward pass.
template <typename S>
struct MapperCache {
    TensorT<S> x;
    TensorT<S> z1, a1, z2, a2, z3, a3;
    struct ResCache {
        TensorT<S> in, z1, a1, z2, sum;
    };
    std::vector<ResCache> res;
    struct HeadCache {
        TensorT<S> z1, a1, up, z2, a2, logits, out;
    };
    HeadCache jhm, paf;
};

template <typename S>
struct MapperOutput {
    TensorT<S> jhm;  // (14, h_map, w_map), sigmoid range
    TensorT<S> paf;  // (26, h_map, w_map), tanh range
};

/// Runs the mapper. `cache`, when given, collects every tensor the backward
/// pass needs; inference can pass nullptr.
template <typename S>
MapperOutput<S> mapper_forward(const TensorT<S>& input, const ParamSetT<S>& params,
                               const MapperConfig& cfg, MapperCache<S>* cache = nullptr,
                               ConvWorkspace<S>* ws = nullptr);

/// Accumulates parameter gradients for d(loss)/d(jhm out) and /d(paf out).
template <typename S>
void mapper_backward(const ParamSetT<S>& params, const MapperConfig& cfg,
                     const MapperCache<S>& cache, const TensorT<S>& d_jhm,
                     const TensorT<S>& d_paf, ParamSetT<S>& grads,
                     ConvWorkspace<S>* ws = nullptr);

template <typename S>
struct GeneratorCache {
    TensorT<S> x;
    TensorT<S> z1, a1, z2, a2, z3, a3;
    typename MapperCache<S>::ResCache res[8];
    int n_res = 0;
    TensorT<S> up1, zd1, ad1, up2, zd2, ad2, z_out, out;
};

/// Maps are bilinearly resized to the frame grid and stacked with the
/// identity frames before entering the trunk.
template <typename S>
TensorT<S> generator_forward(const TensorT<S>& jhm, const TensorT<S>& paf,
                             const std::vector<const TensorT<S>*>& identity_frames,
                             const ParamSetT<S>& params, const GeneratorConfig& cfg,
                             GeneratorCache<S>* cache = nullptr, ConvWorkspace<S>* ws = nullptr);

/// Parameter gradients only; the map and identity inputs are training data,
/// so no gradient flows back to them.
template <typename S>
void generator_backward(const ParamSetT<S>& params, const GeneratorConfig& cfg,
                        const GeneratorCache<S>& cache, const TensorT<S>& d_out,
                        ParamSetT<S>& grads, ConvWorkspace<S>* ws = nullptr);

// Losses. All reductions are sums over every element, matching the squared
// norms they implement; the attention weight is computed from the target.
template <typename S>
double loss_weighted_map(const TensorT<S>& pred, const TensorT<S>& target, double alpha,
                         double beta, WeightMode mode);
template <typename S>
TensorT<S> loss_weighted_map_grad(const TensorT<S>& pred, const TensorT<S>& target, double alpha,
                                  double beta, WeightMode mode);

template <typename S>
double loss_jhm(const TensorT<S>& pred, const TensorT<S>& target, double alpha, double beta,
                WeightMode mode = WeightMode::kInsideSquare) {
    return loss_weighted_map(pred, target, alpha, beta, mode);
}
template <typename S>
double loss_paf(const TensorT<S>& pred, const TensorT<S>& target, double alpha, double beta,
                WeightMode mode = WeightMode::kInsideSquare) {
    return loss_weighted_map(pred, target, alpha, beta, mode);
}

double loss_mapper_total(double l_jhm, double l_paf, const LossWeights& w);

/// Sum over channels and pixels of mask * (synth - truth)^2; the mask is one
/// value per pixel, broadcast over channels.
template <typename S>
double loss_foreground(const TensorT<S>& synth, const TensorT<S>& truth,
                       std::span<const std::uint8_t> mask);
template <typename S>
TensorT<S> loss_foreground_grad(const TensorT<S>& synth, const TensorT<S>& truth,
                                std::span<const std::uint8_t> mask);

/// Same with the complement mask against the static background image.
template <typename S>
double loss_background(const TensorT<S>& synth, const TensorT<S>& background,
                       std::span<const std::uint8_t> mask);
template <typename S>
TensorT<S> loss_background_grad(const TensorT<S>& synth, const TensorT<S>& background,
                                std::span<const std::uint8_t> mask);

double loss_generator_total(double l_fore, double l_back, const LossWeights& w);

// Map struct <-> tensor bridging (same memory layout).
template <typename S>
TensorT<S> from_jhm(const Jhm& jhm);
template <typename S>
TensorT<S> from_paf(const Paf& paf);
Jhm to_jhm(const Tensor& t);
Paf to_paf(const Tensor& t);
Jhm to_jhm(const TensorF& t);
Paf to_paf(const TensorF& t);

}  // namespace csivid
