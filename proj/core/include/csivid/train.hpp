// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "csivid/checkpoint.hpp"
#include "csivid/networks.hpp"
#include "csivid/optim.hpp"
#include "csivid/pose_maps.hpp"

namespace csivid {

/// One mapper training pair. Keypoints are already expressed on the map
/// grid; use skeletons_to_grid to convert from frame pixels.
struct MapperSample {
    Tensor input;                   // (c_in, h_in, w_in) raw amplitude tensor
    std::vector<Skeleton> persons;  // map-grid coordinates
};

/// One generator training pair. Keypoints stay in frame pixels; the trainer
/// scales them onto its map grid before rendering the conditioning maps.
struct GeneratorSample {
    std::vector<Skeleton> persons;  // frame-pixel coordinates
    Tensor frame;                   // (3, h_frame, w_frame), values in [0,1]
    std::vector<std::uint8_t> mask;  // h_frame*w_frame, nonzero on persons
};

struct MapperTrainConfig {
    MapperConfig arch;
    LossWeights loss;
    WeightMode weight_mode = WeightMode::kInsideSquare;
    AdamConfig adam;
    LrSchedule schedule;  // base 1e-4, /10 every 5 epochs
    int epochs = 20;
    int batch_size = 8;
    int n_threads = 1;
    std::uint64_t seed = 0;
    bool use_float32 = false;
    double jhm_sigma = 2.0;
    double paf_width = 2.0;
};

struct GeneratorTrainConfig {
    GeneratorConfig arch;
    LossWeights loss;
    AdamConfig adam;
    LrSchedule schedule{1e-3, 5, 0.1};
    int epochs = 20;
    int batch_size = 8;
    int n_threads = 1;
    std::uint64_t seed = 0;
    bool use_float32 = false;
    int map_h = 32;  // grid the conditioning maps are rendered on
    int map_w = 64;
    double jhm_sigma = 2.0;
    double paf_width = 2.0;
};

struct EpochLog {
    int epoch = 0;
    double lr = 0.0;
    double loss_a = 0.0;  // mean jhm / foreground loss per sample
    double loss_b = 0.0;  // mean paf / background loss per sample
    double loss_total = 0.0;
};

/// Flat JSON object, one line, fixed key order; %.17g numbers so reruns
/// produce identical bytes.
std::string epoch_log_json(const EpochLog& log, const char* loss_a_key,
                           const char* loss_b_key);

struct TrainResult {
    Checkpoint checkpoint;
    std::vector<EpochLog> epochs;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Corner-aligned rescale of keypoints from one pixel grid to another.
std::vector<Skeleton> skeletons_to_grid(const std::vector<Skeleton>& persons, int src_h,
                                        int src_w, int dst_h, int dst_w);

/// Per-channel mean / standard deviation over a training set.
/// Channels with (near) zero spread get std 1 so normalization stays finite.
void compute_input_stats(const std::vector<MapperSample>& samples, Tensor& mean, Tensor& stddev);

template <typename S>
TensorT<S> normalize_input(const TensorT<S>& x, const Tensor& mean, const Tensor& stddev);

/// Forward + loss + parameter gradients for one sample; gradients are added
/// into grads' grad buffers. Returns the weighted total loss.
template <typename S>
double mapper_loss_and_grads(const TensorT<S>& input_norm, const TensorT<S>& target_jhm,
                             const TensorT<S>& target_paf, const ParamSetT<S>& params,
                             const MapperConfig& arch, const LossWeights& lw, WeightMode mode,
                             ParamSetT<S>& grads, ConvWorkspace<S>* ws = nullptr,
                             double* out_loss_jhm = nullptr, double* out_loss_paf = nullptr);

template <typename S>
double generator_loss_and_grads(const TensorT<S>& jhm, const TensorT<S>& paf,
                                const std::vector<const TensorT<S>*>& identity_frames,
                                const TensorT<S>& frame, std::span<const std::uint8_t> mask,
                                const TensorT<S>& background, const ParamSetT<S>& params,
                                const GeneratorConfig& arch, const LossWeights& lw,
                                ParamSetT<S>& grads, ConvWorkspace<S>* ws = nullptr,
                                double* out_loss_fore = nullptr,
                                double* out_loss_back = nullptr);

/// Trains from scratch with Adam and the step schedule. Per-sample gradients
/// are computed in isolation and summed in sample order, so results are
/// byte-identical for any n_threads. Checkpoint holds float64 parameters,
/// optimizer state, input stats and the architecture in meta.
TrainResult train_mapper(const std::vector<MapperSample>& samples, const MapperTrainConfig& cfg,
                         const EpochCallback& on_epoch = {});

/// identity and background are shared (3,h_frame,w_frame) frames in [0,1].
TrainResult train_generator(const std::vector<GeneratorSample>& samples, const Tensor& identity,
                            const Tensor& background, const GeneratorTrainConfig& cfg,
                            const EpochCallback& on_epoch = {});

/// Architecture round-trip through checkpoint metadata.
void mapper_config_to_meta(const MapperTrainConfig& cfg, std::map<std::string, std::string>& meta);
MapperConfig mapper_config_from_meta(const std::map<std::string, std::string>& meta);
void generator_config_to_meta(const GeneratorTrainConfig& cfg,
                              std::map<std::string, std::string>& meta);
GeneratorConfig generator_config_from_meta(const std::map<std::string, std::string>& meta);
/// Map grid + render parameters stored alongside the generator config.
void generator_render_from_meta(const std::map<std::string, std::string>& meta, int& map_h,
                                int& map_w, double& jhm_sigma, double& paf_width);

}  // namespace csivid
