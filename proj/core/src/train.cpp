// SPDX-License-Identifier: Apache-2.0
#include "csivid/train.hpp"

#include <cmath>
#include <cstdio>
#include <thread>

#include "csivid/errors.hpp"
#include "csivid/rng.hpp"

namespace csivid {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename S>
TensorT<S> cast_tensor(const Tensor& t) {
    if constexpr (std::is_same_v<S, double>) {
        return t;
    } else {
        TensorT<S> out(t.shape);
        for (std::size_t i = 0; i < t.data.size(); ++i)
            out.data[i] = static_cast<S>(t.data[i]);
        return out;
    }
}

template <typename S>
ParamSetT<S> cast_params(const ParamSet& p) {
    if constexpr (std::is_same_v<S, double>) {
        return p;
    } else {
        return to_float(p);
    }
}

ParamSet uncast_params(const ParamSetT<double>& p) { return p; }
ParamSet uncast_params(const ParamSetT<float>& p) { return to_double(p); }
AdamState uncast_adam(const AdamStateT<double>& s) { return s; }
AdamState uncast_adam(const AdamStateT<float>& s) { return to_double(s); }

/// Parameter set with the same names and shapes, zero data, for use as a
/// per-sample gradient buffer.
template <typename S>
ParamSetT<S> make_scratch(const ParamSetT<S>& like) {
    ParamSetT<S> s;
    for (const auto& [name, t] : like.params) s.params.emplace(name, TensorT<S>(t.shape));
    s.ensure_grads();
    return s;
}

std::vector<int> shuffled_indices(int n, Rng& rng) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i)
        std::swap(idx[static_cast<std::size_t>(i)],
                  idx[static_cast<std::size_t>(rng.uniform_int(i + 1))]);
    return idx;
}

/// Runs fn(slot) for every slot, split across threads, then returns. Slot
/// work must be independent; the caller merges results in slot order.
void run_slots(int n_slots, int n_threads, const std::function<void(int)>& fn) {
    const int t = std::max(1, std::min(n_threads, n_slots));
    if (t == 1) {
        for (int s = 0; s < n_slots; ++s) fn(s);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(t));
    for (int w = 0; w < t; ++w)
        pool.emplace_back([&, w] {
            for (int s = w; s < n_slots; s += t) fn(s);
        });
    for (auto& th : pool) th.join();
}

template <typename S>
void merge_grads(ParamSetT<S>& accum, const ParamSetT<S>& part) {
    auto it = accum.params.begin();
    auto jt = part.params.begin();
    for (; it != accum.params.end(); ++it, ++jt) {
        auto& dst = it->second;
        dst.ensure_grad();
        const auto& src = jt->second.grad;
        for (std::size_t i = 0; i < src.size(); ++i) dst.grad[i] += src[i];
    }
}

int meta_int(const std::map<std::string, std::string>& meta, const std::string& key) {
    auto it = meta.find(key);
    if (it == meta.end()) throw UsageError("checkpoint meta missing key " + key);
    return std::stoi(it->second);
}

double meta_double(const std::map<std::string, std::string>& meta, const std::string& key) {
    auto it = meta.find(key);
    if (it == meta.end()) throw UsageError("checkpoint meta missing key " + key);
    return std::stod(it->second);
}

}  // namespace

std::string epoch_log_json(const EpochLog& log, const char* loss_a_key, const char* loss_b_key) {
    std::string s = "{\"epoch\":" + std::to_string(log.epoch);
    s += ",\"lr\":" + fmt_double(log.lr);
    s += ",\"" + std::string(loss_a_key) + "\":" + fmt_double(log.loss_a);
    s += ",\"" + std::string(loss_b_key) + "\":" + fmt_double(log.loss_b);
    s += ",\"loss_total\":" + fmt_double(log.loss_total) + "}";
    return s;
}

std::vector<Skeleton> skeletons_to_grid(const std::vector<Skeleton>& persons, int src_h,
                                        int src_w, int dst_h, int dst_w) {
    if (src_h < 2 || src_w < 2 || dst_h < 2 || dst_w < 2)
        throw DimensionMismatch("skeletons_to_grid needs grids of at least 2x2");
    const double sx = static_cast<double>(dst_w - 1) / (src_w - 1);
    const double sy = static_cast<double>(dst_h - 1) / (src_h - 1);
    std::vector<Skeleton> out = persons;
    for (Skeleton& p : out)
        for (Keypoint& k : p.joints) {
            k.x *= sx;
            k.y *= sy;
        }
    return out;
}

void compute_input_stats(const std::vector<MapperSample>& samples, Tensor& mean,
                         Tensor& stddev) {
    if (samples.empty()) throw EmptyInputs("compute_input_stats needs samples");
    const auto& shape = samples.front().input.shape;
    if (shape.size() != 3) throw ShapeMismatch("mapper input must be (c,h,w)");
    const int c = samples.front().input.dim(0);
    const std::size_t plane = samples.front().input.data.size() / static_cast<std::size_t>(c);

    mean = Tensor({c});
    stddev = Tensor({c});
    std::vector<double> sum(static_cast<std::size_t>(c), 0.0);
    std::vector<double> sum_sq(static_cast<std::size_t>(c), 0.0);
    for (const MapperSample& s : samples) {
        check_shape(s.input, shape, "mapper input");
        for (int ch = 0; ch < c; ++ch) {
            const double* p = s.input.data.data() + plane * static_cast<std::size_t>(ch);
            for (std::size_t i = 0; i < plane; ++i) {
                sum[static_cast<std::size_t>(ch)] += p[i];
                sum_sq[static_cast<std::size_t>(ch)] += p[i] * p[i];
            }
        }
    }
    const double n = static_cast<double>(samples.size()) * static_cast<double>(plane);
    for (int ch = 0; ch < c; ++ch) {
        const double m = sum[static_cast<std::size_t>(ch)] / n;
        const double var = sum_sq[static_cast<std::size_t>(ch)] / n - m * m;
        mean.data[static_cast<std::size_t>(ch)] = m;
        stddev.data[static_cast<std::size_t>(ch)] = var > 1e-24 ? std::sqrt(var) : 1.0;
    }
}

template <typename S>
TensorT<S> normalize_input(const TensorT<S>& x, const Tensor& mean, const Tensor& stddev) {
    if (x.shape.size() != 3) throw ShapeMismatch("normalize_input expects (c,h,w)");
    const int c = x.dim(0);
    check_shape(mean, {c}, "input mean");
    check_shape(stddev, {c}, "input std");
    const std::size_t plane = x.data.size() / static_cast<std::size_t>(c);
    TensorT<S> out(x.shape);
    for (int ch = 0; ch < c; ++ch) {
        const S m = static_cast<S>(mean.data[static_cast<std::size_t>(ch)]);
        const S sd = static_cast<S>(stddev.data[static_cast<std::size_t>(ch)]);
        const S* src = x.data.data() + plane * static_cast<std::size_t>(ch);
        S* dst = out.data.data() + plane * static_cast<std::size_t>(ch);
        for (std::size_t i = 0; i < plane; ++i) dst[i] = (src[i] - m) / sd;
    }
    return out;
}

template <typename S>
double mapper_loss_and_grads(const TensorT<S>& input_norm, const TensorT<S>& target_jhm,
                             const TensorT<S>& target_paf, const ParamSetT<S>& params,
                             const MapperConfig& arch, const LossWeights& lw, WeightMode mode,
                             ParamSetT<S>& grads, ConvWorkspace<S>* ws, double* out_loss_jhm,
                             double* out_loss_paf) {
    MapperCache<S> cache;
    MapperOutput<S> out = mapper_forward(input_norm, params, arch, &cache, ws);
    const double l_jhm =
        loss_weighted_map(out.jhm, target_jhm, lw.alpha_jhm, lw.beta_jhm, mode);
    const double l_paf =
        loss_weighted_map(out.paf, target_paf, lw.alpha_paf, lw.beta_paf, mode);
    TensorT<S> d_jhm =
        loss_weighted_map_grad(out.jhm, target_jhm, lw.alpha_jhm, lw.beta_jhm, mode);
    TensorT<S> d_paf =
        loss_weighted_map_grad(out.paf, target_paf, lw.alpha_paf, lw.beta_paf, mode);
    const S wj = static_cast<S>(lw.lambda_jhm), wp = static_cast<S>(lw.lambda_paf);
    for (S& v : d_jhm.data) v *= wj;
    for (S& v : d_paf.data) v *= wp;
    mapper_backward(params, arch, cache, d_jhm, d_paf, grads, ws);
    if (out_loss_jhm) *out_loss_jhm = l_jhm;
    if (out_loss_paf) *out_loss_paf = l_paf;
    return loss_mapper_total(l_jhm, l_paf, lw);
}

template <typename S>
double generator_loss_and_grads(const TensorT<S>& jhm, const TensorT<S>& paf,
                                const std::vector<const TensorT<S>*>& identity_frames,
                                const TensorT<S>& frame, std::span<const std::uint8_t> mask,
                                const TensorT<S>& background, const ParamSetT<S>& params,
                                const GeneratorConfig& arch, const LossWeights& lw,
                                ParamSetT<S>& grads, ConvWorkspace<S>* ws,
                                double* out_loss_fore, double* out_loss_back) {
    GeneratorCache<S> cache;
    TensorT<S> synth = generator_forward(jhm, paf, identity_frames, params, arch, &cache, ws);
    const double l_fore = loss_foreground(synth, frame, mask);
    const double l_back = loss_background(synth, background, mask);
    TensorT<S> d_out = loss_foreground_grad(synth, frame, mask);
    TensorT<S> d_back = loss_background_grad(synth, background, mask);
    const S wf = static_cast<S>(lw.lambda_fore), wb = static_cast<S>(lw.lambda_back);
    for (std::size_t i = 0; i < d_out.data.size(); ++i)
        d_out.data[i] = wf * d_out.data[i] + wb * d_back.data[i];
    generator_backward(params, arch, cache, d_out, grads, ws);
    if (out_loss_fore) *out_loss_fore = l_fore;
    if (out_loss_back) *out_loss_back = l_back;
    return loss_generator_total(l_fore, l_back, lw);
}

namespace {

template <typename S>
TrainResult train_mapper_impl(const std::vector<MapperSample>& samples,
                              const MapperTrainConfig& cfg, const EpochCallback& on_epoch) {
    if (samples.empty()) throw EmptyInputs("train_mapper needs samples");
    if (cfg.epochs < 0 || cfg.batch_size < 1) throw UsageError("bad train config");
    const int n = static_cast<int>(samples.size());

    Tensor mean, stddev;
    compute_input_stats(samples, mean, stddev);
    std::vector<TensorT<S>> inputs;
    inputs.reserve(samples.size());
    for (const MapperSample& s : samples)
        inputs.push_back(normalize_input(cast_tensor<S>(s.input), mean, stddev));

    ParamSetT<S> params = cast_params<S>(init_mapper_params(cfg.arch, cfg.seed));
    params.ensure_grads();
    AdamStateT<S> adam;

    std::vector<ParamSetT<S>> scratch;
    for (int i = 0; i < cfg.batch_size; ++i) scratch.push_back(make_scratch(params));
    std::vector<double> slot_jhm(static_cast<std::size_t>(cfg.batch_size));
    std::vector<double> slot_paf(static_cast<std::size_t>(cfg.batch_size));

    TrainResult result;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = cfg.schedule.at(epoch);
        Rng order_rng = Rng::forked(cfg.seed, 0x5a5a0000ULL + static_cast<std::uint64_t>(epoch));
        const std::vector<int> order = shuffled_indices(n, order_rng);

        double sum_jhm = 0.0, sum_paf = 0.0;
        for (int start = 0; start < n; start += cfg.batch_size) {
            const int nb = std::min(cfg.batch_size, n - start);
            run_slots(nb, cfg.n_threads, [&](int slot) {
                const int idx = order[static_cast<std::size_t>(start + slot)];
                const MapperSample& s = samples[static_cast<std::size_t>(idx)];
                const Jhm tj = render_jhm(s.persons, cfg.jhm_sigma, cfg.arch.h_map,
                                          cfg.arch.w_map);
                const Paf tp = render_paf(s.persons, LimbTopology::canonical(), cfg.paf_width,
                                          cfg.arch.h_map, cfg.arch.w_map);
                ConvWorkspace<S> ws;
                auto& g = scratch[static_cast<std::size_t>(slot)];
                g.zero_grads();
                mapper_loss_and_grads(inputs[static_cast<std::size_t>(idx)], from_jhm<S>(tj),
                                      from_paf<S>(tp), params, cfg.arch, cfg.loss,
                                      cfg.weight_mode, g, &ws,
                                      &slot_jhm[static_cast<std::size_t>(slot)],
                                      &slot_paf[static_cast<std::size_t>(slot)]);
            });
            params.zero_grads();
            for (int slot = 0; slot < nb; ++slot) {
                const double total = loss_mapper_total(slot_jhm[static_cast<std::size_t>(slot)],
                                                       slot_paf[static_cast<std::size_t>(slot)],
                                                       cfg.loss);
                if (!std::isfinite(total))
                    throw NonFiniteLoss("mapper loss not finite at epoch " +
                                        std::to_string(epoch) + " sample " +
                                        std::to_string(order[static_cast<std::size_t>(
                                            start + slot)]));
                sum_jhm += slot_jhm[static_cast<std::size_t>(slot)];
                sum_paf += slot_paf[static_cast<std::size_t>(slot)];
                merge_grads(params, scratch[static_cast<std::size_t>(slot)]);
            }
            adam_step(params, adam, lr, cfg.adam);
        }

        EpochLog log;
        log.epoch = epoch;
        log.lr = lr;
        log.loss_a = sum_jhm / n;
        log.loss_b = sum_paf / n;
        log.loss_total = loss_mapper_total(log.loss_a, log.loss_b, cfg.loss);
        result.epochs.push_back(log);
        if (on_epoch) on_epoch(log);
    }

    result.checkpoint.params = uncast_params(params);
    result.checkpoint.adam = uncast_adam(adam);
    result.checkpoint.extra.emplace("input_mean", mean);
    result.checkpoint.extra.emplace("input_std", stddev);
    mapper_config_to_meta(cfg, result.checkpoint.meta);
    return result;
}

template <typename S>
TrainResult train_generator_impl(const std::vector<GeneratorSample>& samples,
                                 const Tensor& identity, const Tensor& background,
                                 const GeneratorTrainConfig& cfg,
                                 const EpochCallback& on_epoch) {
    if (samples.empty()) throw EmptyInputs("train_generator needs samples");
    if (cfg.epochs < 0 || cfg.batch_size < 1) throw UsageError("bad train config");
    if (cfg.arch.n_identity_frames != 1)
        throw UsageError("train_generator supports a single identity frame");
    const int n = static_cast<int>(samples.size());
    const int fh = cfg.arch.h_frame, fw = cfg.arch.w_frame;
    check_shape(identity, {3, fh, fw}, "identity frame");
    check_shape(background, {3, fh, fw}, "background frame");
    for (const GeneratorSample& s : samples) {
        check_shape(s.frame, {3, fh, fw}, "generator target frame");
        if (s.mask.size() != static_cast<std::size_t>(fh) * fw)
            throw ShapeMismatch("generator mask size mismatch");
    }

    const TensorT<S> identity_s = cast_tensor<S>(identity);
    const TensorT<S> background_s = cast_tensor<S>(background);
    std::vector<TensorT<S>> frames;
    frames.reserve(samples.size());
    for (const GeneratorSample& s : samples) frames.push_back(cast_tensor<S>(s.frame));

    ParamSetT<S> params = cast_params<S>(init_generator_params(cfg.arch, cfg.seed));
    params.ensure_grads();
    AdamStateT<S> adam;

    std::vector<ParamSetT<S>> scratch;
    for (int i = 0; i < cfg.batch_size; ++i) scratch.push_back(make_scratch(params));
    std::vector<double> slot_fore(static_cast<std::size_t>(cfg.batch_size));
    std::vector<double> slot_back(static_cast<std::size_t>(cfg.batch_size));

    TrainResult result;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = cfg.schedule.at(epoch);
        Rng order_rng = Rng::forked(cfg.seed, 0xa7a70000ULL + static_cast<std::uint64_t>(epoch));
        const std::vector<int> order = shuffled_indices(n, order_rng);

        double sum_fore = 0.0, sum_back = 0.0;
        for (int start = 0; start < n; start += cfg.batch_size) {
            const int nb = std::min(cfg.batch_size, n - start);
            run_slots(nb, cfg.n_threads, [&](int slot) {
                const int idx = order[static_cast<std::size_t>(start + slot)];
                const GeneratorSample& s = samples[static_cast<std::size_t>(idx)];
                const std::vector<Skeleton> grid =
                    skeletons_to_grid(s.persons, fh, fw, cfg.map_h, cfg.map_w);
                const Jhm tj = render_jhm(grid, cfg.jhm_sigma, cfg.map_h, cfg.map_w);
                const Paf tp = render_paf(grid, LimbTopology::canonical(), cfg.paf_width,
                                          cfg.map_h, cfg.map_w);
                ConvWorkspace<S> ws;
                auto& g = scratch[static_cast<std::size_t>(slot)];
                g.zero_grads();
                generator_loss_and_grads(from_jhm<S>(tj), from_paf<S>(tp), {&identity_s},
                                         frames[static_cast<std::size_t>(idx)], s.mask,
                                         background_s, params, cfg.arch, cfg.loss, g, &ws,
                                         &slot_fore[static_cast<std::size_t>(slot)],
                                         &slot_back[static_cast<std::size_t>(slot)]);
            });
            params.zero_grads();
            for (int slot = 0; slot < nb; ++slot) {
                const double total =
                    loss_generator_total(slot_fore[static_cast<std::size_t>(slot)],
                                         slot_back[static_cast<std::size_t>(slot)], cfg.loss);
                if (!std::isfinite(total))
                    throw NonFiniteLoss("generator loss not finite at epoch " +
                                        std::to_string(epoch) + " sample " +
                                        std::to_string(order[static_cast<std::size_t>(
                                            start + slot)]));
                sum_fore += slot_fore[static_cast<std::size_t>(slot)];
                sum_back += slot_back[static_cast<std::size_t>(slot)];
                merge_grads(params, scratch[static_cast<std::size_t>(slot)]);
            }
            adam_step(params, adam, lr, cfg.adam);
        }

        EpochLog log;
        log.epoch = epoch;
        log.lr = lr;
        log.loss_a = sum_fore / n;
        log.loss_b = sum_back / n;
        log.loss_total = loss_generator_total(log.loss_a, log.loss_b, cfg.loss);
        result.epochs.push_back(log);
        if (on_epoch) on_epoch(log);
    }

    result.checkpoint.params = uncast_params(params);
    result.checkpoint.adam = uncast_adam(adam);
    result.checkpoint.extra.emplace("identity_frame", identity);
    result.checkpoint.extra.emplace("background", background);
    generator_config_to_meta(cfg, result.checkpoint.meta);
    return result;
}

}  // namespace

TrainResult train_mapper(const std::vector<MapperSample>& samples, const MapperTrainConfig& cfg,
                         const EpochCallback& on_epoch) {
    return cfg.use_float32 ? train_mapper_impl<float>(samples, cfg, on_epoch)
                           : train_mapper_impl<double>(samples, cfg, on_epoch);
}

TrainResult train_generator(const std::vector<GeneratorSample>& samples, const Tensor& identity,
                            const Tensor& background, const GeneratorTrainConfig& cfg,
                            const EpochCallback& on_epoch) {
    return cfg.use_float32 ? train_generator_impl<float>(samples, identity, background, cfg,
                                                         on_epoch)
                           : train_generator_impl<double>(samples, identity, background, cfg,
                                                          on_epoch);
}

void mapper_config_to_meta(const MapperTrainConfig& cfg,
                           std::map<std::string, std::string>& meta) {
    meta["model"] = "mapper";
    meta["scalar"] = cfg.use_float32 ? "float32" : "float64";
    meta["arch.c_in"] = std::to_string(cfg.arch.c_in);
    meta["arch.h_in"] = std::to_string(cfg.arch.h_in);
    meta["arch.w_in"] = std::to_string(cfg.arch.w_in);
    meta["arch.enc1"] = std::to_string(cfg.arch.enc1_channels);
    meta["arch.enc2"] = std::to_string(cfg.arch.enc2_channels);
    meta["arch.enc3"] = std::to_string(cfg.arch.enc3_channels);
    meta["arch.n_res"] = std::to_string(cfg.arch.n_residual_blocks);
    meta["arch.head"] = std::to_string(cfg.arch.head_channels);
    meta["arch.h_map"] = std::to_string(cfg.arch.h_map);
    meta["arch.w_map"] = std::to_string(cfg.arch.w_map);
    meta["render.jhm_sigma"] = fmt_double(cfg.jhm_sigma);
    meta["render.paf_width"] = fmt_double(cfg.paf_width);
    meta["train.seed"] = std::to_string(cfg.seed);
    meta["train.epochs"] = std::to_string(cfg.epochs);
}

MapperConfig mapper_config_from_meta(const std::map<std::string, std::string>& meta) {
    MapperConfig cfg;
    cfg.c_in = meta_int(meta, "arch.c_in");
    cfg.h_in = meta_int(meta, "arch.h_in");
    cfg.w_in = meta_int(meta, "arch.w_in");
    cfg.enc1_channels = meta_int(meta, "arch.enc1");
    cfg.enc2_channels = meta_int(meta, "arch.enc2");
    cfg.enc3_channels = meta_int(meta, "arch.enc3");
    cfg.n_residual_blocks = meta_int(meta, "arch.n_res");
    cfg.head_channels = meta_int(meta, "arch.head");
    cfg.h_map = meta_int(meta, "arch.h_map");
    cfg.w_map = meta_int(meta, "arch.w_map");
    return cfg;
}

void generator_config_to_meta(const GeneratorTrainConfig& cfg,
                              std::map<std::string, std::string>& meta) {
    meta["model"] = "generator";
    meta["scalar"] = cfg.use_float32 ? "float32" : "float64";
    meta["arch.h_frame"] = std::to_string(cfg.arch.h_frame);
    meta["arch.w_frame"] = std::to_string(cfg.arch.w_frame);
    meta["arch.n_identity"] = std::to_string(cfg.arch.n_identity_frames);
    meta["arch.enc1"] = std::to_string(cfg.arch.enc1_channels);
    meta["arch.enc2"] = std::to_string(cfg.arch.enc2_channels);
    meta["arch.enc3"] = std::to_string(cfg.arch.enc3_channels);
    meta["arch.n_res"] = std::to_string(cfg.arch.n_residual_blocks);
    meta["render.map_h"] = std::to_string(cfg.map_h);
    meta["render.map_w"] = std::to_string(cfg.map_w);
    meta["render.jhm_sigma"] = fmt_double(cfg.jhm_sigma);
    meta["render.paf_width"] = fmt_double(cfg.paf_width);
    meta["train.seed"] = std::to_string(cfg.seed);
    meta["train.epochs"] = std::to_string(cfg.epochs);
}

GeneratorConfig generator_config_from_meta(const std::map<std::string, std::string>& meta) {
    GeneratorConfig cfg;
    cfg.h_frame = meta_int(meta, "arch.h_frame");
    cfg.w_frame = meta_int(meta, "arch.w_frame");
    cfg.n_identity_frames = meta_int(meta, "arch.n_identity");
    cfg.enc1_channels = meta_int(meta, "arch.enc1");
    cfg.enc2_channels = meta_int(meta, "arch.enc2");
    cfg.enc3_channels = meta_int(meta, "arch.enc3");
    cfg.n_residual_blocks = meta_int(meta, "arch.n_res");
    return cfg;
}

void generator_render_from_meta(const std::map<std::string, std::string>& meta, int& map_h,
                                int& map_w, double& jhm_sigma, double& paf_width) {
    map_h = meta_int(meta, "render.map_h");
    map_w = meta_int(meta, "render.map_w");
    jhm_sigma = meta_double(meta, "render.jhm_sigma");
    paf_width = meta_double(meta, "render.paf_width");
}

#define CSIVID_INSTANTIATE_TRAIN(S)                                                             \
    template TensorT<S> normalize_input<S>(const TensorT<S>&, const Tensor&, const Tensor&);    \
    template double mapper_loss_and_grads<S>(                                                   \
        const TensorT<S>&, const TensorT<S>&, const TensorT<S>&, const ParamSetT<S>&,           \
        const MapperConfig&, const LossWeights&, WeightMode, ParamSetT<S>&, ConvWorkspace<S>*,  \
        double*, double*);                                                                      \
    template double generator_loss_and_grads<S>(                                                \
        const TensorT<S>&, const TensorT<S>&, const std::vector<const TensorT<S>*>&,            \
        const TensorT<S>&, std::span<const std::uint8_t>, const TensorT<S>&,                    \
        const ParamSetT<S>&, const GeneratorConfig&, const LossWeights&, ParamSetT<S>&,         \
        ConvWorkspace<S>*, double*, double*);

CSIVID_INSTANTIATE_TRAIN(float)
CSIVID_INSTANTIATE_TRAIN(double)

#undef CSIVID_INSTANTIATE_TRAIN

}  // namespace csivid
