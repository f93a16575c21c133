// SPDX-License-Identifier: Apache-2.0
#include "csivid/networks.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "csivid/errors.hpp"
#include "csivid/optim.hpp"

namespace csivid {

namespace {

struct ConvSpec {
    std::string name;
    int c_out, c_in, k, stride, pad;
};

std::vector<ConvSpec> mapper_layers(const MapperConfig& cfg) {
    std::vector<ConvSpec> specs;
    specs.push_back({"enc1", cfg.enc1_channels, cfg.c_in, 7, 2, 3});
    specs.push_back({"enc2", cfg.enc2_channels, cfg.enc1_channels, 7, 2, 3});
    specs.push_back({"enc3", cfg.enc3_channels, cfg.enc2_channels, 3, 1, 1});
    for (int i = 0; i < cfg.n_residual_blocks; ++i) {
        const std::string base = "res" + std::to_string(i);
        specs.push_back({base + ".c1", cfg.enc3_channels, cfg.enc3_channels, 3, 1, 1});
        specs.push_back({base + ".c2", cfg.enc3_channels, cfg.enc3_channels, 3, 1, 1});
    }
    for (const char* head : {"jhm", "paf"}) {
        const int out = head[0] == 'j' ? kNumKeypoints : kNumPafChannels;
        const std::string base = head;
        specs.push_back({base + ".c1", cfg.head_channels, cfg.enc3_channels, 3, 1, 1});
        specs.push_back({base + ".c2", cfg.head_channels, cfg.head_channels, 3, 1, 1});
        specs.push_back({base + ".out", out, cfg.head_channels, 1, 1, 0});
    }
    return specs;
}

std::vector<ConvSpec> generator_layers(const GeneratorConfig& cfg) {
    std::vector<ConvSpec> specs;
    specs.push_back({"enc1", cfg.enc1_channels, cfg.input_channels(), 7, 2, 3});
    specs.push_back({"enc2", cfg.enc2_channels, cfg.enc1_channels, 7, 2, 3});
    specs.push_back({"enc3", cfg.enc3_channels, cfg.enc2_channels, 3, 1, 1});
    for (int i = 0; i < cfg.n_residual_blocks; ++i) {
        const std::string base = "res" + std::to_string(i);
        specs.push_back({base + ".c1", cfg.enc3_channels, cfg.enc3_channels, 3, 1, 1});
        specs.push_back({base + ".c2", cfg.enc3_channels, cfg.enc3_channels, 3, 1, 1});
    }
    specs.push_back({"dec1", cfg.enc2_channels, cfg.enc3_channels, 3, 1, 1});
    specs.push_back({"dec2", cfg.enc1_channels, cfg.enc2_channels, 3, 1, 1});
    specs.push_back({"out", 3, cfg.enc1_channels, 3, 1, 1});
    return specs;
}

ParamSet init_from_layers(const std::vector<ConvSpec>& specs, std::uint64_t seed) {
    ParamSet set;
    Rng rng(seed);
    for (const ConvSpec& s : specs) {
        Tensor w({s.c_out, s.c_in, s.k, s.k});
        init_he_normal(w, s.c_in * s.k * s.k, rng);
        set.params.emplace(s.name + ".w", std::move(w));
        set.params.emplace(s.name + ".b", Tensor({s.c_out}));
    }
    return set;
}

template <typename S>
TensorT<S> conv_named(const TensorT<S>& x, const ParamSetT<S>& p, const ConvSpec& s,
                      ConvWorkspace<S>* ws) {
    return conv2d(x, p.at(s.name + ".w"), p.at(s.name + ".b"), s.stride, s.pad, ws);
}

/// Runs conv2d_backward into fresh zero tensors, then adds the results into
/// the .grad buffers of `grads`. Keeping the per-call gradient separate makes
/// the summation order independent of how often the layer already fired.
template <typename S>
void conv_backward_named(const TensorT<S>& input, const ParamSetT<S>& params, const ConvSpec& s,
                         const TensorT<S>& d_out, TensorT<S>* d_input, ParamSetT<S>& grads,
                         ConvWorkspace<S>* ws) {
    const TensorT<S>& w = params.at(s.name + ".w");
    TensorT<S> dw(w.shape);
    TensorT<S> db({s.c_out});
    conv2d_backward(input, w, d_out, s.stride, s.pad, d_input, &dw, &db, ws);
    TensorT<S>& gw = grads.at(s.name + ".w");
    TensorT<S>& gb = grads.at(s.name + ".b");
    gw.ensure_grad();
    gb.ensure_grad();
    for (std::size_t i = 0; i < dw.data.size(); ++i) gw.grad[i] += dw.data[i];
    for (std::size_t i = 0; i < db.data.size(); ++i) gb.grad[i] += db.data[i];
}

template <typename S>
void add_into(TensorT<S>& dst, const TensorT<S>& src) {
    for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
}

const ConvSpec& find_spec(const std::vector<ConvSpec>& specs, const std::string& name) {
    for (const ConvSpec& s : specs)
        if (s.name == name) return s;
    throw UsageError("unknown layer " + name);
}

}  // namespace

ParamSet init_mapper_params(const MapperConfig& cfg, std::uint64_t seed) {
    return init_from_layers(mapper_layers(cfg), seed);
}

ParamSet init_generator_params(const GeneratorConfig& cfg, std::uint64_t seed) {
    if (cfg.h_frame % 4 != 0 || cfg.w_frame % 4 != 0)
        throw DimensionMismatch("generator frame dims must be multiples of 4");
    return init_from_layers(generator_layers(cfg), seed);
}

template <typename S>
MapperOutput<S> mapper_forward(const TensorT<S>& input, const ParamSetT<S>& params,
                               const MapperConfig& cfg, MapperCache<S>* cache,
                               ConvWorkspace<S>* ws) {
    check_shape(input, {cfg.c_in, cfg.h_in, cfg.w_in}, "mapper input");
    const std::vector<ConvSpec> specs = mapper_layers(cfg);

    MapperCache<S> local;
    MapperCache<S>& c = cache ? *cache : local;
    c.res.clear();

    c.x = input;
    c.z1 = conv_named(c.x, params, find_spec(specs, "enc1"), ws);
    c.a1 = relu(c.z1);
    c.z2 = conv_named(c.a1, params, find_spec(specs, "enc2"), ws);
    c.a2 = relu(c.z2);
    c.z3 = conv_named(c.a2, params, find_spec(specs, "enc3"), ws);
    c.a3 = relu(c.z3);

    const TensorT<S>* trunk = &c.a3;
    for (int i = 0; i < cfg.n_residual_blocks; ++i) {
        const std::string base = "res" + std::to_string(i);
        typename MapperCache<S>::ResCache rc;
        rc.in = *trunk;
        rc.z1 = conv_named(rc.in, params, find_spec(specs, base + ".c1"), ws);
        rc.a1 = relu(rc.z1);
        rc.z2 = conv_named(rc.a1, params, find_spec(specs, base + ".c2"), ws);
        rc.sum = rc.z2;
        add_into(rc.sum, rc.in);
        c.res.push_back(std::move(rc));
        c.res.back().sum = relu(c.res.back().sum);
        trunk = &c.res.back().sum;
    }

    auto run_head = [&](const char* name, typename MapperCache<S>::HeadCache& hc,
                        bool sigmoid_out) {
        const std::string base = name;
        hc.z1 = conv_named(*trunk, params, find_spec(specs, base + ".c1"), ws);
        hc.a1 = relu(hc.z1);
        hc.up = resize_bilinear(hc.a1, cfg.h_map, cfg.w_map);
        hc.z2 = conv_named(hc.up, params, find_spec(specs, base + ".c2"), ws);
        hc.a2 = relu(hc.z2);
        hc.logits = conv_named(hc.a2, params, find_spec(specs, base + ".out"), ws);
        hc.out = sigmoid_out ? sigmoid(hc.logits) : tanh_act(hc.logits);
    };
    run_head("jhm", c.jhm, true);
    run_head("paf", c.paf, false);

    MapperOutput<S> out;
    out.jhm = c.jhm.out;
    out.paf = c.paf.out;
    return out;
}

template <typename S>
void mapper_backward(const ParamSetT<S>& params, const MapperConfig& cfg,
                     const MapperCache<S>& cache, const TensorT<S>& d_jhm,
                     const TensorT<S>& d_paf, ParamSetT<S>& grads, ConvWorkspace<S>* ws) {
    const std::vector<ConvSpec> specs = mapper_layers(cfg);
    const TensorT<S>& trunk_out =
        cache.res.empty() ? cache.a3 : cache.res.back().sum;

    TensorT<S> d_trunk(trunk_out.shape);
    auto back_head = [&](const char* name, const typename MapperCache<S>::HeadCache& hc,
                         const TensorT<S>& d_head, bool sigmoid_out) {
        const std::string base = name;
        TensorT<S> d_logits =
            sigmoid_out ? sigmoid_backward(hc.out, d_head) : tanh_backward(hc.out, d_head);
        TensorT<S> d_a2(hc.a2.shape);
        conv_backward_named(hc.a2, params, find_spec(specs, base + ".out"), d_logits, &d_a2,
                            grads, ws);
        TensorT<S> d_z2 = relu_backward(hc.z2, d_a2);
        TensorT<S> d_up(hc.up.shape);
        conv_backward_named(hc.up, params, find_spec(specs, base + ".c2"), d_z2, &d_up, grads,
                            ws);
        TensorT<S> d_a1 = resize_bilinear_backward(d_up, hc.a1.dim(1), hc.a1.dim(2));
        TensorT<S> d_z1 = relu_backward(hc.z1, d_a1);
        conv_backward_named(trunk_out, params, find_spec(specs, base + ".c1"), d_z1, &d_trunk,
                            grads, ws);
    };
    back_head("jhm", cache.jhm, d_jhm, true);
    back_head("paf", cache.paf, d_paf, false);

    TensorT<S> d = std::move(d_trunk);
    for (int i = cfg.n_residual_blocks - 1; i >= 0; --i) {
        const std::string base = "res" + std::to_string(i);
        const auto& rc = cache.res[static_cast<std::size_t>(i)];
        // rc.sum holds relu(z2 + in); relu_backward only tests sign, so the
        // post-activation tensor is a valid stand-in for the pre-activation.
        TensorT<S> d_sum = relu_backward(rc.sum, d);
        TensorT<S> d_in = d_sum;  // skip connection
        TensorT<S> d_a1(rc.a1.shape);
        conv_backward_named(rc.a1, params, find_spec(specs, base + ".c2"), d_sum, &d_a1, grads,
                            ws);
        TensorT<S> d_z1 = relu_backward(rc.z1, d_a1);
        conv_backward_named(rc.in, params, find_spec(specs, base + ".c1"), d_z1, &d_in, grads,
                            ws);
        d = std::move(d_in);
    }

    TensorT<S> d_z3 = relu_backward(cache.z3, d);
    TensorT<S> d_a2(cache.a2.shape);
    conv_backward_named(cache.a2, params, find_spec(specs, "enc3"), d_z3, &d_a2, grads, ws);
    TensorT<S> d_z2 = relu_backward(cache.z2, d_a2);
    TensorT<S> d_a1(cache.a1.shape);
    conv_backward_named(cache.a1, params, find_spec(specs, "enc2"), d_z2, &d_a1, grads, ws);
    TensorT<S> d_z1 = relu_backward(cache.z1, d_a1);
    conv_backward_named<S>(cache.x, params, find_spec(specs, "enc1"), d_z1, nullptr, grads, ws);
}

template <typename S>
TensorT<S> generator_forward(const TensorT<S>& jhm, const TensorT<S>& paf,
                             const std::vector<const TensorT<S>*>& identity_frames,
                             const ParamSetT<S>& params, const GeneratorConfig& cfg,
                             GeneratorCache<S>* cache, ConvWorkspace<S>* ws) {
    if (jhm.shape.size() != 3 || jhm.dim(0) != kNumKeypoints)
        throw ShapeMismatch("generator jhm must be (14,h,w)");
    if (paf.shape.size() != 3 || paf.dim(0) != kNumPafChannels)
        throw ShapeMismatch("generator paf must be (26,h,w)");
    if (static_cast<int>(identity_frames.size()) != cfg.n_identity_frames)
        throw ShapeMismatch("generator identity frame count mismatch");
    if (cfg.h_frame % 4 != 0 || cfg.w_frame % 4 != 0)
        throw DimensionMismatch("generator frame dims must be multiples of 4");
    const std::vector<ConvSpec> specs = generator_layers(cfg);

    GeneratorCache<S> local;
    GeneratorCache<S>& c = cache ? *cache : local;

    TensorT<S> jhm_up = resize_bilinear(jhm, cfg.h_frame, cfg.w_frame);
    TensorT<S> paf_up = resize_bilinear(paf, cfg.h_frame, cfg.w_frame);
    std::vector<const TensorT<S>*> parts = {&jhm_up, &paf_up};
    for (const TensorT<S>* f : identity_frames) {
        check_shape(*f, {3, cfg.h_frame, cfg.w_frame}, "generator identity frame");
        parts.push_back(f);
    }
    c.x = concat_channels(parts);

    c.z1 = conv_named(c.x, params, find_spec(specs, "enc1"), ws);
    c.a1 = relu(c.z1);
    c.z2 = conv_named(c.a1, params, find_spec(specs, "enc2"), ws);
    c.a2 = relu(c.z2);
    c.z3 = conv_named(c.a2, params, find_spec(specs, "enc3"), ws);
    c.a3 = relu(c.z3);

    if (cfg.n_residual_blocks > 8) throw DimensionMismatch("generator supports at most 8 blocks");
    c.n_res = cfg.n_residual_blocks;
    const TensorT<S>* trunk = &c.a3;
    for (int i = 0; i < cfg.n_residual_blocks; ++i) {
        const std::string base = "res" + std::to_string(i);
        auto& rc = c.res[i];
        rc.in = *trunk;
        rc.z1 = conv_named(rc.in, params, find_spec(specs, base + ".c1"), ws);
        rc.a1 = relu(rc.z1);
        rc.z2 = conv_named(rc.a1, params, find_spec(specs, base + ".c2"), ws);
        rc.sum = rc.z2;
        add_into(rc.sum, rc.in);
        rc.sum = relu(rc.sum);
        trunk = &rc.sum;
    }

    c.up1 = upsample_bilinear2x(*trunk);
    c.zd1 = conv_named(c.up1, params, find_spec(specs, "dec1"), ws);
    c.ad1 = relu(c.zd1);
    c.up2 = upsample_bilinear2x(c.ad1);
    c.zd2 = conv_named(c.up2, params, find_spec(specs, "dec2"), ws);
    c.ad2 = relu(c.zd2);
    c.z_out = conv_named(c.ad2, params, find_spec(specs, "out"), ws);
    c.out = sigmoid(c.z_out);
    return c.out;
}

template <typename S>
void generator_backward(const ParamSetT<S>& params, const GeneratorConfig& cfg,
                        const GeneratorCache<S>& cache, const TensorT<S>& d_out,
                        ParamSetT<S>& grads, ConvWorkspace<S>* ws) {
    const std::vector<ConvSpec> specs = generator_layers(cfg);

    TensorT<S> d_z_out = sigmoid_backward(cache.out, d_out);
    TensorT<S> d_ad2(cache.ad2.shape);
    conv_backward_named(cache.ad2, params, find_spec(specs, "out"), d_z_out, &d_ad2, grads, ws);
    TensorT<S> d_zd2 = relu_backward(cache.zd2, d_ad2);
    TensorT<S> d_up2(cache.up2.shape);
    conv_backward_named(cache.up2, params, find_spec(specs, "dec2"), d_zd2, &d_up2, grads, ws);
    TensorT<S> d_ad1 = resize_bilinear_backward(d_up2, cache.ad1.dim(1), cache.ad1.dim(2));
    TensorT<S> d_zd1 = relu_backward(cache.zd1, d_ad1);
    TensorT<S> d_up1(cache.up1.shape);
    conv_backward_named(cache.up1, params, find_spec(specs, "dec1"), d_zd1, &d_up1, grads, ws);
    const TensorT<S>& trunk_out = cache.n_res == 0 ? cache.a3 : cache.res[cache.n_res - 1].sum;
    TensorT<S> d = resize_bilinear_backward(d_up1, trunk_out.dim(1), trunk_out.dim(2));

    for (int i = cache.n_res - 1; i >= 0; --i) {
        const std::string base = "res" + std::to_string(i);
        const auto& rc = cache.res[i];
        TensorT<S> d_sum = relu_backward(rc.sum, d);
        TensorT<S> d_in = d_sum;
        TensorT<S> d_a1(rc.a1.shape);
        conv_backward_named(rc.a1, params, find_spec(specs, base + ".c2"), d_sum, &d_a1, grads,
                            ws);
        TensorT<S> d_z1 = relu_backward(rc.z1, d_a1);
        conv_backward_named(rc.in, params, find_spec(specs, base + ".c1"), d_z1, &d_in, grads,
                            ws);
        d = std::move(d_in);
    }

    TensorT<S> d_z3 = relu_backward(cache.z3, d);
    TensorT<S> d_a2(cache.a2.shape);
    conv_backward_named(cache.a2, params, find_spec(specs, "enc3"), d_z3, &d_a2, grads, ws);
    TensorT<S> d_z2 = relu_backward(cache.z2, d_a2);
    TensorT<S> d_a1(cache.a1.shape);
    conv_backward_named(cache.a1, params, find_spec(specs, "enc2"), d_z2, &d_a1, grads, ws);
    TensorT<S> d_z1 = relu_backward(cache.z1, d_a1);
    conv_backward_named<S>(cache.x, params, find_spec(specs, "enc1"), d_z1, nullptr, grads, ws);
}

template <typename S>
double loss_weighted_map(const TensorT<S>& pred, const TensorT<S>& target, double alpha,
                         double beta, WeightMode mode) {
    check_shape(pred, target.shape, "loss map pred");
    double total = 0.0;
    const S a = static_cast<S>(alpha), b = static_cast<S>(beta);
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const S w = a * std::abs(target.data[i]) + b;
        const S d = pred.data[i] - target.data[i];
        const S term =
            mode == WeightMode::kInsideSquare ? (w * d) * (w * d) : w * (d * d);
        total += static_cast<double>(term);
    }
    return total;
}

template <typename S>
TensorT<S> loss_weighted_map_grad(const TensorT<S>& pred, const TensorT<S>& target, double alpha,
                                  double beta, WeightMode mode) {
    check_shape(pred, target.shape, "loss map pred");
    TensorT<S> g(pred.shape);
    const S a = static_cast<S>(alpha), b = static_cast<S>(beta);
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const S w = a * std::abs(target.data[i]) + b;
        const S d = pred.data[i] - target.data[i];
        g.data[i] = mode == WeightMode::kInsideSquare ? S(2) * w * w * d : S(2) * w * d;
    }
    return g;
}

double loss_mapper_total(double l_jhm, double l_paf, const LossWeights& w) {
    return w.lambda_jhm * l_jhm + w.lambda_paf * l_paf;
}

namespace {
template <typename S>
void check_frame_mask(const TensorT<S>& a, const TensorT<S>& b,
                      std::span<const std::uint8_t> mask) {
    if (a.shape.size() != 3 || a.dim(0) != 3) throw ShapeMismatch("frame must be (3,H,W)");
    check_shape(b, a.shape, "frame pair");
    if (mask.size() != static_cast<std::size_t>(a.dim(1)) * a.dim(2))
        throw ShapeMismatch("mask size does not match frame");
}
}  // namespace

template <typename S>
double loss_foreground(const TensorT<S>& synth, const TensorT<S>& truth,
                       std::span<const std::uint8_t> mask) {
    check_frame_mask(synth, truth, mask);
    const std::size_t plane = mask.size();
    double total = 0.0;
    for (int ch = 0; ch < 3; ++ch) {
        const S* s = synth.data.data() + plane * ch;
        const S* t = truth.data.data() + plane * ch;
        for (std::size_t i = 0; i < plane; ++i) {
            if (!mask[i]) continue;
            const S d = s[i] - t[i];
            total += static_cast<double>(d * d);
        }
    }
    return total;
}

template <typename S>
TensorT<S> loss_foreground_grad(const TensorT<S>& synth, const TensorT<S>& truth,
                                std::span<const std::uint8_t> mask) {
    check_frame_mask(synth, truth, mask);
    const std::size_t plane = mask.size();
    TensorT<S> g(synth.shape);
    for (int ch = 0; ch < 3; ++ch) {
        const S* s = synth.data.data() + plane * ch;
        const S* t = truth.data.data() + plane * ch;
        S* out = g.data.data() + plane * ch;
        for (std::size_t i = 0; i < plane; ++i)
            out[i] = mask[i] ? S(2) * (s[i] - t[i]) : S(0);
    }
    return g;
}

template <typename S>
double loss_background(const TensorT<S>& synth, const TensorT<S>& background,
                       std::span<const std::uint8_t> mask) {
    check_frame_mask(synth, background, mask);
    const std::size_t plane = mask.size();
    double total = 0.0;
    for (int ch = 0; ch < 3; ++ch) {
        const S* s = synth.data.data() + plane * ch;
        const S* t = background.data.data() + plane * ch;
        for (std::size_t i = 0; i < plane; ++i) {
            if (mask[i]) continue;
            const S d = s[i] - t[i];
            total += static_cast<double>(d * d);
        }
    }
    return total;
}

template <typename S>
TensorT<S> loss_background_grad(const TensorT<S>& synth, const TensorT<S>& background,
                                std::span<const std::uint8_t> mask) {
    check_frame_mask(synth, background, mask);
    const std::size_t plane = mask.size();
    TensorT<S> g(synth.shape);
    for (int ch = 0; ch < 3; ++ch) {
        const S* s = synth.data.data() + plane * ch;
        const S* t = background.data.data() + plane * ch;
        S* out = g.data.data() + plane * ch;
        for (std::size_t i = 0; i < plane; ++i)
            out[i] = mask[i] ? S(0) : S(2) * (s[i] - t[i]);
    }
    return g;
}

double loss_generator_total(double l_fore, double l_back, const LossWeights& w) {
    return w.lambda_fore * l_fore + w.lambda_back * l_back;
}

template <typename S>
TensorT<S> from_jhm(const Jhm& jhm) {
    TensorT<S> t({kNumKeypoints, jhm.height, jhm.width});
    for (std::size_t i = 0; i < jhm.data.size(); ++i) t.data[i] = static_cast<S>(jhm.data[i]);
    return t;
}

template <typename S>
TensorT<S> from_paf(const Paf& paf) {
    TensorT<S> t({kNumPafChannels, paf.height, paf.width});
    for (std::size_t i = 0; i < paf.data.size(); ++i) t.data[i] = static_cast<S>(paf.data[i]);
    return t;
}

namespace {
template <typename S>
Jhm to_jhm_impl(const TensorT<S>& t) {
    if (t.shape.size() != 3 || t.dim(0) != kNumKeypoints)
        throw ShapeMismatch("jhm tensor must be (14,h,w)");
    Jhm j;
    j.height = t.dim(1);
    j.width = t.dim(2);
    j.data.resize(t.data.size());
    for (std::size_t i = 0; i < t.data.size(); ++i) j.data[i] = static_cast<double>(t.data[i]);
    return j;
}
template <typename S>
Paf to_paf_impl(const TensorT<S>& t) {
    if (t.shape.size() != 3 || t.dim(0) != kNumPafChannels)
        throw ShapeMismatch("paf tensor must be (26,h,w)");
    Paf p;
    p.height = t.dim(1);
    p.width = t.dim(2);
    p.data.resize(t.data.size());
    for (std::size_t i = 0; i < t.data.size(); ++i) p.data[i] = static_cast<double>(t.data[i]);
    return p;
}
}  // namespace

Jhm to_jhm(const Tensor& t) { return to_jhm_impl(t); }
Paf to_paf(const Tensor& t) { return to_paf_impl(t); }
Jhm to_jhm(const TensorF& t) { return to_jhm_impl(t); }
Paf to_paf(const TensorF& t) { return to_paf_impl(t); }

#define CSIVID_INSTANTIATE_NETWORKS(S)                                                           \
    template MapperOutput<S> mapper_forward<S>(const TensorT<S>&, const ParamSetT<S>&,           \
                                               const MapperConfig&, MapperCache<S>*,             \
                                               ConvWorkspace<S>*);                               \
    template void mapper_backward<S>(const ParamSetT<S>&, const MapperConfig&,                   \
                                     const MapperCache<S>&, const TensorT<S>&,                   \
                                     const TensorT<S>&, ParamSetT<S>&, ConvWorkspace<S>*);       \
    template TensorT<S> generator_forward<S>(                                                    \
        const TensorT<S>&, const TensorT<S>&, const std::vector<const TensorT<S>*>&,             \
        const ParamSetT<S>&, const GeneratorConfig&, GeneratorCache<S>*, ConvWorkspace<S>*);     \
    template void generator_backward<S>(const ParamSetT<S>&, const GeneratorConfig&,             \
                                        const GeneratorCache<S>&, const TensorT<S>&,             \
                                        ParamSetT<S>&, ConvWorkspace<S>*);                       \
    template double loss_weighted_map<S>(const TensorT<S>&, const TensorT<S>&, double, double,   \
                                         WeightMode);                                            \
    template TensorT<S> loss_weighted_map_grad<S>(const TensorT<S>&, const TensorT<S>&, double,  \
                                                  double, WeightMode);                           \
    template double loss_foreground<S>(const TensorT<S>&, const TensorT<S>&,                     \
                                       std::span<const std::uint8_t>);                           \
    template TensorT<S> loss_foreground_grad<S>(const TensorT<S>&, const TensorT<S>&,            \
                                                std::span<const std::uint8_t>);                  \
    template double loss_background<S>(const TensorT<S>&, const TensorT<S>&,                     \
                                       std::span<const std::uint8_t>);                           \
    template TensorT<S> loss_background_grad<S>(const TensorT<S>&, const TensorT<S>&,            \
                                                std::span<const std::uint8_t>);                  \
    template TensorT<S> from_jhm<S>(const Jhm&);                                                 \
    template TensorT<S> from_paf<S>(const Paf&);

CSIVID_INSTANTIATE_NETWORKS(float)
CSIVID_INSTANTIATE_NETWORKS(double)

#undef CSIVID_INSTANTIATE_NETWORKS

}  // namespace csivid
