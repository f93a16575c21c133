// SPDX-License-Identifier: Apache-2.0
//
// Release gate. Nine self-contained checks over the whole pipeline, each
// printing exactly one PASS/FAIL line. Run without arguments for the full
// gate, or pass criterion numbers to run a subset while debugging.
//
//   1  finite-difference gradient checks, ops and full networks
//   2  loss implementations vs naive oracles and hand-forced values
//   3  pose map render -> assemble round trip
//   4  PCK / IoU metrics vs exhaustive counting oracles
//   5  preprocessing exactness (resampler, CSIL, outlier flags)
//   6  channel simulator closed forms
//   7  mapper learns on a synthetic dataset (the substantive check)
//   8  generator beats the predict-background baseline
//   9  byte-identical reruns

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "csivid/checkpoint.hpp"
#include "csivid/csil.hpp"
#include "csivid/dataset.hpp"
#include "csivid/eval_metrics.hpp"
#include "csivid/image.hpp"
#include "csivid/networks.hpp"
#include "csivid/nn_ops.hpp"
#include "csivid/pose_maps.hpp"
#include "csivid/preprocess.hpp"
#include "csivid/rng.hpp"
#include "csivid/synth_sim.hpp"
#include "csivid/train.hpp"

using namespace csivid;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(a) + std::abs(b), 1e-9);
}

Tensor random_tensor(const std::vector<int>& shape, Rng& rng, double lo = -1.0,
                     double hi = 1.0) {
    Tensor t(shape);
    for (double& v : t.data) v = rng.uniform(lo, hi);
    return t;
}

// Values bounded away from zero so relu stays differentiable at every
// sampled coordinate.
Tensor random_tensor_off_zero(const std::vector<int>& shape, Rng& rng) {
    Tensor t(shape);
    for (double& v : t.data) {
        v = rng.uniform(-1.0, 1.0);
        if (std::abs(v) < 0.05) v += (v < 0.0 ? -0.1 : 0.1);
    }
    return t;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

fs::path fresh_dir(const char* name) {
    const fs::path dir = fs::temp_directory_path() / "csivid_acceptance" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

struct CriterionResult {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// --------------------------------------------------- 1: gradient checks --

// Scalar objective L = sum(cotangent * op(x)) turns each op's backward into
// an input gradient we can compare against central differences.
struct OpCheck {
    double max_rel = 0.0;
    void compare(double analytic, double numeric) {
        max_rel = std::max(max_rel, rel_err(analytic, numeric));
    }
};

double weighted_sum(const Tensor& t, const Tensor& w) {
    double acc = 0.0;
    for (std::size_t i = 0; i < t.data.size(); ++i) acc += t.data[i] * w.data[i];
    return acc;
}

template <typename Forward>
void fd_input_check(Tensor& x, const Tensor& grad, Forward forward, Rng& rng, OpCheck& check,
                    int n_coords = 4, double eps = 1e-6) {
    for (int c = 0; c < n_coords; ++c) {
        const std::size_t i =
            static_cast<std::size_t>(rng.uniform_int(static_cast<int>(x.data.size())));
        const double saved = x.data[i];
        x.data[i] = saved + eps;
        const double up = forward();
        x.data[i] = saved - eps;
        const double dn = forward();
        x.data[i] = saved;
        check.compare(grad.data[i], (up - dn) / (2.0 * eps));
    }
}

void check_conv_ops(Rng& rng, OpCheck& check, int stride, int pad) {
    Tensor x = random_tensor({2, 7, 7}, rng);
    Tensor w = random_tensor({3, 2, 3, 3}, rng, -0.5, 0.5);
    Tensor b = random_tensor({3}, rng, -0.2, 0.2);
    const Tensor out = conv2d(x, w, b, stride, pad);
    const Tensor cot = random_tensor(out.shape, rng);

    Tensor dx(x.shape), dw(w.shape), db(b.shape);
    conv2d_backward(x, w, cot, stride, pad, &dx, &dw, &db);

    const auto loss = [&] { return weighted_sum(conv2d(x, w, b, stride, pad), cot); };
    fd_input_check(x, dx, loss, rng, check);
    fd_input_check(w, dw, loss, rng, check);
    fd_input_check(b, db, loss, rng, check, 2);
}

void check_activation_ops(Rng& rng, OpCheck& check) {
    Tensor x = random_tensor_off_zero({2, 4, 5}, rng);
    const Tensor cot = random_tensor(x.shape, rng);

    const Tensor g_relu = relu_backward(x, cot);
    fd_input_check(x, g_relu, [&] { return weighted_sum(relu(x), cot); }, rng, check);

    const Tensor g_sig = sigmoid_backward(sigmoid(x), cot);
    fd_input_check(x, g_sig, [&] { return weighted_sum(sigmoid(x), cot); }, rng, check);

    const Tensor g_tanh = tanh_backward(tanh_act(x), cot);
    fd_input_check(x, g_tanh, [&] { return weighted_sum(tanh_act(x), cot); }, rng, check);
}

void check_resize_ops(Rng& rng, OpCheck& check) {
    for (const auto [oh, ow] : {std::pair{9, 11}, std::pair{3, 4}}) {
        Tensor x = random_tensor({2, 5, 6}, rng);
        Tensor out = resize_bilinear(x, oh, ow);
        const Tensor cot = random_tensor(out.shape, rng);
        const Tensor dx = resize_bilinear_backward(cot, 5, 6);
        fd_input_check(x, dx, [&] { return weighted_sum(resize_bilinear(x, oh, ow), cot); },
                       rng, check);
    }

    Tensor x = random_tensor({2, 6, 8}, rng);
    const Tensor pooled = avgpool2x(x);
    const Tensor cot = random_tensor(pooled.shape, rng);
    const Tensor dx = avgpool2x_backward(cot);
    fd_input_check(x, dx, [&] { return weighted_sum(avgpool2x(x), cot); }, rng, check);
}

void check_loss_ops(Rng& rng, OpCheck& check) {
    Tensor pred = random_tensor({3, 4, 5}, rng);
    const Tensor target = random_tensor({3, 4, 5}, rng, 0.0, 1.0);
    for (const WeightMode mode : {WeightMode::kInsideSquare, WeightMode::kOutsideSquare}) {
        const Tensor grad = loss_weighted_map_grad(pred, target, 1.0, 0.5, mode);
        fd_input_check(pred, grad,
                       [&] { return loss_weighted_map(pred, target, 1.0, 0.5, mode); }, rng,
                       check);
    }

    Tensor synth = random_tensor({3, 4, 4}, rng, 0.0, 1.0);
    const Tensor truth = random_tensor({3, 4, 4}, rng, 0.0, 1.0);
    const Tensor bg = random_tensor({3, 4, 4}, rng, 0.0, 1.0);
    std::vector<std::uint8_t> mask(16, 0);
    for (auto& m : mask) m = rng.uniform() < 0.5 ? 255 : 0;

    const Tensor gf = loss_foreground_grad(synth, truth, mask);
    fd_input_check(synth, gf, [&] { return loss_foreground(synth, truth, mask); }, rng, check);
    const Tensor gb = loss_background_grad(synth, bg, mask);
    fd_input_check(synth, gb, [&] { return loss_background(synth, bg, mask); }, rng, check);
}

MapperConfig tiny_mapper_cfg() {
    MapperConfig cfg;
    cfg.c_in = 2;
    cfg.h_in = 8;
    cfg.w_in = 8;
    cfg.enc1_channels = 4;
    cfg.enc2_channels = 6;
    cfg.enc3_channels = 8;
    cfg.n_residual_blocks = 1;
    cfg.head_channels = 4;
    cfg.h_map = 8;
    cfg.w_map = 16;
    return cfg;
}

GeneratorConfig tiny_generator_cfg() {
    GeneratorConfig cfg;
    cfg.h_frame = 8;
    cfg.w_frame = 8;
    cfg.enc1_channels = 4;
    cfg.enc2_channels = 6;
    cfg.enc3_channels = 8;
    cfg.n_residual_blocks = 1;
    return cfg;
}

double dot_with_grads(const ParamSet& params, const ParamSet& direction) {
    double acc = 0.0;
    auto it = direction.params.begin();
    for (const auto& [name, p] : params.params) {
        for (std::size_t i = 0; i < p.grad.size(); ++i) acc += p.grad[i] * it->second.data[i];
        ++it;
    }
    return acc;
}

void nudge(ParamSet& params, const ParamSet& direction, double eps) {
    auto it = direction.params.begin();
    for (auto& [name, p] : params.params) {
        for (std::size_t i = 0; i < p.data.size(); ++i) p.data[i] += eps * it->second.data[i];
        ++it;
    }
}

ParamSet random_direction(const ParamSet& like, Rng& rng) {
    ParamSet d;
    for (const auto& [name, p] : like.params) {
        Tensor t(p.shape);
        for (double& v : t.data) v = rng.normal();
        d.params.emplace(name, std::move(t));
    }
    return d;
}

double check_mapper_e2e(std::uint64_t seed) {
    const MapperConfig cfg = tiny_mapper_cfg();
    const LossWeights lw;
    const WeightMode mode =
        seed % 2 == 0 ? WeightMode::kInsideSquare : WeightMode::kOutsideSquare;
    Rng rng(900 + seed);
    ParamSet params = init_mapper_params(cfg, 300 + seed);
    params.ensure_grads();
    const Tensor x = random_tensor({cfg.c_in, cfg.h_in, cfg.w_in}, rng);
    const Tensor tj = random_tensor({kNumKeypoints, cfg.h_map, cfg.w_map}, rng, 0.0, 1.0);
    const Tensor tp = random_tensor({kNumPafChannels, cfg.h_map, cfg.w_map}, rng);

    params.zero_grads();
    mapper_loss_and_grads(x, tj, tp, params, cfg, lw, mode, params);
    const ParamSet dir = random_direction(params, rng);
    const double analytic = dot_with_grads(params, dir);

    const auto loss_only = [&] {
        const MapperOutput<double> out = mapper_forward(x, params, cfg);
        return loss_mapper_total(
            loss_weighted_map(out.jhm, tj, lw.alpha_jhm, lw.beta_jhm, mode),
            loss_weighted_map(out.paf, tp, lw.alpha_paf, lw.beta_paf, mode), lw);
    };
    const double eps = 1e-6;
    nudge(params, dir, eps);
    const double up = loss_only();
    nudge(params, dir, -2.0 * eps);
    const double dn = loss_only();
    nudge(params, dir, eps);
    return rel_err(analytic, (up - dn) / (2.0 * eps));
}

double check_generator_e2e(std::uint64_t seed) {
    const GeneratorConfig cfg = tiny_generator_cfg();
    const LossWeights lw;
    Rng rng(1700 + seed);
    ParamSet params = init_generator_params(cfg, 500 + seed);
    params.ensure_grads();
    const Tensor jhm = random_tensor({kNumKeypoints, 4, 4}, rng, 0.0, 1.0);
    const Tensor paf = random_tensor({kNumPafChannels, 4, 4}, rng);
    const Tensor identity = random_tensor({3, cfg.h_frame, cfg.w_frame}, rng, 0.0, 1.0);
    const Tensor frame = random_tensor({3, cfg.h_frame, cfg.w_frame}, rng, 0.0, 1.0);
    const Tensor bg = random_tensor({3, cfg.h_frame, cfg.w_frame}, rng, 0.0, 1.0);
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(cfg.h_frame) * cfg.w_frame, 0);
    for (auto& m : mask) m = rng.uniform() < 0.4 ? 255 : 0;

    params.zero_grads();
    generator_loss_and_grads(jhm, paf, {&identity}, frame, mask, bg, params, cfg, lw, params);
    const ParamSet dir = random_direction(params, rng);
    const double analytic = dot_with_grads(params, dir);

    const auto loss_only = [&] {
        const Tensor synth =
            generator_forward<double>(jhm, paf, std::vector<const Tensor*>{&identity}, params,
                                      cfg);
        return loss_generator_total(loss_foreground(synth, frame, mask),
                                    loss_background(synth, bg, mask), lw);
    };
    const double eps = 1e-6;
    nudge(params, dir, eps);
    const double up = loss_only();
    nudge(params, dir, -2.0 * eps);
    const double dn = loss_only();
    nudge(params, dir, eps);
    return rel_err(analytic, (up - dn) / (2.0 * eps));
}

CriterionResult criterion1() {
    const auto start = Clock::now();
    constexpr int kSeeds = 20;
    constexpr double kOpTol = 1e-4;
    constexpr double kEndToEndTol = 1e-3;
    constexpr double kBudgetSeconds = 120.0;

    OpCheck ops;
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
        Rng rng(40 + seed);
        check_conv_ops(rng, ops, 1, 1);
        check_conv_ops(rng, ops, 2, 0);
        check_activation_ops(rng, ops);
        check_resize_ops(rng, ops);
        check_loss_ops(rng, ops);
    }

    double e2e = 0.0;
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
        e2e = std::max(e2e, check_mapper_e2e(seed));
        e2e = std::max(e2e, check_generator_e2e(seed));
    }

    const double elapsed = seconds_since(start);
    const bool pass =
        ops.max_rel < kOpTol && e2e < kEndToEndTol && elapsed < kBudgetSeconds;
    return {pass, fmt("gradient checks: op max rel err %.2e (tol 1e-4), end-to-end max "
                      "%.2e (tol 1e-3), %d seeds, %.1f s (budget 120 s)",
                      ops.max_rel, e2e, kSeeds, elapsed)};
}

// ------------------------------------------------------ 2: loss fidelity --

double naive_weighted_map(const Tensor& pred, const Tensor& target, double alpha, double beta,
                          WeightMode mode) {
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const double w = alpha * std::abs(target.data[i]) + beta;
        const double d = pred.data[i] - target.data[i];
        acc += mode == WeightMode::kInsideSquare ? (w * d) * (w * d) : w * d * d;
    }
    return acc;
}

double naive_foreground(const Tensor& synth, const Tensor& truth,
                        const std::vector<std::uint8_t>& mask) {
    const int c = synth.dim(0), h = synth.dim(1), w = synth.dim(2);
    double acc = 0.0;
    for (int ch = 0; ch < c; ++ch) {
        for (int i = 0; i < h * w; ++i) {
            if (mask[static_cast<std::size_t>(i)] == 0) continue;
            const double d = synth.data[static_cast<std::size_t>(ch) * h * w + i] -
                             truth.data[static_cast<std::size_t>(ch) * h * w + i];
            acc += d * d;
        }
    }
    return acc;
}

double naive_background(const Tensor& synth, const Tensor& bg,
                        const std::vector<std::uint8_t>& mask) {
    const int c = synth.dim(0), h = synth.dim(1), w = synth.dim(2);
    double acc = 0.0;
    for (int ch = 0; ch < c; ++ch) {
        for (int i = 0; i < h * w; ++i) {
            if (mask[static_cast<std::size_t>(i)] != 0) continue;
            const double d = synth.data[static_cast<std::size_t>(ch) * h * w + i] -
                             bg.data[static_cast<std::size_t>(ch) * h * w + i];
            acc += d * d;
        }
    }
    return acc;
}

CriterionResult criterion2() {
    constexpr double kTol = 1e-12;
    double worst = 0.0;
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        Rng rng(60 + trial);
        const Tensor pred = random_tensor({3, 4, 5}, rng);
        const Tensor target = random_tensor({3, 4, 5}, rng, 0.0, 1.0);
        for (const WeightMode mode :
             {WeightMode::kInsideSquare, WeightMode::kOutsideSquare}) {
            const double got = loss_weighted_map(pred, target, 1.3, 0.4, mode);
            const double want = naive_weighted_map(pred, target, 1.3, 0.4, mode);
            worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want)));
        }

        const Tensor synth = random_tensor({3, 4, 4}, rng, 0.0, 1.0);
        const Tensor truth = random_tensor({3, 4, 4}, rng, 0.0, 1.0);
        const Tensor bg = random_tensor({3, 4, 4}, rng, 0.0, 1.0);
        std::vector<std::uint8_t> mask(16, 0);
        for (auto& m : mask) m = rng.uniform() < 0.5 ? 255 : 0;
        const double fg = loss_foreground(synth, truth, mask);
        const double bk = loss_background(synth, bg, mask);
        worst = std::max(worst, std::abs(fg - naive_foreground(synth, truth, mask)));
        worst = std::max(worst, std::abs(bk - naive_background(synth, bg, mask)));

        LossWeights lw;
        lw.lambda_jhm = 0.7;
        lw.lambda_paf = 1.9;
        const double total = loss_mapper_total(fg, bk, lw);
        worst = std::max(worst, std::abs(total - (0.7 * fg + 1.9 * bk)));
    }

    // Hand-forced reference values must reproduce exactly.
    Tensor p1({1, 1, 1}), t1({1, 1, 1});
    t1.data[0] = 1.0;
    const double forced_jhm = loss_jhm(p1, t1, 1.0, 1.0);
    const double forced_paf = loss_paf(p1, t1, 1.0, 0.5);

    // One foreground pixel with channel errors (0.5, 0.5, 1.0) and one
    // background pixel with (0.5, 0.5, 0): total = 1*1.5 + 0.5*0.5 = 1.75.
    Tensor synth({3, 1, 2}), truth({3, 1, 2}), bg({3, 1, 2});
    synth.data = {0.5, 0.5, 0.5, 0.5, 1.0, 0.0};
    truth.data = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    bg.data = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    const std::vector<std::uint8_t> mask = {255, 0};
    LossWeights lw;
    lw.lambda_fore = 1.0;
    lw.lambda_back = 0.5;
    const double forced_gen = loss_generator_total(loss_foreground(synth, truth, mask),
                                                   loss_background(synth, bg, mask), lw);

    const bool pass =
        worst < kTol && forced_jhm == 4.0 && forced_paf == 2.25 && forced_gen == 1.75;
    return {pass, fmt("loss oracles: worst deviation %.2e (tol 1e-12), forced values "
                      "jhm=%g paf=%g generator=%g (want 4 / 2.25 / 1.75)",
                      worst, forced_jhm, forced_paf, forced_gen)};
}

// --------------------------------------------- 3: pose map round trip --

constexpr int kMapH3 = 48;
constexpr int kMapW3 = 96;

Skeleton random_skeleton(Rng& rng, double x_lo, double x_hi, double min_diag) {
    Skeleton s;
    for (int attempt = 0; attempt < 2000; ++attempt) {
        for (auto& j : s.joints) {
            j.x = rng.uniform(x_lo, x_hi);
            j.y = rng.uniform(4.0, kMapH3 - 5.0);
            j.visible = true;
        }
        bool separated = true;
        for (int a = 0; a < kNumKeypoints && separated; ++a) {
            for (int b = a + 1; b < kNumKeypoints; ++b) {
                const double d = std::hypot(s.joints[static_cast<std::size_t>(a)].x -
                                                s.joints[static_cast<std::size_t>(b)].x,
                                            s.joints[static_cast<std::size_t>(a)].y -
                                                s.joints[static_cast<std::size_t>(b)].y);
                if (d < 4.0) {
                    separated = false;
                    break;
                }
            }
        }
        if (!separated) continue;
        double min_x = 1e9, max_x = -1e9, min_y = 1e9, max_y = -1e9;
        for (const auto& j : s.joints) {
            min_x = std::min(min_x, j.x);
            max_x = std::max(max_x, j.x);
            min_y = std::min(min_y, j.y);
            max_y = std::max(max_y, j.y);
        }
        if (std::hypot(max_x - min_x, max_y - min_y) >= min_diag) return s;
    }
    return s;
}

CriterionResult criterion3() {
    const LimbTopology& topo = LimbTopology::canonical();
    const AssemblyParams ap;

    int within_1px = 0;
    std::vector<FramePoses> frames;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(3000 + seed);
        const Skeleton gt = random_skeleton(rng, 4.0, kMapW3 - 5.0, 40.0);
        const Jhm jhm = render_jhm(std::vector<Skeleton>{gt}, 2.0, kMapH3, kMapW3);
        const Paf paf = render_paf(std::vector<Skeleton>{gt}, topo, 2.0, kMapH3, kMapW3);
        const auto rec = assemble_skeletons(jhm, paf, topo, ap);

        bool ok = rec.size() == 1;
        if (ok) {
            for (int k = 0; k < kNumKeypoints; ++k) {
                const auto& a = gt.joints[static_cast<std::size_t>(k)];
                const auto& b = rec[0].joints[static_cast<std::size_t>(k)];
                if (!b.visible || std::hypot(a.x - b.x, a.y - b.y) > 1.0) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) ++within_1px;
        FramePoses fp;
        fp.gt = {gt};
        fp.pred = rec;
        frames.push_back(std::move(fp));
    }
    const double pck_005 = pck(frames, 0.05);

    int exact_two = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(7000 + seed);
        const Skeleton left = random_skeleton(rng, 4.0, 42.0, 30.0);
        const Skeleton right = random_skeleton(rng, 54.0, kMapW3 - 5.0, 30.0);
        const std::vector<Skeleton> gt = {left, right};
        const Jhm jhm = render_jhm(gt, 2.0, kMapH3, kMapW3);
        const Paf paf = render_paf(gt, topo, 2.0, kMapH3, kMapW3);
        if (assemble_skeletons(jhm, paf, topo, ap).size() == 2) ++exact_two;
    }

    const bool pass = within_1px == 200 && pck_005 == 1.0 && exact_two >= 196;
    return {pass, fmt("pose round trip: %d/200 single-person within 1 px, PCK@0.05 = %g "
                      "(want 1), two-person exact recovery %d/200 (want >= 196)",
                      within_1px, pck_005, exact_two)};
}

// ------------------------------------------------- 4: metric oracles --

// Independent greedy matcher: repeatedly take the globally closest
// (gt, pred) pair, ties broken by lower gt then pred index.
std::vector<std::pair<int, int>> oracle_match(const std::vector<Skeleton>& gt,
                                              const std::vector<Skeleton>& pred) {
    std::vector<std::pair<int, int>> result;
    std::vector<bool> g_used(gt.size(), false), p_used(pred.size(), false);
    while (true) {
        double best = std::numeric_limits<double>::infinity();
        int bg = -1, bp = -1;
        for (int g = 0; g < static_cast<int>(gt.size()); ++g) {
            if (g_used[static_cast<std::size_t>(g)]) continue;
            for (int p = 0; p < static_cast<int>(pred.size()); ++p) {
                if (p_used[static_cast<std::size_t>(p)]) continue;
                const double d = mean_keypoint_distance(gt[static_cast<std::size_t>(g)],
                                                        pred[static_cast<std::size_t>(p)]);
                if (d < best) {
                    best = d;
                    bg = g;
                    bp = p;
                }
            }
        }
        if (bg < 0 || !std::isfinite(best)) break;
        g_used[static_cast<std::size_t>(bg)] = true;
        p_used[static_cast<std::size_t>(bp)] = true;
        result.emplace_back(bg, bp);
    }
    return result;
}

// Exhaustive per-keypoint hit counting against the matched pairs.
std::pair<std::int64_t, std::int64_t> oracle_pck_counts(
    const std::vector<FramePoses>& frames, double alpha) {
    std::int64_t hits = 0, total = 0;
    for (const FramePoses& frame : frames) {
        const auto pairs = oracle_match(frame.gt, frame.pred);
        std::vector<bool> matched(frame.gt.size(), false);
        for (const auto& [g, p] : pairs) {
            matched[static_cast<std::size_t>(g)] = true;
            const Skeleton& gs = frame.gt[static_cast<std::size_t>(g)];
            const Skeleton& ps = frame.pred[static_cast<std::size_t>(p)];
            double min_x = 1e18, max_x = -1e18, min_y = 1e18, max_y = -1e18;
            for (const auto& j : gs.joints) {
                if (!j.visible) continue;
                min_x = std::min(min_x, j.x);
                max_x = std::max(max_x, j.x);
                min_y = std::min(min_y, j.y);
                max_y = std::max(max_y, j.y);
            }
            const double diag = std::hypot(max_x - min_x, max_y - min_y);
            for (int k = 0; k < kNumKeypoints; ++k) {
                const auto& gj = gs.joints[static_cast<std::size_t>(k)];
                if (!gj.visible) continue;
                ++total;
                const auto& pj = ps.joints[static_cast<std::size_t>(k)];
                if (std::hypot(gj.x - pj.x, gj.y - pj.y) <= alpha * diag) ++hits;
            }
        }
        for (std::size_t g = 0; g < frame.gt.size(); ++g) {
            if (matched[g]) continue;
            for (const auto& j : frame.gt[g].joints) {
                if (j.visible) ++total;
            }
        }
    }
    return {hits, total};
}

Skeleton random_eval_skeleton(Rng& rng) {
    Skeleton s;
    for (auto& j : s.joints) {
        j.x = rng.uniform(0.0, 40.0);
        j.y = rng.uniform(0.0, 30.0);
        j.visible = rng.uniform() < 0.8;
    }
    if (s.visible_count() == 0) s.joints[0].visible = true;
    return s;
}

CriterionResult criterion4() {
    bool pck_exact = true;
    for (std::uint64_t trial = 0; trial < 50 && pck_exact; ++trial) {
        Rng rng(4000 + trial);
        std::vector<FramePoses> frames;
        for (int f = 0; f < 3; ++f) {
            FramePoses fp;
            const int n_gt = 1 + rng.uniform_int(3);
            const int n_pred = rng.uniform_int(4);
            for (int i = 0; i < n_gt; ++i) fp.gt.push_back(random_eval_skeleton(rng));
            for (int i = 0; i < n_pred; ++i) fp.pred.push_back(random_eval_skeleton(rng));
            frames.push_back(std::move(fp));
        }
        for (const double alpha : {0.1, 0.25, 0.5}) {
            const auto [hits, total] = oracle_pck_counts(frames, alpha);
            const std::vector<double> alphas = {alpha};
            const auto curve = pck_curve(frames, alphas);
            if (curve[0].hits != hits || curve[0].total != total ||
                curve[0].value != static_cast<double>(hits) / static_cast<double>(total)) {
                pck_exact = false;
            }
        }
    }

    bool iou_exact = true;
    for (std::uint64_t trial = 0; trial < 40 && iou_exact; ++trial) {
        Rng rng(4400 + trial);
        std::vector<std::uint8_t> a(80), b(80);
        for (std::size_t i = 0; i < 80; ++i) {
            a[i] = rng.uniform() < 0.4 ? 255 : 0;
            b[i] = rng.uniform() < 0.4 ? 255 : 0;
        }
        std::int64_t inter = 0, uni = 0;
        for (std::size_t i = 0; i < 80; ++i) {
            if (a[i] != 0 && b[i] != 0) ++inter;
            if (a[i] != 0 || b[i] != 0) ++uni;
        }
        const double want = uni == 0 ? 1.0
                                     : static_cast<double>(inter) / static_cast<double>(uni);
        if (mask_iou(a, b) != want) iou_exact = false;
    }

    // Two 1x2 rectangles overlapping in one column of a 1x3 grid.
    const std::vector<std::uint8_t> ra = {255, 255, 0};
    const std::vector<std::uint8_t> rb = {0, 255, 255};
    const double third = mask_iou(ra, rb);

    bool curve_exact = true;
    {
        Rng rng(4900);
        std::vector<double> ious;
        for (int i = 0; i < 60; ++i) ious.push_back(rng.uniform(0.0, 1.0));
        ious.push_back(0.5);  // exact boundary value
        ious.push_back(0.3);
        const std::vector<double> alphas = {0.3, 0.5, 0.7};
        for (const bool strict : {false, true}) {
            const auto curve = iou_curve(ious, alphas, strict);
            for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
                std::int64_t hits = 0;
                for (const double v : ious) {
                    if (strict ? v > alphas[ai] : v >= alphas[ai]) ++hits;
                }
                if (curve[ai].value !=
                    static_cast<double>(hits) / static_cast<double>(ious.size())) {
                    curve_exact = false;
                }
            }
        }
    }

    const bool pass = pck_exact && iou_exact && third == 1.0 / 3.0 && curve_exact;
    return {pass, fmt("metric oracles: PCK counts %s, IoU %s, 1/3-rectangle = %.17g "
                      "(want %.17g), threshold curves %s",
                      pck_exact ? "exact" : "MISMATCH", iou_exact ? "exact" : "MISMATCH",
                      third, 1.0 / 3.0, curve_exact ? "exact" : "MISMATCH")};
}

// --------------------------------------- 5: preprocessing exactness --

CsiSequence scalar_sequence(const std::vector<double>& values, std::int64_t t0,
                            std::int64_t step) {
    CsiSequence seq;
    seq.header = {100.0, 1, 1, 1};
    for (std::size_t i = 0; i < values.size(); ++i) {
        CsiMeasurement m;
        m.timestamp_us = t0 + static_cast<std::int64_t>(i) * step;
        m.n_tx = m.n_rx = m.n_c = 1;
        m.values = {Complex(values[i], 0.0)};
        seq.records.push_back(std::move(m));
    }
    return seq;
}

std::vector<bool> oracle_hampel(const std::vector<double>& series, int window_len,
                                double n_mads) {
    const auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    const int n = static_cast<int>(series.size());
    const int half = window_len / 2;
    std::vector<bool> flags(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(n - 1, i + half);
        std::vector<double> window(series.begin() + lo, series.begin() + hi + 1);
        const double med = median(window);
        std::vector<double> dev;
        for (const double v : window) dev.push_back(std::abs(v - med));
        const double mad = median(dev);
        if (std::abs(series[static_cast<std::size_t>(i)] - med) > n_mads * 1.4826 * mad) {
            flags[static_cast<std::size_t>(i)] = true;
        }
    }
    return flags;
}

CriterionResult criterion5() {
    // Analytic midpoint: samples 2 and 6 bracketing a grid point dead centre.
    const auto mid = resample_uniform(scalar_sequence({2.0, 6.0}, 0, 10000), 200.0);
    const bool midpoint_ok = mid.records.size() == 3 && mid.records[1].timestamp_us == 5000 &&
                             mid.records[1].values[0] == Complex(4.0, 0.0);

    bool identity_ok = true;
    {
        Rng rng(51);
        std::vector<double> vals(50);
        for (auto& v : vals) v = 1.0 + rng.uniform(0.0, 1.0);
        const auto seq = scalar_sequence(vals, 250000, 10000);
        const auto out = resample_uniform(seq, 100.0);
        identity_ok = out.records.size() == seq.records.size();
        for (std::size_t i = 0; identity_ok && i < out.records.size(); ++i) {
            if (out.records[i].timestamp_us != seq.records[i].timestamp_us ||
                std::abs(out.records[i].values[0].real() - vals[i]) > 1e-12) {
                identity_ok = false;
            }
        }
    }

    bool csil_ok = true;
    {
        Rng rng(52);
        CsiSequence seq;
        seq.header = {100.0, 2, 2, 3};
        for (int i = 0; i < 20; ++i) {
            CsiMeasurement m;
            m.timestamp_us = 1000 * i + rng.uniform_int(500);
            m.n_tx = 2;
            m.n_rx = 2;
            m.n_c = 3;
            for (int v = 0; v < 12; ++v) {
                m.values.emplace_back(static_cast<float>(rng.uniform(-2.0, 2.0)),
                                      static_cast<float>(rng.uniform(-2.0, 2.0)));
            }
            seq.records.push_back(std::move(m));
        }
        const auto bytes = write_csil(seq);
        const CsiSequence parsed = parse_csil(bytes);
        csil_ok = parsed == seq && write_csil(parsed) == bytes;
    }

    bool hampel_ok = true;
    for (std::uint64_t trial = 0; trial < 30 && hampel_ok; ++trial) {
        Rng rng(5300 + trial);
        std::vector<double> series(60);
        for (auto& v : series) v = 2.0 + 0.1 * rng.normal();
        for (int s = 0; s < 4; ++s) {
            series[static_cast<std::size_t>(rng.uniform_int(60))] += rng.uniform(3.0, 20.0);
        }
        if (hampel_flags(series, 11, 3.0) != oracle_hampel(series, 11, 3.0)) {
            hampel_ok = false;
        }
    }

    const bool pass = midpoint_ok && identity_ok && csil_ok && hampel_ok;
    return {pass, fmt("preprocessing: midpoint %s, uniform identity %s, CSIL round trip %s, "
                      "outlier flags %s",
                      midpoint_ok ? "exact" : "MISMATCH", identity_ok ? "exact" : "MISMATCH",
                      csil_ok ? "bit-exact" : "MISMATCH", hampel_ok ? "exact" : "MISMATCH")};
}

// ----------------------------------------------- 6: channel simulator --

constexpr double kPi6 = 3.14159265358979323846;
constexpr double kLightSpeed = 299792458.0;

CriterionResult criterion6() {
    SceneConfig scene;
    scene.n_persons = 1;
    scene.duration_s = 4.0;
    scene.seed = 6;

    // Single scatterer against the closed-form path formula.
    double worst = 0.0;
    {
        const PersonPose3 pose = person_pose(scene, 0, 0.37);
        const auto scatterers = body_scatterers(pose);
        ChannelModel ch;  // no static paths
        for (auto& g : ch.scatterer_gains) g = Complex(0.0, 0.0);
        const int slot = 4;
        const Complex gain(0.6, -0.3);
        ch.scatterer_gains[slot] = gain;
        const auto txs = scene.tx_antennas();
        const auto rxs = scene.rx_antennas();
        for (const int k : {0, 15, 29}) {
            const double f = scene.subcarrier_hz(k);
            for (int t = 0; t < 3; ++t) {
                for (int r = 0; r < 3; ++r) {
                    const Complex got = channel_response(txs[static_cast<std::size_t>(t)],
                                                         rxs[static_cast<std::size_t>(r)], f,
                                                         ch, {pose});
                    const double d = distance(txs[static_cast<std::size_t>(t)],
                                              scatterers[slot]) +
                                     distance(scatterers[slot],
                                              rxs[static_cast<std::size_t>(r)]);
                    const Complex want =
                        gain * (1.0 / d) * std::polar(1.0, -2.0 * kPi6 * f * d / kLightSpeed);
                    worst = std::max(worst, std::abs(got - want) / std::abs(want));
                }
            }
        }
    }

    // Empty scene with zero noise never changes over time.
    bool constant_ok = true;
    {
        SceneConfig empty = scene;
        empty.n_persons = 0;
        empty.duration_s = 2.0;
        ChannelModel ch = ChannelModel::default_office();
        ch.noise_std = 0.0;
        const CsiSequence seq = simulate_csi(empty, ch, gen_trajectories(empty));
        for (const CsiMeasurement& m : seq.records) {
            if (m.values != seq.records[0].values) {
                constant_ok = false;
                break;
            }
        }
    }

    // A walking person dominates the noise floor.
    const auto amplitude_variance = [](const CsiSequence& seq) {
        double total = 0.0;
        const std::size_t per = seq.records[0].values.size();
        for (std::size_t v = 0; v < per; ++v) {
            double sum = 0.0, sq = 0.0;
            for (const CsiMeasurement& m : seq.records) {
                const double a = std::abs(m.values[v]);
                sum += a;
                sq += a * a;
            }
            const double n = static_cast<double>(seq.records.size());
            total += sq / n - (sum / n) * (sum / n);
        }
        return total / static_cast<double>(per);
    };
    SceneConfig empty = scene;
    empty.n_persons = 0;
    const ChannelModel office = ChannelModel::default_office();
    const double var_empty =
        amplitude_variance(simulate_csi(empty, office, gen_trajectories(empty)));
    const double var_person =
        amplitude_variance(simulate_csi(scene, office, gen_trajectories(scene)));

    const bool pass = worst < 1e-12 && constant_ok && var_person >= 10.0 * var_empty;
    return {pass, fmt("channel: single-scatterer rel err %.2e (tol 1e-12), empty scene %s, "
                      "variance ratio %.1fx (want >= 10x)",
                      worst, constant_ok ? "time-constant" : "NOT CONSTANT",
                      var_empty > 0.0 ? var_person / var_empty : 0.0)};
}

// ------------------------------------- 7: mapper learns (substantive) --

struct MapTargets {
    Tensor jhm_mean{std::vector<int>{kNumKeypoints, 32, 64}};
    Tensor paf_mean{std::vector<int>{kNumPafChannels, 32, 64}};
};

CriterionResult criterion7() {
    const auto start = Clock::now();
    constexpr double kBudgetSeconds = 1800.0;
    const fs::path dir = fresh_dir("learn");

    SceneConfig scene;
    scene.seed = 42;
    scene.n_persons = 1;
    scene.duration_s = 270.0;
    scene.frame_height = 96;
    scene.frame_width = 192;
    ChannelModel channel = ChannelModel::default_office();
    emit_dataset(scene, channel, dir);

    const Dataset ds = load_dataset(dir);
    PreprocessParams pp;
    pp.h_in = 16;
    pp.w_in = 32;
    const PreprocessedSet set = preprocess_dataset(ds, pp);
    const std::size_t n_pairs = set.frames.size();

    const auto [n_train, n_test] = split_sizes(n_pairs, 0.75);
    const std::vector<MapperSample> all = to_mapper_samples(set, 32, 64);
    const std::vector<MapperSample> train_samples(all.begin(),
                                                  all.begin() + static_cast<long>(n_train));

    MapperTrainConfig cfg;
    cfg.arch.c_in = 9;
    cfg.arch.h_in = 16;
    cfg.arch.w_in = 32;
    cfg.arch.enc1_channels = 16;
    cfg.arch.enc2_channels = 32;
    cfg.arch.enc3_channels = 64;
    cfg.arch.n_residual_blocks = 3;
    cfg.arch.head_channels = 24;
    cfg.arch.h_map = 32;
    cfg.arch.w_map = 64;
    cfg.epochs = 20;
    cfg.batch_size = 8;
    cfg.use_float32 = true;
    cfg.seed = 7;
    cfg.schedule = {1e-3, 5, 0.1};
    const TrainResult result = train_mapper(train_samples, cfg);

    const Tensor& mean = result.checkpoint.extra.at("input_mean");
    const Tensor& stddev = result.checkpoint.extra.at("input_std");
    const LimbTopology& topo = LimbTopology::canonical();
    const AssemblyParams ap;

    std::vector<FramePoses> eval_frames;
    ConvWorkspace<double> ws;
    for (std::size_t i = n_train; i < n_pairs; ++i) {
        const Tensor input = normalize_input(all[i].input, mean, stddev);
        const MapperOutput<double> out =
            mapper_forward<double>(input, result.checkpoint.params, cfg.arch, nullptr, &ws);
        const auto rec = assemble_skeletons(to_jhm(out.jhm), to_paf(out.paf), topo, ap);
        FramePoses fp;
        fp.gt = set.frames[i].persons;
        fp.pred = skeletons_to_grid(rec, 32, 64, set.frame_height, set.frame_width);
        eval_frames.push_back(std::move(fp));
    }
    const double pck_02 = pck(eval_frames, 0.2);

    // Chance baseline: decode the element-wise mean of the training targets
    // and predict that fixed skeleton set for every held-out frame.
    MapTargets mean_maps;
    for (const MapperSample& s : train_samples) {
        const Jhm jhm = render_jhm(s.persons, cfg.jhm_sigma, 32, 64);
        const Paf paf = render_paf(s.persons, topo, cfg.paf_width, 32, 64);
        for (std::size_t i = 0; i < jhm.data.size(); ++i) {
            mean_maps.jhm_mean.data[i] += jhm.data[i];
        }
        for (std::size_t i = 0; i < paf.data.size(); ++i) {
            mean_maps.paf_mean.data[i] += paf.data[i];
        }
    }
    for (double& v : mean_maps.jhm_mean.data) v /= static_cast<double>(n_train);
    for (double& v : mean_maps.paf_mean.data) v /= static_cast<double>(n_train);
    const auto chance_pred = skeletons_to_grid(
        assemble_skeletons(to_jhm(mean_maps.jhm_mean), to_paf(mean_maps.paf_mean), topo, ap),
        32, 64, set.frame_height, set.frame_width);
    std::vector<FramePoses> chance_frames;
    for (std::size_t i = n_train; i < n_pairs; ++i) {
        FramePoses fp;
        fp.gt = set.frames[i].persons;
        fp.pred = chance_pred;
        chance_frames.push_back(std::move(fp));
    }
    const double chance = pck(chance_frames, 0.2);

    const double elapsed = seconds_since(start);
    const bool pass = n_pairs >= 2000 && pck_02 >= 0.5 && chance < 0.15 &&
                      elapsed < kBudgetSeconds;
    return {pass, fmt("mapper learning: %zu pairs (want >= 2000), held-out PCK@0.2 = %.3f "
                      "(want >= 0.5), mean-map baseline = %.3f (want < 0.15), final loss "
                      "%.1f, %.0f s (budget 1800 s)",
                      n_pairs, pck_02, chance, result.epochs.back().loss_total, elapsed)};
}

// --------------------------------------- 8: generator beats baseline --

CriterionResult criterion8() {
    const auto start = Clock::now();
    const fs::path dir = fresh_dir("generate");

    SceneConfig scene;
    scene.seed = 43;
    scene.n_persons = 1;
    scene.duration_s = 80.0;
    scene.frame_height = 32;
    scene.frame_width = 64;
    emit_dataset(scene, ChannelModel::default_office(), dir);
    const Dataset ds = load_dataset(dir);

    std::vector<std::int64_t> ids;
    for (const FrameAnnotation& f : ds.annotations) ids.push_back(f.frame_id);
    const auto [n_train, n_eval] = split_sizes(ids.size(), 0.75);
    const std::vector<std::int64_t> train_ids(ids.begin(),
                                              ids.begin() + static_cast<long>(n_train));
    const std::vector<std::int64_t> eval_ids(ids.begin() + static_cast<long>(n_train),
                                             ids.end());
    const auto train_samples = to_generator_samples(ds, train_ids);
    const auto eval_samples = to_generator_samples(ds, eval_ids);

    const Image identity_img = load_frame(ds, ids.front());
    Tensor identity({3, ds.frame_height, ds.frame_width});
    identity.data = image_to_planar(identity_img);
    const Image bg_img = read_png(dir / "background.png");
    Tensor background({3, ds.frame_height, ds.frame_width});
    background.data = image_to_planar(bg_img);

    GeneratorTrainConfig cfg;
    cfg.arch.h_frame = 32;
    cfg.arch.w_frame = 64;
    cfg.arch.enc1_channels = 8;
    cfg.arch.enc2_channels = 16;
    cfg.arch.enc3_channels = 24;
    cfg.arch.n_residual_blocks = 1;
    cfg.map_h = 16;
    cfg.map_w = 32;
    cfg.epochs = 30;
    cfg.batch_size = 4;
    cfg.use_float32 = true;
    cfg.seed = 8;
    cfg.schedule = {1e-3, 10, 0.1};
    const TrainResult result = train_generator(train_samples, identity, background, cfg);

    // Held-out comparison, teacher-forced with ground-truth maps.
    const LimbTopology& topo = LimbTopology::canonical();
    double fg_model = 0.0, fg_baseline = 0.0;
    std::vector<double> ious;
    ConvWorkspace<double> ws;
    for (const GeneratorSample& s : eval_samples) {
        const auto grid_persons =
            skeletons_to_grid(s.persons, ds.frame_height, ds.frame_width, cfg.map_h, cfg.map_w);
        const Jhm jhm = render_jhm(grid_persons, cfg.jhm_sigma, cfg.map_h, cfg.map_w);
        const Paf paf = render_paf(grid_persons, topo, cfg.paf_width, cfg.map_h, cfg.map_w);
        const Tensor synth = generator_forward<double>(
            from_jhm<double>(jhm), from_paf<double>(paf),
            std::vector<const Tensor*>{&identity}, result.checkpoint.params, cfg.arch,
            nullptr, &ws);
        fg_model += loss_foreground(synth, s.frame, s.mask);
        fg_baseline += loss_foreground(background, s.frame, s.mask);

        const int hw = ds.frame_height * ds.frame_width;
        std::vector<std::uint8_t> pred_mask(static_cast<std::size_t>(hw), 0);
        for (int i = 0; i < hw; ++i) {
            double diff = 0.0;
            for (int c = 0; c < 3; ++c) {
                diff = std::max(diff, std::abs(synth.data[static_cast<std::size_t>(c) * hw + i] -
                                               background.data[static_cast<std::size_t>(c) * hw +
                                                               i]));
            }
            if (diff > 0.1) pred_mask[static_cast<std::size_t>(i)] = 255;
        }
        ious.push_back(mask_iou(pred_mask, s.mask));
    }
    const double miou = mean_iou(ious);
    const double ratio = fg_model / fg_baseline;

    const double elapsed = seconds_since(start);
    const bool pass = ratio < 0.5 && miou >= 0.4;
    return {pass, fmt("generator: held-out foreground loss ratio %.3f (want < 0.5), "
                      "mask mIoU %.3f (want >= 0.4), %zu train / %zu eval pairs, %.0f s",
                      ratio, miou, train_samples.size(), eval_samples.size(), elapsed)};
}

// ----------------------------------------------------- 9: determinism --

CriterionResult criterion9() {
    SceneConfig scene;
    scene.seed = 9;
    scene.n_persons = 1;
    scene.duration_s = 4.0;
    scene.frame_height = 32;
    scene.frame_width = 64;
    const ChannelModel channel = ChannelModel::default_office();

    const fs::path a = fresh_dir("rerun_a");
    const fs::path b = fresh_dir("rerun_b");
    emit_dataset(scene, channel, a);
    emit_dataset(scene, channel, b);
    bool synth_ok = true;
    for (const char* rel : {"csi.csil", "keypoints.jsonl", "meta.txt", "background.png",
                            "frames/000000.png", "masks/000007.png"}) {
        if (slurp(a / rel) != slurp(b / rel)) synth_ok = false;
    }

    PreprocessParams pp;
    pp.h_in = 16;
    pp.w_in = 32;
    const auto cache_a = write_preprocessed(preprocess_dataset(load_dataset(a), pp));
    const auto cache_b = write_preprocessed(preprocess_dataset(load_dataset(b), pp));
    const bool cache_ok = cache_a == cache_b;

    // Identical training reruns, including a different thread count, must
    // produce byte-identical checkpoints.
    std::vector<MapperSample> samples;
    Rng rng(19);
    for (int i = 0; i < 24; ++i) {
        MapperSample s;
        s.input = random_tensor({2, 8, 8}, rng, 0.0, 2.0);
        Skeleton sk;
        for (auto& j : sk.joints) {
            j.x = rng.uniform(1.0, 14.0);
            j.y = rng.uniform(1.0, 6.0);
            j.visible = true;
        }
        s.persons = {sk};
        samples.push_back(std::move(s));
    }
    MapperTrainConfig cfg;
    cfg.arch = tiny_mapper_cfg();
    cfg.epochs = 2;
    cfg.batch_size = 4;
    cfg.use_float32 = true;
    cfg.seed = 21;
    const auto ck1 = serialize_checkpoint(train_mapper(samples, cfg).checkpoint);
    const auto ck2 = serialize_checkpoint(train_mapper(samples, cfg).checkpoint);
    cfg.n_threads = 2;
    const auto ck3 = serialize_checkpoint(train_mapper(samples, cfg).checkpoint);
    const bool train_ok = ck1 == ck2 && ck1 == ck3;

    const bool pass = synth_ok && cache_ok && train_ok;
    return {pass, fmt("determinism: dataset rerun %s, tensor cache rerun %s, training rerun "
                      "(incl. 2 threads) %s",
                      synth_ok ? "byte-identical" : "DIFFERS",
                      cache_ok ? "byte-identical" : "DIFFERS",
                      train_ok ? "byte-identical" : "DIFFERS")};
}

}  // namespace

int main(int argc, char** argv) {
    using CriterionFn = CriterionResult (*)();
    const CriterionFn criteria[] = {criterion1, criterion2, criterion3, criterion4,
                                    criterion5, criterion6, criterion7, criterion8,
                                    criterion9};

    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        const int n = std::atoi(argv[i]);
        if (n < 1 || n > 9) {
            std::fprintf(stderr, "usage: %s [criterion numbers 1-9]\n", argv[0]);
            return 1;
        }
        selected.insert(n);
    }

    int passed = 0, ran = 0;
    for (int n = 1; n <= 9; ++n) {
        if (!selected.empty() && selected.count(n) == 0) continue;
        ++ran;
        CriterionResult result;
        try {
            result = criteria[n - 1]();
        } catch (const std::exception& e) {
            result = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %d: %s  %s\n", n, result.pass ? "PASS" : "FAIL",
                    result.detail.c_str());
        std::fflush(stdout);
        if (result.pass) ++passed;
    }
    std::printf("acceptance: %d/%d criteria passed\n", passed, ran);
    return passed == ran ? 0 : 1;
}
