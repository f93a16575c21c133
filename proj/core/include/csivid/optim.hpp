// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "csivid/rng.hpp"
#include "csivid/tensor.hpp"

namespace csivid {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// One Adam update over every parameter with a populated gradient buffer.
/// Moments are lazily initialized to zero; the step counter increments once
/// per call. Throws NonFiniteGradient when any gradient is not finite.
template <typename S>
void adam_step(ParamSetT<S>& params, AdamStateT<S>& state, double lr,
               const AdamConfig& cfg = {});

/// Fills `t` with N(0, sqrt(2 / fan_in)) draws in index order.
template <typename S>
void init_he_normal(TensorT<S>& t, int fan_in, Rng& rng);

}  // namespace csivid
