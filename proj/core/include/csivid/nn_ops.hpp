// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "csivid/tensor.hpp"

namespace csivid {

// Layer kernels for both scalar widths. double is the reference path; float
// is the fast path used for desk-scale training. Every op has a fixed
// accumulation order, so forward and backward are bitwise reproducible.

/// Scratch buffers shared across conv calls to avoid reallocation.
template <typename S>
struct ConvWorkspace {
    std::vector<S> col;   // (C_in*k*k) x (H_out*W_out)
    std::vector<S> colt;  // transpose of col
    std::vector<S> wt;    // transposed weights
    std::vector<S> dcol;  // gradient wrt col
};

using ConvWorkspaceD = ConvWorkspace<double>;
using ConvWorkspaceF = ConvWorkspace<float>;

/// C (m x n) += A (m x k) * B (k x n), all row-major. Accumulation runs in
/// k order per output element.
template <typename S>
void gemm_accumulate(const S* a, const S* b, S* c, int m, int k, int n);

/// Cross-correlation with square kernel. Output H' = (H + 2*pad - k)/stride + 1.
template <typename S>
TensorT<S> conv2d(const TensorT<S>& input, const TensorT<S>& weight, const TensorT<S>& bias,
                  int stride, int pad, ConvWorkspace<S>* ws = nullptr);

/// Accumulates input/weight/bias gradients. d_input may be null when the
/// input gradient is not needed (first layer).
template <typename S>
void conv2d_backward(const TensorT<S>& input, const TensorT<S>& weight, const TensorT<S>& d_out,
                     int stride, int pad, TensorT<S>* d_input, TensorT<S>* d_weight,
                     TensorT<S>* d_bias, ConvWorkspace<S>* ws = nullptr);

template <typename S>
TensorT<S> relu(const TensorT<S>& x);
template <typename S>
TensorT<S> relu_backward(const TensorT<S>& x, const TensorT<S>& d_out);

template <typename S>
TensorT<S> sigmoid(const TensorT<S>& x);
/// Takes the forward output y, not the input.
template <typename S>
TensorT<S> sigmoid_backward(const TensorT<S>& y, const TensorT<S>& d_out);

template <typename S>
TensorT<S> tanh_act(const TensorT<S>& x);
template <typename S>
TensorT<S> tanh_backward(const TensorT<S>& y, const TensorT<S>& d_out);

/// Corner-aligned bilinear resize of every channel to out_h x out_w.
template <typename S>
TensorT<S> resize_bilinear(const TensorT<S>& x, int out_h, int out_w);
/// Transpose of the resize: scatters d_out back onto an in_h x in_w grid.
template <typename S>
TensorT<S> resize_bilinear_backward(const TensorT<S>& d_out, int in_h, int in_w);

template <typename S>
TensorT<S> upsample_bilinear2x(const TensorT<S>& x);

/// 2x2 mean pooling; requires even spatial dims.
template <typename S>
TensorT<S> avgpool2x(const TensorT<S>& x);
template <typename S>
TensorT<S> avgpool2x_backward(const TensorT<S>& d_out);

template <typename S>
TensorT<S> concat_channels(const std::vector<const TensorT<S>*>& parts);
/// Splits a channel-stacked tensor back into chunks of the given channel counts.
template <typename S>
std::vector<TensorT<S>> split_channels(const TensorT<S>& x, const std::vector<int>& channels);

}  // namespace csivid
