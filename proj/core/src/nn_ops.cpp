// SPDX-License-Identifier: Apache-2.0
#include "csivid/nn_ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace csivid {

namespace {

template <typename S>
void im2col(const S* input, int c_in, int h, int w, int k, int stride, int pad, int h_out,
            int w_out, S* col) {
    // col row r = (c*k + ky)*k + kx, column = oy*w_out + ox
    const int n = h_out * w_out;
    for (int c = 0; c < c_in; ++c) {
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                S* row = col + (static_cast<std::size_t>(c) * k * k +
                                static_cast<std::size_t>(ky) * k + kx) *
                                   static_cast<std::size_t>(n);
                for (int oy = 0; oy < h_out; ++oy) {
                    const int iy = oy * stride - pad + ky;
                    if (iy < 0 || iy >= h) {
                        std::fill(row + static_cast<std::size_t>(oy) * w_out,
                                  row + static_cast<std::size_t>(oy + 1) * w_out, S(0));
                        continue;
                    }
                    const S* src = input + (static_cast<std::size_t>(c) * h + iy) * w;
                    S* dst = row + static_cast<std::size_t>(oy) * w_out;
                    for (int ox = 0; ox < w_out; ++ox) {
                        const int ix = ox * stride - pad + kx;
                        dst[ox] = (ix < 0 || ix >= w) ? S(0) : src[ix];
                    }
                }
            }
        }
    }
}

template <typename S>
void col2im_add(const S* col, int c_in, int h, int w, int k, int stride, int pad, int h_out,
                int w_out, S* input_grad) {
    const int n = h_out * w_out;
    for (int c = 0; c < c_in; ++c) {
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                const S* row = col + (static_cast<std::size_t>(c) * k * k +
                                      static_cast<std::size_t>(ky) * k + kx) *
                                         static_cast<std::size_t>(n);
                for (int oy = 0; oy < h_out; ++oy) {
                    const int iy = oy * stride - pad + ky;
                    if (iy < 0 || iy >= h) continue;
                    S* dst = input_grad + (static_cast<std::size_t>(c) * h + iy) * w;
                    const S* src = row + static_cast<std::size_t>(oy) * w_out;
                    for (int ox = 0; ox < w_out; ++ox) {
                        const int ix = ox * stride - pad + kx;
                        if (ix >= 0 && ix < w) dst[ix] += src[ox];
                    }
                }
            }
        }
    }
}

template <typename S>
void transpose(const S* src, int rows, int cols, S* dst) {
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            dst[static_cast<std::size_t>(c) * rows + r] =
                src[static_cast<std::size_t>(r) * cols + c];
        }
    }
}

struct ConvDims {
    int c_in, h, w, c_out, k, h_out, w_out;
};

template <typename S>
ConvDims conv_dims(const TensorT<S>& input, const TensorT<S>& weight, int stride, int pad) {
    if (input.shape.size() != 3 || weight.shape.size() != 4) {
        throw ShapeMismatch("conv2d expects (C,H,W) input and (C_out,C_in,k,k) weights");
    }
    ConvDims d{};
    d.c_in = input.dim(0);
    d.h = input.dim(1);
    d.w = input.dim(2);
    d.c_out = weight.dim(0);
    d.k = weight.dim(2);
    if (weight.dim(1) != d.c_in || weight.dim(3) != d.k) {
        throw ShapeMismatch("conv2d weight shape disagrees with input channels");
    }
    if (stride < 1) throw ShapeMismatch("conv2d stride must be >= 1");
    d.h_out = (d.h + 2 * pad - d.k) / stride + 1;
    d.w_out = (d.w + 2 * pad - d.k) / stride + 1;
    if (d.h_out < 1 || d.w_out < 1) throw ShapeMismatch("conv2d output would be empty");
    return d;
}

}  // namespace

template <typename S>
void gemm_accumulate(const S* a, const S* b, S* c, int m, int k, int n) {
    int i = 0;
    for (; i + 4 <= m; i += 4) {
        S* c0 = c + static_cast<std::size_t>(i) * n;
        S* c1 = c0 + n;
        S* c2 = c1 + n;
        S* c3 = c2 + n;
        for (int kk = 0; kk < k; ++kk) {
            const S a0 = a[static_cast<std::size_t>(i) * k + kk];
            const S a1 = a[static_cast<std::size_t>(i + 1) * k + kk];
            const S a2 = a[static_cast<std::size_t>(i + 2) * k + kk];
            const S a3 = a[static_cast<std::size_t>(i + 3) * k + kk];
            const S* brow = b + static_cast<std::size_t>(kk) * n;
            for (int j = 0; j < n; ++j) {
                c0[j] += a0 * brow[j];
                c1[j] += a1 * brow[j];
                c2[j] += a2 * brow[j];
                c3[j] += a3 * brow[j];
            }
        }
    }
    for (; i < m; ++i) {
        S* crow = c + static_cast<std::size_t>(i) * n;
        for (int kk = 0; kk < k; ++kk) {
            const S av = a[static_cast<std::size_t>(i) * k + kk];
            const S* brow = b + static_cast<std::size_t>(kk) * n;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

template <typename S>
TensorT<S> conv2d(const TensorT<S>& input, const TensorT<S>& weight, const TensorT<S>& bias,
                  int stride, int pad, ConvWorkspace<S>* ws) {
    const ConvDims d = conv_dims(input, weight, stride, pad);
    check_shape(bias, {d.c_out}, "conv2d bias");

    const int kk = d.c_in * d.k * d.k;
    const int n = d.h_out * d.w_out;
    ConvWorkspace<S> local;
    ConvWorkspace<S>& w = ws ? *ws : local;
    w.col.resize(static_cast<std::size_t>(kk) * n);
    im2col(input.data.data(), d.c_in, d.h, d.w, d.k, stride, pad, d.h_out, d.w_out, w.col.data());

    TensorT<S> out({d.c_out, d.h_out, d.w_out});
    for (int oc = 0; oc < d.c_out; ++oc) {
        std::fill(out.data.begin() + static_cast<std::ptrdiff_t>(oc) * n,
                  out.data.begin() + static_cast<std::ptrdiff_t>(oc + 1) * n, bias.data[oc]);
    }
    gemm_accumulate(weight.data.data(), w.col.data(), out.data.data(), d.c_out, kk, n);
    return out;
}

template <typename S>
void conv2d_backward(const TensorT<S>& input, const TensorT<S>& weight, const TensorT<S>& d_out,
                     int stride, int pad, TensorT<S>* d_input, TensorT<S>* d_weight,
                     TensorT<S>* d_bias, ConvWorkspace<S>* ws) {
    const ConvDims d = conv_dims(input, weight, stride, pad);
    check_shape(d_out, {d.c_out, d.h_out, d.w_out}, "conv2d d_out");

    const int kk = d.c_in * d.k * d.k;
    const int n = d.h_out * d.w_out;
    ConvWorkspace<S> local;
    ConvWorkspace<S>& w = ws ? *ws : local;

    if (d_bias) {
        check_shape(*d_bias, {d.c_out}, "conv2d d_bias");
        for (int oc = 0; oc < d.c_out; ++oc) {
            S acc = 0;
            const S* row = d_out.data.data() + static_cast<std::size_t>(oc) * n;
            for (int j = 0; j < n; ++j) acc += row[j];
            d_bias->data[static_cast<std::size_t>(oc)] += acc;
        }
    }

    if (d_weight) {
        check_shape(*d_weight, weight.shape, "conv2d d_weight");
        w.col.resize(static_cast<std::size_t>(kk) * n);
        im2col(input.data.data(), d.c_in, d.h, d.w, d.k, stride, pad, d.h_out, d.w_out,
               w.col.data());
        w.colt.resize(w.col.size());
        transpose(w.col.data(), kk, n, w.colt.data());
        // dW (C_out x kk) += d_out (C_out x n) * col^T (n x kk)
        gemm_accumulate(d_out.data.data(), w.colt.data(), d_weight->data.data(), d.c_out, n, kk);
    }

    if (d_input) {
        check_shape(*d_input, input.shape, "conv2d d_input");
        w.wt.resize(static_cast<std::size_t>(kk) * d.c_out);
        transpose(weight.data.data(), d.c_out, kk, w.wt.data());
        w.dcol.assign(static_cast<std::size_t>(kk) * n, S(0));
        // d_col (kk x n) = W^T (kk x C_out) * d_out (C_out x n)
        gemm_accumulate(w.wt.data(), d_out.data.data(), w.dcol.data(), kk, d.c_out, n);
        col2im_add(w.dcol.data(), d.c_in, d.h, d.w, d.k, stride, pad, d.h_out, d.w_out,
                   d_input->data.data());
    }
}

template <typename S>
TensorT<S> relu(const TensorT<S>& x) {
    TensorT<S> y(x.shape);
    for (std::size_t i = 0; i < x.data.size(); ++i) y.data[i] = x.data[i] > S(0) ? x.data[i] : S(0);
    return y;
}

template <typename S>
TensorT<S> relu_backward(const TensorT<S>& x, const TensorT<S>& d_out) {
    if (!x.same_shape(d_out)) throw ShapeMismatch("relu_backward shape mismatch");
    TensorT<S> d(x.shape);
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        d.data[i] = x.data[i] > S(0) ? d_out.data[i] : S(0);
    }
    return d;
}

template <typename S>
TensorT<S> sigmoid(const TensorT<S>& x) {
    TensorT<S> y(x.shape);
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        y.data[i] = S(1) / (S(1) + std::exp(-x.data[i]));
    }
    return y;
}

template <typename S>
TensorT<S> sigmoid_backward(const TensorT<S>& y, const TensorT<S>& d_out) {
    if (!y.same_shape(d_out)) throw ShapeMismatch("sigmoid_backward shape mismatch");
    TensorT<S> d(y.shape);
    for (std::size_t i = 0; i < y.data.size(); ++i) {
        d.data[i] = d_out.data[i] * y.data[i] * (S(1) - y.data[i]);
    }
    return d;
}

template <typename S>
TensorT<S> tanh_act(const TensorT<S>& x) {
    TensorT<S> y(x.shape);
    for (std::size_t i = 0; i < x.data.size(); ++i) y.data[i] = std::tanh(x.data[i]);
    return y;
}

template <typename S>
TensorT<S> tanh_backward(const TensorT<S>& y, const TensorT<S>& d_out) {
    if (!y.same_shape(d_out)) throw ShapeMismatch("tanh_backward shape mismatch");
    TensorT<S> d(y.shape);
    for (std::size_t i = 0; i < y.data.size(); ++i) {
        d.data[i] = d_out.data[i] * (S(1) - y.data[i] * y.data[i]);
    }
    return d;
}

namespace {

struct Lerp {
    int lo, hi;
    double frac;
};

Lerp axis_lerp(int out_i, int out_n, int in_n) {
    // corner-aligned mapping; exact grid hits keep frac = 0 so source samples
    // pass through unchanged
    if (out_n == 1 || in_n == 1) return {0, 0, 0.0};
    const double pos = static_cast<double>(out_i) * (in_n - 1) / (out_n - 1);
    int lo = static_cast<int>(pos);
    if (lo > in_n - 1) lo = in_n - 1;
    const int hi = std::min(lo + 1, in_n - 1);
    return {lo, hi, pos - lo};
}

}  // namespace

template <typename S>
TensorT<S> resize_bilinear(const TensorT<S>& x, int out_h, int out_w) {
    if (x.shape.size() != 3) throw ShapeMismatch("resize_bilinear expects (C,H,W)");
    if (out_h < 1 || out_w < 1) throw ShapeMismatch("resize target must be positive");
    const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
    TensorT<S> y({c, out_h, out_w});
    for (int oy = 0; oy < out_h; ++oy) {
        const Lerp ly = axis_lerp(oy, out_h, h);
        for (int ox = 0; ox < out_w; ++ox) {
            const Lerp lx = axis_lerp(ox, out_w, w);
            const S wy = static_cast<S>(ly.frac);
            const S wx = static_cast<S>(lx.frac);
            for (int ch = 0; ch < c; ++ch) {
                const S* plane = x.data.data() + static_cast<std::size_t>(ch) * h * w;
                const S v00 = plane[static_cast<std::size_t>(ly.lo) * w + lx.lo];
                const S v01 = plane[static_cast<std::size_t>(ly.lo) * w + lx.hi];
                const S v10 = plane[static_cast<std::size_t>(ly.hi) * w + lx.lo];
                const S v11 = plane[static_cast<std::size_t>(ly.hi) * w + lx.hi];
                const S top = v00 + wx * (v01 - v00);
                const S bot = v10 + wx * (v11 - v10);
                y.data[(static_cast<std::size_t>(ch) * out_h + oy) * out_w + ox] =
                    top + wy * (bot - top);
            }
        }
    }
    return y;
}

template <typename S>
TensorT<S> resize_bilinear_backward(const TensorT<S>& d_out, int in_h, int in_w) {
    if (d_out.shape.size() != 3) throw ShapeMismatch("resize_bilinear_backward expects (C,H,W)");
    const int c = d_out.dim(0), out_h = d_out.dim(1), out_w = d_out.dim(2);
    TensorT<S> d({c, in_h, in_w});
    for (int oy = 0; oy < out_h; ++oy) {
        const Lerp ly = axis_lerp(oy, out_h, in_h);
        for (int ox = 0; ox < out_w; ++ox) {
            const Lerp lx = axis_lerp(ox, out_w, in_w);
            const S wy = static_cast<S>(ly.frac);
            const S wx = static_cast<S>(lx.frac);
            for (int ch = 0; ch < c; ++ch) {
                const S g =
                    d_out.data[(static_cast<std::size_t>(ch) * out_h + oy) * out_w + ox];
                S* plane = d.data.data() + static_cast<std::size_t>(ch) * in_h * in_w;
                plane[static_cast<std::size_t>(ly.lo) * in_w + lx.lo] +=
                    g * (S(1) - wy) * (S(1) - wx);
                plane[static_cast<std::size_t>(ly.lo) * in_w + lx.hi] += g * (S(1) - wy) * wx;
                plane[static_cast<std::size_t>(ly.hi) * in_w + lx.lo] += g * wy * (S(1) - wx);
                plane[static_cast<std::size_t>(ly.hi) * in_w + lx.hi] += g * wy * wx;
            }
        }
    }
    return d;
}

template <typename S>
TensorT<S> upsample_bilinear2x(const TensorT<S>& x) {
    if (x.shape.size() != 3) throw ShapeMismatch("upsample_bilinear2x expects (C,H,W)");
    return resize_bilinear(x, 2 * x.dim(1), 2 * x.dim(2));
}

template <typename S>
TensorT<S> avgpool2x(const TensorT<S>& x) {
    if (x.shape.size() != 3) throw ShapeMismatch("avgpool2x expects (C,H,W)");
    const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
    if (h % 2 != 0 || w % 2 != 0) throw ShapeMismatch("avgpool2x needs even spatial dims");
    TensorT<S> y({c, h / 2, w / 2});
    for (int ch = 0; ch < c; ++ch) {
        const S* plane = x.data.data() + static_cast<std::size_t>(ch) * h * w;
        S* out = y.data.data() + static_cast<std::size_t>(ch) * (h / 2) * (w / 2);
        for (int oy = 0; oy < h / 2; ++oy) {
            for (int ox = 0; ox < w / 2; ++ox) {
                const S* p = plane + static_cast<std::size_t>(2 * oy) * w + 2 * ox;
                out[static_cast<std::size_t>(oy) * (w / 2) + ox] =
                    (p[0] + p[1] + p[w] + p[w + 1]) * S(0.25);
            }
        }
    }
    return y;
}

template <typename S>
TensorT<S> avgpool2x_backward(const TensorT<S>& d_out) {
    if (d_out.shape.size() != 3) throw ShapeMismatch("avgpool2x_backward expects (C,H,W)");
    const int c = d_out.dim(0), oh = d_out.dim(1), ow = d_out.dim(2);
    TensorT<S> d({c, 2 * oh, 2 * ow});
    for (int ch = 0; ch < c; ++ch) {
        const S* src = d_out.data.data() + static_cast<std::size_t>(ch) * oh * ow;
        S* plane = d.data.data() + static_cast<std::size_t>(ch) * (2 * oh) * (2 * ow);
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                const S g = src[static_cast<std::size_t>(oy) * ow + ox] * S(0.25);
                S* p = plane + static_cast<std::size_t>(2 * oy) * (2 * ow) + 2 * ox;
                p[0] = g;
                p[1] = g;
                p[2 * ow] = g;
                p[2 * ow + 1] = g;
            }
        }
    }
    return d;
}

template <typename S>
TensorT<S> concat_channels(const std::vector<const TensorT<S>*>& parts) {
    if (parts.empty()) throw ShapeMismatch("concat_channels needs at least one tensor");
    const int h = parts[0]->dim(1), w = parts[0]->dim(2);
    int c_total = 0;
    for (const auto* p : parts) {
        if (p->shape.size() != 3 || p->dim(1) != h || p->dim(2) != w) {
            throw ShapeMismatch("concat_channels inputs must share spatial dims");
        }
        c_total += p->dim(0);
    }
    TensorT<S> y({c_total, h, w});
    std::size_t off = 0;
    for (const auto* p : parts) {
        std::copy(p->data.begin(), p->data.end(), y.data.begin() + static_cast<std::ptrdiff_t>(off));
        off += p->data.size();
    }
    return y;
}

template <typename S>
std::vector<TensorT<S>> split_channels(const TensorT<S>& x, const std::vector<int>& channels) {
    if (x.shape.size() != 3) throw ShapeMismatch("split_channels expects (C,H,W)");
    int c_total = 0;
    for (const int c : channels) c_total += c;
    if (c_total != x.dim(0)) throw ShapeMismatch("split_channels channel counts do not sum");
    const int h = x.dim(1), w = x.dim(2);
    std::vector<TensorT<S>> parts;
    std::size_t off = 0;
    for (const int c : channels) {
        TensorT<S> p({c, h, w});
        std::copy(x.data.begin() + static_cast<std::ptrdiff_t>(off),
                  x.data.begin() + static_cast<std::ptrdiff_t>(off + p.numel()), p.data.begin());
        off += p.numel();
        parts.push_back(std::move(p));
    }
    return parts;
}

#define CSIVID_INSTANTIATE_OPS(S)                                                                \
    template void gemm_accumulate<S>(const S*, const S*, S*, int, int, int);                     \
    template TensorT<S> conv2d<S>(const TensorT<S>&, const TensorT<S>&, const TensorT<S>&, int,  \
                                  int, ConvWorkspace<S>*);                                       \
    template void conv2d_backward<S>(const TensorT<S>&, const TensorT<S>&, const TensorT<S>&,    \
                                     int, int, TensorT<S>*, TensorT<S>*, TensorT<S>*,            \
                                     ConvWorkspace<S>*);                                         \
    template TensorT<S> relu<S>(const TensorT<S>&);                                              \
    template TensorT<S> relu_backward<S>(const TensorT<S>&, const TensorT<S>&);                  \
    template TensorT<S> sigmoid<S>(const TensorT<S>&);                                           \
    template TensorT<S> sigmoid_backward<S>(const TensorT<S>&, const TensorT<S>&);               \
    template TensorT<S> tanh_act<S>(const TensorT<S>&);                                          \
    template TensorT<S> tanh_backward<S>(const TensorT<S>&, const TensorT<S>&);                  \
    template TensorT<S> resize_bilinear<S>(const TensorT<S>&, int, int);                         \
    template TensorT<S> resize_bilinear_backward<S>(const TensorT<S>&, int, int);                \
    template TensorT<S> upsample_bilinear2x<S>(const TensorT<S>&);                               \
    template TensorT<S> avgpool2x<S>(const TensorT<S>&);                                         \
    template TensorT<S> avgpool2x_backward<S>(const TensorT<S>&);                                \
    template TensorT<S> concat_channels<S>(const std::vector<const TensorT<S>*>&);               \
    template std::vector<TensorT<S>> split_channels<S>(const TensorT<S>&, const std::vector<int>&);

CSIVID_INSTANTIATE_OPS(float)
CSIVID_INSTANTIATE_OPS(double)

#undef CSIVID_INSTANTIATE_OPS

}  // namespace csivid
