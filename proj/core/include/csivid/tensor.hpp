// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "csivid/errors.hpp"

namespace csivid {

/// Dense tensor with an optional gradient buffer of the same shape.
/// Activations are (C, H, W); conv weights are (C_out, C_in, k, k).
template <typename S>
struct TensorT {
    std::vector<int> shape;
    std::vector<S> data;
    std::vector<S> grad;  // empty until ensure_grad()

    TensorT() = default;
    explicit TensorT(std::vector<int> s) : shape(std::move(s)) {
        data.assign(numel(), S(0));
    }

    std::size_t numel() const {
        std::size_t n = 1;
        for (const int d : shape) n *= static_cast<std::size_t>(d);
        return n;
    }

    int dim(std::size_t i) const { return shape[i]; }

    void ensure_grad() {
        if (grad.size() != data.size()) grad.assign(data.size(), S(0));
    }
    void zero_grad() {
        if (!grad.empty()) std::fill(grad.begin(), grad.end(), S(0));
    }

    bool same_shape(const TensorT& other) const { return shape == other.shape; }
};

using Tensor = TensorT<double>;
using TensorF = TensorT<float>;

template <typename S>
void check_shape(const TensorT<S>& t, const std::vector<int>& expect, const char* what) {
    if (t.shape != expect) {
        std::string msg = what;
        msg += " shape (";
        for (const int d : t.shape) msg += std::to_string(d) + ",";
        msg += ") does not match expected (";
        for (const int d : expect) msg += std::to_string(d) + ",";
        msg += ")";
        throw ShapeMismatch(msg);
    }
}

/// Named trainable tensors; std::map keeps iteration sorted by name.
template <typename S>
struct ParamSetT {
    std::map<std::string, TensorT<S>> params;

    TensorT<S>& at(const std::string& name) {
        const auto it = params.find(name);
        if (it == params.end()) throw ShapeMismatch("unknown parameter: " + name);
        return it->second;
    }
    const TensorT<S>& at(const std::string& name) const {
        const auto it = params.find(name);
        if (it == params.end()) throw ShapeMismatch("unknown parameter: " + name);
        return it->second;
    }

    void ensure_grads() {
        for (auto& [name, p] : params) p.ensure_grad();
    }
    void zero_grads() {
        for (auto& [name, p] : params) p.zero_grad();
    }

    std::size_t total_numel() const {
        std::size_t n = 0;
        for (const auto& [name, p] : params) n += p.numel();
        return n;
    }
};

using ParamSet = ParamSetT<double>;
using ParamSetF = ParamSetT<float>;

/// First/second Adam moments per parameter plus the shared step counter.
template <typename S>
struct AdamStateT {
    std::int64_t t = 0;
    std::map<std::string, std::vector<S>> m;
    std::map<std::string, std::vector<S>> v;
};

using AdamState = AdamStateT<double>;
using AdamStateF = AdamStateT<float>;

/// Step schedule: lr(epoch) = base_lr * drop_factor^floor(epoch / drop_every).
struct LrSchedule {
    double base_lr = 1e-4;
    int drop_every = 5;
    double drop_factor = 0.1;

    double at(int epoch) const;
};

}  // namespace csivid
