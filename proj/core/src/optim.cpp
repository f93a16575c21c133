// SPDX-License-Identifier: Apache-2.0
#include "csivid/optim.hpp"

#include <cmath>

namespace csivid {

double LrSchedule::at(int epoch) const {
    if (epoch < 0) throw UsageError("epoch must be >= 0");
    return base_lr * std::pow(drop_factor, epoch / drop_every);
}

template <typename S>
void adam_step(ParamSetT<S>& params, AdamStateT<S>& state, double lr, const AdamConfig& cfg) {
    for (const auto& [name, p] : params.params) {
        if (p.grad.size() != p.data.size()) {
            throw NonFiniteGradient("parameter " + name + " has no gradient buffer");
        }
        for (const S g : p.grad) {
            if (!std::isfinite(static_cast<double>(g))) {
                throw NonFiniteGradient("non-finite gradient in parameter " + name);
            }
        }
    }

    state.t += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    const S beta1 = static_cast<S>(cfg.beta1);
    const S beta2 = static_cast<S>(cfg.beta2);
    const S one_minus_b1 = static_cast<S>(1.0 - cfg.beta1);
    const S one_minus_b2 = static_cast<S>(1.0 - cfg.beta2);
    const S eps = static_cast<S>(cfg.epsilon);
    const S step = static_cast<S>(lr);
    const S inv_bc1 = static_cast<S>(1.0 / bc1);
    const S inv_bc2 = static_cast<S>(1.0 / bc2);

    for (auto& [name, p] : params.params) {
        auto& m = state.m[name];
        auto& v = state.v[name];
        if (m.size() != p.data.size()) m.assign(p.data.size(), S(0));
        if (v.size() != p.data.size()) v.assign(p.data.size(), S(0));
        for (std::size_t i = 0; i < p.data.size(); ++i) {
            const S g = p.grad[i];
            m[i] = beta1 * m[i] + one_minus_b1 * g;
            v[i] = beta2 * v[i] + one_minus_b2 * g * g;
            const S m_hat = m[i] * inv_bc1;
            const S v_hat = v[i] * inv_bc2;
            p.data[i] -= step * m_hat / (std::sqrt(v_hat) + eps);
        }
    }
}

template void adam_step<float>(ParamSetT<float>&, AdamStateT<float>&, double, const AdamConfig&);
template void adam_step<double>(ParamSetT<double>&, AdamStateT<double>&, double,
                                const AdamConfig&);

template <typename S>
void init_he_normal(TensorT<S>& t, int fan_in, Rng& rng) {
    if (fan_in < 1) throw ShapeMismatch("fan_in must be positive");
    const double std_dev = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (auto& v : t.data) v = static_cast<S>(rng.normal(0.0, std_dev));
}

template void init_he_normal<float>(TensorT<float>&, int, Rng&);
template void init_he_normal<double>(TensorT<double>&, int, Rng&);

}  // namespace csivid
