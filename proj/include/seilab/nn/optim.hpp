#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "seilab/nn/layers.hpp"

namespace seilab::nn {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double l2 = 0.0;  ///< adds l2 * w to the gradient before the moment update
};

template <typename T>
struct AdamState {
    AdamConfig config;
    std::vector<Tensor<T>> first;
    std::vector<Tensor<T>> second;
    std::uint64_t step = 0;

    AdamState() = default;
    AdamState(AdamConfig cfg, const std::vector<Parameter<T>*>& params);
};

/// Bias-corrected Adam update of `params` in place.
template <typename T>
void adam_step(AdamState<T>& state, std::span<Tensor<T>* const> params, std::span<const Tensor<T>* const> grads);

/// Convenience overload over Parameter value/grad pairs.
template <typename T>
void adam_step(AdamState<T>& state, const std::vector<Parameter<T>*>& params);

/// w <- w - lr * g.
template <typename T>
void sgd_step(std::span<Tensor<T>* const> params, std::span<const Tensor<T>* const> grads, double lr);

/// Classical momentum: v <- mu v - lr g; w <- w + v.
template <typename T>
struct MomentumSgdState {
    double lr = 1e-2;
    double momentum = 0.9;
    std::vector<Tensor<T>> velocity;

    MomentumSgdState() = default;
    MomentumSgdState(double lr, double momentum, const std::vector<Parameter<T>*>& params);
    void step(const std::vector<Parameter<T>*>& params);
};

}  // namespace seilab::nn
