#pragma once

#include <span>

#include "seilab/nn/tensor.hpp"

namespace seilab::nn {

/// Probability clamp used inside every logarithm.
inline constexpr double kProbEpsilon = 1e-7;

template <typename T>
struct CrossEntropy {
    double loss = 0.0;
    Tensor<T> grad_probs;   ///< dL/dp
    Tensor<T> grad_logits;  ///< dL/dz = (p - onehot) / N
};

/// Mean over the batch of -ln p[label]. `probs` is [N, K]; labels are 0-based.
template <typename T>
CrossEntropy<T> categorical_cross_entropy(const Tensor<T>& probs, std::span<const int> labels);

enum class GeneratorLoss {
    NonSaturating,  ///< -mean ln D(G(z))
    Minimax,        ///< mean ln(1 - D(G(z)))
};

template <typename T>
struct GanLosses {
    double d_loss = 0.0;
    double g_loss = 0.0;
    Tensor<T> d_grad_real;         ///< dd_loss / dd_real
    Tensor<T> d_grad_fake;         ///< dd_loss / dd_fake
    Tensor<T> g_grad_fake;         ///< dg_loss / dd_fake
    Tensor<T> d_grad_real_logits;  ///< same, w.r.t. the sigmoid pre-activations
    Tensor<T> d_grad_fake_logits;
    Tensor<T> g_grad_fake_logits;
};

/// d_loss = -mean ln d_real - mean ln(1 - d_fake), the negated value function
/// the discriminator ascends. Inputs are clamped to [eps, 1 - eps].
template <typename T>
GanLosses<T> gan_losses(const Tensor<T>& d_real, const Tensor<T>& d_fake,
                        GeneratorLoss mode = GeneratorLoss::NonSaturating);

}  // namespace seilab::nn
