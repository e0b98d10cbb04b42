#include "seilab/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace seilab::nn {

namespace {

double clamp_prob(double p) { return std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon); }

// d/dp of ln(clamp(p)); zero where the clamp is active.
double dlog(double p) { return (p > kProbEpsilon && p < 1.0 - kProbEpsilon) ? 1.0 / p : 0.0; }

}  // namespace

template <typename T>
CrossEntropy<T> categorical_cross_entropy(const Tensor<T>& probs, std::span<const int> labels) {
    if (probs.rank() != 2) throw std::invalid_argument("cross_entropy: probs must be [N, K], got " + shape_str(probs.shape()));
    const std::size_t n = probs.dim(0), k = probs.dim(1);
    if (labels.size() != n) throw std::invalid_argument("cross_entropy: label count does not match batch");
    if (n == 0) throw std::invalid_argument("cross_entropy: empty batch");
    CrossEntropy<T> out;
    out.grad_probs = Tensor<T>(probs.shape());
    out.grad_logits = Tensor<T>(probs.shape());
    double acc = 0.0;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t b = 0; b < n; ++b) {
        const int y = labels[b];
        if (y < 0 || static_cast<std::size_t>(y) >= k)
            throw std::invalid_argument("cross_entropy: label " + std::to_string(y) + " outside [0, " +
                                        std::to_string(k) + ")");
        const double p = static_cast<double>(probs[b * k + static_cast<std::size_t>(y)]);
        acc -= std::log(clamp_prob(p));
        out.grad_probs[b * k + static_cast<std::size_t>(y)] = static_cast<T>(-dlog(p) * inv_n);
        for (std::size_t j = 0; j < k; ++j) {
            const double onehot = static_cast<std::size_t>(y) == j ? 1.0 : 0.0;
            out.grad_logits[b * k + j] = static_cast<T>((static_cast<double>(probs[b * k + j]) - onehot) * inv_n);
        }
    }
    out.loss = acc * inv_n;
    return out;
}

template <typename T>
GanLosses<T> gan_losses(const Tensor<T>& d_real, const Tensor<T>& d_fake, GeneratorLoss mode) {
    if (d_real.size() == 0 || d_fake.size() == 0) throw std::invalid_argument("gan_losses: empty batch");
    GanLosses<T> out;
    out.d_grad_real = Tensor<T>(d_real.shape());
    out.d_grad_real_logits = Tensor<T>(d_real.shape());
    out.d_grad_fake = Tensor<T>(d_fake.shape());
    out.d_grad_fake_logits = Tensor<T>(d_fake.shape());
    out.g_grad_fake = Tensor<T>(d_fake.shape());
    out.g_grad_fake_logits = Tensor<T>(d_fake.shape());

    const double inv_r = 1.0 / static_cast<double>(d_real.size());
    const double inv_f = 1.0 / static_cast<double>(d_fake.size());
    double real_term = 0.0, fake_term = 0.0, g_term = 0.0;
    for (std::size_t i = 0; i < d_real.size(); ++i) {
        const double p = static_cast<double>(d_real[i]);
        real_term -= std::log(clamp_prob(p));
        out.d_grad_real[i] = static_cast<T>(-dlog(p) * inv_r);
        out.d_grad_real_logits[i] = static_cast<T>((p - 1.0) * inv_r);
    }
    for (std::size_t i = 0; i < d_fake.size(); ++i) {
        const double p = static_cast<double>(d_fake[i]);
        fake_term -= std::log(clamp_prob(1.0 - p));
        out.d_grad_fake[i] = static_cast<T>(dlog(1.0 - p) * inv_f);
        out.d_grad_fake_logits[i] = static_cast<T>(p * inv_f);
        if (mode == GeneratorLoss::NonSaturating) {
            g_term -= std::log(clamp_prob(p));
            out.g_grad_fake[i] = static_cast<T>(-dlog(p) * inv_f);
            out.g_grad_fake_logits[i] = static_cast<T>((p - 1.0) * inv_f);
        } else {
            g_term += std::log(clamp_prob(1.0 - p));
            out.g_grad_fake[i] = static_cast<T>(-dlog(1.0 - p) * inv_f);
            out.g_grad_fake_logits[i] = static_cast<T>(-p * inv_f);
        }
    }
    out.d_loss = real_term * inv_r + fake_term * inv_f;
    out.g_loss = g_term * inv_f;
    return out;
}

template CrossEntropy<float> categorical_cross_entropy(const Tensor<float>&, std::span<const int>);
template CrossEntropy<double> categorical_cross_entropy(const Tensor<double>&, std::span<const int>);
template GanLosses<float> gan_losses(const Tensor<float>&, const Tensor<float>&, GeneratorLoss);
template GanLosses<double> gan_losses(const Tensor<double>&, const Tensor<double>&, GeneratorLoss);

}  // namespace seilab::nn
