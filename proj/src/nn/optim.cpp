#include "seilab/nn/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace seilab::nn {

namespace {

template <typename T>
void check_pairs(std::span<Tensor<T>* const> params, std::span<const Tensor<T>* const> grads, const char* who) {
    if (params.size() != grads.size())
        throw std::invalid_argument(std::string(who) + ": " + std::to_string(params.size()) + " parameters but " +
                                    std::to_string(grads.size()) + " gradients");
    for (std::size_t i = 0; i < params.size(); ++i)
        if (params[i]->shape() != grads[i]->shape())
            throw std::invalid_argument(std::string(who) + ": parameter " + shape_str(params[i]->shape()) +
                                        " vs gradient " + shape_str(grads[i]->shape()));
}

template <typename T>
void split(const std::vector<Parameter<T>*>& ps, std::vector<Tensor<T>*>& values, std::vector<const Tensor<T>*>& grads) {
    for (auto* p : ps) {
        values.push_back(&p->value);
        grads.push_back(&p->grad);
    }
}

}  // namespace

template <typename T>
AdamState<T>::AdamState(AdamConfig cfg, const std::vector<Parameter<T>*>& params) : config(cfg) {
    for (auto* p : params) {
        first.emplace_back(p->value.shape());
        second.emplace_back(p->value.shape());
    }
}

template <typename T>
void adam_step(AdamState<T>& s, std::span<Tensor<T>* const> params, std::span<const Tensor<T>* const> grads) {
    check_pairs(params, grads, "adam_step");
    if (s.first.size() != params.size()) throw std::invalid_argument("adam_step: state built for a different parameter list");
    ++s.step;
    const auto& c = s.config;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(s.step));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(s.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor<T>& w = *params[i];
        const Tensor<T>& g = *grads[i];
        if (s.first[i].shape() != w.shape())
            throw std::invalid_argument("adam_step: moment " + shape_str(s.first[i].shape()) + " vs parameter " +
                                        shape_str(w.shape()));
        for (std::size_t k = 0; k < w.size(); ++k) {
            const double gk = static_cast<double>(g[k]) + c.l2 * static_cast<double>(w[k]);
            const double m = c.beta1 * s.first[i][k] + (1.0 - c.beta1) * gk;
            const double v = c.beta2 * s.second[i][k] + (1.0 - c.beta2) * gk * gk;
            s.first[i][k] = static_cast<T>(m);
            s.second[i][k] = static_cast<T>(v);
            w[k] = static_cast<T>(w[k] - c.lr * (m / bc1) / (std::sqrt(v / bc2) + c.epsilon));
        }
    }
}

template <typename T>
void adam_step(AdamState<T>& state, const std::vector<Parameter<T>*>& params) {
    std::vector<Tensor<T>*> values;
    std::vector<const Tensor<T>*> grads;
    split(params, values, grads);
    adam_step<T>(state, values, grads);
}

template <typename T>
void sgd_step(std::span<Tensor<T>* const> params, std::span<const Tensor<T>* const> grads, double lr) {
    check_pairs(params, grads, "sgd_step");
    for (std::size_t i = 0; i < params.size(); ++i)
        for (std::size_t k = 0; k < params[i]->size(); ++k)
            (*params[i])[k] = static_cast<T>((*params[i])[k] - lr * (*grads[i])[k]);
}

template <typename T>
MomentumSgdState<T>::MomentumSgdState(double lr_, double momentum_, const std::vector<Parameter<T>*>& params)
    : lr(lr_), momentum(momentum_) {
    for (auto* p : params) velocity.emplace_back(p->value.shape());
}

template <typename T>
void MomentumSgdState<T>::step(const std::vector<Parameter<T>*>& params) {
    if (params.size() != velocity.size()) throw std::invalid_argument("momentum sgd: parameter list changed");
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& w = params[i]->value;
        const auto& g = params[i]->grad;
        if (g.shape() != w.shape() || velocity[i].shape() != w.shape())
            throw std::invalid_argument("momentum sgd: shape mismatch " + shape_str(w.shape()) + " vs " +
                                        shape_str(g.shape()));
        for (std::size_t k = 0; k < w.size(); ++k) {
            const double v = momentum * velocity[i][k] - lr * g[k];
            velocity[i][k] = static_cast<T>(v);
            w[k] = static_cast<T>(w[k] + v);
        }
    }
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step(AdamState<float>&, std::span<Tensor<float>* const>, std::span<const Tensor<float>* const>);
template void adam_step(AdamState<double>&, std::span<Tensor<double>* const>, std::span<const Tensor<double>* const>);
template void adam_step(AdamState<float>&, const std::vector<Parameter<float>*>&);
template void adam_step(AdamState<double>&, const std::vector<Parameter<double>*>&);
template void sgd_step(std::span<Tensor<float>* const>, std::span<const Tensor<float>* const>, double);
template void sgd_step(std::span<Tensor<double>* const>, std::span<const Tensor<double>* const>, double);
template struct MomentumSgdState<float>;
template struct MomentumSgdState<double>;

}  // namespace seilab::nn
