#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "seilab/nn/layers.hpp"

namespace seilab::nn {

/// Sequential stack of layers with cached activations for backpropagation.
///
/// Initialization is He-uniform for conv/dense layers followed by ReLU and
/// Glorot-uniform otherwise; each layer draws from its own seed derived from
/// the network seed and the layer index. A network instance is not safe for
/// concurrent use.
template <typename T>
class Network {
public:
    Network(Shape input_shape, std::vector<LayerSpec> specs, std::uint64_t seed);
    Network(const Network& other);
    Network& operator=(const Network& other);
    Network(Network&&) noexcept = default;
    Network& operator=(Network&&) noexcept = default;

    /// x is [N, input_shape...]. Returns the output activation, valid until
    /// the next forward().
    const Tensor<T>& forward(const Tensor<T>& x);

    /// Backpropagates dL/d(output) through every layer, accumulating parameter
    /// gradients, and returns dL/d(input).
    Tensor<T> backward(const Tensor<T>& grad_output);

    /// Same as backward() but starts below the final softmax/sigmoid layer;
    /// `grad_logits` is dL/d(pre-activation).
    Tensor<T> backward_from_logits(const Tensor<T>& grad_logits);

    void zero_grad();
    std::vector<Parameter<T>*> parameters();
    std::size_t parameter_count() const;

    const Shape& input_shape() const { return input_shape_; }
    Shape output_shape() const;
    /// Per-example output shape of every layer, in order.
    std::vector<Shape> layer_output_shapes() const;
    const std::vector<LayerSpec>& specs() const { return specs_; }
    std::uint64_t seed() const { return seed_; }

    /// In checked mode every activation and gradient is verified finite;
    /// violations throw NumericError naming the layer.
    void set_checked(bool on) { checked_ = on; }
    bool checked() const { return checked_; }

    /// Same architecture and parameter values in another scalar type.
    template <typename U>
    Network<U> converted() const;

    /// Copies parameter values from a network of identical architecture.
    template <typename U>
    void copy_parameters_from(Network<U>& other);

private:
    Tensor<T> backward_range(Tensor<T> grad, std::size_t top);
    void check(const Tensor<T>& t, std::size_t layer, const char* what) const;

    Shape input_shape_;
    std::vector<LayerSpec> specs_;
    std::uint64_t seed_;
    std::vector<std::unique_ptr<Layer<T>>> layers_;
    std::vector<Tensor<T>> acts_;
    bool has_forward_ = false;
    bool checked_ = false;
};

extern template class Network<float>;
extern template class Network<double>;

template <typename T>
template <typename U>
Network<U> Network<T>::converted() const {
    Network<U> out(input_shape_, specs_, seed_);
    auto& self = const_cast<Network<T>&>(*this);
    out.copy_parameters_from(self);
    return out;
}

template <typename T>
template <typename U>
void Network<T>::copy_parameters_from(Network<U>& other) {
    auto dst = parameters();
    auto src = other.parameters();
    if (dst.size() != src.size()) throw std::invalid_argument("copy_parameters_from: architecture mismatch");
    for (std::size_t i = 0; i < dst.size(); ++i) {
        if (dst[i]->value.shape() != src[i]->value.shape())
            throw std::invalid_argument("copy_parameters_from: shape mismatch " + shape_str(dst[i]->value.shape()) +
                                        " vs " + shape_str(src[i]->value.shape()));
        for (std::size_t k = 0; k < dst[i]->value.size(); ++k)
            dst[i]->value[k] = static_cast<T>(src[i]->value[k]);
    }
}

}  // namespace seilab::nn
