#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "seilab/nn/tensor.hpp"
#include "seilab/rng.hpp"

namespace seilab::nn {

enum class LayerKind : std::uint8_t {
    Conv2d = 1,
    Dense = 2,
    Relu = 3,
    Sigmoid = 4,
    MaxPool2d = 5,
    Upsample2d = 6,
    Embedding = 7,
    Softmax = 8,
    Flatten = 9,
};

std::string kind_name(LayerKind k);

/// Declarative description of one layer. Only the fields relevant to `kind`
/// are read; the rest stay zero.
struct LayerSpec {
    LayerKind kind = LayerKind::Relu;
    std::uint32_t out_channels = 0;  // conv2d
    std::uint32_t kernel_h = 0, kernel_w = 0;
    std::uint32_t stride_h = 1, stride_w = 1;
    std::uint32_t pad_h = 0, pad_w = 0;
    std::uint32_t units = 0;           // dense
    std::uint32_t window_h = 0, window_w = 0;  // maxpool window / upsample factor
    std::uint32_t vocab = 0, dim = 0;  // embedding

    /// Stride-1 convolution with "same" padding for odd kernels.
    static LayerSpec conv2d(std::uint32_t out_channels, std::uint32_t kh, std::uint32_t kw);
    static LayerSpec dense(std::uint32_t units);
    static LayerSpec relu() { return {LayerKind::Relu}; }
    static LayerSpec sigmoid() { return {LayerKind::Sigmoid}; }
    static LayerSpec softmax() { return {LayerKind::Softmax}; }
    static LayerSpec flatten() { return {LayerKind::Flatten}; }
    static LayerSpec maxpool2d(std::uint32_t ph, std::uint32_t pw);
    static LayerSpec upsample2d(std::uint32_t uh, std::uint32_t uw);
    static LayerSpec embedding(std::uint32_t vocab, std::uint32_t dim);

    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

template <typename T>
struct Parameter {
    std::string name;
    Tensor<T> value;
    Tensor<T> grad;
};

enum class Init { HeUniform, GlorotUniform };

/// One differentiable stage operating on batch tensors. Shapes passed to
/// output_shape() exclude the batch extent.
template <typename T>
class Layer {
public:
    virtual ~Layer() = default;

    virtual LayerSpec spec() const = 0;
    virtual Shape output_shape() const = 0;
    virtual void forward(const Tensor<T>& x, Tensor<T>& y) = 0;
    /// x and y are the tensors of the preceding forward(); parameter gradients
    /// accumulate into Parameter::grad.
    virtual void backward(const Tensor<T>& x, const Tensor<T>& y, const Tensor<T>& dy, Tensor<T>& dx) = 0;
    virtual std::vector<Parameter<T>*> parameters() { return {}; }
    virtual void initialize(Rng& /*rng*/, Init /*scheme*/) {}
    virtual std::unique_ptr<Layer<T>> clone() const = 0;
};

/// Output shape of `spec` applied to per-example shape `in`; throws when the
/// spec cannot consume that shape.
Shape infer_output_shape(const LayerSpec& spec, const Shape& in);

template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec, const Shape& in);

}  // namespace seilab::nn
