#include "seilab/nn/network.hpp"

#include <stdexcept>

#include "seilab/common.hpp"

namespace seilab::nn {

template <typename T>
Network<T>::Network(Shape input_shape, std::vector<LayerSpec> specs, std::uint64_t seed)
    : input_shape_(std::move(input_shape)), specs_(std::move(specs)), seed_(seed) {
    if (specs_.empty()) throw std::invalid_argument("Network: no layers");
    Shape shape = input_shape_;
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        auto layer = make_layer<T>(specs_[i], shape);
        const bool feeds_relu = i + 1 < specs_.size() && specs_[i + 1].kind == LayerKind::Relu;
        Rng rng(derive_seed(seed_, {static_cast<std::uint64_t>(i)}));
        layer->initialize(rng, feeds_relu ? Init::HeUniform : Init::GlorotUniform);
        shape = layer->output_shape();
        layers_.push_back(std::move(layer));
    }
}

template <typename T>
Network<T>::Network(const Network& other)
    : input_shape_(other.input_shape_), specs_(other.specs_), seed_(other.seed_), checked_(other.checked_) {
    for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

template <typename T>
Network<T>& Network<T>::operator=(const Network& other) {
    if (this != &other) {
        Network tmp(other);
        *this = std::move(tmp);
    }
    return *this;
}

template <typename T>
const Tensor<T>& Network<T>::forward(const Tensor<T>& x) {
    Shape expected{batch_of(x)};
    expected.insert(expected.end(), input_shape_.begin(), input_shape_.end());
    if (x.rank() == 0 || x.shape() != expected) {
        throw std::invalid_argument("Network::forward: input shape " + shape_str(x.shape()) +
                                    " does not match declared [N]" + shape_str(input_shape_));
    }
    acts_.resize(layers_.size() + 1);
    acts_[0] = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        layers_[i]->forward(acts_[i], acts_[i + 1]);
        if (checked_) check(acts_[i + 1], i, "activation");
    }
    has_forward_ = true;
    return acts_.back();
}

template <typename T>
Tensor<T> Network<T>::backward(const Tensor<T>& grad_output) {
    return backward_range(grad_output, layers_.size());
}

template <typename T>
Tensor<T> Network<T>::backward_from_logits(const Tensor<T>& grad_logits) {
    const auto last = specs_.back().kind;
    if (last != LayerKind::Softmax && last != LayerKind::Sigmoid)
        throw std::logic_error("backward_from_logits: final layer is " + kind_name(last) +
                               ", not softmax/sigmoid");
    return backward_range(grad_logits, layers_.size() - 1);
}

template <typename T>
Tensor<T> Network<T>::backward_range(Tensor<T> grad, std::size_t top) {
    if (!has_forward_) throw std::logic_error("Network::backward called before forward");
    if (grad.shape() != acts_[top].shape())
        throw std::invalid_argument("Network::backward: gradient shape " + shape_str(grad.shape()) +
                                    " does not match activation " + shape_str(acts_[top].shape()));
    Tensor<T> dx;
    for (std::size_t i = top; i-- > 0;) {
        layers_[i]->backward(acts_[i], acts_[i + 1], grad, dx);
        if (checked_) {
            check(dx, i, "input gradient");
            for (auto* p : layers_[i]->parameters()) check(p->grad, i, "parameter gradient");
        }
        std::swap(grad, dx);
    }
    return grad;
}

template <typename T>
void Network<T>::zero_grad() {
    for (auto* p : parameters()) p->grad.fill(T(0));
}

template <typename T>
std::vector<Parameter<T>*> Network<T>::parameters() {
    std::vector<Parameter<T>*> out;
    for (auto& l : layers_)
        for (auto* p : l->parameters()) out.push_back(p);
    return out;
}

template <typename T>
std::size_t Network<T>::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_)
        for (auto* p : l->parameters()) n += p->value.size();
    return n;
}

template <typename T>
Shape Network<T>::output_shape() const {
    return layers_.back()->output_shape();
}

template <typename T>
std::vector<Shape> Network<T>::layer_output_shapes() const {
    std::vector<Shape> out;
    for (const auto& l : layers_) out.push_back(l->output_shape());
    return out;
}

template <typename T>
void Network<T>::check(const Tensor<T>& t, std::size_t layer, const char* what) const {
    if (!t.all_finite())
        throw NumericError("non-finite " + std::string(what) + " at layer " + std::to_string(layer) + " (" +
                           kind_name(specs_[layer].kind) + ")");
}

template class Network<float>;
template class Network<double>;

}  // namespace seilab::nn
