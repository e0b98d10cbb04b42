#include "seilab/nn/tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace seilab::nn {

std::size_t shape_size(const Shape& s) {
    std::size_t n = 1;
    for (auto d : s) n *= d;
    return s.empty() ? 0 : n;
}

std::string shape_str(const Shape& s) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
    os << "]";
    return os.str();
}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_size(shape_) != data_.size())
        throw std::invalid_argument("Tensor: shape " + shape_str(shape_) + " does not match " +
                                    std::to_string(data_.size()) + " elements");
}

template <typename T>
void Tensor<T>::reshape(Shape shape) {
    if (shape_size(shape) != data_.size())
        throw std::invalid_argument("Tensor::reshape: " + shape_str(shape_) + " -> " + shape_str(shape));
    shape_ = std::move(shape);
}

template <typename T>
void Tensor<T>::resize(Shape shape) {
    data_.resize(shape_size(shape));
    shape_ = std::move(shape);
}

template <typename T>
void Tensor<T>::fill(T v) {
    std::fill(data_.begin(), data_.end(), v);
}

template <typename T>
bool Tensor<T>::all_finite() const {
    for (const auto& v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

template <typename T>
Tensor<T> slice_batch(const Tensor<T>& t, std::size_t first, std::size_t count) {
    if (first + count > batch_of(t)) throw std::out_of_range("slice_batch: range exceeds batch");
    Shape s = t.shape();
    const std::size_t per = t.size() / s[0];
    s[0] = count;
    std::vector<T> d(t.data() + first * per, t.data() + (first + count) * per);
    return Tensor<T>(std::move(s), std::move(d));
}

template class Tensor<float>;
template class Tensor<double>;
template Tensor<float> slice_batch(const Tensor<float>&, std::size_t, std::size_t);
template Tensor<double> slice_batch(const Tensor<double>&, std::size_t, std::size_t);

}  // namespace seilab::nn
