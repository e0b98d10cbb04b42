#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace seilab::nn {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& s);
std::string shape_str(const Shape& s);

/// Dense row-major tensor. Batched activations use [N, C, H, W] for feature
/// maps and [N, D] for vectors.
template <typename T>
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape, T fill = T(0)) : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}
    Tensor(Shape shape, std::vector<T> data);

    const Shape& shape() const { return shape_; }
    std::size_t size() const { return data_.size(); }
    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t i) const { return shape_[i]; }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::span<T> values() { return data_; }
    std::span<const T> values() const { return data_; }
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    /// Reinterprets the buffer; the element count must not change.
    void reshape(Shape shape);
    /// Resizes (contents unspecified when the size changes) and sets the shape.
    void resize(Shape shape);
    void fill(T v);
    bool all_finite() const;

    template <typename U>
    Tensor<U> cast() const {
        std::vector<U> d(data_.begin(), data_.end());
        return Tensor<U>(shape_, std::move(d));
    }

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    Shape shape_;
    std::vector<T> data_;
};

/// Number of examples (leading extent) of a batch tensor.
template <typename T>
std::size_t batch_of(const Tensor<T>& t) {
    return t.rank() == 0 ? 0 : t.dim(0);
}

/// Rows [first, first + count) of a batch tensor.
template <typename T>
Tensor<T> slice_batch(const Tensor<T>& t, std::size_t first, std::size_t count);

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace seilab::nn
