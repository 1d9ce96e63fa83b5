#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gaitgraph/error.hpp"

namespace gaitgraph {

using Shape = std::vector<std::size_t>;

inline std::size_t num_elements(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape);

// Dense row-major array with an optional same-shape gradient buffer.
template <typename T>
class Tensor {
   public:
    using value_type = T;

    Tensor() = default;
    explicit Tensor(Shape shape, T fill = T(0)) : shape_(std::move(shape)), values_(num_elements(shape_), fill) {}
    Tensor(Shape shape, std::vector<T> values) : shape_(std::move(shape)), values_(std::move(values)) {
        if (values_.size() != num_elements(shape_))
            throw ShapeError("value count " + std::to_string(values_.size()) + " does not match shape " +
                             shape_string(shape_));
    }

    const Shape& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    T* data() { return values_.data(); }
    const T* data() const { return values_.data(); }
    std::span<T> values() { return values_; }
    std::span<const T> values() const { return values_; }

    T& operator[](std::size_t i) { return values_[i]; }
    T operator[](std::size_t i) const { return values_[i]; }

    T& at(std::size_t i0, std::size_t i1) { return values_[i0 * shape_[1] + i1]; }
    T at(std::size_t i0, std::size_t i1) const { return values_[i0 * shape_[1] + i1]; }
    T& at(std::size_t i0, std::size_t i1, std::size_t i2, std::size_t i3) {
        return values_[((i0 * shape_[1] + i1) * shape_[2] + i2) * shape_[3] + i3];
    }
    T at(std::size_t i0, std::size_t i1, std::size_t i2, std::size_t i3) const {
        return values_[((i0 * shape_[1] + i1) * shape_[2] + i2) * shape_[3] + i3];
    }

    bool has_grad() const { return !grad_.empty() || values_.empty(); }
    void ensure_grad() {
        if (grad_.size() != values_.size()) grad_.assign(values_.size(), T(0));
    }
    void zero_grad() { std::fill(grad_.begin(), grad_.end(), T(0)); }
    void drop_grad() { grad_.clear(); }
    std::span<T> grad() { return grad_; }
    std::span<const T> grad() const { return grad_; }

    void fill(T value) { std::fill(values_.begin(), values_.end(), value); }

    // Same data, new shape with identical element count.
    Tensor reshaped(Shape shape) const {
        if (num_elements(shape) != values_.size()) throw ShapeError("reshape to " + shape_string(shape) + " changes size");
        return Tensor(std::move(shape), values_);
    }

    template <typename U>
    Tensor<U> cast() const {
        Tensor<U> out(shape_);
        std::transform(values_.begin(), values_.end(), out.data(), [](T v) { return static_cast<U>(v); });
        return out;
    }

    bool operator==(const Tensor& other) const { return shape_ == other.shape_ && values_ == other.values_; }

   private:
    Shape shape_;
    std::vector<T> values_;
    std::vector<T> grad_;
};

template <typename T>
struct Parameter {
    std::string name;
    Tensor<T> tensor;
    bool weight_decay_exempt = false;
};

// Non-learned state that still has to be persisted (batch-norm running stats).
template <typename T>
struct Buffer {
    std::string name;
    Tensor<T>* tensor = nullptr;
};

}  // namespace gaitgraph
