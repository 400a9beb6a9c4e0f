#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace xmodal {

using Shape = std::vector<int>;

inline int64_t shape_numel(const Shape& s) {
    int64_t n = 1;
    for (int d : s) {
        if (d < 0) throw DimensionError("negative dimension in shape");
        n *= d;
    }
    return n;
}

inline std::string shape_str(const Shape& s) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
    os << "]";
    return os.str();
}

// Dense row-major tensor. Rank 2 carries most of the model; rank 4 [B,H,W,C]
// is used by the convolutional stack.
template <typename T>
struct TensorT {
    Shape shape;
    std::vector<T> data;
    bool requires_grad = false;

    TensorT() = default;
    explicit TensorT(Shape s, T fill = T(0))
        : shape(std::move(s)), data(static_cast<size_t>(shape_numel(shape)), fill) {}

    static TensorT zeros(Shape s) { return TensorT(std::move(s)); }
    static TensorT full(Shape s, T v) { return TensorT(std::move(s), v); }
    static TensorT scalar(T v) {
        TensorT t(Shape{1});
        t.data[0] = v;
        return t;
    }
    static TensorT from(Shape s, std::vector<T> values) {
        TensorT t;
        t.shape = std::move(s);
        if (shape_numel(t.shape) != static_cast<int64_t>(values.size()))
            throw DimensionError("element count does not match shape " + shape_str(t.shape));
        t.data = std::move(values);
        return t;
    }
    static TensorT randu(Shape s, Rng& rng, T lo, T hi) {
        TensorT t(std::move(s));
        for (auto& x : t.data) x = static_cast<T>(rng.uniform(lo, hi));
        return t;
    }
    static TensorT randn(Shape s, Rng& rng, T stddev = T(1)) {
        TensorT t(std::move(s));
        for (auto& x : t.data) x = static_cast<T>(rng.normal() * stddev);
        return t;
    }
    // Uniform Glorot scaling from the matrix fan-in/fan-out.
    static TensorT glorot(int rows, int cols, Rng& rng) {
        const T limit = std::sqrt(T(6) / static_cast<T>(rows + cols));
        return randu(Shape{rows, cols}, rng, -limit, limit);
    }

    int rank() const { return static_cast<int>(shape.size()); }
    int64_t numel() const { return static_cast<int64_t>(data.size()); }
    bool empty() const { return data.empty(); }

    int rows() const {
        if (shape.empty()) return 1;
        return shape[0];
    }
    int cols() const {
        if (shape.size() < 2) return shape.empty() ? 1 : 1;
        int64_t c = 1;
        for (size_t i = 1; i < shape.size(); ++i) c *= shape[i];
        return static_cast<int>(c);
    }

    T& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols() + c]; }
    T operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols() + c]; }
    T& operator[](int64_t i) { return data[static_cast<size_t>(i)]; }
    T operator[](int64_t i) const { return data[static_cast<size_t>(i)]; }

    T item() const {
        if (numel() != 1) throw DimensionError("item() requires a scalar tensor");
        return data[0];
    }

    void fill(T v) { std::fill(data.begin(), data.end(), v); }

    bool all_finite() const {
        for (T x : data)
            if (!std::isfinite(static_cast<double>(x))) return false;
        return true;
    }

    bool same_shape(const TensorT& o) const { return shape == o.shape; }

    template <typename U>
    TensorT<U> cast() const {
        TensorT<U> out;
        out.shape = shape;
        out.requires_grad = requires_grad;
        out.data.resize(data.size());
        for (size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
        return out;
    }
};

using Tensor = TensorT<double>;
using TensorF = TensorT<float>;

// Named parameter: value plus accumulated gradient of identical shape.
template <typename T>
struct ParamT {
    std::string name;
    TensorT<T> value;
    TensorT<T> grad;

    ParamT() = default;
    ParamT(std::string n, TensorT<T> v) : name(std::move(n)), value(std::move(v)) {
        value.requires_grad = true;
        grad = TensorT<T>::zeros(value.shape);
    }
    void zero_grad() { grad.fill(T(0)); }
};

}  // namespace xmodal
