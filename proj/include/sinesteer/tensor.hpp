#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "sinesteer/errors.hpp"

namespace sinesteer {

/// Dense n-dimensional array of doubles, row-major.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;

    static Tensor zeros(std::vector<std::size_t> shape) {
        Tensor t;
        std::size_t n = 1;
        for (std::size_t d : shape) n *= d;
        t.shape = std::move(shape);
        t.data.assign(n, 0.0);
        return t;
    }

    std::size_t size() const { return data.size(); }

    double* ptr() { return data.data(); }
    const double* ptr() const { return data.data(); }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }

    bool same_shape(const Tensor& other) const { return shape == other.shape; }
};

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (!a.same_shape(b)) raise(ErrorCode::ShapeMismatch, std::string("tensor shapes differ in ") + what);
}

}  // namespace sinesteer
