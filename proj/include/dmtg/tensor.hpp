#pragma once

// Minimal dense tensor value type: a shape plus contiguous fp64 storage.
// 64-bit floats throughout; the model is desk-scale and tight gradient-check
// tolerances matter more than speed.

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmtg {

struct TensorBuf {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    TensorBuf() = default;
    explicit TensorBuf(std::vector<std::size_t> s) : shape(std::move(s)) {
        data.assign(count(shape), 0.0);
    }

    static std::size_t count(const std::vector<std::size_t>& s) {
        return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
    }

    [[nodiscard]] std::size_t size() const { return data.size(); }
    [[nodiscard]] std::size_t dim(std::size_t i) const { return shape.at(i); }

    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }

    // (batch, channels, length) indexing
    double& at3(std::size_t b, std::size_t c, std::size_t l) {
        return data[(b * shape[1] + c) * shape[2] + l];
    }
    [[nodiscard]] double at3(std::size_t b, std::size_t c, std::size_t l) const {
        return data[(b * shape[1] + c) * shape[2] + l];
    }
    // (rows, cols) indexing
    double& at2(std::size_t r, std::size_t c) { return data[r * shape[1] + c]; }
    [[nodiscard]] double at2(std::size_t r, std::size_t c) const { return data[r * shape[1] + c]; }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }

    void require_shape(const std::vector<std::size_t>& expect, const std::string& who) const {
        if (shape != expect) {
            std::string msg = who + ": shape mismatch, got (";
            for (auto d : shape) msg += std::to_string(d) + ",";
            msg += ") expected (";
            for (auto d : expect) msg += std::to_string(d) + ",";
            msg += ")";
            throw std::invalid_argument(msg);
        }
    }
};

}  // namespace dmtg
