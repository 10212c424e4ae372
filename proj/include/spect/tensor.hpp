#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "spect/types.hpp"

namespace spect {

// Shape-tagged dense array, row major. 4-D tensors are (batch, channels,
// height, width); dense layers see 2-D (batch, features).
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
        data.assign(static_cast<size_t>(count(shape)), 0.0);
    }

    static int64_t count(const std::vector<int>& s) {
        int64_t c = 1;
        for (int d : s) {
            if (d <= 0) throw DataError("tensor: nonpositive dimension");
            c *= d;
        }
        return c;
    }

    int dim(size_t i) const { return shape[i]; }
    size_t size() const { return data.size(); }

    // 4-D accessor
    double& at(int b, int c, int y, int x) {
        return data[((static_cast<size_t>(b) * shape[1] + c) * shape[2] + y) * shape[3] + x];
    }
    double at(int b, int c, int y, int x) const {
        return data[((static_cast<size_t>(b) * shape[1] + c) * shape[2] + y) * shape[3] + x];
    }

    std::string shape_str() const {
        std::string s = "(";
        for (size_t i = 0; i < shape.size(); ++i)
            s += (i ? "," : "") + std::to_string(shape[i]);
        return s + ")";
    }
};

}  // namespace spect
