#pragma once

#include "mlmap/tensor.hpp"

#include <string>
#include <vector>

namespace mlmap {

// Per-joint standardization statistics fitted on training data.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> std_dev;  // population std, floored at kStdFloor

    static constexpr double kStdFloor = 1e-8;

    std::size_t joints() const { return mean.size(); }

    // Fits over every row of every input matrix (active frames only; callers
    // pass unpadded sequences). Throws when the input holds no frames.
    static Standardizer fit(const std::vector<const Tensor*>& sequences);
    static Standardizer fit(const std::vector<Tensor>& sequences);

    // (x - mean) / std per joint; when the matrix has one extra column it is
    // treated as the active flag and passed through untouched.
    Tensor apply(const Tensor& seq) const;
    // exact inverse of apply
    Tensor invert(const Tensor& seq) const;

    std::string to_json() const;
    static Standardizer from_json(const std::string& text);
};

}  // namespace mlmap
