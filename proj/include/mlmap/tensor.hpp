#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mlmap {

// Dense 2-D row-major tensor of doubles. Vectors are represented as 1xN
// (row vectors) or Nx1 (column vectors) as noted per use.
struct Tensor {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    Tensor(std::size_t r, std::size_t c, std::vector<double> d);

    static Tensor zeros(std::size_t r, std::size_t c) { return Tensor(r, c); }
    static Tensor full(std::size_t r, std::size_t c, double v);
    static Tensor row(std::vector<double> v);
    static Tensor column(std::vector<double> v);

    std::size_t size() const { return rows * cols; }
    bool empty() const { return data.empty(); }

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double& operator()(std::size_t r, std::size_t c) { return at(r, c); }
    double operator()(std::size_t r, std::size_t c) const { return at(r, c); }

    bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
    std::string shape_str() const;

    bool all_finite() const;
};

// ---- kernels (pure, allocate the result) ----

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);

// m + broadcast of a 1xC row vector over every row of m.
Tensor add_rowvec(const Tensor& m, const Tensor& v);
// each row of m scaled by the matching entry of an Rx1 column vector.
Tensor mul_colvec(const Tensor& m, const Tensor& v);

Tensor sigmoid(const Tensor& a);
Tensor tanh_t(const Tensor& a);
Tensor softplus(const Tensor& a);
Tensor exp_t(const Tensor& a);
// log(max(x, floor)); keeps the loss finite when probabilities underflow.
Tensor log_clamped(const Tensor& a, double floor);
Tensor max_const(const Tensor& a, double floor);

// row-wise softmax with max subtraction.
Tensor softmax_rows(const Tensor& a);
// row-wise log(sum(exp(x))) as an Rx1 column.
Tensor logsumexp_rows(const Tensor& a);
// row-wise layer normalization: (x - mean) / sqrt(var + eps) * gain + bias,
// population variance, gain/bias are 1xC.
Tensor layer_norm_rows(const Tensor& a, const Tensor& gain, const Tensor& bias, double eps);

Tensor concat_cols(const std::vector<const Tensor*>& parts);
Tensor slice_cols(const Tensor& a, std::size_t start, std::size_t len);

Tensor row_sum(const Tensor& a);  // Rx1
Tensor col_sum(const Tensor& a);  // 1xC
double sum_all(const Tensor& a);

// result(i, 0) = a(i, idx[i])
Tensor pick_cols(const Tensor& a, const std::vector<int>& idx);
// result row i = table row idx[i]
Tensor gather_rows(const Tensor& table, const std::vector<int>& idx);
// sums each contiguous block of `group` columns: RxC -> Rx(C/group)
Tensor group_sum_cols(const Tensor& a, std::size_t group);

}  // namespace mlmap
