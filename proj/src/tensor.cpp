#include "mlmap/tensor.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mlmap {

namespace {

using EigenMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using EigenMapMut = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
}

template <typename F>
Tensor unary(const Tensor& a, F f) {
    Tensor out(a.rows, a.cols);
    for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = f(a.data[i]);
    return out;
}

}  // namespace

Tensor::Tensor(std::size_t r, std::size_t c, std::vector<double> d) : rows(r), cols(c), data(std::move(d)) {
    if (data.size() != r * c) throw std::invalid_argument("Tensor: data length does not match shape");
}

Tensor Tensor::full(std::size_t r, std::size_t c, double v) {
    Tensor t(r, c);
    std::fill(t.data.begin(), t.data.end(), v);
    return t;
}

Tensor Tensor::row(std::vector<double> v) {
    std::size_t n = v.size();
    return Tensor(1, n, std::move(v));
}

Tensor Tensor::column(std::vector<double> v) {
    std::size_t n = v.size();
    return Tensor(n, 1, std::move(v));
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[" << rows << "x" << cols << "]";
    return os.str();
}

bool Tensor::all_finite() const {
    for (double v : data)
        if (!std::isfinite(v)) return false;
    return true;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols != b.rows) shape_error("matmul", a, b);
    Tensor out(a.rows, b.cols);
    EigenMap ma(a.data.data(), static_cast<Eigen::Index>(a.rows), static_cast<Eigen::Index>(a.cols));
    EigenMap mb(b.data.data(), static_cast<Eigen::Index>(b.rows), static_cast<Eigen::Index>(b.cols));
    EigenMapMut mo(out.data.data(), static_cast<Eigen::Index>(out.rows), static_cast<Eigen::Index>(out.cols));
    mo.noalias() = ma * mb;
    return out;
}

Tensor transpose(const Tensor& a) {
    Tensor out(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) out(j, i) = a(i, j);
    return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) shape_error("add", a, b);
    Tensor out(a.rows, a.cols);
    for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] + b.data[i];
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) shape_error("sub", a, b);
    Tensor out(a.rows, a.cols);
    for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] - b.data[i];
    return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) shape_error("mul", a, b);
    Tensor out(a.rows, a.cols);
    for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] * b.data[i];
    return out;
}

Tensor scale(const Tensor& a, double s) {
    return unary(a, [s](double v) { return v * s; });
}

Tensor add_rowvec(const Tensor& m, const Tensor& v) {
    if (v.rows != 1 || v.cols != m.cols) shape_error("add_rowvec", m, v);
    Tensor out(m.rows, m.cols);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) out(i, j) = m(i, j) + v.data[j];
    return out;
}

Tensor mul_colvec(const Tensor& m, const Tensor& v) {
    if (v.cols != 1 || v.rows != m.rows) shape_error("mul_colvec", m, v);
    Tensor out(m.rows, m.cols);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) out(i, j) = m(i, j) * v.data[i];
    return out;
}

Tensor sigmoid(const Tensor& a) {
    return unary(a, [](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Tensor tanh_t(const Tensor& a) {
    return unary(a, [](double v) { return std::tanh(v); });
}

Tensor softplus(const Tensor& a) {
    // log(1 + exp(x)) written to avoid overflow for large |x|.
    return unary(a, [](double v) { return v > 0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); });
}

Tensor exp_t(const Tensor& a) {
    return unary(a, [](double v) { return std::exp(v); });
}

Tensor log_clamped(const Tensor& a, double floor) {
    return unary(a, [floor](double v) { return std::log(v < floor ? floor : v); });
}

Tensor max_const(const Tensor& a, double floor) {
    return unary(a, [floor](double v) { return v < floor ? floor : v; });
}

Tensor softmax_rows(const Tensor& a) {
    Tensor out(a.rows, a.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        double m = a(i, 0);
        for (std::size_t j = 1; j < a.cols; ++j) m = std::max(m, a(i, j));
        double z = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j) {
            double e = std::exp(a(i, j) - m);
            out(i, j) = e;
            z += e;
        }
        for (std::size_t j = 0; j < a.cols; ++j) out(i, j) /= z;
    }
    return out;
}

Tensor logsumexp_rows(const Tensor& a) {
    Tensor out(a.rows, 1);
    for (std::size_t i = 0; i < a.rows; ++i) {
        double m = a(i, 0);
        for (std::size_t j = 1; j < a.cols; ++j) m = std::max(m, a(i, j));
        double z = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j) z += std::exp(a(i, j) - m);
        out(i, 0) = m + std::log(z);
    }
    return out;
}

Tensor layer_norm_rows(const Tensor& a, const Tensor& gain, const Tensor& bias, double eps) {
    if (gain.rows != 1 || gain.cols != a.cols) shape_error("layer_norm_rows", a, gain);
    if (bias.rows != 1 || bias.cols != a.cols) shape_error("layer_norm_rows", a, bias);
    Tensor out(a.rows, a.cols);
    const double n = static_cast<double>(a.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        double mean = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j) mean += a(i, j);
        mean /= n;
        double var = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j) {
            double d = a(i, j) - mean;
            var += d * d;
        }
        var /= n;
        double inv = 1.0 / std::sqrt(var + eps);
        for (std::size_t j = 0; j < a.cols; ++j)
            out(i, j) = (a(i, j) - mean) * inv * gain.data[j] + bias.data[j];
    }
    return out;
}

Tensor concat_cols(const std::vector<const Tensor*>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
    std::size_t rows = parts[0]->rows;
    std::size_t cols = 0;
    for (const Tensor* p : parts) {
        if (p->rows != rows) throw std::invalid_argument("concat_cols: row mismatch");
        cols += p->cols;
    }
    Tensor out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        std::size_t off = 0;
        for (const Tensor* p : parts) {
            for (std::size_t j = 0; j < p->cols; ++j) out(i, off + j) = (*p)(i, j);
            off += p->cols;
        }
    }
    return out;
}

Tensor slice_cols(const Tensor& a, std::size_t start, std::size_t len) {
    if (start + len > a.cols) throw std::invalid_argument("slice_cols: out of range");
    Tensor out(a.rows, len);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < len; ++j) out(i, j) = a(i, start + j);
    return out;
}

Tensor row_sum(const Tensor& a) {
    Tensor out(a.rows, 1);
    for (std::size_t i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j) s += a(i, j);
        out(i, 0) = s;
    }
    return out;
}

Tensor col_sum(const Tensor& a) {
    Tensor out(1, a.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) out.data[j] += a(i, j);
    return out;
}

double sum_all(const Tensor& a) {
    double s = 0.0;
    for (double v : a.data) s += v;
    return s;
}

Tensor pick_cols(const Tensor& a, const std::vector<int>& idx) {
    if (idx.size() != a.rows) throw std::invalid_argument("pick_cols: index count mismatch");
    Tensor out(a.rows, 1);
    for (std::size_t i = 0; i < a.rows; ++i) {
        int j = idx[i];
        if (j < 0 || static_cast<std::size_t>(j) >= a.cols) throw std::out_of_range("pick_cols: index out of range");
        out(i, 0) = a(i, static_cast<std::size_t>(j));
    }
    return out;
}

Tensor gather_rows(const Tensor& table, const std::vector<int>& idx) {
    Tensor out(idx.size(), table.cols);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        int r = idx[i];
        if (r < 0 || static_cast<std::size_t>(r) >= table.rows) throw std::out_of_range("gather_rows: index out of range");
        for (std::size_t j = 0; j < table.cols; ++j) out(i, j) = table(static_cast<std::size_t>(r), j);
    }
    return out;
}

Tensor group_sum_cols(const Tensor& a, std::size_t group) {
    if (group == 0 || a.cols % group != 0) throw std::invalid_argument("group_sum_cols: bad group size");
    std::size_t out_cols = a.cols / group;
    Tensor out(a.rows, out_cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < out_cols; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < group; ++k) s += a(i, j * group + k);
            out(i, j) = s;
        }
    return out;
}

}  // namespace mlmap
