#pragma once

#include "mlmap/tensor.hpp"

#include <functional>
#include <string>
#include <vector>

namespace mlmap {

class Tape;

// Handle to a node on a tape. Cheap to copy; valid until Tape::clear().
struct Var {
    Tape* tape = nullptr;
    int idx = -1;
    const Tensor& value() const;
};

// Reverse-mode tape. One tape per forward/backward pass, single-threaded.
class Tape {
public:
    struct Node {
        Tensor value;
        Tensor grad;  // sized on first accumulation
        std::function<void(Tape&, const Tensor&)> back;
        const char* tag = "";
        bool requires_grad = false;
    };

    // tracked parameter input
    Var leaf(const Tensor& t, const char* tag = "leaf");
    // untracked data input
    Var constant(Tensor t, const char* tag = "const");

    Var matmul(Var a, Var b);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var scale(Var a, double s);
    Var add_rowvec(Var m, Var v);
    Var mul_colvec(Var m, Var v);
    Var sigmoid(Var a);
    Var tanh_v(Var a);
    Var softplus(Var a);
    Var log_clamped(Var a, double floor);
    Var max_const(Var a, double floor);
    Var reciprocal(Var a);
    Var softmax_rows(Var a);
    Var logsumexp_rows(Var a);
    Var layer_norm_rows(Var a, Var gain, Var bias, double eps);
    Var concat_cols(const std::vector<Var>& parts);
    Var slice_cols(Var a, std::size_t start, std::size_t len);
    Var row_sum(Var a);
    Var sum_to_scalar(Var a);
    Var pick_cols(Var a, std::vector<int> idx);
    Var gather_rows(Var table, std::vector<int> idx);
    Var group_sum_cols(Var a, std::size_t group);

    // Runs the backward sweep from a 1x1 loss node.
    void backward(Var loss);

    const Tensor& value(Var v) const { return nodes_[v.idx].value; }
    // Gradient of the last backward()'s loss w.r.t. v; zeros if untouched.
    Tensor gradient(Var v) const;

    std::size_t node_count() const { return nodes_.size(); }
    const Node& node(std::size_t i) const { return nodes_[i]; }

    // Name and shape of the first non-finite node value, empty if none.
    std::string first_non_finite() const;

    void clear();

private:
    friend struct Var;
    std::vector<Node> nodes_;

    int push(Tensor value, const char* tag, bool requires_grad);
    void accumulate(int idx, const Tensor& g);
    Var unary(Var a, Tensor value, const char* tag, std::function<double(double, double)> dfdx_from_xy);
};

}  // namespace mlmap
