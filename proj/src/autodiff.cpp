#include "mlmap/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace mlmap {

const Tensor& Var::value() const { return tape->value(*this); }

int Tape::push(Tensor value, const char* tag, bool requires_grad) {
    Node n;
    n.value = std::move(value);
    n.tag = tag;
    n.requires_grad = requires_grad;
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

void Tape::accumulate(int idx, const Tensor& g) {
    Node& n = nodes_[idx];
    if (!n.requires_grad) return;
    if (n.grad.empty()) n.grad = Tensor::zeros(n.value.rows, n.value.cols);
    for (std::size_t i = 0; i < g.data.size(); ++i) n.grad.data[i] += g.data[i];
}

Var Tape::leaf(const Tensor& t, const char* tag) { return Var{this, push(t, tag, true)}; }

Var Tape::constant(Tensor t, const char* tag) { return Var{this, push(std::move(t), tag, false)}; }

Var Tape::unary(Var a, Tensor value, const char* tag, std::function<double(double, double)> dfdx_from_xy) {
    bool rg = nodes_[a.idx].requires_grad;
    int out = push(std::move(value), tag, rg);
    if (rg) {
        int ai = a.idx;
        nodes_[out].back = [ai, out, d = std::move(dfdx_from_xy)](Tape& t, const Tensor& g) {
            const Tensor& x = t.nodes_[ai].value;
            const Tensor& y = t.nodes_[out].value;
            Tensor gx(x.rows, x.cols);
            for (std::size_t i = 0; i < x.data.size(); ++i) gx.data[i] = g.data[i] * d(x.data[i], y.data[i]);
            t.accumulate(ai, gx);
        };
    }
    return Var{this, out};
}

Var Tape::matmul(Var a, Var b) {
    bool rg = nodes_[a.idx].requires_grad || nodes_[b.idx].requires_grad;
    int out = push(mlmap::matmul(nodes_[a.idx].value, nodes_[b.idx].value), "matmul", rg);
    if (rg) {
        int ai = a.idx, bi = b.idx;
        nodes_[out].back = [ai, bi](Tape& t, const Tensor& g) {
            t.accumulate(ai, mlmap::matmul(g, transpose(t.nodes_[bi].value)));
            t.accumulate(bi, mlmap::matmul(transpose(t.nodes_[ai].value), g));
        };
    }
    return Var{this, out};
}

Var Tape::add(Var a, Var b) {
    bool rg = nodes_[a.idx].requires_grad || nodes_[b.idx].requires_grad;
    int out = push(mlmap::add(nodes_[a.idx].value, nodes_[b.idx].value), "add", rg);
    if (rg) {
        int ai = a.idx, bi = b.idx;
        nodes_[out].back = [ai, bi](Tape& t, const Tensor& g) {
            t.accumulate(ai, g);
            t.accumulate(bi, g);
        };
    }
    return Var{this, out};
}

Var Tape::sub(Var a, Var b) {
    bool rg = nodes_[a.idx].requires_grad || nodes_[b.idx].requires_grad;
    int out = push(mlmap::sub(nodes_[a.idx].value, nodes_[b.idx].value), "sub", rg);
    if (rg) {
        int ai = a.idx, bi = b.idx;
        nodes_[out].back = [ai, bi](Tape& t, const Tensor& g) {
            t.accumulate(ai, g);
            t.accumulate(bi, mlmap::scale(g, -1.0));
        };
    }
    return Var{this, out};
}

Var Tape::mul(Var a, Var b) {
    bool rg = nodes_[a.idx].requires_grad || nodes_[b.idx].requires_grad;
    int out = push(mlmap::mul(nodes_[a.idx].value, nodes_[b.idx].value), "mul", rg);
    if (rg) {
        int ai = a.idx, bi = b.idx;
        nodes_[out].back = [ai, bi](Tape& t, const Tensor& g) {
            t.accumulate(ai, mlmap::mul(g, t.nodes_[bi].value));
            t.accumulate(bi, mlmap::mul(g, t.nodes_[ai].value));
        };
    }
    return Var{this, out};
}

Var Tape::scale(Var a, double s) {
    bool rg = nodes_[a.idx].requires_grad;
    int out = push(mlmap::scale(nodes_[a.idx].value, s), "scale", rg);
    if (rg) {
        int ai = a.idx;
        nodes_[out].back = [ai, s](Tape& t, const Tensor& g) { t.accumulate(ai, mlmap::scale(g, s)); };
    }
    return Var{this, out};
}

Var Tape::add_rowvec(Var m, Var v) {
    bool rg = nodes_[m.idx].requires_grad || nodes_[v.idx].requires_grad;
    int out = push(mlmap::add_rowvec(nodes_[m.idx].value, nodes_[v.idx].value), "add_rowvec", rg);
    if (rg) {
        int mi = m.idx, vi = v.idx;
        nodes_[out].back = [mi, vi](Tape& t, const Tensor& g) {
            t.accumulate(mi, g);
            t.accumulate(vi, col_sum(g));
        };
    }
    return Var{this, out};
}

Var Tape::mul_colvec(Var m, Var v) {
    bool rg = nodes_[m.idx].requires_grad || nodes_[v.idx].requires_grad;
    int out = push(mlmap::mul_colvec(nodes_[m.idx].value, nodes_[v.idx].value), "mul_colvec", rg);
    if (rg) {
        int mi = m.idx, vi = v.idx;
        nodes_[out].back = [mi, vi](Tape& t, const Tensor& g) {
            t.accumulate(mi, mlmap::mul_colvec(g, t.nodes_[vi].value));
            t.accumulate(vi, mlmap::row_sum(mlmap::mul(g, t.nodes_[mi].value)));
        };
    }
    return Var{this, out};
}

Var Tape::sigmoid(Var a) {
    return unary(a, mlmap::sigmoid(nodes_[a.idx].value), "sigmoid",
                 [](double, double y) { return y * (1.0 - y); });
}

Var Tape::tanh_v(Var a) {
    return unary(a, mlmap::tanh_t(nodes_[a.idx].value), "tanh",
                 [](double, double y) { return 1.0 - y * y; });
}

Var Tape::softplus(Var a) {
    return unary(a, mlmap::softplus(nodes_[a.idx].value), "softplus",
                 [](double x, double) { return 1.0 / (1.0 + std::exp(-x)); });
}

Var Tape::log_clamped(Var a, double floor) {
    return unary(a, mlmap::log_clamped(nodes_[a.idx].value, floor), "log_clamped",
                 [floor](double x, double) { return x >= floor ? 1.0 / x : 0.0; });
}

Var Tape::max_const(Var a, double floor) {
    return unary(a, mlmap::max_const(nodes_[a.idx].value, floor), "max_const",
                 [floor](double x, double) { return x > floor ? 1.0 : 0.0; });
}

Var Tape::reciprocal(Var a) {
    Tensor v(nodes_[a.idx].value.rows, nodes_[a.idx].value.cols);
    for (std::size_t i = 0; i < v.data.size(); ++i) v.data[i] = 1.0 / nodes_[a.idx].value.data[i];
    return unary(a, std::move(v), "reciprocal", [](double, double y) { return -y * y; });
}

Var Tape::softmax_rows(Var a) {
    bool rg = nodes_[a.idx].requires_grad;
    int out = push(mlmap::softmax_rows(nodes_[a.idx].value), "softmax", rg);
    if (rg) {
        int ai = a.idx, oi = out;
        nodes_[out].back = [ai, oi](Tape& t, const Tensor& g) {
            const Tensor& y = t.nodes_[oi].value;
            Tensor gx(y.rows, y.cols);
            for (std::size_t i = 0; i < y.rows; ++i) {
                double dot = 0.0;
                for (std::size_t j = 0; j < y.cols; ++j) dot += g(i, j) * y(i, j);
                for (std::size_t j = 0; j < y.cols; ++j) gx(i, j) = y(i, j) * (g(i, j) - dot);
            }
            t.accumulate(ai, gx);
        };
    }
    return Var{this, out};
}

Var Tape::logsumexp_rows(Var a) {
    bool rg = nodes_[a.idx].requires_grad;
    int out = push(mlmap::logsumexp_rows(nodes_[a.idx].value), "logsumexp", rg);
    if (rg) {
        int ai = a.idx;
        nodes_[out].back = [ai](Tape& t, const Tensor& g) {
            Tensor sm = mlmap::softmax_rows(t.nodes_[ai].value);
            t.accumulate(ai, mlmap::mul_colvec(sm, g));
        };
    }
    return Var{this, out};
}

Var Tape::layer_norm_rows(Var a, Var gain, Var bias, double eps) {
    bool rg = nodes_[a.idx].requires_grad || nodes_[gain.idx].requires_grad || nodes_[bias.idx].requires_grad;
    int out = push(mlmap::layer_norm_rows(nodes_[a.idx].value, nodes_[gain.idx].value, nodes_[bias.idx].value, eps),
                   "layer_norm", rg);
    if (rg) {
        int ai = a.idx, gi = gain.idx, bi = bias.idx;
        nodes_[out].back = [ai, gi, bi, eps](Tape& t, const Tensor& g) {
            const Tensor& x = t.nodes_[ai].value;
            const Tensor& gn = t.nodes_[gi].value;
            const double n = static_cast<double>(x.cols);
            Tensor gx(x.rows, x.cols);
            Tensor ggain(1, x.cols);
            Tensor gbias(1, x.cols);
            for (std::size_t i = 0; i < x.rows; ++i) {
                double mean = 0.0;
                for (std::size_t j = 0; j < x.cols; ++j) mean += x(i, j);
                mean /= n;
                double var = 0.0;
                for (std::size_t j = 0; j < x.cols; ++j) {
                    double d = x(i, j) - mean;
                    var += d * d;
                }
                var /= n;
                double inv = 1.0 / std::sqrt(var + eps);
                double mean_a = 0.0, mean_ax = 0.0;
                for (std::size_t j = 0; j < x.cols; ++j) {
                    double xhat = (x(i, j) - mean) * inv;
                    double aj = g(i, j) * gn.data[j];
                    mean_a += aj;
                    mean_ax += aj * xhat;
                    ggain.data[j] += g(i, j) * xhat;
                    gbias.data[j] += g(i, j);
                }
                mean_a /= n;
                mean_ax /= n;
                for (std::size_t j = 0; j < x.cols; ++j) {
                    double xhat = (x(i, j) - mean) * inv;
                    double aj = g(i, j) * gn.data[j];
                    gx(i, j) = (aj - mean_a - xhat * mean_ax) * inv;
                }
            }
            t.accumulate(ai, gx);
            t.accumulate(gi, ggain);
            t.accumulate(bi, gbias);
        };
    }
    return Var{this, out};
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
    std::vector<const Tensor*> ptrs;
    std::vector<int> idxs;
    bool rg = false;
    for (Var p : parts) {
        ptrs.push_back(&nodes_[p.idx].value);
        idxs.push_back(p.idx);
        rg = rg || nodes_[p.idx].requires_grad;
    }
    int out = push(mlmap::concat_cols(ptrs), "concat", rg);
    if (rg) {
        nodes_[out].back = [idxs](Tape& t, const Tensor& g) {
            std::size_t off = 0;
            for (int pi : idxs) {
                std::size_t w = t.nodes_[pi].value.cols;
                t.accumulate(pi, mlmap::slice_cols(g, off, w));
                off += w;
            }
        };
    }
    return Var{this, out};
}

Var Tape::slice_cols(Var a, std::size_t start, std::size_t len) {
    bool rg = nodes_[a.idx].requires_grad;
    int out = push(mlmap::slice_cols(nodes_[a.idx].value, start, len), "slice", rg);
    if (rg) {
        int ai = a.idx;
        nodes_[out].back = [ai, start, len](Tape& t, const Tensor& g) {
            const Tensor& x = t.nodes_[ai].value;
            Tensor gx(x.rows, x.cols);
            for (std::size_t i = 0; i < g.rows; ++i)
                for (std::size_t j = 0; j < len; ++j) gx(i, start + j) = g(i, j);
            t.accumulate(ai, gx);
        };
    }
    return Var{this, out};
}

Var Tape::row_sum(Var a) {
    bool rg = nodes_[a.idx].requires_grad;
    int out = push(mlmap::row_sum(nodes_[a.idx].value), "row_sum", rg);
    if (rg) {
        int ai = a.idx;
        nodes_[out].back = [ai](Tape& t, const Tensor& g) {
            const Tensor& x = t.nodes_[ai].value;
            Tensor gx(x.rows, x.cols);
            for (std::size_t i = 0; i < x.rows; ++i)
                for (std::size_t j = 0; j < x.cols; ++j) gx(i, j) = g(i, 0);
            t.accumulate(ai, gx);
        };
    }
    return Var{this, out};
}

Var Tape::sum_to_scalar(Var a) {
    bool rg = nodes_[a.idx].requires_grad;
    Tensor v(1, 1);
    v(0, 0) = sum_all(nodes_[a.idx].value);
    int out = push(std::move(v), "sum", rg);
    if (rg) {
        int ai = a.idx;
        nodes_[out].back = [ai](Tape& t, const Tensor& g) {
            const Tensor& x = t.nodes_[ai].value;
            t.accumulate(ai, Tensor::full(x.rows, x.cols, g(0, 0)));
        };
    }
    return Var{this, out};
}

Var Tape::pick_cols(Var a, std::vector<int> idx) {
    bool rg = nodes_[a.idx].requires_grad;
    int out = push(mlmap::pick_cols(nodes_[a.idx].value, idx), "pick", rg);
    if (rg) {
        int ai = a.idx;
        nodes_[out].back = [ai, idx = std::move(idx)](Tape& t, const Tensor& g) {
            const Tensor& x = t.nodes_[ai].value;
            Tensor gx(x.rows, x.cols);
            for (std::size_t i = 0; i < x.rows; ++i) gx(i, static_cast<std::size_t>(idx[i])) = g(i, 0);
            t.accumulate(ai, gx);
        };
    }
    return Var{this, out};
}

Var Tape::gather_rows(Var table, std::vector<int> idx) {
    bool rg = nodes_[table.idx].requires_grad;
    int out = push(mlmap::gather_rows(nodes_[table.idx].value, idx), "gather", rg);
    if (rg) {
        int ti = table.idx;
        nodes_[out].back = [ti, idx = std::move(idx)](Tape& t, const Tensor& g) {
            const Tensor& tab = t.nodes_[ti].value;
            Tensor gt(tab.rows, tab.cols);
            for (std::size_t i = 0; i < idx.size(); ++i)
                for (std::size_t j = 0; j < tab.cols; ++j)
                    gt(static_cast<std::size_t>(idx[i]), j) += g(i, j);
            t.accumulate(ti, gt);
        };
    }
    return Var{this, out};
}

Var Tape::group_sum_cols(Var a, std::size_t group) {
    bool rg = nodes_[a.idx].requires_grad;
    int out = push(mlmap::group_sum_cols(nodes_[a.idx].value, group), "group_sum", rg);
    if (rg) {
        int ai = a.idx;
        nodes_[out].back = [ai, group](Tape& t, const Tensor& g) {
            const Tensor& x = t.nodes_[ai].value;
            Tensor gx(x.rows, x.cols);
            for (std::size_t i = 0; i < g.rows; ++i)
                for (std::size_t j = 0; j < g.cols; ++j)
                    for (std::size_t k = 0; k < group; ++k) gx(i, j * group + k) = g(i, j);
            t.accumulate(ai, gx);
        };
    }
    return Var{this, out};
}

void Tape::backward(Var loss) {
    Node& ln = nodes_[loss.idx];
    if (ln.value.rows != 1 || ln.value.cols != 1) throw std::invalid_argument("backward: loss must be 1x1");
    ln.grad = Tensor::full(1, 1, 1.0);
    for (int i = loss.idx; i >= 0; --i) {
        Node& n = nodes_[i];
        if (n.back && !n.grad.empty()) n.back(*this, n.grad);
    }
}

Tensor Tape::gradient(Var v) const {
    const Node& n = nodes_[v.idx];
    if (n.grad.empty()) return Tensor::zeros(n.value.rows, n.value.cols);
    return n.grad;
}

std::string Tape::first_non_finite() const {
    for (const Node& n : nodes_)
        if (!n.value.all_finite()) return std::string(n.tag) + " " + n.value.shape_str();
    return std::string();
}

void Tape::clear() { nodes_.clear(); }

}  // namespace mlmap
