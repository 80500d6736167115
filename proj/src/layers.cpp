#include "mlmap/layers.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace mlmap {

Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Tensor t(fan_in, fan_out);
    for (double& v : t.data) v = rng.uniform(-limit, limit);
    return t;
}

Tensor orthogonal(std::size_t n, Rng& rng) {
    Eigen::MatrixXd a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.gaussian();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd diag = qr.matrixQR().diagonal();
    // fix signs so the decomposition is unique
    for (std::size_t j = 0; j < n; ++j)
        if (diag(static_cast<Eigen::Index>(j)) < 0) q.col(static_cast<Eigen::Index>(j)) *= -1.0;
    Tensor t(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) t(i, j) = q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return t;
}

void GruLayerParams::init(std::size_t in, std::size_t hid, bool ln, Rng& rng) {
    input_dim = in;
    hidden = hid;
    layer_norm = ln;
    wz = glorot_uniform(in, hid, rng);
    uz = orthogonal(hid, rng);
    bz = Tensor::zeros(1, hid);
    wr = glorot_uniform(in, hid, rng);
    ur = orthogonal(hid, rng);
    br = Tensor::zeros(1, hid);
    wh = glorot_uniform(in, hid, rng);
    uh = orthogonal(hid, rng);
    bh = Tensor::zeros(1, hid);
    if (ln) {
        gz = Tensor::full(1, hid, 1.0);
        oz = Tensor::zeros(1, hid);
        gr = Tensor::full(1, hid, 1.0);
        orr = Tensor::zeros(1, hid);
        gh = Tensor::full(1, hid, 1.0);
        oh = Tensor::zeros(1, hid);
    }
}

void GruLayerParams::register_params(ParamRegistry& reg, const std::string& prefix) {
    reg.add(prefix + ".wz", &wz);
    reg.add(prefix + ".uz", &uz);
    reg.add(prefix + ".bz", &bz);
    reg.add(prefix + ".wr", &wr);
    reg.add(prefix + ".ur", &ur);
    reg.add(prefix + ".br", &br);
    reg.add(prefix + ".wh", &wh);
    reg.add(prefix + ".uh", &uh);
    reg.add(prefix + ".bh", &bh);
    if (layer_norm) {
        reg.add(prefix + ".ln.gz", &gz);
        reg.add(prefix + ".ln.oz", &oz);
        reg.add(prefix + ".ln.gr", &gr);
        reg.add(prefix + ".ln.or", &orr);
        reg.add(prefix + ".ln.gh", &gh);
        reg.add(prefix + ".ln.oh", &oh);
    }
}

std::size_t GruLayerParams::param_count() const {
    std::size_t n = 3 * (input_dim * hidden + hidden * hidden + hidden);
    if (layer_norm) n += 6 * hidden;
    return n;
}

Var gru_step(Tape& t, TapeBind& b, const GruLayerParams& p, Var x, Var h) {
    if (x.value().cols != p.input_dim || h.value().cols != p.hidden)
        throw std::invalid_argument("gru_step: dimension mismatch");
    auto gate_pre = [&](const Tensor& w, const Tensor& u, const Tensor& bias, Var state) {
        return t.add_rowvec(t.add(t.matmul(x, b(w)), t.matmul(state, b(u))), b(bias));
    };
    Var pre_z = gate_pre(p.wz, p.uz, p.bz, h);
    Var pre_r = gate_pre(p.wr, p.ur, p.br, h);
    if (p.layer_norm) {
        pre_z = t.layer_norm_rows(pre_z, b(p.gz), b(p.oz), kLayerNormEps);
        pre_r = t.layer_norm_rows(pre_r, b(p.gr), b(p.orr), kLayerNormEps);
    }
    Var z = t.sigmoid(pre_z);
    Var r = t.sigmoid(pre_r);
    Var pre_h = t.add_rowvec(t.add(t.matmul(x, b(p.wh)), t.matmul(t.mul(r, h), b(p.uh))), b(p.bh));
    if (p.layer_norm) pre_h = t.layer_norm_rows(pre_h, b(p.gh), b(p.oh), kLayerNormEps);
    Var cand = t.tanh_v(pre_h);
    // h' = z*h + (1-z)*cand
    return t.add(cand, t.mul(z, t.sub(h, cand)));
}

std::vector<Var> gru_sequence(Tape& t, TapeBind& b, const GruLayerParams& p, const std::vector<Var>& xs,
                              const std::vector<Var>& step_masks, bool reverse) {
    const std::size_t steps = xs.size();
    const std::size_t batch = xs[0].value().rows;
    std::vector<Var> out(steps);
    Var h = t.constant(Tensor::zeros(batch, p.hidden), "h0");
    for (std::size_t k = 0; k < steps; ++k) {
        std::size_t i = reverse ? steps - 1 - k : k;
        Var hn = gru_step(t, b, p, xs[i], h);
        if (!step_masks.empty()) {
            // masked steps keep the previous state exactly
            h = t.add(h, t.mul_colvec(t.sub(hn, h), step_masks[i]));
        } else {
            h = hn;
        }
        out[i] = h;
    }
    return out;
}

void BiGruStackParams::init(std::size_t input_dim, const std::vector<std::size_t>& hidden_per_dir, bool ln, Rng& rng) {
    fwd.resize(hidden_per_dir.size());
    bwd.resize(hidden_per_dir.size());
    std::size_t in = input_dim;
    for (std::size_t l = 0; l < hidden_per_dir.size(); ++l) {
        fwd[l].init(in, hidden_per_dir[l], ln, rng);
        bwd[l].init(in, hidden_per_dir[l], ln, rng);
        in = 2 * hidden_per_dir[l];
    }
}

void BiGruStackParams::register_params(ParamRegistry& reg, const std::string& prefix) {
    for (std::size_t l = 0; l < fwd.size(); ++l) {
        fwd[l].register_params(reg, prefix + ".l" + std::to_string(l) + ".fwd");
        bwd[l].register_params(reg, prefix + ".l" + std::to_string(l) + ".bwd");
    }
}

BiGruOut bigru_forward(Tape& t, TapeBind& b, const BiGruStackParams& p, const std::vector<Var>& inputs,
                       const std::vector<Var>& step_masks, const std::vector<Tensor>* layer_input_dropout) {
    if (inputs.empty()) throw std::invalid_argument("bigru_forward: empty sequence");
    if (!step_masks.empty()) {
        const std::size_t batch = inputs[0].value().rows;
        for (std::size_t e = 0; e < batch; ++e) {
            bool any = false;
            for (const Var& m : step_masks)
                if (m.value()(e, 0) != 0.0) {
                    any = true;
                    break;
                }
            if (!any) throw std::invalid_argument("bigru_forward: sequence with no active steps");
        }
    }
    std::vector<Var> layer_in = inputs;
    std::vector<Var> fwd_out, bwd_out;
    for (std::size_t l = 0; l < p.fwd.size(); ++l) {
        if (layer_input_dropout) {
            Var mask = t.constant((*layer_input_dropout)[l], "dropout");
            for (Var& x : layer_in) x = t.mul(x, mask);
        }
        fwd_out = gru_sequence(t, b, p.fwd[l], layer_in, step_masks, false);
        bwd_out = gru_sequence(t, b, p.bwd[l], layer_in, step_masks, true);
        for (std::size_t i = 0; i < layer_in.size(); ++i)
            layer_in[i] = t.concat_cols({fwd_out[i], bwd_out[i]});
    }
    BiGruOut out;
    out.outputs = layer_in;
    out.context = t.concat_cols({fwd_out.back(), bwd_out.front()});
    return out;
}

void DenseParams::init(std::size_t in, std::size_t out, Rng& rng) {
    w = glorot_uniform(in, out, rng);
    b = Tensor::zeros(1, out);
}

void DenseParams::register_params(ParamRegistry& reg, const std::string& prefix) {
    reg.add(prefix + ".w", &w);
    reg.add(prefix + ".b", &b);
}

Var dense(Tape& t, TapeBind& b, const DenseParams& p, Var x) {
    return t.add_rowvec(t.matmul(x, b(p.w)), b(p.b));
}

Var dense_act(Tape& t, TapeBind& b, const DenseParams& p, Var x, Activation act) {
    Var y = dense(t, b, p, x);
    switch (act) {
        case Activation::kLinear: return y;
        case Activation::kSoftmax: return t.softmax_rows(y);
        case Activation::kSoftplus: return t.softplus(y);
        case Activation::kSigmoid: return t.sigmoid(y);
    }
    return y;
}

void EmbeddingParams::init(std::size_t vocab, std::size_t dim, Rng& rng) {
    table = Tensor(vocab, dim);
    for (double& v : table.data) v = rng.uniform(-0.05, 0.05);
}

void EmbeddingParams::register_params(ParamRegistry& reg, const std::string& prefix) {
    reg.add(prefix + ".table", &table);
}

Var embed(Tape& t, TapeBind& b, const EmbeddingParams& p, const std::vector<int>& ids) {
    return t.gather_rows(b(p.table), ids);
}

Tensor dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng) {
    Tensor m = Tensor::full(rows, cols, 1.0);
    if (rate <= 0.0) return m;
    double keep = 1.0 - rate;
    for (double& v : m.data) v = rng.uniform() < rate ? 0.0 : 1.0 / keep;
    return m;
}

Tensor dropout(const Tensor& x, double rate, bool training, Rng& rng) {
    if (!training || rate <= 0.0) return x;
    return mul(x, dropout_mask(x.rows, x.cols, rate, rng));
}

Tensor gru_cell(const Tensor& x, const Tensor& h, const GruLayerParams& p) {
    Tape tape;
    TapeBind bind(tape);
    Var out = gru_step(tape, bind, p, tape.constant(x), tape.constant(h));
    return out.value();
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias) {
    return layer_norm_rows(x, gain, bias, kLayerNormEps);
}

}  // namespace mlmap
