#include "mlmap/layers.hpp"

#include <doctest.h>

#include <cmath>

using namespace mlmap;

namespace {

GruLayerParams zero_gru(std::size_t in, std::size_t hidden) {
    GruLayerParams p;
    Rng rng(1);
    p.init(in, hidden, false, rng);
    for (Tensor* t : {&p.wz, &p.uz, &p.bz, &p.wr, &p.ur, &p.br, &p.wh, &p.uh, &p.bh})
        std::fill(t->data.begin(), t->data.end(), 0.0);
    return p;
}

double sigmoid_s(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// scalar recomputation of one GRU step, independent of the tensor kernels
std::vector<double> gru_oracle(const GruLayerParams& p, const std::vector<double>& x, const std::vector<double>& h) {
    std::size_t n = p.hidden;
    auto gate = [&](const Tensor& w, const Tensor& u, const Tensor& b, const std::vector<double>& state) {
        std::vector<double> pre(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t d = 0; d < x.size(); ++d) pre[i] += x[d] * w(d, i);
            for (std::size_t j = 0; j < n; ++j) pre[i] += state[j] * u(j, i);
            pre[i] += b(0, i);
        }
        return pre;
    };
    auto norm = [&](std::vector<double> pre, const Tensor& g, const Tensor& o) {
        if (!p.layer_norm) return pre;
        double mean = 0;
        for (double v : pre) mean += v;
        mean /= static_cast<double>(n);
        double var = 0;
        for (double v : pre) var += (v - mean) * (v - mean);
        var /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) pre[i] = (pre[i] - mean) / std::sqrt(var + kLayerNormEps) * g(0, i) + o(0, i);
        return pre;
    };
    std::vector<double> z = norm(gate(p.wz, p.uz, p.bz, h), p.gz, p.oz);
    std::vector<double> r = norm(gate(p.wr, p.ur, p.br, h), p.gr, p.orr);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = sigmoid_s(z[i]);
        r[i] = sigmoid_s(r[i]);
    }
    std::vector<double> rh(n);
    for (std::size_t i = 0; i < n; ++i) rh[i] = r[i] * h[i];
    std::vector<double> c = norm(gate(p.wh, p.uh, p.bh, rh), p.gh, p.oh);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = z[i] * h[i] + (1.0 - z[i]) * std::tanh(c[i]);
    return out;
}

}  // namespace

TEST_CASE("gru cell with zero parameters halves the state") {
    GruLayerParams p = zero_gru(3, 2);
    Tensor h(1, 2, {1.0, -2.0});
    Tensor x(1, 3, {0.3, -0.7, 2.0});
    Tensor out = gru_cell(x, h, p);
    CHECK(out(0, 0) == doctest::Approx(0.5));
    CHECK(out(0, 1) == doctest::Approx(-1.0));

    Tensor zero_out = gru_cell(Tensor::zeros(1, 3), Tensor::zeros(1, 2), p);
    for (double v : zero_out.data) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("gru cell matches the scalar oracle") {
    for (bool ln : {false, true}) {
        Rng rng(99);
        GruLayerParams p;
        p.init(3, 4, ln, rng);
        std::vector<double> x = {0.4, -1.2, 0.9};
        std::vector<double> h = {0.1, 0.2, -0.4, 0.8};
        Tensor out = gru_cell(Tensor::row(std::vector<double>(x)), Tensor::row(std::vector<double>(h)), p);
        std::vector<double> expect = gru_oracle(p, x, h);
        for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(out(0, i) - expect[i]) < 1e-12);
    }
}

TEST_CASE("gru cell rejects mismatched dimensions") {
    GruLayerParams p = zero_gru(3, 2);
    CHECK_THROWS(gru_cell(Tensor::zeros(1, 4), Tensor::zeros(1, 2), p));
}

TEST_CASE("dropout") {
    Rng rng(5);
    Tensor x = Tensor::full(1, 100, 1.0);
    CHECK(dropout(x, 0.0, true, rng).data == x.data);
    CHECK(dropout(x, 0.9, false, rng).data == x.data);

    std::size_t survived = 0;
    const int trials = 100;
    for (int i = 0; i < trials; ++i) {
        Tensor y = dropout(x, 0.5, true, rng);
        for (double v : y.data) {
            if (v != 0.0) {
                CHECK(v == doctest::Approx(2.0));
                ++survived;
            }
        }
    }
    double fraction = static_cast<double>(survived) / (100.0 * trials);
    CHECK(fraction > 0.48);
    CHECK(fraction < 0.52);
}

TEST_CASE("orthogonal init produces orthonormal columns") {
    Rng rng(3);
    Tensor q = orthogonal(6, rng);
    for (std::size_t a = 0; a < 6; ++a)
        for (std::size_t b = 0; b < 6; ++b) {
            double dot = 0;
            for (std::size_t i = 0; i < 6; ++i) dot += q(i, a) * q(i, b);
            CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-10));
        }
}

TEST_CASE("bidirectional stack: zero parameters give zero context") {
    BiGruStackParams p;
    Rng rng(1);
    p.init(2, {1}, false, rng);
    for (GruLayerParams* layer : {&p.fwd[0], &p.bwd[0]})
        for (Tensor* t : {&layer->wz, &layer->uz, &layer->bz, &layer->wr, &layer->ur, &layer->br, &layer->wh,
                          &layer->uh, &layer->bh})
            std::fill(t->data.begin(), t->data.end(), 0.0);

    Tape tape;
    TapeBind bind(tape);
    std::vector<Var> steps = {tape.constant(Tensor(1, 2, {1.0, 2.0})), tape.constant(Tensor(1, 2, {3.0, 4.0}))};
    BiGruOut out = bigru_forward(tape, bind, p, steps, {}, nullptr);
    CHECK(out.context.value().cols == 2);
    CHECK(out.context.value()(0, 0) == doctest::Approx(0.0));
    CHECK(out.context.value()(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("bidirectional stack matches unrolled single steps") {
    Rng rng(12);
    BiGruStackParams p;
    p.init(3, {2}, false, rng);

    std::vector<Tensor> xs = {Tensor(1, 3, {0.1, -0.2, 0.5}), Tensor(1, 3, {0.7, 0.0, -0.3}),
                              Tensor(1, 3, {-0.9, 0.4, 0.2})};
    Tape tape;
    TapeBind bind(tape);
    std::vector<Var> steps;
    for (const Tensor& x : xs) steps.push_back(tape.constant(x));
    BiGruOut out = bigru_forward(tape, bind, p, steps, {}, nullptr);

    Tensor hf = Tensor::zeros(1, 2);
    for (const Tensor& x : xs) hf = gru_cell(x, hf, p.fwd[0]);
    Tensor hb = Tensor::zeros(1, 2);
    for (std::size_t i = xs.size(); i-- > 0;) hb = gru_cell(xs[i], hb, p.bwd[0]);

    const Tensor& ctx = out.context.value();
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(std::abs(ctx(0, i) - hf(0, i)) < 1e-12);
        CHECK(std::abs(ctx(0, 2 + i) - hb(0, i)) < 1e-12);
    }
}

TEST_CASE("masked steps leave the context bit-identical") {
    Rng rng(21);
    BiGruStackParams p;
    p.init(2, {3, 2}, true, rng);

    auto run = [&](const std::vector<Tensor>& xs, const std::vector<double>& mask) {
        Tape tape;
        TapeBind bind(tape);
        std::vector<Var> steps, masks;
        for (const Tensor& x : xs) steps.push_back(tape.constant(x));
        for (double m : mask) masks.push_back(tape.constant(Tensor(1, 1, {m})));
        return bigru_forward(tape, bind, p, steps, masks, nullptr).context.value();
    };

    std::vector<Tensor> base = {Tensor(1, 2, {0.5, -0.5}), Tensor(1, 2, {1.0, 0.25}), Tensor::zeros(1, 2),
                                Tensor::zeros(1, 2)};
    std::vector<Tensor> perturbed = base;
    perturbed[2] = Tensor(1, 2, {123.0, -77.0});
    perturbed[3] = Tensor(1, 2, {-5.0, 9.0});
    std::vector<double> mask = {1, 1, 0, 0};

    Tensor a = run(base, mask);
    Tensor b = run(perturbed, mask);
    for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(a.data[i] == b.data[i]);

    // and equal to the run without any padding at all
    std::vector<Tensor> trimmed = {base[0], base[1]};
    Tensor c = run(trimmed, {1, 1});
    for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(a.data[i] == c.data[i]);
}

TEST_CASE("all-masked sequence is rejected") {
    Rng rng(2);
    BiGruStackParams p;
    p.init(2, {2}, false, rng);
    Tape tape;
    TapeBind bind(tape);
    std::vector<Var> steps = {tape.constant(Tensor::zeros(1, 2))};
    std::vector<Var> masks = {tape.constant(Tensor::zeros(1, 1))};
    CHECK_THROWS(bigru_forward(tape, bind, p, steps, masks, nullptr));
}

TEST_CASE("dense activations") {
    Rng rng(8);
    DenseParams p;
    p.init(3, 4, rng);
    std::fill(p.w.data.begin(), p.w.data.end(), 0.0);
    std::fill(p.b.data.begin(), p.b.data.end(), 0.0);

    Tape tape;
    TapeBind bind(tape);
    Var x = tape.constant(Tensor(1, 3, {1.0, 2.0, 3.0}));
    Tensor sm = dense_act(tape, bind, p, x, Activation::kSoftmax).value();
    for (double v : sm.data) CHECK(v == doctest::Approx(0.25));
    Tensor sp = dense_act(tape, bind, p, x, Activation::kSoftplus).value();
    for (double v : sp.data) CHECK(v == doctest::Approx(std::log(2.0)));
    Tensor sg = dense_act(tape, bind, p, x, Activation::kSigmoid).value();
    for (double v : sg.data) CHECK(v == doctest::Approx(0.5));
}
