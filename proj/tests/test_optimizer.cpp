#include "mlmap/grad_check.hpp"
#include "mlmap/optimizer.hpp"
#include "mlmap/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace mlmap;

TEST_CASE("clip_gradients") {
    SUBCASE("norm above the limit halves everything") {
        std::vector<Tensor> grads = {Tensor(1, 2, {30.0, 40.0})};  // norm 50
        double norm = clip_gradients(grads, 25.0);
        CHECK(norm == doctest::Approx(50.0));
        CHECK(grads[0](0, 0) == doctest::Approx(15.0));
        CHECK(grads[0](0, 1) == doctest::Approx(20.0));
    }
    SUBCASE("norm below the limit is untouched") {
        std::vector<Tensor> grads = {Tensor(1, 2, {6.0, 8.0})};
        clip_gradients(grads, 25.0);
        CHECK(grads[0](0, 0) == 6.0);
        CHECK(grads[0](0, 1) == 8.0);
    }
    SUBCASE("infinite limit disables clipping") {
        std::vector<Tensor> grads = {Tensor(1, 1, {1e12})};
        clip_gradients(grads, std::numeric_limits<double>::infinity());
        CHECK(grads[0](0, 0) == 1e12);
    }
    SUBCASE("post-clip norm and direction") {
        std::vector<Tensor> grads = {Tensor(2, 2, {3.0, -4.0, 12.0, 5.0})};
        std::vector<Tensor> before = grads;
        clip_gradients(grads, 2.0);
        double norm = 0.0, dot = 0.0, na = 0.0, nb = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            norm += grads[0].data[i] * grads[0].data[i];
            dot += grads[0].data[i] * before[0].data[i];
            na += grads[0].data[i] * grads[0].data[i];
            nb += before[0].data[i] * before[0].data[i];
        }
        CHECK(std::sqrt(norm) <= 2.0 + 1e-9);
        CHECK(dot / std::sqrt(na * nb) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("nadam") {
    SUBCASE("zero gradient leaves parameters unchanged") {
        Tensor p(1, 3, {1.0, -2.0, 3.0});
        ParamRegistry reg;
        reg.add("p", &p);
        Nadam opt(reg, {});
        opt.step(reg, {Tensor::zeros(1, 3)});
        CHECK(p(0, 0) == 1.0);
        CHECK(p(0, 1) == -2.0);
        CHECK(p(0, 2) == 3.0);
    }
    SUBCASE("first step opposes the gradient sign") {
        Tensor p(1, 2, {0.0, 0.0});
        ParamRegistry reg;
        reg.add("p", &p);
        Nadam opt(reg, {});
        opt.step(reg, {Tensor(1, 2, {0.5, -1.25})});
        CHECK(p(0, 0) < 0.0);
        CHECK(p(0, 1) > 0.0);
    }
    SUBCASE("optimizes a scalar quadratic") {
        Tensor x(1, 1, {1.0});
        ParamRegistry reg;
        reg.add("x", &x);
        NadamConfig cfg;
        cfg.learning_rate = 1e-2;
        Nadam opt(reg, cfg);
        for (int i = 0; i < 2000 && std::abs(x(0, 0)) >= 1e-6; ++i)
            opt.step(reg, {Tensor(1, 1, {2.0 * x(0, 0)})});
        CHECK(std::abs(x(0, 0)) < 1e-6);
    }
    SUBCASE("scalar quadratic at the default learning rate") {
        Tensor x(1, 1, {1.0});
        ParamRegistry reg;
        reg.add("x", &x);
        Nadam opt(reg, {});
        for (int i = 0; i < 4000 && std::abs(x(0, 0)) >= 1e-6; ++i)
            opt.step(reg, {Tensor(1, 1, {2.0 * x(0, 0)})});
        CHECK(std::abs(x(0, 0)) < 1e-6);  // observed: ~3.8k steps at lr 1e-3
    }
}

TEST_CASE("finite difference check on a linear loss") {
    Rng rng(4);
    Tensor w(2, 3);
    for (double& v : w.data) v = rng.uniform(-1, 1);
    Tensor x(2, 3);
    for (double& v : x.data) v = rng.uniform(-1, 1);
    ParamRegistry reg;
    reg.add("w", &w);

    auto loss = [&]() {
        double s = 0;
        for (std::size_t i = 0; i < w.data.size(); ++i) s += w.data[i] * x.data[i];
        return s;
    };
    auto grads = [&]() { return std::vector<Tensor>{x}; };
    GradCheckResult res = finite_difference_check(loss, grads, reg);
    CHECK(res.max_relative_error < 1e-8);
}
