#pragma once

#include "mlmap/params.hpp"
#include "mlmap/tensor.hpp"

#include <cstdint>
#include <vector>

namespace mlmap {

// Scales all gradients by max_norm/norm when the global L2 norm exceeds
// max_norm. Returns the pre-clip norm. An infinite max_norm disables clipping.
double clip_gradients(std::vector<Tensor>& grads, double max_norm);

struct NadamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Adam with Nesterov momentum: the bias-corrected first moment is blended
// with the bias-corrected current gradient before the update.
class Nadam {
public:
    Nadam(const ParamRegistry& reg, NadamConfig cfg);

    void step(ParamRegistry& reg, const std::vector<Tensor>& grads);

    std::int64_t step_count() const { return step_; }
    const NadamConfig& config() const { return cfg_; }

    // moment accumulators, exposed for checkpoint resume
    std::vector<Tensor>& first_moments() { return m_; }
    std::vector<Tensor>& second_moments() { return v_; }
    void set_step_count(std::int64_t n) { step_ = n; }

private:
    NadamConfig cfg_;
    std::vector<Tensor> m_;
    std::vector<Tensor> v_;
    std::int64_t step_ = 0;
};

}  // namespace mlmap
