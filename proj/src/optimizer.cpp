#include "mlmap/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace mlmap {

double clip_gradients(std::vector<Tensor>& grads, double max_norm) {
    if (!(max_norm > 0.0)) throw std::invalid_argument("clip_gradients: max_norm must be positive");
    double sq = 0.0;
    for (const Tensor& g : grads)
        for (double v : g.data) sq += v * v;
    double norm = std::sqrt(sq);
    if (std::isinf(max_norm) || norm <= max_norm) return norm;
    double s = max_norm / norm;
    for (Tensor& g : grads)
        for (double& v : g.data) v *= s;
    return norm;
}

Nadam::Nadam(const ParamRegistry& reg, NadamConfig cfg) : cfg_(cfg) {
    m_.reserve(reg.count());
    v_.reserve(reg.count());
    for (std::size_t i = 0; i < reg.count(); ++i) {
        const Tensor& p = reg.tensor(i);
        m_.push_back(Tensor::zeros(p.rows, p.cols));
        v_.push_back(Tensor::zeros(p.rows, p.cols));
    }
}

void Nadam::step(ParamRegistry& reg, const std::vector<Tensor>& grads) {
    if (grads.size() != m_.size()) throw std::invalid_argument("Nadam::step: gradient count mismatch");
    ++step_;
    const double b1 = cfg_.beta1, b2 = cfg_.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(step_));
    for (std::size_t i = 0; i < grads.size(); ++i) {
        Tensor& p = reg.tensor(i);
        const Tensor& g = grads[i];
        if (!p.same_shape(g)) throw std::invalid_argument("Nadam::step: shape mismatch for " + reg.name(i));
        for (std::size_t k = 0; k < p.data.size(); ++k) {
            double gk = g.data[k];
            double mk = m_[i].data[k] = b1 * m_[i].data[k] + (1.0 - b1) * gk;
            double vk = v_[i].data[k] = b2 * v_[i].data[k] + (1.0 - b2) * gk * gk;
            double m_hat = mk / bc1;
            double g_hat = gk / bc1;
            double v_hat = vk / bc2;
            p.data[k] -= cfg_.learning_rate * (b1 * m_hat + (1.0 - b1) * g_hat) / (std::sqrt(v_hat) + cfg_.epsilon);
        }
    }
}

}  // namespace mlmap
