#include "mlmap/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace mlmap {

GradCheckResult finite_difference_check(const std::function<double()>& loss_fn,
                                        const std::function<std::vector<Tensor>()>& grad_fn,
                                        ParamRegistry& reg, double epsilon) {
    std::vector<Tensor> analytic = grad_fn();

    double scale = 1e-8;
    for (const Tensor& g : analytic)
        for (double v : g.data) scale = std::max(scale, std::abs(v));

    GradCheckResult res;
    for (std::size_t i = 0; i < reg.count(); ++i) {
        Tensor& p = reg.tensor(i);
        for (std::size_t k = 0; k < p.data.size(); ++k) {
            double saved = p.data[k];
            p.data[k] = saved + epsilon;
            double up = loss_fn();
            p.data[k] = saved - epsilon;
            double down = loss_fn();
            p.data[k] = saved;
            double numeric = (up - down) / (2.0 * epsilon);
            double a = analytic[i].data[k];
            scale = std::max(scale, std::abs(numeric));
            res.max_relative_error = std::max(res.max_relative_error, std::abs(a - numeric));
        }
    }
    res.max_relative_error /= scale;
    res.scale = scale;
    return res;
}

}  // namespace mlmap
