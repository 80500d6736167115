#pragma once

#include "mlmap/params.hpp"
#include "mlmap/tensor.hpp"

#include <functional>
#include <vector>

namespace mlmap {

// Compares recorded gradients against central finite differences for every
// scalar in the registry. loss_fn must be deterministic (dropout disabled)
// and is evaluated with the registry's current values.
//
// The reported error is max_i |analytic_i - numeric_i| scaled by the largest
// gradient magnitude, so noise on near-zero components does not drown out
// the comparison.
struct GradCheckResult {
    double max_relative_error = 0.0;
    double scale = 0.0;
};

GradCheckResult finite_difference_check(const std::function<double()>& loss_fn,
                                        const std::function<std::vector<Tensor>()>& grad_fn,
                                        ParamRegistry& reg, double epsilon = 1e-5);

}  // namespace mlmap
