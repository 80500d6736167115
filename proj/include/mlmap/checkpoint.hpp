#pragma once

#include "mlmap/params.hpp"
#include "mlmap/tensor.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace mlmap {

// Portable model container: a JSON manifest followed by named tensors with
// explicit shapes, stored as little-endian 64-bit floats.
struct Checkpoint {
    std::string model_kind;
    std::string config_text;
    nlohmann::json metadata;  // seed, epoch, optimizer step, file references
    std::vector<std::pair<std::string, Tensor>> tensors;

    void save(const std::string& path) const;
    static Checkpoint load(const std::string& path);

    const Tensor* find(const std::string& name) const;

    // captures every registry tensor under the given prefix
    void add_registry(const ParamRegistry& reg, const std::string& prefix = "");
    // writes tensors back, validating names and shapes against the registry
    void restore_registry(ParamRegistry& reg, const std::string& prefix = "") const;
};

}  // namespace mlmap
