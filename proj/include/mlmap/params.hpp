#pragma once

#include "mlmap/autodiff.hpp"
#include "mlmap/tensor.hpp"

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mlmap {

// Ordered view over a model's named parameter tensors. The tensors themselves
// live in the layer structs; registration order is the canonical order used
// by the optimizer and the checkpoint format.
class ParamRegistry {
public:
    void add(const std::string& name, Tensor* t);

    std::size_t count() const { return items_.size(); }
    const std::string& name(std::size_t i) const { return items_[i].first; }
    Tensor& tensor(std::size_t i) { return *items_[i].second; }
    const Tensor& tensor(std::size_t i) const { return *items_[i].second; }
    Tensor* find(const std::string& name);

    std::size_t total_scalars() const;

private:
    std::vector<std::pair<std::string, Tensor*>> items_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Memoized leaf creation so each parameter appears once per tape.
class TapeBind {
public:
    explicit TapeBind(Tape& tape) : tape_(&tape) {}

    Var operator()(const Tensor& p) {
        auto it = cache_.find(&p);
        if (it != cache_.end()) return it->second;
        Var v = tape_->leaf(p, "param");
        cache_.emplace(&p, v);
        return v;
    }

    // Gradient w.r.t. p after backward(); zeros if p was unused.
    Tensor grad_of(const Tensor& p) const {
        auto it = cache_.find(&p);
        if (it == cache_.end()) return Tensor::zeros(p.rows, p.cols);
        return tape_->gradient(it->second);
    }

private:
    Tape* tape_;
    std::unordered_map<const Tensor*, Var> cache_;
};

}  // namespace mlmap
