#include "mlmap/params.hpp"

#include <stdexcept>

namespace mlmap {

void ParamRegistry::add(const std::string& name, Tensor* t) {
    if (index_.count(name)) throw std::invalid_argument("ParamRegistry: duplicate name " + name);
    index_[name] = items_.size();
    items_.emplace_back(name, t);
}

Tensor* ParamRegistry::find(const std::string& name) {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : items_[it->second].second;
}

std::size_t ParamRegistry::total_scalars() const {
    std::size_t n = 0;
    for (const auto& [name, t] : items_) n += t->size();
    return n;
}

}  // namespace mlmap
