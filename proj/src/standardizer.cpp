#include "mlmap/standardizer.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <stdexcept>

namespace mlmap {

Standardizer Standardizer::fit(const std::vector<const Tensor*>& sequences) {
    std::size_t joints = 0;
    std::size_t frames = 0;
    for (const Tensor* s : sequences) {
        if (s->rows == 0) continue;
        if (joints == 0) joints = s->cols;
        if (s->cols != joints) throw std::invalid_argument("Standardizer::fit: inconsistent joint count");
        frames += s->rows;
    }
    if (frames == 0) throw std::invalid_argument("Standardizer::fit: no frames");

    Standardizer st;
    st.mean.assign(joints, 0.0);
    st.std_dev.assign(joints, 0.0);
    for (const Tensor* s : sequences)
        for (std::size_t i = 0; i < s->rows; ++i)
            for (std::size_t j = 0; j < joints; ++j) st.mean[j] += (*s)(i, j);
    for (std::size_t j = 0; j < joints; ++j) st.mean[j] /= static_cast<double>(frames);
    for (const Tensor* s : sequences)
        for (std::size_t i = 0; i < s->rows; ++i)
            for (std::size_t j = 0; j < joints; ++j) {
                double d = (*s)(i, j) - st.mean[j];
                st.std_dev[j] += d * d;
            }
    for (std::size_t j = 0; j < joints; ++j) {
        double sd = std::sqrt(st.std_dev[j] / static_cast<double>(frames));
        st.std_dev[j] = sd < kStdFloor ? kStdFloor : sd;
    }
    return st;
}

Standardizer Standardizer::fit(const std::vector<Tensor>& sequences) {
    std::vector<const Tensor*> ptrs;
    ptrs.reserve(sequences.size());
    for (const Tensor& t : sequences) ptrs.push_back(&t);
    return fit(ptrs);
}

Tensor Standardizer::apply(const Tensor& seq) const {
    std::size_t j = joints();
    if (seq.cols != j && seq.cols != j + 1)
        throw std::invalid_argument("Standardizer::apply: column count mismatch");
    Tensor out = seq;
    for (std::size_t i = 0; i < seq.rows; ++i)
        for (std::size_t k = 0; k < j; ++k) out(i, k) = (seq(i, k) - mean[k]) / std_dev[k];
    return out;
}

Tensor Standardizer::invert(const Tensor& seq) const {
    std::size_t j = joints();
    if (seq.cols != j && seq.cols != j + 1)
        throw std::invalid_argument("Standardizer::invert: column count mismatch");
    Tensor out = seq;
    for (std::size_t i = 0; i < seq.rows; ++i)
        for (std::size_t k = 0; k < j; ++k) out(i, k) = seq(i, k) * std_dev[k] + mean[k];
    return out;
}

std::string Standardizer::to_json() const {
    nlohmann::json j;
    j["mean"] = mean;
    j["std"] = std_dev;
    return j.dump(2) + "\n";
}

Standardizer Standardizer::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Standardizer st;
    st.mean = j.at("mean").get<std::vector<double>>();
    st.std_dev = j.at("std").get<std::vector<double>>();
    if (st.mean.size() != st.std_dev.size())
        throw std::invalid_argument("Standardizer: mean/std length mismatch");
    return st;
}

}  // namespace mlmap
