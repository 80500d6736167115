#include "mlmap/motion_pipeline.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace mlmap {

std::vector<MotionRecord> filter_by_duration(const std::vector<MotionRecord>& records, double max_seconds) {
    if (!(max_seconds > 0)) throw std::invalid_argument("filter_by_duration: max_seconds must be positive");
    std::vector<MotionRecord> kept;
    for (const MotionRecord& r : records)
        if (r.duration_seconds() < max_seconds) kept.push_back(r);
    return kept;
}

Tensor select_joints(const MotionRecord& record, const std::vector<std::string>& joint_list) {
    std::unordered_map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < record.joint_names.size(); ++i) pos[record.joint_names[i]] = i;
    std::vector<std::size_t> cols;
    cols.reserve(joint_list.size());
    for (const std::string& name : joint_list) {
        auto it = pos.find(name);
        if (it == pos.end())
            throw std::invalid_argument("select_joints: record " + record.id + " has no joint named " + name);
        cols.push_back(it->second);
    }
    Tensor out(record.frames.rows, cols.size());
    for (std::size_t i = 0; i < out.rows; ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = record.frames(i, cols[j]);
    return out;
}

Tensor resample_nearest(const Tensor& frames, double rate_hz, double target_hz) {
    if (frames.rows == 0) return frames;
    if (std::abs(rate_hz - target_hz) < 1e-9) return frames;
    std::size_t out_rows = static_cast<std::size_t>(
        std::floor(static_cast<double>(frames.rows - 1) * target_hz / rate_hz)) + 1;
    Tensor out(out_rows, frames.cols);
    for (std::size_t k = 0; k < out_rows; ++k) {
        auto src = static_cast<std::size_t>(std::llround(static_cast<double>(k) * rate_hz / target_hz));
        if (src >= frames.rows) src = frames.rows - 1;
        for (std::size_t j = 0; j < frames.cols; ++j) out(k, j) = frames(src, j);
    }
    return out;
}

std::vector<Tensor> downsample_with_offsets(const Tensor& frames, int factor) {
    if (factor < 1) throw std::invalid_argument("downsample_with_offsets: factor must be >= 1");
    if (frames.rows == 0) throw std::invalid_argument("downsample_with_offsets: empty input");
    std::vector<Tensor> out;
    out.reserve(static_cast<std::size_t>(factor));
    for (int offset = 0; offset < factor; ++offset) {
        std::size_t count = 0;
        for (std::size_t r = static_cast<std::size_t>(offset); r < frames.rows; r += static_cast<std::size_t>(factor))
            ++count;
        Tensor seq(count, frames.cols);
        std::size_t i = 0;
        for (std::size_t r = static_cast<std::size_t>(offset); r < frames.rows; r += static_cast<std::size_t>(factor), ++i)
            for (std::size_t j = 0; j < frames.cols; ++j) seq(i, j) = frames(r, j);
        out.push_back(std::move(seq));
    }
    return out;
}

MotionSequence pad_and_flag(const Tensor& seq, std::size_t target_len) {
    if (seq.rows == 0) throw std::invalid_argument("pad_and_flag: empty sequence");
    if (seq.rows > target_len)
        throw std::invalid_argument("pad_and_flag: sequence of " + std::to_string(seq.rows) +
                                    " frames exceeds target length " + std::to_string(target_len));
    MotionSequence m;
    m.active_len = static_cast<int>(seq.rows);
    m.frames = Tensor(target_len, seq.cols + 1);
    for (std::size_t i = 0; i < seq.rows; ++i) {
        for (std::size_t j = 0; j < seq.cols; ++j) m.frames(i, j) = seq(i, j);
        m.frames(i, seq.cols) = 1.0;
    }
    return m;
}

}  // namespace mlmap
