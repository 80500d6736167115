#pragma once

#include "mlmap/dataset.hpp"
#include "mlmap/standardizer.hpp"
#include "mlmap/tensor.hpp"

#include <string>
#include <vector>

namespace mlmap {

// Model-ready motion: standardized joints plus the trailing active flag,
// padded to a fixed number of timesteps.
struct MotionSequence {
    Tensor frames;  // target_len x (J+1); rows past active_len are all zero
    std::string source_id;
    int offset = 0;
    int active_len = 0;
};

// Keeps records strictly shorter than max_seconds, duration = frames / rate.
std::vector<MotionRecord> filter_by_duration(const std::vector<MotionRecord>& records, double max_seconds);

// Reorders columns to match joint_list; throws naming any missing joint.
Tensor select_joints(const MotionRecord& record, const std::vector<std::string>& joint_list);

// Nearest-frame resampling to the target rate; identity when rates match.
Tensor resample_nearest(const Tensor& frames, double rate_hz, double target_hz);

// Splits into `factor` strided sequences; sequence k takes rows k, k+factor,
// ... Together the outputs partition the input rows. Sequences that would be
// empty are returned empty.
std::vector<Tensor> downsample_with_offsets(const Tensor& frames, int factor = 10);

// Appends the active-flag column and zero-pads to target_len rows.
// Requires 1 <= rows <= target_len.
MotionSequence pad_and_flag(const Tensor& seq, std::size_t target_len = 300);

}  // namespace mlmap
