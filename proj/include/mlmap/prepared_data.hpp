#pragma once

#include "mlmap/tensor.hpp"
#include "mlmap/text_pipeline.hpp"

#include <string>
#include <vector>

namespace mlmap {

// One model-ready motion sequence: standardized, downsampled at a fixed
// offset, padded to the configured length with the active-flag column.
struct PreparedMotion {
    std::string id;
    int offset = 0;
    int active_len = 0;
    Tensor frames;  // target_len x (J+1)
};

struct PreparedText {
    std::string id;
    std::string raw;
    std::vector<std::string> tokens;
    std::vector<int> indices;
    int active_length = 0;
};

struct PreparedSplitData {
    std::vector<PreparedMotion> motions;
    std::vector<PreparedText> sentences;
};

// motion/sentence pairs sharing an id; every offset sequence of a motion is
// paired with every annotation of that motion
struct TrainingPair {
    int motion_idx;
    int sentence_idx;
};

std::vector<TrainingPair> make_pairs(const PreparedSplitData& data);

void write_motions_bin(const std::vector<PreparedMotion>& motions, const std::string& path);
std::vector<PreparedMotion> read_motions_bin(const std::string& path);

void write_text_jsonl(const std::vector<PreparedText>& sentences, const std::string& path);
std::vector<PreparedText> read_text_jsonl(const std::string& path);

}  // namespace mlmap
