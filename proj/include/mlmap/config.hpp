#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mlmap {

enum class ModelKind { kM2l, kL2m };

std::string model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& s);

// Flat key=value run configuration. Defaults reproduce the published
// hyperparameter table for the chosen direction.
struct RunConfig {
    ModelKind model = ModelKind::kM2l;

    std::string dataset_root;
    std::string out_dir = "out";
    std::string spelling_file;

    std::uint64_t seed = 1;
    int threads = 1;

    std::vector<std::size_t> encoder_units = {64, 64};  // per direction
    std::vector<std::size_t> decoder_units = {128, 128};
    bool layer_norm = false;
    std::size_t embedding_dimension = 64;
    double dropout_rate = 0.4;
    double learning_rate = 1e-3;
    double gradient_clipping = 0.0;  // <= 0 encodes "inf"
    std::size_t batch_size = 128;
    std::size_t training_epochs = 100;
    std::size_t vocabulary_size = 0;  // 0 = take from vocab file
    std::size_t motion_joints = 44;
    std::size_t mixture_components = 20;

    std::size_t max_motion_length = 300;
    std::size_t max_sentence_length = 41;
    std::size_t beam_width = 5;
    std::size_t samples_per_hypothesis = 4;

    double train_ratio = 0.8;
    double validation_ratio = 0.1;
    double test_ratio = 0.1;
    double max_duration_seconds = 30.0;
    int downsample_factor = 10;
    bool vocab_full_dataset = true;

    // examples per tape when accumulating a mini-batch gradient
    std::size_t microbatch = 16;

    static RunConfig defaults(ModelKind kind);

    double clip_norm() const;  // +inf when disabled

    std::string serialize() const;
    static RunConfig parse(const std::string& text);
    static RunConfig load(const std::string& path);
    void save(const std::string& path) const;
};

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace mlmap
