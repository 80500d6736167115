#pragma once

#include "mlmap/config.hpp"
#include "mlmap/l2m_model.hpp"
#include "mlmap/m2l_model.hpp"
#include "mlmap/prepared_data.hpp"
#include "mlmap/standardizer.hpp"
#include "mlmap/text_pipeline.hpp"

#include <memory>
#include <optional>
#include <string>

namespace mlmap {

// Paths inside the output directory.
std::string prepared_dir(const RunConfig& cfg);
std::string checkpoint_path(const RunConfig& cfg, ModelKind kind, const std::string& which);

struct PrepareSummary {
    std::size_t motions = 0;      // after duration filtering
    std::size_t annotations = 0;  // encoded sentences
    std::size_t vocab_size = 0;
};

// scan -> records.jsonl; filter; split; vocabulary; standardizer; prepared
// per-split motion and text files
PrepareSummary cmd_prepare(const RunConfig& cfg);

struct TrainSummary {
    std::size_t epochs = 0;
    double final_train_loss = 0.0;
    double final_val_loss = 0.0;
    std::string final_checkpoint;
    std::string best_checkpoint;
    std::string loss_csv;
};

TrainSummary cmd_train(const RunConfig& cfg, bool resume = false);

// Loaded checkpoint bundle for inference commands.
struct LoadedModel {
    ModelKind kind;
    RunConfig run_config;
    std::unique_ptr<M2lModel> m2l;
    std::unique_ptr<L2mModel> l2m;
    Vocabulary vocab;
    Standardizer standardizer;
    std::vector<std::string> joint_names;
};

LoadedModel load_model(const std::string& checkpoint_file);

// m2l checkpoints read canonical motion records and write ranked text
// hypotheses; l2m checkpoints read one sentence per line and write canonical
// motion JSONL. Returns the number of inputs handled.
std::size_t cmd_generate(const std::string& checkpoint_file, const std::string& input_path,
                         const std::string& output_path, std::size_t width, std::size_t samples,
                         std::uint64_t seed, int threads);

struct EvaluateSummary {
    std::vector<double> m2l_bleu_by_rank;
    std::vector<double> chained_relative_by_rank;
    double baseline_bleu = 0.0;
};

// Writes bleu_report_<split>.{json,csv}; with an l2m checkpoint also
// chained_report_<split>.{json,csv}. baseline, when absent, is the rank-1
// train-split score of the m2l model.
EvaluateSummary cmd_evaluate(const RunConfig& cfg, const std::string& m2l_checkpoint,
                             const std::optional<std::string>& l2m_checkpoint, const std::string& split_name,
                             std::optional<double> baseline = std::nullopt);

std::size_t cmd_export_contexts(const RunConfig& cfg, const std::string& checkpoint_file,
                                const std::string& split_name, bool with_pca, const std::string& output_csv);

}  // namespace mlmap
