#pragma once

#include "mlmap/l2m_model.hpp"
#include "mlmap/m2l_model.hpp"
#include "mlmap/prepared_data.hpp"
#include "mlmap/text_pipeline.hpp"

#include <string>
#include <vector>

namespace mlmap {

// Corpus-level BLEU: clipped n-gram precisions aggregated over the whole
// corpus, geometric mean with uniform weights, brevity penalty from the
// closest reference lengths. Zero numerators for n >= 2 fall back to
// (num+1)/(den+1) ("add1-on-zero" smoothing).
double corpus_bleu(const std::vector<std::vector<std::string>>& hypotheses,
                   const std::vector<std::vector<std::vector<std::string>>>& references, int max_n = 4);

struct BleuReport {
    std::string split;
    int max_n = 4;
    std::string smoothing = "add1-on-zero";
    std::vector<double> scores_by_rank;  // rank 1..W

    std::string to_json() const;
    std::string to_csv() const;  // rank,split,score
};

// One motion to describe together with its reference annotations.
struct M2lEvalItem {
    std::string id;
    const PreparedMotion* motion = nullptr;
    std::vector<std::vector<std::string>> references;
};

// Generates `width` ranked hypotheses per motion and scores one corpus BLEU
// per rank. Motions without references are skipped with a warning.
BleuReport bleu_by_rank(const M2lModel& model, const Vocabulary& vocab, const std::vector<M2lEvalItem>& items,
                        std::size_t width, int threads, const std::string& split_name);

// One description to turn into motion; references are the annotations of the
// motion the description belongs to.
struct ChainedEvalItem {
    std::string id;
    const PreparedText* sentence = nullptr;
    std::vector<std::vector<std::string>> references;
};

struct ChainedReport {
    std::string split;
    double baseline_bleu = 0.0;
    std::vector<double> bleu_by_rank;      // re-description corpus BLEU
    std::vector<double> relative_by_rank;  // divided by the baseline

    std::string to_json() const;
    std::string to_csv() const;
};

// Chains the two directions: generate the rank-1 motion for each sentence,
// re-describe it with the motion-to-language model, score per rank, and
// divide by baseline_bleu.
ChainedReport chained_relative_performance(const L2mModel& l2m, const M2lModel& m2l, const Vocabulary& vocab,
                                           const std::vector<ChainedEvalItem>& items, std::size_t width,
                                           std::size_t samples, std::uint64_t seed, double baseline_bleu,
                                           int threads, const std::string& split_name);

}  // namespace mlmap
