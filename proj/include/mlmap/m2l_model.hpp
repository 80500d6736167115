#pragma once

#include "mlmap/config.hpp"
#include "mlmap/layers.hpp"
#include "mlmap/params.hpp"
#include "mlmap/prepared_data.hpp"
#include "mlmap/rng.hpp"

#include <utility>
#include <vector>

namespace mlmap {

struct M2lConfig {
    std::size_t joints = 44;  // input width is joints + 1 (active flag)
    std::vector<std::size_t> encoder_units = {64, 64};
    std::vector<std::size_t> decoder_units = {128, 128};
    std::size_t embedding_dim = 64;
    std::size_t vocab_size = 0;
    double dropout = 0.4;
    bool layer_norm = false;
    std::size_t max_motion_len = 300;
    std::size_t max_sentence_len = 41;

    std::size_t context_dim() const { return 2 * encoder_units.back(); }
    static M2lConfig from_run_config(const RunConfig& rc, std::size_t vocab);
};

// Ranked decoder output; indices end with EOS and exclude the implicit SOS.
struct TextHypothesis {
    std::vector<int> indices;
    double log_prob = 0.0;
};

// Generates descriptions of motion sequences: a bidirectional GRU encoder
// over frames, a stacked GRU decoder fed the context vector and the previous
// word's embedding at every step, and a softmax vocabulary head over the
// concatenated decoder layer outputs.
class M2lModel {
public:
    M2lModel(const M2lConfig& cfg, Rng& init_rng);

    const M2lConfig& config() const { return cfg_; }
    ParamRegistry& registry() { return registry_; }
    const ParamRegistry& registry() const { return registry_; }

    struct Batch {
        std::vector<Tensor> enc_steps;       // per step, B x (J+1)
        std::vector<Tensor> enc_masks;       // per step, B x 1
        std::vector<std::vector<int>> dec_inputs;   // per step, word per example
        std::vector<std::vector<int>> dec_targets;  // per step
        std::vector<Tensor> dec_masks;       // per step, B x 1
        double active_targets = 0.0;
        std::size_t batch = 0;
    };
    Batch make_batch(const std::vector<const PreparedMotion*>& motions,
                     const std::vector<const PreparedText*>& sentences) const;

    struct LossGraph {
        Var sum_loss;  // 1x1, sum of -log p over active target steps
        double active_count = 0.0;
    };
    // dropout_rng enables training-mode dropout; pass nullptr for evaluation
    LossGraph loss_graph(Tape& tape, TapeBind& bind, const Batch& batch, Rng* dropout_rng) const;

    // ---- inference (single example) ----
    Tensor encode_motion(const Tensor& padded_frames, int active_len) const;

    struct DecoderState {
        std::vector<Tensor> h;  // one 1xH per decoder layer
    };
    DecoderState initial_state() const;
    // probabilities over the vocabulary (1xV) and the advanced state
    std::pair<Tensor, DecoderState> decode_step(const Tensor& context, int prev_word,
                                                const DecoderState& state) const;

    // Width-W beam search from SOS; hypotheses end at EOS (forced at the
    // maximum sentence length) and are ordered by descending log probability.
    std::vector<TextHypothesis> beam_search(const Tensor& context, std::size_t width) const;

    std::size_t param_count() const { return registry_.total_scalars(); }
    std::vector<std::pair<std::string, std::size_t>> param_breakdown() const;

private:
    M2lConfig cfg_;
    BiGruStackParams encoder_;
    std::vector<GruLayerParams> decoder_;
    EmbeddingParams embedding_;
    DenseParams head_;
    ParamRegistry registry_;

    // shared wiring for one decoder step over a batch of Vars
    std::vector<Var> decoder_step_vars(Tape& tape, TapeBind& bind, Var context, Var emb,
                                       std::vector<Var>& states,
                                       const std::vector<Tensor>* layer_dropout) const;
};

}  // namespace mlmap
