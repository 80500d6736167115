#pragma once

#include "mlmap/config.hpp"
#include "mlmap/layers.hpp"
#include "mlmap/params.hpp"
#include "mlmap/prepared_data.hpp"
#include "mlmap/rng.hpp"

#include <utility>
#include <vector>

namespace mlmap {

struct L2mConfig {
    std::size_t joints = 44;
    std::vector<std::size_t> encoder_units = {64, 64};
    std::vector<std::size_t> decoder_units = {400, 400, 400};
    std::size_t embedding_dim = 64;
    std::size_t vocab_size = 0;
    std::size_t mixture_components = 20;
    double dropout = 0.1;
    bool layer_norm = true;
    std::size_t max_motion_len = 300;
    std::size_t max_sentence_len = 41;

    std::size_t context_dim() const { return 2 * encoder_units.back(); }
    std::size_t head_outputs() const { return mixture_components * (1 + 2 * joints) + 1; }
    static L2mConfig from_run_config(const RunConfig& rc, std::size_t vocab);
};

// Mixture-of-diagonal-Gaussians plus Bernoulli stop parameter for one step.
struct MdnParams {
    std::vector<double> alphas;  // K, simplex
    Tensor mus;                  // K x J
    Tensor sigmas;               // K x J, standard deviations, > 0
    double p_active = 0.5;
};

// floor applied to sigma inside density evaluations
inline constexpr double kSigmaFloor = 1e-6;

// log of the mixture density of the joint values times the Bernoulli mass of
// the flag; frame is J joints followed by the flag.
double mdn_log_likelihood(const std::vector<double>& frame, const MdnParams& params);

// component from alphas, joints from the chosen diagonal Gaussian, flag from
// Bernoulli(p_active)
std::vector<double> sample_frame(const MdnParams& params, Rng& rng);

struct MotionHypothesis {
    Tensor frames;  // t x (J+1), standardized units
    double log_likelihood = 0.0;
    bool truncated = false;  // hit the maximum length without a stop flag
};

// Generates motion from sentences: layer-normalized BiGRU encoder over word
// embeddings, a stacked layer-normalized GRU decoder fed the context vector
// and previous frame, and an MDN head over the concatenated layer outputs.
class L2mModel {
public:
    L2mModel(const L2mConfig& cfg, Rng& init_rng);

    const L2mConfig& config() const { return cfg_; }
    ParamRegistry& registry() { return registry_; }
    const ParamRegistry& registry() const { return registry_; }

    struct Batch {
        std::vector<std::vector<int>> enc_steps;  // per step, word per example
        std::vector<Tensor> enc_masks;            // per step, B x 1
        std::vector<Tensor> dec_inputs;           // per step, B x (J+1); all-ones first
        std::vector<Tensor> dec_targets;          // per step, B x (J+1)
        std::vector<Tensor> dec_masks;            // per step, B x 1
        double active_targets = 0.0;
        std::size_t batch = 0;
    };
    Batch make_batch(const std::vector<const PreparedText*>& sentences,
                     const std::vector<const PreparedMotion*>& motions) const;

    struct LossGraph {
        Var sum_loss;
        double active_count = 0.0;
    };
    // surrogate loss: component log densities weighted by mixture weights
    LossGraph loss_graph(Tape& tape, TapeBind& bind, const Batch& batch, Rng* dropout_rng) const;
    // exact negative log likelihood of the mixture, for reporting
    LossGraph exact_loss_graph(Tape& tape, TapeBind& bind, const Batch& batch) const;

    // ---- inference (single example) ----
    Tensor encode_text(const std::vector<int>& indices, int active_length) const;

    struct DecoderState {
        std::vector<Tensor> h;
    };
    DecoderState initial_state() const;
    std::pair<MdnParams, DecoderState> decode_step(const Tensor& context, const std::vector<double>& prev_frame,
                                                   const DecoderState& state) const;

    // Stochastic beam search: every live hypothesis spawns `samples` sampled
    // continuations scored by their own likelihood; the best `width` survive.
    std::vector<MotionHypothesis> beam_search(const Tensor& context, std::size_t width, std::size_t samples,
                                              Rng& rng) const;

    std::size_t param_count() const { return registry_.total_scalars(); }
    std::vector<std::pair<std::string, std::size_t>> param_breakdown() const;

private:
    L2mConfig cfg_;
    BiGruStackParams encoder_;
    std::vector<GruLayerParams> decoder_;
    EmbeddingParams embedding_;
    DenseParams head_;
    ParamRegistry registry_;

    struct HeadVars {
        Var alphas;  // B x K, softmax
        Var mus;     // B x K*J
        Var sigmas;  // B x K*J, softplus
        Var p;       // B x 1, sigmoid
    };
    HeadVars head_vars(Tape& tape, TapeBind& bind, Var feats) const;
    std::vector<Var> decoder_step_vars(Tape& tape, TapeBind& bind, Var context, Var frame,
                                       std::vector<Var>& states,
                                       const std::vector<Tensor>* layer_dropout) const;
    // -log density terms shared by the surrogate and exact losses
    Var component_log_density(Tape& tape, const HeadVars& head, Var target_joints) const;  // B x K
};

}  // namespace mlmap
