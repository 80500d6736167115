#pragma once

#include "mlmap/autodiff.hpp"
#include "mlmap/params.hpp"
#include "mlmap/rng.hpp"
#include "mlmap/tensor.hpp"

#include <string>
#include <vector>

namespace mlmap {

inline constexpr double kLayerNormEps = 1e-5;

// Glorot-uniform dense/input weights, orthogonal recurrent weights,
// zero biases, unit layer-norm gains.
Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);
Tensor orthogonal(std::size_t n, Rng& rng);

// Single GRU layer. Gates use one bias each; h' = z*h + (1-z)*candidate.
// With layer_norm, each gate's summed pre-activation is normalized before
// the nonlinearity (gain and offset per gate).
struct GruLayerParams {
    std::size_t input_dim = 0;
    std::size_t hidden = 0;
    bool layer_norm = false;

    Tensor wz, uz, bz;
    Tensor wr, ur, br;
    Tensor wh, uh, bh;
    Tensor gz, oz, gr, orr, gh, oh;

    void init(std::size_t in, std::size_t hid, bool ln, Rng& rng);
    void register_params(ParamRegistry& reg, const std::string& prefix);
    std::size_t param_count() const;
};

// One step: x [BxD], h [BxH] -> h' [BxH]
Var gru_step(Tape& t, TapeBind& b, const GruLayerParams& p, Var x, Var h);

// Full pass over a step-major sequence. step_masks, when non-empty, holds one
// Bx1 {0,1} column per step; masked steps leave the state untouched. The
// returned vector has one BxH output per original step index.
std::vector<Var> gru_sequence(Tape& t, TapeBind& b, const GruLayerParams& p, const std::vector<Var>& xs,
                              const std::vector<Var>& step_masks, bool reverse);

// Stack of bidirectional GRU layers.
struct BiGruStackParams {
    std::vector<GruLayerParams> fwd;
    std::vector<GruLayerParams> bwd;

    void init(std::size_t input_dim, const std::vector<std::size_t>& hidden_per_dir, bool ln, Rng& rng);
    void register_params(ParamRegistry& reg, const std::string& prefix);
    std::size_t context_dim() const { return 2 * fwd.back().hidden; }
};

struct BiGruOut {
    std::vector<Var> outputs;  // per step, forward and backward concatenated
    Var context;               // top layer: forward at last step ++ backward at first step
};

// layer_input_dropout, when given, holds one mask per layer input (already
// scaled by 1/keep) applied to that layer's inputs at every step.
BiGruOut bigru_forward(Tape& t, TapeBind& b, const BiGruStackParams& p, const std::vector<Var>& inputs,
                       const std::vector<Var>& step_masks, const std::vector<Tensor>* layer_input_dropout);

struct DenseParams {
    Tensor w, b;
    void init(std::size_t in, std::size_t out, Rng& rng);
    void register_params(ParamRegistry& reg, const std::string& prefix);
    std::size_t param_count() const { return w.size() + b.size(); }
};

enum class Activation { kLinear, kSoftmax, kSoftplus, kSigmoid };

Var dense(Tape& t, TapeBind& b, const DenseParams& p, Var x);
Var dense_act(Tape& t, TapeBind& b, const DenseParams& p, Var x, Activation act);

struct EmbeddingParams {
    Tensor table;  // vocab x dim
    void init(std::size_t vocab, std::size_t dim, Rng& rng);
    void register_params(ParamRegistry& reg, const std::string& prefix);
};

Var embed(Tape& t, TapeBind& b, const EmbeddingParams& p, const std::vector<int>& ids);

// Inverted dropout mask: entries are 0 with probability rate, else 1/(1-rate).
Tensor dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng);
// Plain-data dropout; identity when not training or rate == 0.
Tensor dropout(const Tensor& x, double rate, bool training, Rng& rng);

// Convenience single-step cell on plain tensors (x, h as 1xN rows).
Tensor gru_cell(const Tensor& x, const Tensor& h, const GruLayerParams& p);
// (x - mean) / sqrt(var + eps) * gain + bias over a single vector.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias);

}  // namespace mlmap
