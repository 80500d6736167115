#include "mlmap/m2l_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mlmap {

M2lConfig M2lConfig::from_run_config(const RunConfig& rc, std::size_t vocab) {
    M2lConfig c;
    c.joints = rc.motion_joints;
    c.encoder_units = rc.encoder_units;
    c.decoder_units = rc.decoder_units;
    c.embedding_dim = rc.embedding_dimension;
    c.vocab_size = vocab;
    c.dropout = rc.dropout_rate;
    c.layer_norm = rc.layer_norm;
    c.max_motion_len = rc.max_motion_length;
    c.max_sentence_len = rc.max_sentence_length;
    return c;
}

M2lModel::M2lModel(const M2lConfig& cfg, Rng& init_rng) : cfg_(cfg) {
    if (cfg_.vocab_size == 0) throw std::invalid_argument("M2lModel: vocabulary size not set");
    encoder_.init(cfg_.joints + 1, cfg_.encoder_units, cfg_.layer_norm, init_rng);
    embedding_.init(cfg_.vocab_size, cfg_.embedding_dim, init_rng);

    const std::size_t ctx = cfg_.context_dim();
    decoder_.resize(cfg_.decoder_units.size());
    std::size_t prev_out = 0;
    for (std::size_t l = 0; l < decoder_.size(); ++l) {
        std::size_t in = ctx + cfg_.embedding_dim + prev_out;
        decoder_[l].init(in, cfg_.decoder_units[l], cfg_.layer_norm, init_rng);
        prev_out = cfg_.decoder_units[l];
    }
    std::size_t head_in = 0;
    for (std::size_t h : cfg_.decoder_units) head_in += h;
    head_.init(head_in, cfg_.vocab_size, init_rng);

    encoder_.register_params(registry_, "encoder");
    embedding_.register_params(registry_, "embedding");
    for (std::size_t l = 0; l < decoder_.size(); ++l)
        decoder_[l].register_params(registry_, "decoder.l" + std::to_string(l));
    head_.register_params(registry_, "head");
}

std::vector<std::pair<std::string, std::size_t>> M2lModel::param_breakdown() const {
    std::vector<std::pair<std::string, std::size_t>> rows;
    for (std::size_t l = 0; l < encoder_.fwd.size(); ++l)
        rows.emplace_back("encoder layer " + std::to_string(l) + " (both directions)",
                          encoder_.fwd[l].param_count() + encoder_.bwd[l].param_count());
    rows.emplace_back("embedding", embedding_.table.size());
    for (std::size_t l = 0; l < decoder_.size(); ++l)
        rows.emplace_back("decoder layer " + std::to_string(l), decoder_[l].param_count());
    rows.emplace_back("softmax head", head_.param_count());
    return rows;
}

M2lModel::Batch M2lModel::make_batch(const std::vector<const PreparedMotion*>& motions,
                                     const std::vector<const PreparedText*>& sentences) const {
    if (motions.size() != sentences.size() || motions.empty())
        throw std::invalid_argument("M2lModel::make_batch: bad pairing");
    const std::size_t batch = motions.size();
    const std::size_t width = cfg_.joints + 1;

    std::size_t enc_steps = 0;
    for (const PreparedMotion* m : motions) {
        if (m->active_len <= 0) throw std::invalid_argument("M2lModel::make_batch: motion with no active frames");
        enc_steps = std::max(enc_steps, static_cast<std::size_t>(m->active_len));
    }
    std::size_t dec_steps = 0;
    for (const PreparedText* s : sentences)
        dec_steps = std::max(dec_steps, static_cast<std::size_t>(s->active_length) - 1);

    Batch out;
    out.batch = batch;
    out.enc_steps.assign(enc_steps, Tensor(batch, width));
    out.enc_masks.assign(enc_steps, Tensor(batch, 1));
    for (std::size_t e = 0; e < batch; ++e) {
        const PreparedMotion& m = *motions[e];
        for (std::size_t t = 0; t < enc_steps; ++t) {
            for (std::size_t j = 0; j < width; ++j) out.enc_steps[t](e, j) = m.frames(t, j);
            out.enc_masks[t](e, 0) = t < static_cast<std::size_t>(m.active_len) ? 1.0 : 0.0;
        }
    }

    // decoder input at t is the previous word (SOS first); the target is the
    // next word, with EOS as the final target
    out.dec_inputs.assign(dec_steps, std::vector<int>(batch, kPad));
    out.dec_targets.assign(dec_steps, std::vector<int>(batch, kPad));
    out.dec_masks.assign(dec_steps, Tensor(batch, 1));
    for (std::size_t e = 0; e < batch; ++e) {
        const PreparedText& s = *sentences[e];
        const std::size_t steps = static_cast<std::size_t>(s.active_length) - 1;
        for (std::size_t t = 0; t < steps; ++t) {
            out.dec_inputs[t][e] = s.indices[t];
            out.dec_targets[t][e] = s.indices[t + 1];
            out.dec_masks[t](e, 0) = 1.0;
            out.active_targets += 1.0;
        }
    }
    return out;
}

std::vector<Var> M2lModel::decoder_step_vars(Tape& tape, TapeBind& bind, Var context, Var emb,
                                             std::vector<Var>& states,
                                             const std::vector<Tensor>* layer_dropout) const {
    std::vector<Var> outs;
    outs.reserve(decoder_.size());
    for (std::size_t l = 0; l < decoder_.size(); ++l) {
        std::vector<Var> parts = {context, emb};
        if (l > 0) parts.push_back(outs.back());
        Var x = tape.concat_cols(parts);
        if (layer_dropout) x = tape.mul(x, tape.constant((*layer_dropout)[l], "dropout"));
        states[l] = gru_step(tape, bind, decoder_[l], x, states[l]);
        outs.push_back(states[l]);
    }
    return outs;
}

M2lModel::LossGraph M2lModel::loss_graph(Tape& tape, TapeBind& bind, const Batch& batch, Rng* dropout_rng) const {
    const std::size_t b = batch.batch;

    std::vector<Var> enc_inputs, enc_masks;
    for (const Tensor& t : batch.enc_steps) enc_inputs.push_back(tape.constant(t, "motion"));
    for (const Tensor& t : batch.enc_masks) enc_masks.push_back(tape.constant(t, "mask"));

    std::vector<Tensor> enc_dropout, dec_dropout;
    Tensor emb_dropout, head_dropout;
    if (dropout_rng) {
        std::size_t in = cfg_.joints + 1;
        for (std::size_t u : cfg_.encoder_units) {
            enc_dropout.push_back(dropout_mask(b, in, cfg_.dropout, *dropout_rng));
            in = 2 * u;
        }
        emb_dropout = dropout_mask(b, cfg_.embedding_dim, cfg_.dropout, *dropout_rng);
        std::size_t prev = 0;
        for (std::size_t u : cfg_.decoder_units) {
            dec_dropout.push_back(dropout_mask(b, cfg_.context_dim() + cfg_.embedding_dim + prev, cfg_.dropout, *dropout_rng));
            prev = u;
        }
        std::size_t head_in = 0;
        for (std::size_t u : cfg_.decoder_units) head_in += u;
        head_dropout = dropout_mask(b, head_in, cfg_.dropout, *dropout_rng);
    }

    BiGruOut enc = bigru_forward(tape, bind, encoder_, enc_inputs, enc_masks,
                                 dropout_rng ? &enc_dropout : nullptr);
    Var context = enc.context;

    std::vector<Var> states;
    for (const GruLayerParams& p : decoder_) states.push_back(tape.constant(Tensor::zeros(b, p.hidden), "dec_h0"));

    Var emb_mask_var{}, head_mask_var{};
    if (dropout_rng) {
        emb_mask_var = tape.constant(emb_dropout, "dropout");
        head_mask_var = tape.constant(head_dropout, "dropout");
    }

    Var total = tape.constant(Tensor::zeros(1, 1), "zero");
    for (std::size_t t = 0; t < batch.dec_inputs.size(); ++t) {
        Var emb = embed(tape, bind, embedding_, batch.dec_inputs[t]);
        if (dropout_rng) emb = tape.mul(emb, emb_mask_var);
        std::vector<Var> outs = decoder_step_vars(tape, bind, context, emb, states,
                                                  dropout_rng ? &dec_dropout : nullptr);
        Var feats = tape.concat_cols(outs);
        if (dropout_rng) feats = tape.mul(feats, head_mask_var);
        Var probs = tape.softmax_rows(dense(tape, bind, head_, feats));
        Var picked = tape.pick_cols(probs, batch.dec_targets[t]);
        Var logp = tape.log_clamped(picked, 1e-12);
        Var masked = tape.mul(logp, tape.constant(batch.dec_masks[t], "tmask"));
        total = tape.add(total, tape.sum_to_scalar(masked));
    }
    LossGraph g;
    g.sum_loss = tape.scale(total, -1.0);
    g.active_count = batch.active_targets;
    return g;
}

Tensor M2lModel::encode_motion(const Tensor& padded_frames, int active_len) const {
    if (active_len <= 0) throw std::invalid_argument("encode_motion: no active frames");
    if (padded_frames.cols != cfg_.joints + 1)
        throw std::invalid_argument("encode_motion: expected " + std::to_string(cfg_.joints + 1) + " columns");
    Tape tape;
    TapeBind bind(tape);
    std::vector<Var> steps;
    steps.reserve(static_cast<std::size_t>(active_len));
    for (int t = 0; t < active_len; ++t) {
        Tensor row(1, padded_frames.cols);
        for (std::size_t j = 0; j < padded_frames.cols; ++j) row(0, j) = padded_frames(static_cast<std::size_t>(t), j);
        steps.push_back(tape.constant(std::move(row), "motion"));
    }
    BiGruOut enc = bigru_forward(tape, bind, encoder_, steps, {}, nullptr);
    return enc.context.value();
}

M2lModel::DecoderState M2lModel::initial_state() const {
    DecoderState st;
    for (const GruLayerParams& p : decoder_) st.h.push_back(Tensor::zeros(1, p.hidden));
    return st;
}

std::pair<Tensor, M2lModel::DecoderState> M2lModel::decode_step(const Tensor& context, int prev_word,
                                                                const DecoderState& state) const {
    if (prev_word < 0 || static_cast<std::size_t>(prev_word) >= cfg_.vocab_size)
        throw std::out_of_range("decode_step: word index out of range");
    Tape tape;
    TapeBind bind(tape);
    Var ctx = tape.constant(context, "context");
    Var emb = embed(tape, bind, embedding_, {prev_word});
    std::vector<Var> states;
    for (const Tensor& h : state.h) states.push_back(tape.constant(h, "dec_h"));
    std::vector<Var> outs = decoder_step_vars(tape, bind, ctx, emb, states, nullptr);
    Var probs = tape.softmax_rows(dense(tape, bind, head_, tape.concat_cols(outs)));

    DecoderState next;
    for (Var s : states) next.h.push_back(s.value());
    return {probs.value(), next};
}

std::vector<TextHypothesis> M2lModel::beam_search(const Tensor& context, std::size_t width) const {
    if (width < 1) throw std::invalid_argument("beam_search: width must be >= 1");
    const std::size_t max_emit = cfg_.max_sentence_len - 1;  // SOS occupies one slot

    struct Item {
        std::vector<int> seq;
        double lp = 0.0;
        DecoderState state;
        bool done = false;
    };
    std::vector<Item> pool(1);
    pool[0].state = initial_state();

    for (std::size_t step = 0; step < max_emit; ++step) {
        bool any_live = false;
        for (const Item& it : pool) any_live = any_live || !it.done;
        if (!any_live) break;

        std::vector<Item> candidates;
        for (Item& it : pool) {
            if (it.done) {
                candidates.push_back(std::move(it));
                continue;
            }
            int prev = it.seq.empty() ? kSos : it.seq.back();
            auto [probs, next] = decode_step(context, prev, it.state);
            const bool last_chance = step + 1 == max_emit;
            for (std::size_t w = 0; w < cfg_.vocab_size; ++w) {
                if (last_chance && static_cast<int>(w) != kEos) continue;
                Item cand;
                cand.seq = it.seq;
                cand.seq.push_back(static_cast<int>(w));
                cand.lp = it.lp + std::log(std::max(probs(0, w), 1e-300));
                cand.state = next;
                cand.done = static_cast<int>(w) == kEos;
                candidates.push_back(std::move(cand));
            }
        }
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const Item& a, const Item& b) { return a.lp > b.lp; });
        if (candidates.size() > width) candidates.resize(width);
        pool = std::move(candidates);
    }

    std::vector<TextHypothesis> out;
    out.reserve(pool.size());
    for (Item& it : pool) out.push_back({std::move(it.seq), it.lp});
    std::stable_sort(out.begin(), out.end(),
                     [](const TextHypothesis& a, const TextHypothesis& b) { return a.log_prob > b.log_prob; });
    return out;
}

}  // namespace mlmap
