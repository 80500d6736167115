#include "mlmap/l2m_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mlmap {

namespace {
constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5 * ln(2*pi)
}

L2mConfig L2mConfig::from_run_config(const RunConfig& rc, std::size_t vocab) {
    L2mConfig c;
    c.joints = rc.motion_joints;
    c.encoder_units = rc.encoder_units;
    c.decoder_units = rc.decoder_units;
    c.embedding_dim = rc.embedding_dimension;
    c.vocab_size = vocab;
    c.mixture_components = rc.mixture_components;
    c.dropout = rc.dropout_rate;
    c.layer_norm = rc.layer_norm;
    c.max_motion_len = rc.max_motion_length;
    c.max_sentence_len = rc.max_sentence_length;
    return c;
}

double mdn_log_likelihood(const std::vector<double>& frame, const MdnParams& params) {
    const std::size_t joints = params.mus.cols;
    if (frame.size() != joints + 1) throw std::invalid_argument("mdn_log_likelihood: frame length mismatch");
    const std::size_t k = params.alphas.size();

    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(k);
    for (std::size_t c = 0; c < k; ++c) {
        double t = std::log(std::max(params.alphas[c], 1e-12));
        for (std::size_t j = 0; j < joints; ++j) {
            double sigma = std::max(params.sigmas(c, j), kSigmaFloor);
            double d = frame[j] - params.mus(c, j);
            t += -kHalfLog2Pi - std::log(sigma) - d * d / (2.0 * sigma * sigma);
        }
        terms[c] = t;
        best = std::max(best, t);
    }
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - best);
    double continuous = best + std::log(acc);

    double p = params.p_active;
    double bern = frame[joints] != 0.0 ? std::log(std::max(p, 1e-12)) : std::log(std::max(1.0 - p, 1e-12));
    return continuous + bern;
}

std::vector<double> sample_frame(const MdnParams& params, Rng& rng) {
    const std::size_t joints = params.mus.cols;
    std::size_t c = rng.categorical(params.alphas);
    std::vector<double> frame(joints + 1);
    for (std::size_t j = 0; j < joints; ++j) frame[j] = params.mus(c, j) + params.sigmas(c, j) * rng.gaussian();
    frame[joints] = rng.bernoulli(params.p_active) ? 1.0 : 0.0;
    return frame;
}

L2mModel::L2mModel(const L2mConfig& cfg, Rng& init_rng) : cfg_(cfg) {
    if (cfg_.vocab_size == 0) throw std::invalid_argument("L2mModel: vocabulary size not set");
    if (cfg_.mixture_components < 1) throw std::invalid_argument("L2mModel: need at least one mixture component");
    embedding_.init(cfg_.vocab_size, cfg_.embedding_dim, init_rng);
    encoder_.init(cfg_.embedding_dim, cfg_.encoder_units, cfg_.layer_norm, init_rng);

    const std::size_t ctx = cfg_.context_dim();
    const std::size_t frame_dim = cfg_.joints + 1;
    decoder_.resize(cfg_.decoder_units.size());
    std::size_t prev_out = 0;
    for (std::size_t l = 0; l < decoder_.size(); ++l) {
        decoder_[l].init(ctx + frame_dim + prev_out, cfg_.decoder_units[l], cfg_.layer_norm, init_rng);
        prev_out = cfg_.decoder_units[l];
    }
    std::size_t head_in = 0;
    for (std::size_t h : cfg_.decoder_units) head_in += h;
    head_.init(head_in, cfg_.head_outputs(), init_rng);

    embedding_.register_params(registry_, "embedding");
    encoder_.register_params(registry_, "encoder");
    for (std::size_t l = 0; l < decoder_.size(); ++l)
        decoder_[l].register_params(registry_, "decoder.l" + std::to_string(l));
    head_.register_params(registry_, "head");
}

std::vector<std::pair<std::string, std::size_t>> L2mModel::param_breakdown() const {
    std::vector<std::pair<std::string, std::size_t>> rows;
    rows.emplace_back("embedding", embedding_.table.size());
    for (std::size_t l = 0; l < encoder_.fwd.size(); ++l)
        rows.emplace_back("encoder layer " + std::to_string(l) + " (both directions)",
                          encoder_.fwd[l].param_count() + encoder_.bwd[l].param_count());
    for (std::size_t l = 0; l < decoder_.size(); ++l)
        rows.emplace_back("decoder layer " + std::to_string(l), decoder_[l].param_count());
    rows.emplace_back("mixture head", head_.param_count());
    return rows;
}

L2mModel::Batch L2mModel::make_batch(const std::vector<const PreparedText*>& sentences,
                                     const std::vector<const PreparedMotion*>& motions) const {
    if (motions.size() != sentences.size() || motions.empty())
        throw std::invalid_argument("L2mModel::make_batch: bad pairing");
    const std::size_t batch = motions.size();
    const std::size_t width = cfg_.joints + 1;

    std::size_t enc_steps = 0;
    for (const PreparedText* s : sentences) enc_steps = std::max(enc_steps, static_cast<std::size_t>(s->active_length));
    std::size_t dec_steps = 0;
    for (const PreparedMotion* m : motions) {
        if (m->active_len <= 0) throw std::invalid_argument("L2mModel::make_batch: motion with no active frames");
        dec_steps = std::max(dec_steps, static_cast<std::size_t>(m->active_len));
    }

    Batch out;
    out.batch = batch;
    out.enc_steps.assign(enc_steps, std::vector<int>(batch, kPad));
    out.enc_masks.assign(enc_steps, Tensor(batch, 1));
    for (std::size_t e = 0; e < batch; ++e) {
        const PreparedText& s = *sentences[e];
        for (std::size_t t = 0; t < static_cast<std::size_t>(s.active_length); ++t) {
            out.enc_steps[t][e] = s.indices[t];
            out.enc_masks[t](e, 0) = 1.0;
        }
    }

    out.dec_inputs.assign(dec_steps, Tensor(batch, width));
    out.dec_targets.assign(dec_steps, Tensor(batch, width));
    out.dec_masks.assign(dec_steps, Tensor(batch, 1));
    for (std::size_t e = 0; e < batch; ++e) {
        const PreparedMotion& m = *motions[e];
        for (std::size_t t = 0; t < dec_steps; ++t) {
            for (std::size_t j = 0; j < width; ++j) {
                // the first decoder input is the all-ones start frame
                out.dec_inputs[t](e, j) = t == 0 ? 1.0 : m.frames(t - 1, j);
                out.dec_targets[t](e, j) = m.frames(t, j);
            }
            if (t < static_cast<std::size_t>(m.active_len)) {
                out.dec_masks[t](e, 0) = 1.0;
                out.active_targets += 1.0;
            }
        }
    }
    return out;
}

std::vector<Var> L2mModel::decoder_step_vars(Tape& tape, TapeBind& bind, Var context, Var frame,
                                             std::vector<Var>& states,
                                             const std::vector<Tensor>* layer_dropout) const {
    std::vector<Var> outs;
    outs.reserve(decoder_.size());
    for (std::size_t l = 0; l < decoder_.size(); ++l) {
        std::vector<Var> parts = {context, frame};
        if (l > 0) parts.push_back(outs.back());
        Var x = tape.concat_cols(parts);
        if (layer_dropout) x = tape.mul(x, tape.constant((*layer_dropout)[l], "dropout"));
        states[l] = gru_step(tape, bind, decoder_[l], x, states[l]);
        outs.push_back(states[l]);
    }
    return outs;
}

L2mModel::HeadVars L2mModel::head_vars(Tape& tape, TapeBind& bind, Var feats) const {
    const std::size_t k = cfg_.mixture_components;
    const std::size_t kj = k * cfg_.joints;
    Var raw = dense(tape, bind, head_, feats);
    HeadVars h;
    h.alphas = tape.softmax_rows(tape.slice_cols(raw, 0, k));
    h.mus = tape.slice_cols(raw, k, kj);
    h.sigmas = tape.softplus(tape.slice_cols(raw, k + kj, kj));
    h.p = tape.sigmoid(tape.slice_cols(raw, k + 2 * kj, 1));
    return h;
}

Var L2mModel::component_log_density(Tape& tape, const HeadVars& head, Var target_tiled) const {
    const std::size_t b = head.mus.value().rows;
    const std::size_t k = cfg_.mixture_components;
    Var sig = tape.max_const(head.sigmas, kSigmaFloor);
    Var diff = tape.sub(head.mus, target_tiled);
    Var quad = tape.mul(tape.mul(diff, diff), tape.reciprocal(tape.scale(tape.mul(sig, sig), 2.0)));
    Var per_dim = tape.scale(tape.add(tape.log_clamped(sig, 1e-12), quad), -1.0);
    Var log_n = tape.group_sum_cols(per_dim, cfg_.joints);
    Var norm = tape.constant(Tensor::full(b, k, -kHalfLog2Pi * static_cast<double>(cfg_.joints)), "gauss_norm");
    return tape.add(log_n, norm);
}

L2mModel::LossGraph L2mModel::loss_graph(Tape& tape, TapeBind& bind, const Batch& batch, Rng* dropout_rng) const {
    const std::size_t b = batch.batch;
    const std::size_t k = cfg_.mixture_components;
    const std::size_t frame_dim = cfg_.joints + 1;

    std::vector<Tensor> enc_dropout, dec_dropout;
    Tensor head_dropout;
    if (dropout_rng) {
        std::size_t in = cfg_.embedding_dim;
        for (std::size_t u : cfg_.encoder_units) {
            enc_dropout.push_back(dropout_mask(b, in, cfg_.dropout, *dropout_rng));
            in = 2 * u;
        }
        std::size_t prev = 0;
        for (std::size_t u : cfg_.decoder_units) {
            dec_dropout.push_back(dropout_mask(b, cfg_.context_dim() + frame_dim + prev, cfg_.dropout, *dropout_rng));
            prev = u;
        }
        std::size_t head_in = 0;
        for (std::size_t u : cfg_.decoder_units) head_in += u;
        head_dropout = dropout_mask(b, head_in, cfg_.dropout, *dropout_rng);
    }

    std::vector<Var> enc_inputs, enc_masks;
    for (const auto& ids : batch.enc_steps) enc_inputs.push_back(embed(tape, bind, embedding_, ids));
    for (const Tensor& t : batch.enc_masks) enc_masks.push_back(tape.constant(t, "mask"));
    BiGruOut enc = bigru_forward(tape, bind, encoder_, enc_inputs, enc_masks,
                                 dropout_rng ? &enc_dropout : nullptr);
    Var context = enc.context;

    std::vector<Var> states;
    for (const GruLayerParams& p : decoder_) states.push_back(tape.constant(Tensor::zeros(b, p.hidden), "dec_h0"));
    Var head_mask_var{};
    if (dropout_rng) head_mask_var = tape.constant(head_dropout, "dropout");
    Var ones_b1 = tape.constant(Tensor::full(b, 1, 1.0), "ones");

    Var total = tape.constant(Tensor::zeros(1, 1), "zero");
    for (std::size_t t = 0; t < batch.dec_inputs.size(); ++t) {
        Var frame_in = tape.constant(batch.dec_inputs[t], "frame_in");
        std::vector<Var> outs = decoder_step_vars(tape, bind, context, frame_in, states,
                                                  dropout_rng ? &dec_dropout : nullptr);
        Var feats = tape.concat_cols(outs);
        if (dropout_rng) feats = tape.mul(feats, head_mask_var);
        HeadVars head = head_vars(tape, bind, feats);

        Tensor tiled(b, k * cfg_.joints);
        for (std::size_t e = 0; e < b; ++e)
            for (std::size_t c = 0; c < k; ++c)
                for (std::size_t j = 0; j < cfg_.joints; ++j)
                    tiled(e, c * cfg_.joints + j) = batch.dec_targets[t](e, j);
        Var log_n = component_log_density(tape, head, tape.constant(std::move(tiled), "target"));
        Var continuous = tape.scale(tape.row_sum(tape.mul(head.alphas, log_n)), -1.0);

        Tensor flags(b, 1);
        for (std::size_t e = 0; e < b; ++e) flags(e, 0) = batch.dec_targets[t](e, cfg_.joints);
        Var f = tape.constant(std::move(flags), "flag");
        Var bern = tape.scale(tape.add(tape.mul(f, tape.log_clamped(head.p, 1e-12)),
                                       tape.mul(tape.sub(ones_b1, f),
                                                tape.log_clamped(tape.sub(ones_b1, head.p), 1e-12))),
                              -1.0);

        Var step_loss = tape.mul(tape.add(continuous, bern), tape.constant(batch.dec_masks[t], "tmask"));
        total = tape.add(total, tape.sum_to_scalar(step_loss));
    }
    LossGraph g;
    g.sum_loss = total;
    g.active_count = batch.active_targets;
    return g;
}

L2mModel::LossGraph L2mModel::exact_loss_graph(Tape& tape, TapeBind& bind, const Batch& batch) const {
    const std::size_t b = batch.batch;
    const std::size_t k = cfg_.mixture_components;

    std::vector<Var> enc_inputs, enc_masks;
    for (const auto& ids : batch.enc_steps) enc_inputs.push_back(embed(tape, bind, embedding_, ids));
    for (const Tensor& t : batch.enc_masks) enc_masks.push_back(tape.constant(t, "mask"));
    BiGruOut enc = bigru_forward(tape, bind, encoder_, enc_inputs, enc_masks, nullptr);
    Var context = enc.context;

    std::vector<Var> states;
    for (const GruLayerParams& p : decoder_) states.push_back(tape.constant(Tensor::zeros(b, p.hidden), "dec_h0"));
    Var ones_b1 = tape.constant(Tensor::full(b, 1, 1.0), "ones");

    Var total = tape.constant(Tensor::zeros(1, 1), "zero");
    for (std::size_t t = 0; t < batch.dec_inputs.size(); ++t) {
        Var frame_in = tape.constant(batch.dec_inputs[t], "frame_in");
        std::vector<Var> outs = decoder_step_vars(tape, bind, context, frame_in, states, nullptr);
        HeadVars head = head_vars(tape, bind, tape.concat_cols(outs));

        Tensor tiled(b, k * cfg_.joints);
        for (std::size_t e = 0; e < b; ++e)
            for (std::size_t c = 0; c < k; ++c)
                for (std::size_t j = 0; j < cfg_.joints; ++j)
                    tiled(e, c * cfg_.joints + j) = batch.dec_targets[t](e, j);
        Var log_n = component_log_density(tape, head, tape.constant(std::move(tiled), "target"));
        Var mix = tape.logsumexp_rows(tape.add(tape.log_clamped(head.alphas, 1e-12), log_n));
        Var continuous = tape.scale(mix, -1.0);

        Tensor flags(b, 1);
        for (std::size_t e = 0; e < b; ++e) flags(e, 0) = batch.dec_targets[t](e, cfg_.joints);
        Var f = tape.constant(std::move(flags), "flag");
        Var bern = tape.scale(tape.add(tape.mul(f, tape.log_clamped(head.p, 1e-12)),
                                       tape.mul(tape.sub(ones_b1, f),
                                                tape.log_clamped(tape.sub(ones_b1, head.p), 1e-12))),
                              -1.0);

        Var step_loss = tape.mul(tape.add(continuous, bern), tape.constant(batch.dec_masks[t], "tmask"));
        total = tape.add(total, tape.sum_to_scalar(step_loss));
    }
    LossGraph g;
    g.sum_loss = total;
    g.active_count = batch.active_targets;
    return g;
}

Tensor L2mModel::encode_text(const std::vector<int>& indices, int active_length) const {
    if (active_length < 2 || static_cast<std::size_t>(active_length) > indices.size())
        throw std::invalid_argument("encode_text: bad active length");
    Tape tape;
    TapeBind bind(tape);
    std::vector<Var> steps;
    for (int t = 0; t < active_length; ++t)
        steps.push_back(embed(tape, bind, embedding_, {indices[static_cast<std::size_t>(t)]}));
    BiGruOut enc = bigru_forward(tape, bind, encoder_, steps, {}, nullptr);
    return enc.context.value();
}

L2mModel::DecoderState L2mModel::initial_state() const {
    DecoderState st;
    for (const GruLayerParams& p : decoder_) st.h.push_back(Tensor::zeros(1, p.hidden));
    return st;
}

std::pair<MdnParams, L2mModel::DecoderState> L2mModel::decode_step(const Tensor& context,
                                                                   const std::vector<double>& prev_frame,
                                                                   const DecoderState& state) const {
    if (prev_frame.size() != cfg_.joints + 1) throw std::invalid_argument("decode_step: frame length mismatch");
    Tape tape;
    TapeBind bind(tape);
    Var ctx = tape.constant(context, "context");
    Var frame = tape.constant(Tensor::row(std::vector<double>(prev_frame)), "frame_in");
    std::vector<Var> states;
    for (const Tensor& h : state.h) states.push_back(tape.constant(h, "dec_h"));
    std::vector<Var> outs = decoder_step_vars(tape, bind, ctx, frame, states, nullptr);
    HeadVars head = head_vars(tape, bind, tape.concat_cols(outs));

    const std::size_t k = cfg_.mixture_components;
    MdnParams params;
    params.alphas.resize(k);
    for (std::size_t c = 0; c < k; ++c) params.alphas[c] = head.alphas.value()(0, c);
    params.mus = Tensor(k, cfg_.joints);
    params.sigmas = Tensor(k, cfg_.joints);
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j < cfg_.joints; ++j) {
            params.mus(c, j) = head.mus.value()(0, c * cfg_.joints + j);
            params.sigmas(c, j) = head.sigmas.value()(0, c * cfg_.joints + j);
        }
    params.p_active = head.p.value()(0, 0);

    DecoderState next;
    for (Var s : states) next.h.push_back(s.value());
    return {params, next};
}

std::vector<MotionHypothesis> L2mModel::beam_search(const Tensor& context, std::size_t width,
                                                    std::size_t samples, Rng& rng) const {
    if (width < 1 || samples < 1) throw std::invalid_argument("beam_search: width and samples must be >= 1");
    const std::size_t frame_dim = cfg_.joints + 1;

    struct Item {
        std::vector<std::vector<double>> frames;
        double ll = 0.0;
        DecoderState state;
        std::vector<double> prev;
        bool done = false;
        bool truncated = false;
    };
    std::vector<Item> pool(1);
    pool[0].state = initial_state();
    pool[0].prev.assign(frame_dim, 1.0);  // all-ones start frame

    while (true) {
        bool any_live = false;
        for (const Item& it : pool) any_live = any_live || !it.done;
        if (!any_live) break;

        std::vector<Item> candidates;
        for (Item& it : pool) {
            if (it.done) {
                candidates.push_back(std::move(it));
                continue;
            }
            auto [params, next] = decode_step(context, it.prev, it.state);
            for (std::size_t s = 0; s < samples; ++s) {
                Item cand;
                cand.frames = it.frames;
                std::vector<double> frame = sample_frame(params, rng);
                cand.ll = it.ll + mdn_log_likelihood(frame, params);
                cand.frames.push_back(frame);
                cand.state = next;
                cand.prev = std::move(frame);
                if (cand.prev[cfg_.joints] == 0.0) {
                    cand.done = true;
                } else if (cand.frames.size() >= cfg_.max_motion_len) {
                    cand.done = true;
                    cand.truncated = true;
                }
                candidates.push_back(std::move(cand));
            }
        }
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const Item& a, const Item& b) { return a.ll > b.ll; });
        if (candidates.size() > width) candidates.resize(width);
        pool = std::move(candidates);
    }

    std::vector<MotionHypothesis> out;
    out.reserve(pool.size());
    for (Item& it : pool) {
        MotionHypothesis h;
        h.log_likelihood = it.ll;
        h.truncated = it.truncated;
        h.frames = Tensor(it.frames.size(), frame_dim);
        for (std::size_t i = 0; i < it.frames.size(); ++i)
            for (std::size_t j = 0; j < frame_dim; ++j) h.frames(i, j) = it.frames[i][j];
        out.push_back(std::move(h));
    }
    std::stable_sort(out.begin(), out.end(), [](const MotionHypothesis& a, const MotionHypothesis& b) {
        return a.log_likelihood > b.log_likelihood;
    });
    return out;
}

}  // namespace mlmap
