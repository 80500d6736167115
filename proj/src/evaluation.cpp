#include "mlmap/evaluation.hpp"

#include "mlmap/training.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace mlmap {

namespace {

// n-gram key: tokens joined with an unlikely separator
std::unordered_map<std::string, int> ngram_counts(const std::vector<std::string>& tokens, int n) {
    std::unordered_map<std::string, int> counts;
    if (static_cast<int>(tokens.size()) < n) return counts;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (int k = 1; k < n; ++k) {
            key.push_back('\x1f');
            key += tokens[i + static_cast<std::size_t>(k)];
        }
        ++counts[key];
    }
    return counts;
}

}  // namespace

double corpus_bleu(const std::vector<std::vector<std::string>>& hypotheses,
                   const std::vector<std::vector<std::vector<std::string>>>& references, int max_n) {
    if (hypotheses.empty() || hypotheses.size() != references.size())
        throw std::invalid_argument("corpus_bleu: empty corpus or mismatched reference count");
    for (const auto& refs : references)
        if (refs.empty()) throw std::invalid_argument("corpus_bleu: item without references");

    std::vector<long long> numerators(static_cast<std::size_t>(max_n), 0);
    std::vector<long long> denominators(static_cast<std::size_t>(max_n), 0);
    long long hyp_len = 0, ref_len = 0;

    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
        const auto& hyp = hypotheses[i];
        const auto& refs = references[i];
        hyp_len += static_cast<long long>(hyp.size());

        // closest reference length; ties go to the shorter reference
        long long best_len = static_cast<long long>(refs[0].size());
        long long best_diff = std::llabs(best_len - static_cast<long long>(hyp.size()));
        for (const auto& ref : refs) {
            long long len = static_cast<long long>(ref.size());
            long long diff = std::llabs(len - static_cast<long long>(hyp.size()));
            if (diff < best_diff || (diff == best_diff && len < best_len)) {
                best_diff = diff;
                best_len = len;
            }
        }
        ref_len += best_len;

        for (int n = 1; n <= max_n; ++n) {
            auto hyp_counts = ngram_counts(hyp, n);
            std::unordered_map<std::string, int> max_ref;
            for (const auto& ref : refs)
                for (const auto& [key, count] : ngram_counts(ref, n)) {
                    int& cur = max_ref[key];
                    cur = std::max(cur, count);
                }
            long long clipped = 0, total = 0;
            for (const auto& [key, count] : hyp_counts) {
                total += count;
                auto it = max_ref.find(key);
                if (it != max_ref.end()) clipped += std::min(count, it->second);
            }
            numerators[static_cast<std::size_t>(n - 1)] += clipped;
            denominators[static_cast<std::size_t>(n - 1)] += total;
        }
    }

    double log_precision = 0.0;
    for (int n = 1; n <= max_n; ++n) {
        double num = static_cast<double>(numerators[static_cast<std::size_t>(n - 1)]);
        double den = static_cast<double>(denominators[static_cast<std::size_t>(n - 1)]);
        if (n >= 2 && num == 0.0) {
            num += 1.0;
            den += 1.0;
        }
        double p = den > 0.0 ? num / den : 0.0;
        if (p <= 0.0) return 0.0;
        log_precision += std::log(p) / static_cast<double>(max_n);
    }
    if (hyp_len == 0) return 0.0;
    double bp = hyp_len > ref_len ? 1.0 : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
    return bp * std::exp(log_precision);
}

std::string BleuReport::to_json() const {
    nlohmann::json j;
    j["split"] = split;
    j["max_n"] = max_n;
    j["smoothing"] = smoothing;
    j["scores_by_rank"] = scores_by_rank;
    return j.dump(2) + "\n";
}

std::string BleuReport::to_csv() const {
    std::ostringstream os;
    os << "rank,split,score\n";
    os.precision(17);
    for (std::size_t r = 0; r < scores_by_rank.size(); ++r)
        os << (r + 1) << "," << split << "," << scores_by_rank[r] << "\n";
    return os.str();
}

BleuReport bleu_by_rank(const M2lModel& model, const Vocabulary& vocab, const std::vector<M2lEvalItem>& items,
                        std::size_t width, int threads, const std::string& split_name) {
    std::vector<const M2lEvalItem*> usable;
    for (const M2lEvalItem& item : items) {
        if (item.references.empty()) {
            std::cerr << "warning: motion " << item.id << " has no annotations, skipped\n";
            continue;
        }
        usable.push_back(&item);
    }
    if (usable.empty()) throw std::runtime_error("bleu_by_rank: no motions with references");

    std::vector<std::vector<TextHypothesis>> hyps(usable.size());
    parallel_for(usable.size(), threads, [&](std::size_t i) {
        const PreparedMotion& m = *usable[i]->motion;
        Tensor context = model.encode_motion(m.frames, m.active_len);
        hyps[i] = model.beam_search(context, width);
    });

    BleuReport report;
    report.split = split_name;
    for (std::size_t rank = 0; rank < width; ++rank) {
        std::vector<std::vector<std::string>> corpus_hyps;
        std::vector<std::vector<std::vector<std::string>>> corpus_refs;
        for (std::size_t i = 0; i < usable.size(); ++i) {
            std::size_t r = std::min(rank, hyps[i].size() - 1);  // duplicate the last beam if short
            corpus_hyps.push_back(decode_indices(vocab, hyps[i][r].indices));
            corpus_refs.push_back(usable[i]->references);
        }
        report.scores_by_rank.push_back(corpus_bleu(corpus_hyps, corpus_refs));
    }
    return report;
}

std::string ChainedReport::to_json() const {
    nlohmann::json j;
    j["split"] = split;
    j["baseline_bleu"] = baseline_bleu;
    j["bleu_by_rank"] = bleu_by_rank;
    j["relative_by_rank"] = relative_by_rank;
    return j.dump(2) + "\n";
}

std::string ChainedReport::to_csv() const {
    std::ostringstream os;
    os << "rank,split,bleu,relative\n";
    os.precision(17);
    for (std::size_t r = 0; r < bleu_by_rank.size(); ++r)
        os << (r + 1) << "," << split << "," << bleu_by_rank[r] << "," << relative_by_rank[r] << "\n";
    return os.str();
}

ChainedReport chained_relative_performance(const L2mModel& l2m, const M2lModel& m2l, const Vocabulary& vocab,
                                           const std::vector<ChainedEvalItem>& items, std::size_t width,
                                           std::size_t samples, std::uint64_t seed, double baseline_bleu,
                                           int threads, const std::string& split_name) {
    if (!(baseline_bleu > 0.0)) throw std::invalid_argument("chained_relative_performance: baseline must be positive");

    struct Row {
        std::vector<TextHypothesis> hyps;
        bool ok = false;
    };
    std::vector<Row> rows(items.size());
    parallel_for(items.size(), threads, [&](std::size_t i) {
        const PreparedText& s = *items[i].sentence;
        Tensor context = l2m.encode_text(s.indices, s.active_length);
        Rng rng(mix_seed({seed, 0x11, i}));
        std::vector<MotionHypothesis> motions = l2m.beam_search(context, width, samples, rng);
        const Tensor& frames = motions.front().frames;
        int active = 0;
        while (active < static_cast<int>(frames.rows) &&
               frames(static_cast<std::size_t>(active), frames.cols - 1) != 0.0)
            ++active;
        if (active == 0) {
            std::cerr << "warning: sentence of " << items[i].id << " produced a motion with no active frames\n";
            return;
        }
        Tensor m2l_context = m2l.encode_motion(frames, active);
        rows[i].hyps = m2l.beam_search(m2l_context, width);
        rows[i].ok = true;
    });

    ChainedReport report;
    report.split = split_name;
    report.baseline_bleu = baseline_bleu;
    for (std::size_t rank = 0; rank < width; ++rank) {
        std::vector<std::vector<std::string>> corpus_hyps;
        std::vector<std::vector<std::vector<std::string>>> corpus_refs;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (!rows[i].ok || items[i].references.empty()) continue;
            std::size_t r = std::min(rank, rows[i].hyps.size() - 1);
            corpus_hyps.push_back(decode_indices(vocab, rows[i].hyps[r].indices));
            corpus_refs.push_back(items[i].references);
        }
        if (corpus_hyps.empty()) throw std::runtime_error("chained_relative_performance: no usable items");
        double score = corpus_bleu(corpus_hyps, corpus_refs);
        report.bleu_by_rank.push_back(score);
        report.relative_by_rank.push_back(score / baseline_bleu);
    }
    return report;
}

}  // namespace mlmap
