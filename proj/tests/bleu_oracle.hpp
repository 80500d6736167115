#pragma once

// Brute-force corpus BLEU reference, written independently of the library
// scorer: token-vector keys in ordered maps, long double arithmetic, direct
// transcription of the definition.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

namespace bleu_oracle {

using Sentence = std::vector<std::string>;

inline long double score(const std::vector<Sentence>& hyps, const std::vector<std::vector<Sentence>>& refs,
                         int max_n = 4) {
    long long c_total = 0, r_total = 0;
    std::vector<long long> clipped(static_cast<std::size_t>(max_n), 0), emitted(static_cast<std::size_t>(max_n), 0);

    for (std::size_t item = 0; item < hyps.size(); ++item) {
        const Sentence& hyp = hyps[item];
        c_total += static_cast<long long>(hyp.size());

        long long best_len = -1, best_diff = 1LL << 60;
        for (const Sentence& ref : refs[item]) {
            long long len = static_cast<long long>(ref.size());
            long long diff = std::llabs(len - static_cast<long long>(hyp.size()));
            if (diff < best_diff || (diff == best_diff && len < best_len)) {
                best_diff = diff;
                best_len = len;
            }
        }
        r_total += best_len;

        for (int n = 1; n <= max_n; ++n) {
            std::map<Sentence, long long> hyp_counts;
            for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= hyp.size(); ++i)
                ++hyp_counts[Sentence(hyp.begin() + static_cast<std::ptrdiff_t>(i),
                                      hyp.begin() + static_cast<std::ptrdiff_t>(i) + n)];
            std::map<Sentence, long long> ref_max;
            for (const Sentence& ref : refs[item]) {
                std::map<Sentence, long long> counts;
                for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= ref.size(); ++i)
                    ++counts[Sentence(ref.begin() + static_cast<std::ptrdiff_t>(i),
                                      ref.begin() + static_cast<std::ptrdiff_t>(i) + n)];
                for (const auto& [gram, count] : counts) ref_max[gram] = std::max(ref_max[gram], count);
            }
            for (const auto& [gram, count] : hyp_counts) {
                emitted[static_cast<std::size_t>(n - 1)] += count;
                auto it = ref_max.find(gram);
                if (it != ref_max.end())
                    clipped[static_cast<std::size_t>(n - 1)] += std::min(count, it->second);
            }
        }
    }

    long double log_p = 0.0L;
    for (int n = 1; n <= max_n; ++n) {
        long double num = static_cast<long double>(clipped[static_cast<std::size_t>(n - 1)]);
        long double den = static_cast<long double>(emitted[static_cast<std::size_t>(n - 1)]);
        if (n >= 2 && num == 0.0L) {
            num += 1.0L;
            den += 1.0L;
        }
        if (den <= 0.0L || num <= 0.0L) return 0.0L;
        log_p += std::log(num / den) / max_n;
    }
    if (c_total == 0) return 0.0L;
    long double bp =
        c_total > r_total ? 1.0L : std::exp(1.0L - static_cast<long double>(r_total) / static_cast<long double>(c_total));
    return bp * std::exp(log_p);
}

}  // namespace bleu_oracle
