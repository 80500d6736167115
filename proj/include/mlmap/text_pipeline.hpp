#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace mlmap {

// Reserved vocabulary entries. PAD fills sequences to a fixed length, SOS/EOS
// bracket every sentence, UNK absorbs words missing from the vocabulary.
enum ReservedToken : int { kPad = 0, kSos = 1, kEos = 2, kUnk = 3 };

struct Vocabulary {
    std::vector<std::string> index_to_word;  // positions 0..3 are reserved
    std::unordered_map<std::string, int> word_to_index;

    std::size_t size() const { return index_to_word.size(); }
    int lookup(const std::string& w) const;  // kUnk when absent

    std::string to_json() const;
    static Vocabulary from_json(const std::string& text);
};

// token -> replacement applied during normalization
using SpellingTable = std::map<std::string, std::string>;

SpellingTable load_spelling_table(const std::string& path);

// lower-case, strip punctuation, apply spelling corrections token-wise,
// collapse whitespace
std::string normalize_sentence(const std::string& text, const SpellingTable& spelling = {});

// splits normalized text on spaces; no empty tokens
std::vector<std::string> tokenize(const std::string& text);

// reserved tokens first, then words in order of first appearance
Vocabulary build_vocab(const std::vector<std::vector<std::string>>& corpus);

struct SentenceRecord {
    std::vector<std::string> tokens;
    std::vector<int> indices;  // SOS ... EOS PAD..., fixed length
    int active_length = 0;     // tokens + 2
};

// Throws when the sentence does not fit max_len with its SOS/EOS markers.
SentenceRecord encode_sentence(const Vocabulary& vocab, const std::vector<std::string>& tokens,
                               std::size_t max_len = 41);

// strips reserved tokens; throws on an out-of-range index
std::vector<std::string> decode_indices(const Vocabulary& vocab, const std::vector<int>& indices);

}  // namespace mlmap
