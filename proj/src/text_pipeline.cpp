#include "mlmap/text_pipeline.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mlmap {

namespace {
const char* kReservedNames[] = {"<pad>", "<sos>", "<eos>", "<unk>"};
}

int Vocabulary::lookup(const std::string& w) const {
    auto it = word_to_index.find(w);
    return it == word_to_index.end() ? kUnk : it->second;
}

std::string Vocabulary::to_json() const {
    nlohmann::json j = index_to_word;
    return j.dump(2) + "\n";
}

Vocabulary Vocabulary::from_json(const std::string& text) {
    Vocabulary v;
    v.index_to_word = nlohmann::json::parse(text).get<std::vector<std::string>>();
    for (std::size_t i = 0; i < v.index_to_word.size(); ++i)
        v.word_to_index[v.index_to_word[i]] = static_cast<int>(i);
    return v;
}

SpellingTable load_spelling_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spelling table: " + path);
    SpellingTable table;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        table[line.substr(0, tab)] = line.substr(tab + 1);
    }
    return table;
}

std::string normalize_sentence(const std::string& text, const SpellingTable& spelling) {
    std::string cleaned;
    cleaned.reserve(text.size());
    for (unsigned char c : text) {
        if (std::isalnum(c))
            cleaned.push_back(static_cast<char>(std::tolower(c)));
        else if (std::isspace(c))
            cleaned.push_back(' ');
        // every other character counts as punctuation and is dropped
    }
    std::istringstream is(cleaned);
    std::string word, out;
    while (is >> word) {
        auto it = spelling.find(word);
        if (it != spelling.end()) word = it->second;
        if (word.empty()) continue;
        if (!out.empty()) out.push_back(' ');
        out += word;
    }
    return out;
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream is(text);
    std::string w;
    while (is >> w) tokens.push_back(w);
    return tokens;
}

Vocabulary build_vocab(const std::vector<std::vector<std::string>>& corpus) {
    Vocabulary v;
    for (const char* r : kReservedNames) {
        v.word_to_index[r] = static_cast<int>(v.index_to_word.size());
        v.index_to_word.push_back(r);
    }
    for (const auto& sentence : corpus)
        for (const std::string& w : sentence)
            if (!v.word_to_index.count(w)) {
                v.word_to_index[w] = static_cast<int>(v.index_to_word.size());
                v.index_to_word.push_back(w);
            }
    return v;
}

SentenceRecord encode_sentence(const Vocabulary& vocab, const std::vector<std::string>& tokens,
                               std::size_t max_len) {
    if (tokens.size() + 2 > max_len) {
        throw std::invalid_argument("encode_sentence: sentence of " + std::to_string(tokens.size()) +
                                    " tokens does not fit length " + std::to_string(max_len));
    }
    SentenceRecord rec;
    rec.tokens = tokens;
    rec.indices.assign(max_len, kPad);
    rec.indices[0] = kSos;
    for (std::size_t i = 0; i < tokens.size(); ++i) rec.indices[i + 1] = vocab.lookup(tokens[i]);
    rec.indices[tokens.size() + 1] = kEos;
    rec.active_length = static_cast<int>(tokens.size()) + 2;
    return rec;
}

std::vector<std::string> decode_indices(const Vocabulary& vocab, const std::vector<int>& indices) {
    std::vector<std::string> words;
    for (int idx : indices) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= vocab.size())
            throw std::out_of_range("decode_indices: index " + std::to_string(idx) + " out of range");
        if (idx == kPad || idx == kSos || idx == kEos || idx == kUnk) continue;
        words.push_back(vocab.index_to_word[static_cast<std::size_t>(idx)]);
    }
    return words;
}

}  // namespace mlmap
