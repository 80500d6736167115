#include "mlmap/prepared_data.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

namespace mlmap {

namespace {

constexpr char kMagic[4] = {'M', 'L', 'M', 'B'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

void write_f64(std::ostream& os, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

double read_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}

}  // namespace

std::vector<TrainingPair> make_pairs(const PreparedSplitData& data) {
    std::unordered_map<std::string, std::vector<int>> sentences_by_id;
    for (std::size_t i = 0; i < data.sentences.size(); ++i)
        sentences_by_id[data.sentences[i].id].push_back(static_cast<int>(i));
    std::vector<TrainingPair> pairs;
    for (std::size_t m = 0; m < data.motions.size(); ++m) {
        auto it = sentences_by_id.find(data.motions[m].id);
        if (it == sentences_by_id.end()) continue;
        for (int s : it->second) pairs.push_back({static_cast<int>(m), s});
    }
    return pairs;
}

void write_motions_bin(const std::vector<PreparedMotion>& motions, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os.write(kMagic, 4);
    write_u32(os, kVersion);
    write_u32(os, static_cast<std::uint32_t>(motions.size()));
    for (const PreparedMotion& m : motions) {
        write_u32(os, static_cast<std::uint32_t>(m.id.size()));
        os.write(m.id.data(), static_cast<std::streamsize>(m.id.size()));
        write_u32(os, static_cast<std::uint32_t>(m.offset));
        write_u32(os, static_cast<std::uint32_t>(m.active_len));
        write_u32(os, static_cast<std::uint32_t>(m.frames.rows));
        write_u32(os, static_cast<std::uint32_t>(m.frames.cols));
        // only active rows are stored; padding is all zeros by construction
        for (int i = 0; i < m.active_len; ++i)
            for (std::size_t j = 0; j < m.frames.cols; ++j) write_f64(os, m.frames(static_cast<std::size_t>(i), j));
    }
    if (!os) throw std::runtime_error("failed writing " + path);
}

std::vector<PreparedMotion> read_motions_bin(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("not a prepared-motion file: " + path);
    std::uint32_t version = read_u32(is);
    if (version != kVersion) throw std::runtime_error("unsupported prepared-motion version");
    std::uint32_t count = read_u32(is);
    std::vector<PreparedMotion> out;
    out.reserve(count);
    for (std::uint32_t k = 0; k < count; ++k) {
        PreparedMotion m;
        std::uint32_t idlen = read_u32(is);
        m.id.resize(idlen);
        is.read(m.id.data(), idlen);
        m.offset = static_cast<int>(read_u32(is));
        m.active_len = static_cast<int>(read_u32(is));
        std::uint32_t rows = read_u32(is);
        std::uint32_t cols = read_u32(is);
        m.frames = Tensor(rows, cols);
        for (int i = 0; i < m.active_len; ++i)
            for (std::uint32_t j = 0; j < cols; ++j) m.frames(static_cast<std::size_t>(i), j) = read_f64(is);
        if (!is) throw std::runtime_error("truncated prepared-motion file: " + path);
        out.push_back(std::move(m));
    }
    return out;
}

void write_text_jsonl(const std::vector<PreparedText>& sentences, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    for (const PreparedText& s : sentences) {
        nlohmann::json j;
        j["id"] = s.id;
        j["raw"] = s.raw;
        j["tokens"] = s.tokens;
        j["indices"] = s.indices;
        j["active_length"] = s.active_length;
        os << j.dump() << "\n";
    }
}

std::vector<PreparedText> read_text_jsonl(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::vector<PreparedText> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        PreparedText s;
        s.id = j.at("id").get<std::string>();
        s.raw = j.at("raw").get<std::string>();
        s.tokens = j.at("tokens").get<std::vector<std::string>>();
        s.indices = j.at("indices").get<std::vector<int>>();
        s.active_length = j.at("active_length").get<int>();
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace mlmap
