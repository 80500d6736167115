#pragma once

#include "mlmap/prepared_data.hpp"
#include "mlmap/rng.hpp"
#include "mlmap/tensor.hpp"
#include "mlmap/text_pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fixtures {

// Motion XML in the dataset release layout.
inline std::string motion_xml(const std::vector<std::string>& joints, const mlmap::Tensor& frames,
                              double dt = 0.01, const std::string& extra_elements = "") {
    std::ostringstream os;
    os.precision(17);
    os << "<?xml version='1.0'?>\n<MMM>\n";
    if (!extra_elements.empty()) os << extra_elements << "\n";
    os << "<Motion name='export'>\n<JointOrder>\n";
    for (const std::string& j : joints) os << "<Joint name='" << j << "'/>\n";
    os << "</JointOrder>\n<MotionFrames>\n";
    for (std::size_t i = 0; i < frames.rows; ++i) {
        os << "<MotionFrame>\n<Timestep>" << static_cast<double>(i) * dt << "</Timestep>\n<JointPosition>";
        for (std::size_t j = 0; j < frames.cols; ++j) os << (j ? " " : "") << frames(i, j);
        os << "</JointPosition>\n</MotionFrame>\n";
    }
    os << "</MotionFrames>\n</Motion>\n</MMM>\n";
    return os.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

struct ToyDatasetSpec {
    std::size_t records = 5;
    std::size_t joints = 4;
    std::size_t frames = 50;  // at 100 Hz
};

// Writes <id>_mmm.xml / <id>_annotations.json / <id>_meta.json triples with
// distinctive per-record motions and sentences.
inline std::vector<std::string> write_toy_dataset(const std::filesystem::path& dir, const ToyDatasetSpec& spec) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const char* verbs[] = {"walks", "runs", "waves", "kicks", "turns", "jumps", "bows", "squats", "stomps", "claps"};
    const char* mods[] = {"forward", "backward", "quickly", "slowly", "left", "right", "twice", "once", "around", "again"};

    std::vector<std::string> joints;
    for (std::size_t j = 0; j < spec.joints; ++j) joints.push_back("j" + std::to_string(j));

    mlmap::Rng rng(1234);
    std::vector<std::string> ids;
    for (std::size_t r = 0; r < spec.records; ++r) {
        std::string id = "m" + std::string(r < 10 ? "0" : "") + std::to_string(r);
        ids.push_back(id);
        mlmap::Tensor frames(spec.frames, spec.joints);
        for (std::size_t i = 0; i < spec.frames; ++i)
            for (std::size_t j = 0; j < spec.joints; ++j)
                frames(i, j) = std::sin(0.05 * static_cast<double>(i) * (1.0 + static_cast<double>(r)) +
                                        static_cast<double>(j)) +
                               0.01 * rng.uniform(-1, 1);
        write_file(dir / (id + "_mmm.xml"), motion_xml(joints, frames));
        std::string sentence = std::string("A person ") + verbs[r % 10] + " " + mods[r % 10] + ".";
        write_file(dir / (id + "_annotations.json"), std::string("[\"") + sentence + "\"]");
        write_file(dir / (id + "_meta.json"),
                   std::string("{\"motion_annotation\": {\"labels\": [\"") + verbs[r % 10] + "\"]}}");
    }
    return ids;
}

// In-memory prepared pairs for desk-scale model tests: `n` distinctive
// motion/sentence pairs, standardized-scale values, short sequences.
struct ToyPairs {
    mlmap::PreparedSplitData data;
    mlmap::Vocabulary vocab;
};

inline ToyPairs make_toy_pairs(std::size_t n, std::size_t joints, std::size_t motion_len,
                               std::size_t padded_len, std::size_t max_sentence_len, std::uint64_t seed) {
    const char* verbs[] = {"walks", "runs", "waves", "kicks", "turns", "jumps", "bows", "squats", "stomps", "claps"};
    const char* mods[] = {"forward", "backward", "quickly", "slowly", "left", "right", "twice", "once", "around", "again"};

    ToyPairs out;
    std::vector<std::vector<std::string>> corpus;
    for (std::size_t i = 0; i < n; ++i)
        corpus.push_back({"a", "person", verbs[i % 10], mods[(i / 10) % 10]});
    out.vocab = mlmap::build_vocab(corpus);

    mlmap::Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        std::string id = "toy" + std::to_string(i);
        mlmap::PreparedMotion m;
        m.id = id;
        m.offset = 0;
        m.active_len = static_cast<int>(motion_len);
        m.frames = mlmap::Tensor(padded_len, joints + 1);
        double phase = rng.uniform(0, 6.28);
        for (std::size_t t = 0; t < motion_len; ++t) {
            for (std::size_t j = 0; j < joints; ++j)
                m.frames(t, j) = std::sin(phase + 0.35 * static_cast<double>(t) * (1.0 + 0.25 * static_cast<double>(i)) +
                                          1.3 * static_cast<double>(j));
            m.frames(t, joints) = 1.0;
        }
        out.data.motions.push_back(std::move(m));

        mlmap::SentenceRecord enc = mlmap::encode_sentence(out.vocab, corpus[i], max_sentence_len);
        mlmap::PreparedText s;
        s.id = id;
        s.raw = "";
        s.tokens = corpus[i];
        s.indices = enc.indices;
        s.active_length = enc.active_length;
        out.data.sentences.push_back(std::move(s));
    }
    return out;
}

}  // namespace fixtures
