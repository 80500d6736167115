#include "mlmap/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mlmap {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::size_t> parse_units(const std::string& v) {
    std::vector<std::size_t> out;
    std::istringstream is(v);
    std::string item;
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(static_cast<std::size_t>(std::stoull(item)));
    }
    if (out.empty()) throw std::invalid_argument("empty unit list");
    return out;
}

std::string units_to_string(const std::vector<std::size_t>& units) {
    std::string out;
    for (std::size_t i = 0; i < units.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(units[i]);
    }
    return out;
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("bad boolean value: " + v);
}

std::string double_to_string(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::string model_kind_name(ModelKind k) { return k == ModelKind::kM2l ? "m2l" : "l2m"; }

ModelKind model_kind_from_name(const std::string& s) {
    if (s == "m2l") return ModelKind::kM2l;
    if (s == "l2m") return ModelKind::kL2m;
    throw std::invalid_argument("unknown model kind: " + s);
}

RunConfig RunConfig::defaults(ModelKind kind) {
    RunConfig c;
    c.model = kind;
    if (kind == ModelKind::kL2m) {
        c.decoder_units = {400, 400, 400};
        c.layer_norm = true;
        c.dropout_rate = 0.1;
        c.gradient_clipping = 25.0;
    }
    return c;
}

double RunConfig::clip_norm() const {
    return gradient_clipping > 0.0 ? gradient_clipping : std::numeric_limits<double>::infinity();
}

std::string RunConfig::serialize() const {
    std::ostringstream os;
    os << "model = " << model_kind_name(model) << "\n";
    os << "dataset_root = " << dataset_root << "\n";
    os << "out_dir = " << out_dir << "\n";
    os << "spelling_file = " << spelling_file << "\n";
    os << "seed = " << seed << "\n";
    os << "threads = " << threads << "\n";
    os << "encoder_units = " << units_to_string(encoder_units) << "\n";
    os << "decoder_units = " << units_to_string(decoder_units) << "\n";
    os << "layer_norm = " << (layer_norm ? "true" : "false") << "\n";
    os << "embedding_dimension = " << embedding_dimension << "\n";
    os << "dropout_rate = " << double_to_string(dropout_rate) << "\n";
    os << "learning_rate = " << double_to_string(learning_rate) << "\n";
    os << "gradient_clipping = " << (gradient_clipping > 0.0 ? double_to_string(gradient_clipping) : "inf") << "\n";
    os << "batch_size = " << batch_size << "\n";
    os << "training_epochs = " << training_epochs << "\n";
    os << "vocabulary_size = " << vocabulary_size << "\n";
    os << "motion_joints = " << motion_joints << "\n";
    os << "mixture_components = " << mixture_components << "\n";
    os << "max_motion_length = " << max_motion_length << "\n";
    os << "max_sentence_length = " << max_sentence_length << "\n";
    os << "beam_width = " << beam_width << "\n";
    os << "samples_per_hypothesis = " << samples_per_hypothesis << "\n";
    os << "train_ratio = " << double_to_string(train_ratio) << "\n";
    os << "validation_ratio = " << double_to_string(validation_ratio) << "\n";
    os << "test_ratio = " << double_to_string(test_ratio) << "\n";
    os << "max_duration_seconds = " << double_to_string(max_duration_seconds) << "\n";
    os << "downsample_factor = " << downsample_factor << "\n";
    os << "vocab_full_dataset = " << (vocab_full_dataset ? "true" : "false") << "\n";
    os << "microbatch = " << microbatch << "\n";
    return os.str();
}

RunConfig RunConfig::parse(const std::string& text) {
    // model is applied first so model-specific defaults underlie overrides
    std::vector<std::pair<std::string, std::string>> entries;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        entries.emplace_back(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }

    ModelKind kind = ModelKind::kM2l;
    for (const auto& [k, v] : entries)
        if (k == "model") kind = model_kind_from_name(v);
    RunConfig c = defaults(kind);

    for (const auto& [key, value] : entries) {
        if (key == "model") {
        } else if (key == "dataset_root") {
            c.dataset_root = value;
        } else if (key == "out_dir") {
            c.out_dir = value;
        } else if (key == "spelling_file") {
            c.spelling_file = value;
        } else if (key == "seed") {
            c.seed = std::stoull(value);
        } else if (key == "threads") {
            c.threads = std::stoi(value);
        } else if (key == "encoder_units") {
            c.encoder_units = parse_units(value);
        } else if (key == "decoder_units") {
            c.decoder_units = parse_units(value);
        } else if (key == "layer_norm") {
            c.layer_norm = parse_bool(value);
        } else if (key == "embedding_dimension") {
            c.embedding_dimension = std::stoull(value);
        } else if (key == "dropout_rate") {
            c.dropout_rate = std::stod(value);
        } else if (key == "learning_rate") {
            c.learning_rate = std::stod(value);
        } else if (key == "gradient_clipping") {
            c.gradient_clipping = (value == "inf" || value == "none") ? 0.0 : std::stod(value);
        } else if (key == "batch_size") {
            c.batch_size = std::stoull(value);
        } else if (key == "training_epochs") {
            c.training_epochs = std::stoull(value);
        } else if (key == "vocabulary_size") {
            c.vocabulary_size = std::stoull(value);
        } else if (key == "motion_joints") {
            c.motion_joints = std::stoull(value);
        } else if (key == "mixture_components") {
            c.mixture_components = std::stoull(value);
        } else if (key == "max_motion_length") {
            c.max_motion_length = std::stoull(value);
        } else if (key == "max_sentence_length") {
            c.max_sentence_length = std::stoull(value);
        } else if (key == "beam_width") {
            c.beam_width = std::stoull(value);
        } else if (key == "samples_per_hypothesis") {
            c.samples_per_hypothesis = std::stoull(value);
        } else if (key == "train_ratio") {
            c.train_ratio = std::stod(value);
        } else if (key == "validation_ratio") {
            c.validation_ratio = std::stod(value);
        } else if (key == "test_ratio") {
            c.test_ratio = std::stod(value);
        } else if (key == "max_duration_seconds") {
            c.max_duration_seconds = std::stod(value);
        } else if (key == "downsample_factor") {
            c.downsample_factor = std::stoi(value);
        } else if (key == "vocab_full_dataset") {
            c.vocab_full_dataset = parse_bool(value);
        } else if (key == "microbatch") {
            c.microbatch = std::stoull(value);
        } else {
            throw std::invalid_argument("unknown config key: " + key);
        }
    }
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse(os.str());
}

void RunConfig::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write config: " + path);
    out << serialize();
}

bool operator==(const RunConfig& a, const RunConfig& b) { return a.serialize() == b.serialize(); }

}  // namespace mlmap
