#include "mlmap/dataset.hpp"

#include "mlmap/rng.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace mlmap {

namespace {

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream is(text);
    double v;
    while (is >> v) out.push_back(v);
    return out;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

ParsedMotionXml parse_motion_xml(const std::string& xml_text) {
    pt::ptree tree;
    std::istringstream is(xml_text);
    try {
        pt::read_xml(is, tree);
    } catch (const pt::xml_parser_error& e) {
        throw std::runtime_error(std::string("malformed motion XML: ") + e.what());
    }

    ParsedMotionXml out;
    std::vector<double> timesteps;
    std::vector<std::vector<double>> rows;

    // locate the Motion node wherever it sits under the root
    const pt::ptree* motion = nullptr;
    for (const auto& [root_name, root_node] : tree) {
        if (root_name == "Motion") motion = &root_node;
        for (const auto& [name, node] : root_node)
            if (name == "Motion") motion = &node;
        if (motion) break;
    }
    if (!motion) throw std::runtime_error("motion XML: no Motion element");

    for (const auto& [name, node] : *motion) {
        if (name == "JointOrder") {
            for (const auto& [jname, jnode] : node) {
                if (jname != "Joint") continue;
                auto attr = jnode.get_optional<std::string>("<xmlattr>.name");
                if (attr) out.joint_names.push_back(*attr);
            }
        } else if (name == "MotionFrames") {
            for (const auto& [fname, fnode] : node) {
                if (fname != "MotionFrame") continue;
                auto ts = fnode.get_optional<double>("Timestep");
                auto jp = fnode.get_optional<std::string>("JointPosition");
                if (!ts || !jp) continue;
                timesteps.push_back(*ts);
                rows.push_back(parse_number_list(*jp));
            }
        }
    }

    if (rows.empty()) throw std::runtime_error("motion XML: no frames");
    std::size_t joints = rows[0].size();
    if (!out.joint_names.empty() && out.joint_names.size() != joints)
        throw std::runtime_error("motion XML: joint order and frame width disagree");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != joints) throw std::runtime_error("motion XML: inconsistent joint count across frames");
        if (i > 0 && timesteps[i] <= timesteps[i - 1]) throw std::runtime_error("motion XML: non-monotone timesteps");
    }

    out.frames = Tensor(rows.size(), joints);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < joints; ++j) out.frames(i, j) = rows[i][j];

    if (rows.size() >= 2) {
        std::vector<double> rates;
        rates.reserve(rows.size() - 1);
        for (std::size_t i = 1; i < timesteps.size(); ++i) rates.push_back(1.0 / (timesteps[i] - timesteps[i - 1]));
        std::sort(rates.begin(), rates.end());
        std::size_t n = rates.size();
        out.frame_rate_hz = n % 2 == 1 ? rates[n / 2] : 0.5 * (rates[n / 2 - 1] + rates[n / 2]);
    } else {
        out.frame_rate_hz = 100.0;  // single frame carries no rate information
    }
    return out;
}

std::vector<MotionRecord> scan_dataset(const std::string& root_path) {
    if (!fs::is_directory(root_path)) throw std::runtime_error("dataset directory not found: " + root_path);

    std::vector<std::string> ids;
    const std::string suffix = "_mmm.xml";
    for (const auto& entry : fs::directory_iterator(root_path)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (name.size() > suffix.size() && name.ends_with(suffix))
            ids.push_back(name.substr(0, name.size() - suffix.size()));
    }
    // annotation files whose motion is missing are reported and skipped
    const std::string ann_suffix = "_annotations.json";
    for (const auto& entry : fs::directory_iterator(root_path)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (name.size() > ann_suffix.size() && name.ends_with(ann_suffix)) {
            std::string id = name.substr(0, name.size() - ann_suffix.size());
            if (!fs::exists(fs::path(root_path) / (id + suffix)))
                std::cerr << "warning: skipping " << id << ": no motion file\n";
        }
    }
    std::sort(ids.begin(), ids.end());

    std::vector<MotionRecord> records;
    records.reserve(ids.size());
    for (const std::string& id : ids) {
        fs::path base(root_path);
        MotionRecord rec;
        rec.id = id;
        try {
            ParsedMotionXml parsed = parse_motion_xml(read_file(base / (id + suffix)));
            rec.joint_names = std::move(parsed.joint_names);
            rec.frame_rate_hz = parsed.frame_rate_hz;
            rec.frames = std::move(parsed.frames);
        } catch (const std::exception& e) {
            throw std::runtime_error(id + suffix + ": " + e.what());
        }

        fs::path ann_path = base / (id + "_annotations.json");
        if (fs::exists(ann_path)) {
            try {
                nlohmann::json j = nlohmann::json::parse(read_file(ann_path));
                rec.annotations = j.get<std::vector<std::string>>();
            } catch (const std::exception& e) {
                throw std::runtime_error(ann_path.filename().string() + ": " + e.what());
            }
        }

        fs::path meta_path = base / (id + "_meta.json");
        if (fs::exists(meta_path)) {
            try {
                nlohmann::json j = nlohmann::json::parse(read_file(meta_path));
                if (j.contains("motion_annotation") && j["motion_annotation"].contains("labels"))
                    rec.labels = j["motion_annotation"]["labels"].get<std::vector<std::string>>();
            } catch (const std::exception& e) {
                throw std::runtime_error(meta_path.filename().string() + ": " + e.what());
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

DatasetSplit split_dataset(std::vector<std::string> ids, const double ratios[3], std::uint64_t seed) {
    if (ids.empty()) throw std::invalid_argument("split_dataset: empty id list");
    double total = ratios[0] + ratios[1] + ratios[2];
    if (ratios[0] <= 0 || ratios[1] <= 0 || ratios[2] <= 0 || std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("split_dataset: ratios must be positive and sum to 1");

    std::sort(ids.begin(), ids.end());
    Rng rng(seed);
    rng.shuffle(ids);

    std::size_t n = ids.size();
    std::size_t n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios[1]));
    std::size_t n_test = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios[2]));
    std::size_t n_train = n - n_val - n_test;

    DatasetSplit split;
    split.seed = seed;
    for (int i = 0; i < 3; ++i) split.ratios[i] = ratios[i];
    split.train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.validation.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train),
                            ids.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    split.test.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), ids.end());
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.validation.begin(), split.validation.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

std::string DatasetSplit::to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["ratios"] = {ratios[0], ratios[1], ratios[2]};
    j["train"] = train;
    j["validation"] = validation;
    j["test"] = test;
    return j.dump(2) + "\n";
}

DatasetSplit DatasetSplit::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    DatasetSplit s;
    s.seed = j.at("seed").get<std::uint64_t>();
    auto r = j.at("ratios").get<std::vector<double>>();
    for (int i = 0; i < 3; ++i) s.ratios[i] = r.at(static_cast<std::size_t>(i));
    s.train = j.at("train").get<std::vector<std::string>>();
    s.validation = j.at("validation").get<std::vector<std::string>>();
    s.test = j.at("test").get<std::vector<std::string>>();
    return s;
}

std::string record_to_json_line(const MotionRecord& rec) {
    nlohmann::json j;
    j["id"] = rec.id;
    j["frame_rate_hz"] = rec.frame_rate_hz;
    j["joint_names"] = rec.joint_names;
    std::vector<std::vector<double>> rows(rec.frames.rows);
    for (std::size_t i = 0; i < rec.frames.rows; ++i) {
        rows[i].resize(rec.frames.cols);
        for (std::size_t c = 0; c < rec.frames.cols; ++c) rows[i][c] = rec.frames(i, c);
    }
    j["frames"] = rows;
    j["annotations"] = rec.annotations;
    j["labels"] = rec.labels;
    return j.dump();
}

MotionRecord record_from_json_line(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line);
    MotionRecord rec;
    rec.id = j.at("id").get<std::string>();
    rec.frame_rate_hz = j.at("frame_rate_hz").get<double>();
    rec.joint_names = j.at("joint_names").get<std::vector<std::string>>();
    auto rows = j.at("frames").get<std::vector<std::vector<double>>>();
    std::size_t cols = rows.empty() ? 0 : rows[0].size();
    rec.frames = Tensor(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw std::runtime_error("record " + rec.id + ": ragged frame rows");
        for (std::size_t c = 0; c < cols; ++c) rec.frames(i, c) = rows[i][c];
    }
    rec.annotations = j.at("annotations").get<std::vector<std::string>>();
    rec.labels = j.at("labels").get<std::vector<std::string>>();
    return rec;
}

void write_records_jsonl(const std::vector<MotionRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const MotionRecord& r : records) out << record_to_json_line(r) << "\n";
}

std::vector<MotionRecord> read_records_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<MotionRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        records.push_back(record_from_json_line(line));
    }
    return records;
}

}  // namespace mlmap
