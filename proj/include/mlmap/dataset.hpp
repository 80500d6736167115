#pragma once

#include "mlmap/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mlmap {

// One dataset entry: joint-angle frames plus its natural-language
// annotations and optional category labels.
struct MotionRecord {
    std::string id;
    std::vector<std::string> joint_names;
    double frame_rate_hz = 0.0;
    Tensor frames;  // num_frames x num_joints, radians
    std::vector<std::string> annotations;
    std::vector<std::string> labels;

    double duration_seconds() const { return static_cast<double>(frames.rows) / frame_rate_hz; }
};

struct ParsedMotionXml {
    std::vector<std::string> joint_names;
    double frame_rate_hz = 0.0;
    Tensor frames;
};

// Parses the motion XML layout used by the dataset release: a JointOrder
// listing joint names and MotionFrame entries with Timestep and
// JointPosition values. Unknown elements are ignored. The frame rate is the
// median of the reciprocals of the timestep deltas.
ParsedMotionXml parse_motion_xml(const std::string& xml_text);

// Reads every <id>_mmm.xml / <id>_annotations.json / <id>_meta.json triple
// under root_path. Records are sorted by id; ids missing their motion file
// are skipped with a warning on stderr.
std::vector<MotionRecord> scan_dataset(const std::string& root_path);

struct DatasetSplit {
    std::vector<std::string> train;
    std::vector<std::string> validation;
    std::vector<std::string> test;
    std::uint64_t seed = 0;
    double ratios[3] = {0.8, 0.1, 0.1};

    std::string to_json() const;
    static DatasetSplit from_json(const std::string& text);
};

// Seeded uniform shuffle of the ids followed by contiguous slicing. Partition
// sizes are floor-based with the remainder assigned to train, so a motion and
// all of its annotations land in exactly one split.
DatasetSplit split_dataset(std::vector<std::string> ids, const double ratios[3], std::uint64_t seed);

// canonical one-record-per-line JSON form
std::string record_to_json_line(const MotionRecord& rec);
MotionRecord record_from_json_line(const std::string& line);
void write_records_jsonl(const std::vector<MotionRecord>& records, const std::string& path);
std::vector<MotionRecord> read_records_jsonl(const std::string& path);

}  // namespace mlmap
