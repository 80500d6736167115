#include "mlmap/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace mlmap {

namespace {

constexpr char kMagic[4] = {'M', 'L', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

void write_f64(std::ostream& os, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    write_u64(os, v);
}

std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t read_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double read_f64(std::istream& is) {
    std::uint64_t v = read_u64(is);
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}

void write_string(std::ostream& os, const std::string& s) {
    write_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& is) {
    std::uint32_t n = read_u32(is);
    std::string s(n, '\0');
    is.read(s.data(), n);
    return s;
}

}  // namespace

void Checkpoint::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write checkpoint: " + path);
    os.write(kMagic, 4);
    write_u32(os, kVersion);

    nlohmann::json manifest;
    manifest["model_kind"] = model_kind;
    manifest["config"] = config_text;
    manifest["metadata"] = metadata;
    write_string(os, manifest.dump());

    write_u32(os, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& [name, t] : tensors) {
        write_string(os, name);
        write_u32(os, 2);
        write_u64(os, t.rows);
        write_u64(os, t.cols);
        for (double v : t.data) write_f64(os, v);
    }
    if (!os) throw std::runtime_error("failed writing checkpoint: " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not a checkpoint file: " + path);
    std::uint32_t version = read_u32(is);
    if (version != kVersion)
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));

    Checkpoint ck;
    nlohmann::json manifest = nlohmann::json::parse(read_string(is));
    ck.model_kind = manifest.at("model_kind").get<std::string>();
    ck.config_text = manifest.at("config").get<std::string>();
    ck.metadata = manifest.at("metadata");

    std::uint32_t count = read_u32(is);
    ck.tensors.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        std::string name = read_string(is);
        std::uint32_t ndims = read_u32(is);
        if (ndims != 2) throw std::runtime_error("checkpoint tensor " + name + ": unsupported rank");
        std::uint64_t rows = read_u64(is);
        std::uint64_t cols = read_u64(is);
        Tensor t(rows, cols);
        for (double& v : t.data) v = read_f64(is);
        if (!is) throw std::runtime_error("truncated checkpoint: " + path);
        ck.tensors.emplace_back(std::move(name), std::move(t));
    }
    return ck;
}

const Tensor* Checkpoint::find(const std::string& name) const {
    for (const auto& [n, t] : tensors)
        if (n == name) return &t;
    return nullptr;
}

void Checkpoint::add_registry(const ParamRegistry& reg, const std::string& prefix) {
    for (std::size_t i = 0; i < reg.count(); ++i) tensors.emplace_back(prefix + reg.name(i), reg.tensor(i));
}

void Checkpoint::restore_registry(ParamRegistry& reg, const std::string& prefix) const {
    for (std::size_t i = 0; i < reg.count(); ++i) {
        const std::string name = prefix + reg.name(i);
        const Tensor* src = find(name);
        if (!src) throw std::runtime_error("checkpoint is missing tensor " + name);
        Tensor& dst = reg.tensor(i);
        if (!src->same_shape(dst))
            throw std::runtime_error("checkpoint tensor " + name + " has shape " + src->shape_str() +
                                     ", expected " + dst.shape_str());
        dst = *src;
    }
}

}  // namespace mlmap
