#include "util/serial.hpp"

namespace xmodal {

void write_checksummed_file(const std::filesystem::path& p, const std::string& payload) {
    const uint64_t digest = fnv1a64(payload.data(), payload.size());
    BinWriter w(p);
    w.write_bytes(payload.data(), payload.size());
    w.write_u64(digest);
    w.close();
}

std::string read_checksummed_file(const std::filesystem::path& p) {
    std::string all = read_text_file(p);
    if (all.size() < 8) throw IoError("container too small: " + p.string());
    uint64_t stored;
    std::memcpy(&stored, all.data() + all.size() - 8, 8);
    all.resize(all.size() - 8);
    if (fnv1a64(all.data(), all.size()) != stored)
        throw IoError("checksum mismatch (corrupt or tampered file): " + p.string());
    return all;
}

void write_tensor_table(MemWriter& w,
                        const std::vector<std::pair<std::string, const Tensor*>>& entries) {
    w.write_u64(entries.size());
    for (const auto& [name, t] : entries) {
        w.write_string(name);
        w.write_u32(static_cast<uint32_t>(t->shape.size()));
        for (int d : t->shape) w.write_u32(static_cast<uint32_t>(d));
        w.write_f64s(t->data);
    }
}

std::map<std::string, Tensor> read_tensor_table(MemReader& r) {
    std::map<std::string, Tensor> out;
    const uint64_t count = r.read_u64();
    for (uint64_t i = 0; i < count; ++i) {
        std::string name = r.read_string();
        const uint32_t rank = r.read_u32();
        Shape shape(rank);
        for (auto& d : shape) d = static_cast<int>(r.read_u32());
        Tensor t(shape);
        r.read_f64s(t.data);
        out.emplace(std::move(name), std::move(t));
    }
    return out;
}

}  // namespace xmodal
