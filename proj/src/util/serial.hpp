#pragma once

#include <cstring>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "core/tensor.hpp"
#include "util/fsio.hpp"

namespace xmodal {

// In-memory little-endian writer; files carry payload + trailing FNV digest.
class MemWriter {
public:
    void write_bytes(const void* data, size_t len) {
        buf_.append(static_cast<const char*>(data), len);
    }
    void write_u32(uint32_t v) { write_bytes(&v, sizeof(v)); }
    void write_u64(uint64_t v) { write_bytes(&v, sizeof(v)); }
    void write_i64(int64_t v) { write_bytes(&v, sizeof(v)); }
    void write_f64(double v) { write_bytes(&v, sizeof(v)); }
    void write_string(const std::string& s) {
        write_u64(s.size());
        write_bytes(s.data(), s.size());
    }
    void write_f64s(std::span<const double> v) { write_bytes(v.data(), v.size() * 8); }
    void write_f32s(std::span<const float> v) { write_bytes(v.data(), v.size() * 4); }
    const std::string& str() const { return buf_; }

private:
    std::string buf_;
};

class MemReader {
public:
    explicit MemReader(std::string_view data) : data_(data) {}
    void read_bytes(void* out, size_t len) {
        if (pos_ + len > data_.size()) throw IoError("container truncated");
        std::memcpy(out, data_.data() + pos_, len);
        pos_ += len;
    }
    uint32_t read_u32() { return read_pod<uint32_t>(); }
    uint64_t read_u64() { return read_pod<uint64_t>(); }
    int64_t read_i64() { return read_pod<int64_t>(); }
    double read_f64() { return read_pod<double>(); }
    std::string read_string() {
        const uint64_t n = read_u64();
        if (pos_ + n > data_.size()) throw IoError("container truncated");
        std::string s(data_.substr(pos_, n));
        pos_ += n;
        return s;
    }
    void read_f64s(std::span<double> v) { read_bytes(v.data(), v.size() * 8); }
    void read_f32s(std::span<float> v) { read_bytes(v.data(), v.size() * 4); }
    bool done() const { return pos_ == data_.size(); }

private:
    template <typename T>
    T read_pod() {
        T v;
        read_bytes(&v, sizeof(v));
        return v;
    }
    std::string_view data_;
    size_t pos_ = 0;
};

void write_checksummed_file(const std::filesystem::path& p, const std::string& payload);
// Verifies the trailing digest; throws IoError on tampering or truncation.
std::string read_checksummed_file(const std::filesystem::path& p);

// Named tensor table: count, then (name, rank, dims..., f64 data) per entry.
void write_tensor_table(MemWriter& w,
                        const std::vector<std::pair<std::string, const Tensor*>>& entries);
std::map<std::string, Tensor> read_tensor_table(MemReader& r);

}  // namespace xmodal
