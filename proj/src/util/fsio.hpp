#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace xmodal {

// Streaming FNV-1a content hash.
class Hasher {
public:
    void update(const void* data, size_t len) { h_ = fnv1a64(data, len, h_); }
    void update(std::string_view s) { update(s.data(), s.size()); }
    template <typename T>
    void update_pod(const T& v) {
        update(&v, sizeof(T));
    }
    template <typename T>
    void update_span(std::span<const T> v) {
        update(v.data(), v.size() * sizeof(T));
    }
    uint64_t digest() const { return h_; }
    std::string hex() const;

private:
    uint64_t h_ = 14695981039346656037ull;
};

std::string to_hex(uint64_t v);

// Little-endian binary stream helpers (checked writes/reads).
class BinWriter {
public:
    explicit BinWriter(const std::filesystem::path& p);
    void write_bytes(const void* data, size_t len);
    void write_u32(uint32_t v) { write_bytes(&v, sizeof(v)); }
    void write_u64(uint64_t v) { write_bytes(&v, sizeof(v)); }
    void write_i64(int64_t v) { write_bytes(&v, sizeof(v)); }
    void write_f32(float v) { write_bytes(&v, sizeof(v)); }
    void write_f64(double v) { write_bytes(&v, sizeof(v)); }
    void write_f32s(std::span<const float> v) { write_bytes(v.data(), v.size() * 4); }
    void write_f64s(std::span<const double> v) { write_bytes(v.data(), v.size() * 8); }
    void write_string(const std::string& s);
    void close();

private:
    std::ofstream os_;
    std::filesystem::path path_;
};

class BinReader {
public:
    explicit BinReader(const std::filesystem::path& p);
    void read_bytes(void* data, size_t len);
    uint32_t read_u32();
    uint64_t read_u64();
    int64_t read_i64();
    float read_f32();
    double read_f64();
    void read_f32s(std::span<float> v) { read_bytes(v.data(), v.size() * 4); }
    void read_f64s(std::span<double> v) { read_bytes(v.data(), v.size() * 8); }
    std::string read_string();
    void skip(uint64_t bytes);
    bool at_eof();

private:
    std::ifstream is_;
    std::filesystem::path path_;
};

std::string read_text_file(const std::filesystem::path& p);
void write_text_file(const std::filesystem::path& p, const std::string& content);

}  // namespace xmodal
