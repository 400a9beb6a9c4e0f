#include "util/fsio.hpp"

#include <sstream>

namespace xmodal {

std::string to_hex(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

std::string Hasher::hex() const { return to_hex(h_); }

BinWriter::BinWriter(const std::filesystem::path& p)
    : os_(p, std::ios::binary | std::ios::trunc), path_(p) {
    if (!os_) throw IoError("cannot open for writing: " + p.string());
}

void BinWriter::write_bytes(const void* data, size_t len) {
    os_.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
    if (!os_) throw IoError("write failed: " + path_.string());
}

void BinWriter::write_string(const std::string& s) {
    write_u64(s.size());
    write_bytes(s.data(), s.size());
}

void BinWriter::close() {
    os_.close();
    if (!os_) throw IoError("close failed: " + path_.string());
}

BinReader::BinReader(const std::filesystem::path& p) : is_(p, std::ios::binary), path_(p) {
    if (!is_) throw IoError("cannot open for reading: " + p.string());
}

void BinReader::read_bytes(void* data, size_t len) {
    is_.read(static_cast<char*>(data), static_cast<std::streamsize>(len));
    if (!is_) throw IoError("unexpected end of file: " + path_.string());
}

uint32_t BinReader::read_u32() {
    uint32_t v;
    read_bytes(&v, sizeof(v));
    return v;
}
uint64_t BinReader::read_u64() {
    uint64_t v;
    read_bytes(&v, sizeof(v));
    return v;
}
int64_t BinReader::read_i64() {
    int64_t v;
    read_bytes(&v, sizeof(v));
    return v;
}
float BinReader::read_f32() {
    float v;
    read_bytes(&v, sizeof(v));
    return v;
}
double BinReader::read_f64() {
    double v;
    read_bytes(&v, sizeof(v));
    return v;
}

std::string BinReader::read_string() {
    const uint64_t n = read_u64();
    if (n > (1ull << 32)) throw IoError("corrupt string length in " + path_.string());
    std::string s(n, '\0');
    read_bytes(s.data(), n);
    return s;
}

void BinReader::skip(uint64_t bytes) {
    is_.seekg(static_cast<std::streamoff>(bytes), std::ios::cur);
    if (!is_) throw IoError("seek failed: " + path_.string());
}

bool BinReader::at_eof() {
    is_.peek();
    return is_.eof();
}

std::string read_text_file(const std::filesystem::path& p) {
    std::ifstream is(p);
    if (!is) throw IoError("cannot open for reading: " + p.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream os(p, std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + p.string());
    os << content;
    if (!os) throw IoError("write failed: " + p.string());
}

}  // namespace xmodal
