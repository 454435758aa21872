#pragma once

// Binary persistence, all integers and doubles little-endian.
//
// Model file:  "OCSV" | version u16 | dim u16 | n_sv u32 | gamma f64 | rho f64
//              | n_sv x (dim x f64 support vector, f64 alpha)
// Scaler file: "OCSC" | version u16 | dim u16 | dim x f64 mean | dim x f64 std

#include <sunblock/features.hpp>
#include <sunblock/ocsvm.hpp>

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sunblock {

class ModelFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint16_t kModelVersion = 1;

namespace io_detail {

class Writer {
public:
    void bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
    void u16(std::uint16_t v) { le(v, 2); }
    void u32(std::uint32_t v) { le(v, 4); }
    void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
    const std::vector<std::uint8_t>& data() const { return buf_; }

private:
    void le(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> buf_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> d) : d_(d) {}

    void expect_magic(std::string_view magic, const char* what) {
        need(magic.size());
        if (!std::equal(magic.begin(), magic.end(), d_.begin() + static_cast<std::ptrdiff_t>(pos_)))
            throw ModelFormatError(std::string("corrupt ") + what + " file: bad magic");
        pos_ += magic.size();
    }
    std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
    double f64() { return std::bit_cast<double>(le(8)); }
    bool done() const { return pos_ == d_.size(); }

private:
    void need(std::size_t n) const {
        if (d_.size() - pos_ < n) throw ModelFormatError("corrupt file: truncated");
    }
    std::uint64_t le(int n) {
        need(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= std::uint64_t{d_[pos_ + static_cast<std::size_t>(i)]} << (8 * i);
        pos_ += static_cast<std::size_t>(n);
        return v;
    }
    std::span<const std::uint8_t> d_;
    std::size_t pos_ = 0;
};

inline void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace io_detail

inline std::vector<std::uint8_t> encode_model(const OcsvmModel& m) {
    if (m.dim() > 0xffff) throw std::invalid_argument("model dimension exceeds format limit");
    io_detail::Writer w;
    w.bytes("OCSV");
    w.u16(kModelVersion);
    w.u16(static_cast<std::uint16_t>(m.dim()));
    w.u32(static_cast<std::uint32_t>(m.alphas.size()));
    w.f64(m.gamma);
    w.f64(m.rho);
    for (std::size_t i = 0; i < m.alphas.size(); ++i) {
        for (double x : m.support_vectors[i]) w.f64(x);
        w.f64(m.alphas[i]);
    }
    return w.data();
}

inline OcsvmModel decode_model(std::span<const std::uint8_t> bytes) {
    io_detail::Reader r(bytes);
    r.expect_magic("OCSV", "model");
    if (const auto v = r.u16(); v != kModelVersion)
        throw ModelFormatError("model version " + std::to_string(v) + " is not supported");
    const std::size_t dim = r.u16();
    const std::size_t n = r.u32();
    if (dim == 0 || n == 0) throw ModelFormatError("corrupt model file: empty model");
    if (bytes.size() < 28 || (bytes.size() - 28) / 8 / (dim + 1) < n) throw ModelFormatError("corrupt file: truncated");
    OcsvmModel m;
    m.gamma = r.f64();
    m.rho = r.f64();
    m.support_vectors.assign(n, std::vector<double>(dim));
    m.alphas.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& x : m.support_vectors[i]) x = r.f64();
        m.alphas[i] = r.f64();
    }
    if (!r.done()) throw ModelFormatError("corrupt model file: trailing bytes");
    return m;
}

inline void save_model(const OcsvmModel& m, const std::filesystem::path& path) {
    io_detail::write_file(path, encode_model(m));
}

inline OcsvmModel load_model(const std::filesystem::path& path) { return decode_model(io_detail::read_file(path)); }

inline std::vector<std::uint8_t> encode_scaler(const Scaler& s) {
    io_detail::Writer w;
    w.bytes("OCSC");
    w.u16(kModelVersion);
    w.u16(static_cast<std::uint16_t>(s.dim()));
    for (double x : s.mean) w.f64(x);
    for (double x : s.std) w.f64(x);
    return w.data();
}

inline Scaler decode_scaler(std::span<const std::uint8_t> bytes) {
    io_detail::Reader r(bytes);
    r.expect_magic("OCSC", "scaler");
    if (const auto v = r.u16(); v != kModelVersion)
        throw ModelFormatError("scaler version " + std::to_string(v) + " is not supported");
    const std::size_t dim = r.u16();
    Scaler s{std::vector<double>(dim), std::vector<double>(dim)};
    for (auto& x : s.mean) x = r.f64();
    for (auto& x : s.std) x = r.f64();
    if (!r.done()) throw ModelFormatError("corrupt scaler file: trailing bytes");
    return s;
}

inline void save_scaler(const Scaler& s, const std::filesystem::path& path) {
    io_detail::write_file(path, encode_scaler(s));
}

inline Scaler load_scaler(const std::filesystem::path& path) { return decode_scaler(io_detail::read_file(path)); }

}  // namespace sunblock
