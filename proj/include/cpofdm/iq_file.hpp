#ifndef CPOFDM_IQ_FILE_HPP
#define CPOFDM_IQ_FILE_HPP

// Raw IQ files: little-endian interleaved float32 (re, im) pairs, no header.
// Optional sidecar "<file>.meta" holds key=value generation parameters.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cpofdm/error.hpp"
#include "cpofdm/numerics.hpp"

namespace cpofdm {

namespace detail {

inline std::uint32_t to_little_endian(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
    } else {
        return v;
    }
}

inline void put_f32(std::string& buf, double x) {
    const auto bits = to_little_endian(std::bit_cast<std::uint32_t>(static_cast<float>(x)));
    char bytes[4];
    std::memcpy(bytes, &bits, 4);
    buf.append(bytes, 4);
}

inline float get_f32(const char* p) {
    std::uint32_t bits;
    std::memcpy(&bits, p, 4);
    return std::bit_cast<float>(to_little_endian(bits));
}

} // namespace detail

inline void write_iq(const std::filesystem::path& path, const std::vector<cplx>& samples) {
    std::string buf;
    buf.reserve(samples.size() * 8);
    for (const auto& s : samples) {
        detail::put_f32(buf, s.real());
        detail::put_f32(buf, s.imag());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

inline std::vector<cplx> read_iq(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() % 8 != 0)
        throw IoError(path.string() + ": size " + std::to_string(buf.size()) +
                      " is not a whole number of float32 IQ pairs");
    std::vector<cplx> out(buf.size() / 8);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = {detail::get_f32(buf.data() + 8 * i), detail::get_f32(buf.data() + 8 * i + 4)};
    return out;
}

inline std::filesystem::path meta_path(const std::filesystem::path& iq_path) {
    return iq_path.string() + ".meta";
}

/// Flat key=value text, one pair per line, keys in the given order.
inline void write_key_values(const std::filesystem::path& path,
                             const std::vector<std::pair<std::string, std::string>>& kv) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

inline std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw IoError(path.string() + ": malformed line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

} // namespace cpofdm

#endif // CPOFDM_IQ_FILE_HPP
