#ifndef CPOFDM_OFDM_TX_HPP
#define CPOFDM_OFDM_TX_HPP

// CP-OFDM transmitter: Gray-mapped square QAM on N subcarriers, unitary
// IDFT, cyclic prefix of length P, column-stacked serialization.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpofdm/error.hpp"
#include "cpofdm/numerics.hpp"
#include "cpofdm/rng.hpp"

namespace cpofdm {

struct OfdmConfig {
    std::size_t n_subcarriers = 64;     // N
    std::size_t cp_len = 7;             // P
    std::size_t symbols_per_block = 500; // M
    std::size_t num_blocks = 5;          // K
    unsigned mod_order = 4;

    std::size_t symbol_len() const noexcept { return n_subcarriers + cp_len; }
    std::size_t block_len() const noexcept { return symbols_per_block * symbol_len(); }
    std::size_t total_len() const noexcept { return num_blocks * block_len(); }

    friend bool operator==(const OfdmConfig&, const OfdmConfig&) = default;
};

inline bool is_supported_mod_order(unsigned order) {
    return order == 4 || order == 16 || order == 64 || order == 256;
}

inline unsigned bits_per_symbol(unsigned order) {
    return static_cast<unsigned>(std::countr_zero(order));
}

inline void validate(const OfdmConfig& c) {
    if (c.n_subcarriers < 2) throw ConfigError("ofdm: N must be >= 2");
    if (c.cp_len < 1) throw ConfigError("ofdm: P must be >= 1");
    if (c.cp_len > c.n_subcarriers)
        throw ConfigError("ofdm: P (" + std::to_string(c.cp_len) + ") must not exceed N (" +
                          std::to_string(c.n_subcarriers) + ")");
    if (c.symbols_per_block < 1) throw ConfigError("ofdm: M must be >= 1");
    if (c.num_blocks < 1) throw ConfigError("ofdm: K must be >= 1");
    if (!is_supported_mod_order(c.mod_order))
        throw ConfigError("ofdm: mod_order " + std::to_string(c.mod_order) +
                          " is not one of 4, 16, 64, 256");
}

/// Complex baseband stream; meta is absent for externally captured data.
struct IqSequence {
    std::vector<cplx> samples;
    std::optional<OfdmConfig> meta;

    std::size_t size() const noexcept { return samples.size(); }
};

namespace detail {

inline unsigned gray_to_binary(unsigned g) {
    for (unsigned shift = g >> 1; shift != 0; shift >>= 1) g ^= shift;
    return g;
}

// Bits for one axis (MSB first) -> PAM level in {m-1, m-3, ..., -(m-1)}.
inline double pam_level(unsigned gray_bits, unsigned levels) {
    const unsigned idx = gray_to_binary(gray_bits);
    return static_cast<double>(static_cast<int>(levels) - 1 - 2 * static_cast<int>(idx));
}

} // namespace detail

/// Gray-mapped square QAM point for one symbol's worth of bits packed MSB first:
/// the high half selects the in-phase level, the low half the quadrature level.
inline cplx qam_point(unsigned symbol_bits, unsigned mod_order) {
    const unsigned half = bits_per_symbol(mod_order) / 2;
    const unsigned levels = 1u << half;
    const unsigned mask = levels - 1;
    const double scale = std::sqrt(3.0 / (2.0 * (mod_order - 1.0)));
    return {scale * detail::pam_level((symbol_bits >> half) & mask, levels),
            scale * detail::pam_level(symbol_bits & mask, levels)};
}

/// Map a bit array (one bit per element, values 0/1) to unit-power QAM symbols.
inline std::vector<cplx> map_qam(std::span<const std::uint8_t> bits, unsigned mod_order) {
    if (!is_supported_mod_order(mod_order))
        throw ConfigError("map_qam: unsupported mod_order " + std::to_string(mod_order));
    const unsigned bps = bits_per_symbol(mod_order);
    if (bits.size() % bps != 0)
        throw DimensionError("map_qam: bit count " + std::to_string(bits.size()) +
                             " not divisible by " + std::to_string(bps));
    std::vector<cplx> out;
    out.reserve(bits.size() / bps);
    for (std::size_t i = 0; i < bits.size(); i += bps) {
        unsigned word = 0;
        for (unsigned b = 0; b < bps; ++b) {
            if (bits[i + b] > 1) throw ContractError("map_qam: bit values must be 0 or 1");
            word = (word << 1) | bits[i + b];
        }
        out.push_back(qam_point(word, mod_order));
    }
    return out;
}

/// IDFT the N x M frequency block and prepend the last P rows.
inline ComplexMatrix build_cp_block(const ComplexMatrix& freq_block, const OfdmConfig& cfg) {
    validate(cfg);
    const auto n = static_cast<Eigen::Index>(cfg.n_subcarriers);
    const auto p = static_cast<Eigen::Index>(cfg.cp_len);
    if (freq_block.rows() != n || freq_block.cols() != static_cast<Eigen::Index>(cfg.symbols_per_block))
        throw DimensionError("build_cp_block: expected " + std::to_string(n) + "x" +
                             std::to_string(cfg.symbols_per_block) + " block");
    const ComplexMatrix time = idft_apply(freq_block);
    ComplexMatrix out(n + p, time.cols());
    out.topRows(p) = time.bottomRows(p);
    out.bottomRows(n) = time;
    return out;
}

/// vec(): columns concatenated in order.
inline std::vector<cplx> serialize_block(const ComplexMatrix& cp_block) {
    return {cp_block.data(), cp_block.data() + cp_block.size()};  // Eigen is column-major
}

/// Random unit-power QAM frequency block, subcarrier-fastest fill.
inline ComplexMatrix random_qam_block(const OfdmConfig& cfg, Rng& rng) {
    std::uniform_int_distribution<unsigned> pick(0, cfg.mod_order - 1);
    ComplexMatrix block(cfg.n_subcarriers, cfg.symbols_per_block);
    for (Eigen::Index i = 0; i < block.size(); ++i) block.data()[i] = qam_point(pick(rng), cfg.mod_order);
    return block;
}

/// Transmit sequence s = [s_1; ...; s_K], deterministic in (cfg, seed).
inline IqSequence generate_stream(const OfdmConfig& cfg, Seed seed) {
    validate(cfg);
    Rng rng(seed);
    IqSequence s;
    s.meta = cfg;
    s.samples.reserve(cfg.total_len());
    for (std::size_t k = 0; k < cfg.num_blocks; ++k) {
        const auto block = serialize_block(build_cp_block(random_qam_block(cfg, rng), cfg));
        s.samples.insert(s.samples.end(), block.begin(), block.end());
    }
    return s;
}

} // namespace cpofdm

#endif // CPOFDM_OFDM_TX_HPP
