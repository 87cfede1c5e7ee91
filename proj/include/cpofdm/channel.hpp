#ifndef CPOFDM_CHANNEL_HPP
#define CPOFDM_CHANNEL_HPP

// Quasi-block-fading multipath channel. Taps are constant over a block of
// T samples and redrawn per block; the convolution runs across block
// boundaries so the first L-1 outputs of block k carry the tail of block
// k-1 (B_1 = 0). Taps are stored 0-based, h(0)..h(L-1).

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "cpofdm/error.hpp"
#include "cpofdm/numerics.hpp"
#include "cpofdm/ofdm_tx.hpp"
#include "cpofdm/rng.hpp"

namespace cpofdm {

struct ChannelConfig {
    std::size_t num_taps = 6;  // L
    double tap_variance = 0.0; // sigma_h^2; <= 0 selects 1/L
    double snr_db = 20.0;      // +inf for a noise-free channel
    std::size_t block_len = 0; // T

    double effective_tap_variance() const noexcept {
        return tap_variance > 0.0 ? tap_variance : 1.0 / static_cast<double>(num_taps);
    }

    friend bool operator==(const ChannelConfig&, const ChannelConfig&) = default;
};

inline void validate(const ChannelConfig& c) {
    if (c.num_taps < 1) throw ConfigError("channel: L must be >= 1");
    if (c.block_len < 1) throw ConfigError("channel: T must be >= 1");
    if (c.num_taps > c.block_len)
        throw ConfigError("channel: L (" + std::to_string(c.num_taps) + ") exceeds block length T (" +
                          std::to_string(c.block_len) + ")");
    if (std::isnan(c.snr_db)) throw ConfigError("channel: snr_db is NaN");
    if (std::isnan(c.tap_variance) || std::isinf(c.tap_variance))
        throw ConfigError("channel: tap variance must be finite");
}

struct ChannelRealization {
    std::vector<std::vector<cplx>> taps;  // K vectors of L taps
    double noise_var = 0.0;
    std::size_t block_len = 0;

    std::size_t num_blocks() const noexcept { return taps.size(); }
    std::size_t num_taps() const noexcept { return taps.empty() ? 0 : taps.front().size(); }
};

/// sigma_n^2 = signal_power * 10^(-snr_db/10); +inf dB gives 0.
inline double calibrate_noise(double snr_db, double signal_power = 1.0) {
    if (!(signal_power > 0.0)) throw ConfigError("calibrate_noise: signal power must be > 0");
    if (std::isinf(snr_db) && snr_db > 0) return 0.0;
    return signal_power * std::pow(10.0, -snr_db / 10.0);
}

/// Circular complex Gaussian with E|z|^2 = variance.
class ComplexGaussian {
public:
    explicit ComplexGaussian(double variance) : g_(0.0, std::sqrt(variance / 2.0)) {}

    cplx operator()(Rng& rng) {
        const double re = g_(rng);
        const double im = g_(rng);
        return {re, im};
    }

private:
    std::normal_distribution<double> g_;
};

inline ChannelRealization draw_realization(const ChannelConfig& cfg, std::size_t num_blocks, Seed seed) {
    validate(cfg);
    if (num_blocks < 1) throw ConfigError("draw_realization: K must be >= 1");
    Rng rng(seed);
    ChannelRealization out;
    out.block_len = cfg.block_len;
    out.noise_var = calibrate_noise(cfg.snr_db, 1.0);
    out.taps.resize(num_blocks);
    ComplexGaussian tap_dist(cfg.effective_tap_variance());
    for (auto& h : out.taps) {
        h.resize(cfg.num_taps);
        for (auto& tap : h) tap = tap_dist(rng);
    }
    return out;
}

/// r(t) = sum_l h_{blk(t)}(l) s(t-l) + w(t).
inline IqSequence apply_block_channel(const IqSequence& s, const ChannelRealization& real, Seed noise_seed) {
    const std::size_t t_len = real.block_len;
    if (real.taps.empty() || t_len == 0) throw DimensionError("apply_block_channel: empty realization");
    if (s.size() != real.num_blocks() * t_len)
        throw DimensionError("apply_block_channel: sequence length " + std::to_string(s.size()) +
                             " != K*T = " + std::to_string(real.num_blocks() * t_len));
    const std::size_t taps = real.num_taps();
    if (taps > t_len) throw DimensionError("apply_block_channel: L exceeds T");
    for (const auto& h : real.taps)
        if (h.size() != taps) throw DimensionError("apply_block_channel: ragged tap vectors");

    IqSequence r;
    r.meta = s.meta;
    r.samples.assign(s.size(), cplx{});
    for (std::size_t t = 0; t < s.size(); ++t) {
        const auto& h = real.taps[t / t_len];
        cplx acc{};
        const std::size_t reach = std::min(taps, t + 1);
        for (std::size_t l = 0; l < reach; ++l) acc += h[l] * s.samples[t - l];
        r.samples[t] = acc;
    }
    if (real.noise_var > 0.0) {
        Rng rng(noise_seed);
        ComplexGaussian noise(real.noise_var);
        for (auto& x : r.samples) x += noise(rng);
    }
    return r;
}

} // namespace cpofdm

#endif // CPOFDM_CHANNEL_HPP
