#ifndef CPOFDM_HARNESS_HPP
#define CPOFDM_HARNESS_HPP

// Monte Carlo detection-probability sweeps. Each trial generates a CP-OFDM
// stream, passes it through a fresh block-fading channel with AWGN and runs
// the subcarrier estimator. Trial seeds depend only on (master seed, axis
// index, trial index), so results do not depend on the worker count.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "cpofdm/channel.hpp"
#include "cpofdm/error.hpp"
#include "cpofdm/estimator.hpp"
#include "cpofdm/kv_config.hpp"
#include "cpofdm/ofdm_tx.hpp"
#include "cpofdm/rng.hpp"
#include "cpofdm/version.hpp"

namespace cpofdm {

struct TrialConfig {
    OfdmConfig ofdm;
    ChannelConfig channel;
    EstimatorConfig estimator;
};

/// Default candidate range: [max(2, N/2), min(2N, floor(sqrt(K*T)) - P)].
inline std::pair<std::size_t, std::size_t> auto_candidate_range(const OfdmConfig& o) {
    const std::size_t lo = std::max<std::size_t>(2, o.n_subcarriers / 2);
    auto root = static_cast<std::size_t>(std::sqrt(static_cast<double>(o.total_len())));
    while ((root + 1) * (root + 1) <= o.total_len()) ++root;
    while (root * root > o.total_len()) --root;
    const std::size_t feasible = root > o.cp_len ? root - o.cp_len : 0;
    return {lo, std::min(2 * o.n_subcarriers, feasible)};
}

/// Fill the derived fields and check every invariant, including data length.
inline TrialConfig finalize(TrialConfig t, std::size_t n_min = 0, std::size_t n_max = 0) {
    validate(t.ofdm);
    t.channel.block_len = t.ofdm.block_len();
    validate(t.channel);
    t.estimator.cp_len = t.ofdm.cp_len;
    t.estimator.num_taps = t.channel.num_taps;
    t.estimator.require_cp_covers_taps = false;
    const auto [lo, hi] = auto_candidate_range(t.ofdm);
    t.estimator.n_min = n_min != 0 ? n_min : lo;
    t.estimator.n_max = n_max != 0 ? n_max : hi;
    validate(t.estimator);
    require_enough_samples(t.ofdm.total_len(), t.estimator);
    return t;
}

struct TrialOutcome {
    bool detected = false;
    std::size_t n_hat = 0;
};

inline TrialOutcome run_trial_detailed(const TrialConfig& cfg, Seed trial_seed) {
    const auto s = generate_stream(cfg.ofdm, stream_seed(trial_seed, Stream::data));
    const auto real = draw_realization(cfg.channel, cfg.ofdm.num_blocks, stream_seed(trial_seed, Stream::channel));
    const auto r = apply_block_channel(s, real, stream_seed(trial_seed, Stream::noise));
    const auto report = estimate_n(r, cfg.estimator);
    return {report.n_hat == cfg.ofdm.n_subcarriers, report.n_hat};
}

inline bool run_trial(const TrialConfig& cfg, Seed trial_seed) {
    return run_trial_detailed(cfg, trial_seed).detected;
}

enum class SweepAxis { snr_db, num_taps, n_subcarriers, mod_order, cp_len };

inline std::string_view axis_name(SweepAxis a) {
    switch (a) {
    case SweepAxis::snr_db: return "snr_db";
    case SweepAxis::num_taps: return "num_taps";
    case SweepAxis::n_subcarriers: return "n_subcarriers";
    case SweepAxis::mod_order: return "mod_order";
    case SweepAxis::cp_len: return "cp_len";
    }
    return "?";
}

inline SweepAxis parse_axis(std::string_view s) {
    for (auto a : {SweepAxis::snr_db, SweepAxis::num_taps, SweepAxis::n_subcarriers, SweepAxis::mod_order,
                   SweepAxis::cp_len})
        if (axis_name(a) == s) return a;
    throw ConfigError("unknown sweep axis '" + std::string(s) + "'");
}

struct SweepSpec {
    std::string name = "custom";
    TrialConfig base;
    std::size_t n_min = 0;  // 0 = auto
    std::size_t n_max = 0;  // 0 = auto
    SweepAxis axis = SweepAxis::snr_db;
    std::vector<double> axis_values;
    std::size_t trials = 200;
    Seed master_seed = 1;
};

struct SweepPoint {
    double axis_value = 0.0;
    double pd = 0.0;
    std::size_t trials = 0;
    std::size_t detections = 0;
    double wilson_halfwidth = 0.0;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepPoint> points;
    std::string code_version = kVersion;
};

/// Half-width of the 95% Wilson score interval.
inline double wilson_halfwidth(std::size_t successes, std::size_t n, double z = 1.959963984540054) {
    if (n == 0) return 0.0;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    return z / (1.0 + z2 / nn) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
}

inline std::string format_number(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

namespace detail {

inline std::size_t integral_axis_value(double v, SweepAxis axis) {
    if (!(v >= 0.0) || std::floor(v) != v)
        throw ConfigError("axis " + std::string(axis_name(axis)) + " needs non-negative integers");
    return static_cast<std::size_t>(v);
}

} // namespace detail

/// Trial configuration at one axis point; errors name the point.
inline TrialConfig point_config(const SweepSpec& spec, std::size_t index) {
    const double v = spec.axis_values.at(index);
    try {
        TrialConfig t = spec.base;
        switch (spec.axis) {
        case SweepAxis::snr_db: t.channel.snr_db = v; break;
        case SweepAxis::num_taps: t.channel.num_taps = detail::integral_axis_value(v, spec.axis); break;
        case SweepAxis::n_subcarriers: t.ofdm.n_subcarriers = detail::integral_axis_value(v, spec.axis); break;
        case SweepAxis::mod_order:
            t.ofdm.mod_order = static_cast<unsigned>(detail::integral_axis_value(v, spec.axis));
            break;
        case SweepAxis::cp_len: t.ofdm.cp_len = detail::integral_axis_value(v, spec.axis); break;
        }
        // An explicit range only makes sense when N is fixed across the sweep.
        const bool n_moves = spec.axis == SweepAxis::n_subcarriers;
        return finalize(t, n_moves ? 0 : spec.n_min, n_moves ? 0 : spec.n_max);
    } catch (const Error& e) {
        throw ConfigError("sweep point " + std::string(axis_name(spec.axis)) + "=" + format_number(v) + ": " +
                          e.what());
    }
}

inline Seed trial_seed(Seed master, std::size_t axis_index, std::size_t trial_index) {
    return derive_seed({master, axis_index, trial_index});
}

inline void validate(const SweepSpec& spec) {
    if (spec.trials < 1) throw ConfigError("sweep: trials must be >= 1");
    if (spec.axis_values.empty()) throw ConfigError("sweep: axis has no values");
    for (std::size_t i = 0; i < spec.axis_values.size(); ++i) (void)point_config(spec, i);
}

/// Worker count: explicit request, else $CPOFDM_THREADS, else hardware concurrency.
inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CPOFDM_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

inline SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 0) {
    validate(spec);
    std::vector<TrialConfig> configs;
    for (std::size_t i = 0; i < spec.axis_values.size(); ++i) configs.push_back(point_config(spec, i));

    const std::size_t total = configs.size() * spec.trials;
    std::vector<std::uint8_t> hits(total, 0);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (std::size_t job = next++; job < total; job = next++) {
            const std::size_t point = job / spec.trials;
            const std::size_t trial = job % spec.trials;
            try {
                hits[job] = run_trial(configs[point], trial_seed(spec.master_seed, point, trial)) ? 1 : 0;
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = total;
            }
        }
    };

    const unsigned n_workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), total));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    SweepResult result;
    result.spec = spec;
    for (std::size_t p = 0; p < configs.size(); ++p) {
        SweepPoint pt;
        pt.axis_value = spec.axis_values[p];
        pt.trials = spec.trials;
        for (std::size_t t = 0; t < spec.trials; ++t) pt.detections += hits[p * spec.trials + t];
        pt.pd = static_cast<double>(pt.detections) / static_cast<double>(pt.trials);
        pt.wilson_halfwidth = wilson_halfwidth(pt.detections, pt.trials);
        result.points.push_back(pt);
    }
    return result;
}

// ---- spec files -----------------------------------------------------------

inline SweepSpec spec_from_section(const KvSection& sec) {
    static const std::vector<std::string> known = {"axis", "values", "n", "cp", "symbols", "blocks", "mod",
                                                   "taps", "tap_var", "snr_db", "n_min", "n_max", "trials",
                                                   "seed", "name", "code_version"};
    for (const auto& [k, v] : sec.entries())
        if (std::find(known.begin(), known.end(), k) == known.end())
            throw ConfigError("[" + sec.name() + "] unknown key '" + k + "'");

    SweepSpec s;
    s.name = sec.has("name") ? sec.get("name") : sec.name();
    s.axis = parse_axis(sec.get("axis"));
    s.axis_values = parse_double_list("values", sec.get("values"));
    auto count = [&](const char* key, std::size_t fallback) {
        return sec.has(key) ? parse_count(key, sec.get(key)) : fallback;
    };
    s.base.ofdm.n_subcarriers = count("n", 64);
    s.base.ofdm.cp_len = count("cp", 7);
    s.base.ofdm.symbols_per_block = count("symbols", 500);
    s.base.ofdm.num_blocks = count("blocks", 5);
    s.base.ofdm.mod_order = static_cast<unsigned>(count("mod", 4));
    s.base.channel.num_taps = count("taps", 6);
    s.base.channel.tap_variance = sec.has("tap_var") ? parse_double("tap_var", sec.get("tap_var")) : 0.0;
    s.base.channel.snr_db = sec.has("snr_db") ? parse_double("snr_db", sec.get("snr_db")) : 20.0;
    s.n_min = count("n_min", 0);
    s.n_max = count("n_max", 0);
    s.trials = count("trials", 200);
    s.master_seed = count("seed", 1);
    return s;
}

inline std::vector<std::pair<std::string, std::string>> spec_to_key_values(const SweepSpec& s) {
    std::string values;
    for (std::size_t i = 0; i < s.axis_values.size(); ++i)
        values += (i ? "," : "") + format_number(s.axis_values[i]);
    const auto& o = s.base.ofdm;
    const auto& c = s.base.channel;
    return {{"name", s.name},
            {"axis", std::string(axis_name(s.axis))},
            {"values", values},
            {"n", std::to_string(o.n_subcarriers)},
            {"cp", std::to_string(o.cp_len)},
            {"symbols", std::to_string(o.symbols_per_block)},
            {"blocks", std::to_string(o.num_blocks)},
            {"mod", std::to_string(o.mod_order)},
            {"taps", std::to_string(c.num_taps)},
            {"tap_var", format_number(c.tap_variance)},
            {"snr_db", format_number(c.snr_db)},
            {"n_min", std::to_string(s.n_min)},
            {"n_max", std::to_string(s.n_max)},
            {"trials", std::to_string(s.trials)},
            {"seed", std::to_string(s.master_seed)}};
}

/// Built-in presets. "-paper" sections
/// use the full-scale parameters (N=64, M=500, K=5, 1000 trials).
inline constexpr std::string_view kPresets = R"(# Pd vs SNR
[fig2]
axis = snr_db
values = -5, 0, 5, 10, 15, 20
n = 32
cp = 7
taps = 6
symbols = 100
blocks = 2
mod = 4
trials = 200
seed = 2

[fig2-paper]
axis = snr_db
values = -10, -5, 0, 5, 10, 15, 20
n = 64
cp = 7
taps = 6
symbols = 500
blocks = 5
mod = 4
trials = 1000
seed = 2

# Pd vs number of taps; L > P breaks the CP redundancy
[fig3]
axis = num_taps
values = 1, 2, 3, 4, 5, 6, 7, 8, 9, 10
n = 32
cp = 7
symbols = 100
blocks = 2
mod = 4
snr_db = 15
trials = 200
seed = 3

[fig3-paper]
axis = num_taps
values = 1, 2, 3, 4, 5, 6, 7, 8, 9, 10
n = 64
cp = 7
symbols = 500
blocks = 5
mod = 4
snr_db = 15
trials = 1000
seed = 3

# Pd vs N
[fig4]
axis = n_subcarriers
values = 16, 24, 32, 48, 64
cp = 7
taps = 6
symbols = 100
blocks = 2
mod = 4
snr_db = 15
trials = 200
seed = 4

[fig4-paper]
axis = n_subcarriers
values = 16, 32, 48, 64, 96, 128
cp = 7
taps = 6
symbols = 500
blocks = 5
mod = 4
snr_db = 15
trials = 1000
seed = 4

# Pd vs modulation order
[fig5]
axis = mod_order
values = 4, 16, 64, 256
n = 32
cp = 7
taps = 4
symbols = 100
blocks = 2
snr_db = 10
trials = 200
seed = 5

[fig5-paper]
axis = mod_order
values = 4, 16, 64, 256
n = 64
cp = 7
taps = 6
symbols = 500
blocks = 5
snr_db = 10
trials = 1000
seed = 5
)";

inline SweepSpec select_spec(std::string_view text, const std::string& section) {
    const auto sections = parse_kv_sections(text);
    if (section.empty()) {
        if (sections.size() != 1)
            throw ConfigError("spec file has " + std::to_string(sections.size()) +
                              " sections; choose one with --preset");
        return spec_from_section(sections.front());
    }
    for (const auto& s : sections)
        if (s.name() == section) return spec_from_section(s);
    throw ConfigError("no section [" + section + "] in spec");
}

inline SweepSpec preset_spec(const std::string& name, bool paper_scale = false) {
    return select_spec(kPresets, paper_scale ? name + "-paper" : name);
}

inline std::filesystem::path provenance_path(const std::filesystem::path& csv) {
    return csv.string() + ".provenance";
}

inline std::string csv_text(const SweepResult& result) {
    std::ostringstream os;
    os << "axis,axis_value,pd,trials,ci_halfwidth\n";
    char buf[64];
    for (const auto& p : result.points) {
        os << axis_name(result.spec.axis) << ',' << format_number(p.axis_value) << ',';
        std::snprintf(buf, sizeof buf, "%.8f", p.pd);
        os << buf << ',' << p.trials << ',';
        std::snprintf(buf, sizeof buf, "%.8f", p.wilson_halfwidth);
        os << buf << '\n';
    }
    return os.str();
}

/// Write the CSV and "<path>.provenance" (re-loadable as a spec file).
inline void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + path.string() + " for writing");
        out << csv_text(result);
        if (!out) throw IoError("write failed: " + path.string());
    }
    const auto prov = provenance_path(path);
    std::ofstream out(prov, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + prov.string() + " for writing");
    out << "[" << result.spec.name << "]\n";
    for (const auto& [k, v] : spec_to_key_values(result.spec)) out << k << " = " << v << '\n';
    out << "code_version = " << result.code_version << '\n';
    if (!out) throw IoError("write failed: " + prov.string());
}

} // namespace cpofdm

#endif // CPOFDM_HARNESS_HPP
