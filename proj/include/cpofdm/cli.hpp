#ifndef CPOFDM_CLI_HPP
#define CPOFDM_CLI_HPP

// Command-line front end. Exit codes: 0 success, 1 usage/config error,
// 2 data/estimation error. Every failure prints one line to the error
// stream starting with "usage-error: " or "data-error: ".

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cpofdm/channel.hpp"
#include "cpofdm/error.hpp"
#include "cpofdm/estimator.hpp"
#include "cpofdm/harness.hpp"
#include "cpofdm/iq_file.hpp"
#include "cpofdm/ofdm_tx.hpp"

namespace cpofdm::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2 };

namespace detail {

struct GenerateArgs {
    std::size_t n = 64, cp = 7, symbols = 500, blocks = 5, taps = 6;
    unsigned mod = 4;
    double snr_db = 20.0;
    double tap_var = 0.0;
    std::uint64_t seed = 1;
    std::string out;
};

struct EstimateArgs {
    std::string in;
    std::size_t cp = 0, taps = 0, n_min = 0, n_max = 0;
    std::string report;
};

struct SweepArgs {
    std::string preset, spec_file, out, scale = "desk";
    std::size_t trials = 0;
    bool trials_given = false;
    unsigned threads = 0;
};

struct RankCheckArgs {
    std::size_t n = 2, cp = 2, symbols = 2, blocks = 2, taps = 2;
    unsigned mod = 4;
    std::uint64_t seed = 1;
};

inline std::string one_line(std::string s) {
    for (auto& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

inline int cmd_generate(const GenerateArgs& a, std::ostream& out) {
    OfdmConfig cfg{a.n, a.cp, a.symbols, a.blocks, a.mod};
    validate(cfg);
    ChannelConfig ch{a.taps, a.tap_var, a.snr_db, cfg.block_len()};
    validate(ch);
    const auto s = generate_stream(cfg, stream_seed(a.seed, Stream::data));
    const auto real = draw_realization(ch, cfg.num_blocks, stream_seed(a.seed, Stream::channel));
    const auto r = apply_block_channel(s, real, stream_seed(a.seed, Stream::noise));
    write_iq(a.out, r.samples);
    write_key_values(meta_path(a.out), {{"n", std::to_string(a.n)},
                                        {"cp", std::to_string(a.cp)},
                                        {"symbols", std::to_string(a.symbols)},
                                        {"blocks", std::to_string(a.blocks)},
                                        {"mod", std::to_string(a.mod)},
                                        {"taps", std::to_string(a.taps)},
                                        {"snr_db", format_number(a.snr_db)},
                                        {"seed", std::to_string(a.seed)},
                                        {"samples", std::to_string(r.size())}});
    out << r.size() << '\n';
    return kOk;
}

inline int cmd_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& err) {
    EstimatorConfig cfg;
    cfg.cp_len = a.cp;
    cfg.num_taps = a.taps;
    cfg.n_min = a.n_min;
    cfg.n_max = a.n_max;
    validate(cfg);
    const auto samples = read_iq(a.in);
    const auto report = estimate_n(std::span<const cplx>(samples), cfg);
    if (!a.report.empty()) {
        std::ofstream rep(a.report, std::ios::trunc);
        if (!rep) throw IoError("cannot open " + a.report + " for writing");
        write_report(rep, report);
    }
    if (report.ambiguous) err << "warning: no candidate reached metric 0; true N may be outside the range\n";
    out << report.n_hat << '\n';
    return kOk;
}

inline int cmd_sweep(const SweepArgs& a, std::ostream& out) {
    if (a.scale != "desk" && a.scale != "paper") throw ConfigError("--scale must be desk or paper");
    if (a.preset.empty() && a.spec_file.empty()) throw ConfigError("sweep needs --preset or --spec");
    SweepSpec spec;
    if (!a.spec_file.empty()) {
        std::ifstream in(a.spec_file);
        if (!in) throw ConfigError("cannot read spec file " + a.spec_file);
        std::stringstream text;
        text << in.rdbuf();
        spec = select_spec(text.str(), a.preset);
    } else {
        spec = preset_spec(a.preset, a.scale == "paper");
    }
    if (a.trials_given) spec.trials = a.trials;
    const auto result = run_sweep(spec, a.threads);
    emit_csv(result, a.out);
    out << csv_text(result);
    return kOk;
}

inline int cmd_rank_check(const RankCheckArgs& a, std::ostream& out) {
    OfdmConfig cfg{a.n, a.cp, a.symbols, a.blocks, a.mod};
    validate(cfg);
    if (a.taps > a.cp) throw ConfigError("rank-check: needs P >= L");
    ChannelConfig ch{a.taps, 0.0, INFINITY, cfg.block_len()};
    const auto s = generate_stream(cfg, stream_seed(a.seed, Stream::data));
    const auto real = draw_realization(ch, cfg.num_blocks, stream_seed(a.seed, Stream::channel));
    const auto r = apply_block_channel(s, real, 0);

    const std::size_t correct = a.n + a.cp;
    bool holds = true;
    out << "n_prime,m_prime,rank,expected\n";
    for (std::size_t np = correct > 2 ? correct - 2 : 1; np <= correct + 2; ++np) {
        if (r.size() / np < np) continue;
        const std::size_t rank = rank_oracle_noise_free(r, np);
        const std::size_t expected = np == correct ? a.n + a.taps - 1 : np;
        holds = holds && rank == expected;
        out << np << ',' << r.size() / np << ',' << rank << ',' << expected << '\n';
    }
    const auto pairs = duplicate_row_pairs(r, a.n, a.cp, a.taps);
    out << "duplicate_pairs=";
    for (std::size_t i = 0; i < pairs.size(); ++i)
        out << (i ? ";" : "") << '(' << pairs[i].first << ',' << pairs[i].second << ')';
    const bool dup_ok = duplicate_row_check(r, a.n, a.cp, a.taps);
    out << "\nduplicate_check=" << (dup_ok ? "true" : "false") << '\n';
    return holds && dup_ok ? kOk : kData;
}

} // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Blind CP-OFDM subcarrier-count estimation", "cpofdm"};
    app.require_subcommand(1);

    detail::GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Synthesize a received CP-OFDM IQ file");
    g->add_option("--n", gen.n, "number of subcarriers N")->required();
    g->add_option("--cp", gen.cp, "cyclic prefix length P")->required();
    g->add_option("--symbols", gen.symbols, "OFDM symbols per block M")->required();
    g->add_option("--blocks", gen.blocks, "number of blocks K")->required();
    g->add_option("--mod", gen.mod, "square QAM order")->required();
    g->add_option("--snr-db", gen.snr_db, "SNR in dB (inf for noise-free)")->required();
    g->add_option("--taps", gen.taps, "channel taps L")->required();
    g->add_option("--tap-var", gen.tap_var, "per-tap variance (default 1/L)");
    g->add_option("--seed", gen.seed, "RNG seed")->required();
    g->add_option("--out", gen.out, "output IQ file")->required();

    detail::EstimateArgs est;
    auto* e = app.add_subcommand("estimate", "Estimate N from an IQ file");
    e->add_option("--in", est.in, "input IQ file")->required();
    e->add_option("--cp", est.cp, "known CP length P")->required();
    e->add_option("--taps", est.taps, "known channel taps L")->required();
    e->add_option("--n-min", est.n_min, "smallest N to test")->required();
    e->add_option("--n-max", est.n_max, "largest N to test")->required();
    e->add_option("--report", est.report, "per-candidate CSV report path");

    detail::SweepArgs sw;
    auto* s = app.add_subcommand("sweep", "Monte Carlo detection-probability sweep");
    s->add_option("--preset", sw.preset, "fig2, fig3, fig4, fig5 (or a section of --spec)");
    s->add_option("--spec", sw.spec_file, "sweep spec file (key=value sections)");
    s->add_option("--out", sw.out, "output CSV")->required();
    auto* trials_opt = s->add_option("--trials", sw.trials, "override trials per point");
    s->add_option("--scale", sw.scale, "desk or paper");
    s->add_option("--threads", sw.threads, "worker cap (default $CPOFDM_THREADS or all cores)");

    detail::RankCheckArgs rc;
    auto* r = app.add_subcommand("rank-check", "Noise-free rank and duplicate-row demo");
    r->add_option("--n", rc.n, "number of subcarriers N");
    r->add_option("--cp", rc.cp, "cyclic prefix length P");
    r->add_option("--taps", rc.taps, "channel taps L");
    r->add_option("--symbols", rc.symbols, "OFDM symbols per block M");
    r->add_option("--blocks", rc.blocks, "number of blocks K");
    r->add_option("--mod", rc.mod, "square QAM order");
    r->add_option("--seed", rc.seed, "RNG seed");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& ex) {
        err << "usage-error: " << detail::one_line(ex.what()) << '\n';
        return kUsage;
    }

    try {
        if (*g) return detail::cmd_generate(gen, out);
        if (*e) return detail::cmd_estimate(est, out, err);
        if (*s) {
            sw.trials_given = trials_opt->count() > 0;
            return detail::cmd_sweep(sw, out);
        }
        if (*r) return detail::cmd_rank_check(rc, out);
    } catch (const ConfigError& ex) {
        err << "usage-error: " << detail::one_line(ex.what()) << '\n';
        return kUsage;
    } catch (const std::exception& ex) {
        err << "data-error: " << detail::one_line(ex.what()) << '\n';
        return kData;
    }
    return kUsage;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

} // namespace cpofdm::cli

#endif // CPOFDM_CLI_HPP
