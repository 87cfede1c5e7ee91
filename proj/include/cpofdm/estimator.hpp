#ifndef CPOFDM_ESTIMATOR_HPP
#define CPOFDM_ESTIMATOR_HPP

// Blind estimation of the number of OFDM subcarriers.
//
// The received stream is cut into N'-sample columns. At the true symbol
// length N' = N+P and without noise, rows i and i+N (i = L..P) coincide
// because the cyclic prefix survives the L-tap channel, so the segment
// matrix drops to rank N+L-1; every other N' is full rank. With noise the
// P-L+1 missing dimensions show up as a floor of covariance eigenvalues,
// located per candidate with an MDL breakpoint search.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cpofdm/error.hpp"
#include "cpofdm/numerics.hpp"
#include "cpofdm/ofdm_tx.hpp"

namespace cpofdm {

/// Eigenvalues below this fraction of the largest are treated as numerically zero.
inline constexpr double kRelativeEigFloor = 1e-11;
inline constexpr double kDuplicateRowTol = 1e-10;

struct EstimatorConfig {
    std::size_t cp_len = 7;   // P, known
    std::size_t num_taps = 6; // L, known
    std::size_t n_min = 2;    // smallest N to test
    std::size_t n_max = 128;  // largest N to test
    // When set, P >= L is enforced. Sweeps past the CP (L > P) clear it.
    bool require_cp_covers_taps = true;
    // Keep full MDL curves and eigen spectra in the report.
    bool keep_diagnostics = false;

    std::size_t min_candidate() const noexcept { return n_min + cp_len; }
    std::size_t max_candidate() const noexcept { return n_max + cp_len; }
};

inline void validate(const EstimatorConfig& c) {
    if (c.cp_len < 1) throw ConfigError("estimator: P must be >= 1");
    if (c.num_taps < 1) throw ConfigError("estimator: L must be >= 1");
    if (c.require_cp_covers_taps && c.cp_len < c.num_taps)
        throw ConfigError("estimator: CP length P (" + std::to_string(c.cp_len) +
                          ") must be >= number of taps L (" + std::to_string(c.num_taps) + ")");
    if (c.n_min < 2) throw ConfigError("estimator: n_min must be >= 2");
    if (c.n_max < c.n_min)
        throw ConfigError("estimator: n_max (" + std::to_string(c.n_max) + ") < n_min (" +
                          std::to_string(c.n_min) + ")");
}

/// N' x M' matrix whose k-th column is r((k-1)N'+1 .. kN').
struct SegmentationMatrix {
    std::size_t n_prime = 0;
    std::size_t m_prime = 0;
    ComplexMatrix data;
};

inline SegmentationMatrix segment(std::span<const cplx> r, std::size_t n_prime) {
    if (n_prime == 0) throw DimensionError("segment: N' must be >= 1");
    const std::size_t m_prime = r.size() / n_prime;
    if (m_prime < n_prime)
        throw InsufficientDataError("segment: N'=" + std::to_string(n_prime) + " needs at least " +
                                        std::to_string(n_prime * n_prime) + " samples, got " +
                                        std::to_string(r.size()),
                                    n_prime * n_prime);
    SegmentationMatrix seg;
    seg.n_prime = n_prime;
    seg.m_prime = m_prime;
    seg.data = Eigen::Map<const ComplexMatrix>(r.data(), static_cast<Eigen::Index>(n_prime),
                                               static_cast<Eigen::Index>(m_prime));
    return seg;
}

inline SegmentationMatrix segment(const IqSequence& r, std::size_t n_prime) {
    return segment(std::span<const cplx>(r.samples), n_prime);
}

/// C = (1/M') R R^H
inline ComplexMatrix covariance(const SegmentationMatrix& seg) {
    const auto n = seg.data.rows();
    ComplexMatrix c = ComplexMatrix::Zero(n, n);
    c.selfadjointView<Eigen::Lower>().rankUpdate(seg.data, 1.0 / static_cast<double>(seg.m_prime));
    return c.selfadjointView<Eigen::Lower>();
}

/// Rank of the segment matrix of a noise-free stream.
inline std::size_t rank_oracle_noise_free(const IqSequence& r, std::size_t n_prime) {
    return numerical_rank(segment(r, n_prime).data, kDefaultRankTol);
}

struct MdlCurve {
    std::size_t n_prime = 0;
    std::size_t m_prime = 0;
    std::vector<double> values;  // values[z-1] = MDL(z; N'), z = 1..N'
    std::size_t zeta_hat = 0;
    double min_value = 0.0;
    std::size_t metric = 0;      // |zeta_hat - (N' + L - 1 - P)|, set by estimate_n
};

/// MDL(z; N') = -(N'-z) M' log(GM/AM) + z(2N'-z) log(M') / 2 for z = 1..N',
/// natural log, GM/AM over the residual eigenvalues z+1..N'. The residual is
/// empty at z = N' and only the penalty remains. Ties go to the smallest z.
inline MdlCurve mdl(const EigenSpectrum& spectrum, std::size_t m_prime) {
    const auto& raw = spectrum.values;
    const std::size_t n = raw.size();
    if (n == 0) throw ContractError("mdl: empty spectrum");
    if (m_prime < 1) throw ContractError("mdl: M' must be >= 1");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (raw[i] < raw[i + 1]) throw ContractError("mdl: spectrum is not sorted descending");

    const double floor = std::max(kEigFloorTol, kRelativeEigFloor * raw.front());
    std::vector<double> lam(raw.size());
    std::transform(raw.begin(), raw.end(), lam.begin(), [&](double v) { return std::max(v, floor); });

    const double log_m = std::log(static_cast<double>(m_prime));
    const double mp = static_cast<double>(m_prime);

    MdlCurve curve;
    curve.n_prime = n;
    curve.m_prime = m_prime;
    curve.values.resize(n);
    for (std::size_t z = 1; z <= n; ++z) {
        double likelihood = 0.0;
        if (z < n) {
            double sum = 0.0;
            for (std::size_t i = z; i < n; ++i) sum += lam[i];
            const double am = sum / static_cast<double>(n - z);
            // -(n-z) log(GM/AM) = sum_i log(AM / lambda_i); exact 0 on a flat residual
            for (std::size_t i = z; i < n; ++i) likelihood += std::log(am / lam[i]);
            likelihood *= mp;
        }
        const double zd = static_cast<double>(z);
        const double penalty = 0.5 * zd * (2.0 * static_cast<double>(n) - zd) * log_m;
        curve.values[z - 1] = likelihood + penalty;
    }
    const auto best = std::min_element(curve.values.begin(), curve.values.end());
    curve.zeta_hat = static_cast<std::size_t>(best - curve.values.begin()) + 1;
    curve.min_value = *best;
    return curve;
}

struct EstimateReport {
    std::size_t n_hat = 0;
    std::size_t chosen_n_prime = 0;
    std::vector<MdlCurve> per_candidate;  // ordered by N'
    // True when no candidate reached metric 0, i.e. the true N is likely
    // outside the search range.
    bool ambiguous = false;
    std::map<std::size_t, EigenSpectrum> eigen_spectra;  // diagnostics only

    const MdlCurve* candidate(std::size_t n_prime) const {
        for (const auto& c : per_candidate)
            if (c.n_prime == n_prime) return &c;
        return nullptr;
    }
};

inline std::size_t breakpoint_metric(std::size_t zeta_hat, std::size_t n_prime, const EstimatorConfig& cfg) {
    const auto expected = static_cast<long long>(n_prime + cfg.num_taps) - 1 - static_cast<long long>(cfg.cp_len);
    const auto diff = static_cast<long long>(zeta_hat) - expected;
    return static_cast<std::size_t>(diff < 0 ? -diff : diff);
}

/// Check that every candidate N' in range has M' >= N'.
inline void require_enough_samples(std::size_t len, const EstimatorConfig& cfg) {
    const std::size_t worst = cfg.max_candidate();
    if (len / worst < worst)
        throw InsufficientDataError("estimate_n: candidate N'=" + std::to_string(worst) + " (N=" +
                                        std::to_string(cfg.n_max) + ") needs at least " +
                                        std::to_string(worst * worst) + " samples, got " +
                                        std::to_string(len),
                                    worst * worst);
}

inline EstimateReport estimate_n(std::span<const cplx> r, const EstimatorConfig& cfg) {
    validate(cfg);
    require_enough_samples(r.size(), cfg);

    EstimateReport report;
    report.per_candidate.reserve(cfg.n_max - cfg.n_min + 1);
    std::size_t best_metric = std::numeric_limits<std::size_t>::max();
    for (std::size_t np = cfg.min_candidate(); np <= cfg.max_candidate(); ++np) {
        const auto seg = segment(r, np);
        auto spectrum = hermitian_eigenvalues(covariance(seg));
        MdlCurve curve = mdl(spectrum, seg.m_prime);
        curve.metric = breakpoint_metric(curve.zeta_hat, np, cfg);
        if (curve.metric < best_metric) {
            best_metric = curve.metric;
            report.chosen_n_prime = np;
        }
        if (cfg.keep_diagnostics) {
            report.eigen_spectra.emplace(np, std::move(spectrum));
        } else {
            curve.values.clear();
            curve.values.shrink_to_fit();
        }
        report.per_candidate.push_back(std::move(curve));
    }
    report.n_hat = report.chosen_n_prime - cfg.cp_len;
    report.ambiguous = best_metric != 0;
    return report;
}

inline EstimateReport estimate_n(const IqSequence& r, const EstimatorConfig& cfg) {
    return estimate_n(std::span<const cplx>(r.samples), cfg);
}

/// One CSV record per candidate, then the decision as comment lines.
inline void write_report(std::ostream& os, const EstimateReport& report) {
    os << "n_prime,m_prime,zeta_hat,metric,min_mdl\n";
    for (const auto& c : report.per_candidate) {
        os << c.n_prime << ',' << c.m_prime << ',' << c.zeta_hat << ',' << c.metric << ','
           << c.min_value << '\n';
    }
    os << "# n_hat=" << report.n_hat << "\n# chosen_n_prime=" << report.chosen_n_prime
       << "\n# ambiguous=" << (report.ambiguous ? "true" : "false") << '\n';
}

/// Row pairs (i, i+N), 1-based, i = L..P, that agree across columns 2..M'
/// of the segmentation at N' = N+P. Column 1 has no predecessor symbol.
inline std::vector<std::pair<std::size_t, std::size_t>>
duplicate_row_pairs(const IqSequence& r, std::size_t n, std::size_t p, std::size_t l) {
    if (l < 1) throw ConfigError("duplicate_row_pairs: L must be >= 1");
    if (n < 1 || p < 1) throw ConfigError("duplicate_row_pairs: N and P must be >= 1");
    const auto seg = segment(r, n + p);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    const auto cols = seg.data.cols();
    for (std::size_t i = l; i <= p; ++i) {
        bool same = true;
        for (Eigen::Index col = 1; col < cols && same; ++col) {
            const auto a = seg.data(static_cast<Eigen::Index>(i - 1), col);
            const auto b = seg.data(static_cast<Eigen::Index>(i - 1 + n), col);
            same = std::abs(a - b) <= kDuplicateRowTol;
        }
        if (same) pairs.emplace_back(i, i + n);
    }
    return pairs;
}

/// True iff all P-L+1 CP-induced duplicate pairs are present.
inline bool duplicate_row_check(const IqSequence& r, std::size_t n, std::size_t p, std::size_t l) {
    if (l > p) return false;
    return duplicate_row_pairs(r, n, p, l).size() == p - l + 1;
}

} // namespace cpofdm

#endif // CPOFDM_ESTIMATOR_HPP
