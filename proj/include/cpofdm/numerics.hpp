#ifndef CPOFDM_NUMERICS_HPP
#define CPOFDM_NUMERICS_HPP

// Dense complex linear algebra used throughout: DFT matrices, the unitary
// IDFT, Hermitian spectra and singular-value rank. Storage and the heavy
// lifting are Eigen's; this header fixes the conventions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpofdm/error.hpp"

namespace cpofdm {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kEigFloorTol = 1e-30;
inline constexpr double kDefaultRankTol = 1e-9;

/// Descending real eigenvalues of a Hermitian matrix.
struct EigenSpectrum {
    std::vector<double> values;

    std::size_t dimension() const noexcept { return values.size(); }
};

/// Tolerance used to decide Hermitian symmetry: 1e-8 * max|entry|.
inline double hermitian_tol(const ComplexMatrix& m) {
    return 1e-8 * (m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff());
}

inline bool is_hermitian(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) return false;
    const double tol = hermitian_tol(m);
    for (Eigen::Index q = 0; q < m.cols(); ++q)
        for (Eigen::Index p = 0; p <= q; ++p)
            if (std::abs(m(p, q) - std::conj(m(q, p))) > tol) return false;
    return true;
}

/// n x n DFT matrix, Q(p,q) = exp(-j 2 pi p q / n) with 0-based exponents.
inline ComplexMatrix dft_matrix(std::size_t n) {
    if (n == 0) throw DimensionError("dft_matrix: n must be >= 1");
    ComplexMatrix q(n, n);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t k = 0; k < n; ++k) {
            // reduce the exponent mod n first so large p*k keeps full precision
            const auto e = static_cast<double>((p * k) % n);
            q(p, k) = std::polar(1.0, -2.0 * std::numbers::pi * e / static_cast<double>(n));
        }
    }
    return q;
}

/// Unitary inverse DFT applied column-wise: (1/sqrt(N)) Q^H X.
inline ComplexMatrix idft_apply(const ComplexMatrix& freq_block) {
    const auto n = static_cast<std::size_t>(freq_block.rows());
    if (n == 0) throw DimensionError("idft_apply: block has no rows");
    const ComplexMatrix q = dft_matrix(n);
    return (q.adjoint() * freq_block) / std::sqrt(static_cast<double>(n));
}

/// Unitary forward DFT, the inverse of idft_apply.
inline ComplexMatrix dft_apply(const ComplexMatrix& time_block) {
    const auto n = static_cast<std::size_t>(time_block.rows());
    if (n == 0) throw DimensionError("dft_apply: block has no rows");
    return (dft_matrix(n) * time_block) / std::sqrt(static_cast<double>(n));
}

inline EigenSpectrum hermitian_eigenvalues(const ComplexMatrix& m) {
    if (m.rows() != m.cols())
        throw DimensionError("hermitian_eigenvalues: matrix is " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + ", not square");
    if (!is_hermitian(m))
        throw SymmetryError("hermitian_eigenvalues: matrix is not Hermitian within tolerance");
    EigenSpectrum out;
    if (m.size() == 0) return out;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw Error("hermitian_eigenvalues: eigen solver did not converge");
    const auto& ev = solver.eigenvalues();  // ascending
    out.values.assign(ev.data(), ev.data() + ev.size());
    std::reverse(out.values.begin(), out.values.end());
    return out;
}

/// Singular values, descending.
inline std::vector<double> singular_values(const ComplexMatrix& m) {
    if (m.size() == 0) throw DimensionError("singular_values: empty matrix");
    Eigen::BDCSVD<ComplexMatrix> svd(m);
    const auto& sv = svd.singularValues();
    return {sv.data(), sv.data() + sv.size()};
}

/// Number of singular values above rel_tol * sigma_max; 0 for the zero matrix.
inline std::size_t numerical_rank(const ComplexMatrix& m, double rel_tol = kDefaultRankTol) {
    if (m.size() == 0) throw DimensionError("numerical_rank: empty matrix");
    if (!(rel_tol > 0.0 && rel_tol < 1.0))
        throw ConfigError("numerical_rank: rel_tol must lie in (0,1)");
    const auto sv = singular_values(m);
    const double smax = sv.front();
    if (smax == 0.0) return 0;
    return static_cast<std::size_t>(
        std::count_if(sv.begin(), sv.end(), [&](double s) { return s > rel_tol * smax; }));
}

} // namespace cpofdm

#endif // CPOFDM_NUMERICS_HPP
