#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cpofdm/numerics.hpp"
#include "oracles.hpp"

using namespace cpofdm;
using Catch::Approx;

namespace {

ComplexMatrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
    std::normal_distribution<double> g;
    ComplexMatrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = {g(rng), g(rng)};
    return m;
}

ComplexMatrix random_hermitian(std::mt19937_64& rng, Eigen::Index n) {
    const ComplexMatrix a = random_matrix(rng, n, n);
    return (a + a.adjoint()) / 2.0;
}

} // namespace

TEST_CASE("dft_matrix small cases", "[numerics]") {
    const auto q1 = dft_matrix(1);
    REQUIRE(q1.rows() == 1);
    CHECK(q1(0, 0) == cplx(1.0, 0.0));

    const auto q2 = dft_matrix(2);
    CHECK(std::abs(q2(0, 0) - cplx(1, 0)) < 1e-15);
    CHECK(std::abs(q2(0, 1) - cplx(1, 0)) < 1e-15);
    CHECK(std::abs(q2(1, 0) - cplx(1, 0)) < 1e-15);
    CHECK(std::abs(q2(1, 1) - cplx(-1, 0)) < 1e-15);

    // 1-based (2,2) of Q_4: exp(-j*pi/2) = -j
    CHECK(std::abs(dft_matrix(4)(1, 1) - cplx(0, -1)) < 1e-15);

    CHECK_THROWS_AS(dft_matrix(0), DimensionError);
}

TEST_CASE("DFT unitarity for n = 1..64", "[numerics][property]") {
    for (std::size_t n = 1; n <= 64; ++n) {
        const auto q = dft_matrix(n);
        const ComplexMatrix g = (q * q.adjoint()) / static_cast<double>(n);
        const ComplexMatrix id = ComplexMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        INFO("n = " << n);
        CHECK((g - id).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("idft_apply", "[numerics]") {
    SECTION("N=1 is the identity") {
        ComplexMatrix x(1, 3);
        x << cplx(1, 2), cplx(-3, 0.5), cplx(0, 0);
        CHECK((idft_apply(x) - x).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("[1,1] -> [sqrt2, 0]") {
        ComplexMatrix x(2, 1);
        x << 1.0, 1.0;
        const auto t = idft_apply(x);
        CHECK(std::abs(t(0, 0) - cplx(std::sqrt(2.0), 0)) < 1e-14);
        CHECK(std::abs(t(1, 0)) < 1e-14);
    }
    SECTION("zeros stay zero") {
        CHECK(idft_apply(ComplexMatrix::Zero(8, 4)).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("DFT then IDFT round-trips") {
        std::mt19937_64 rng(11);
        for (Eigen::Index n : {2, 5, 16, 33}) {
            const auto x = random_matrix(rng, n, 7);
            const auto back = idft_apply(dft_apply(x));
            CHECK((back - x).norm() / x.norm() < 1e-10);
        }
    }
    CHECK_THROWS_AS(idft_apply(ComplexMatrix(0, 3)), DimensionError);
}

TEST_CASE("hermitian_eigenvalues examples", "[numerics]") {
    const auto id = hermitian_eigenvalues(ComplexMatrix::Identity(3, 3));
    CHECK(id.values == std::vector<double>{1.0, 1.0, 1.0});

    ComplexMatrix d = ComplexMatrix::Zero(3, 3);
    d(0, 0) = 5;
    d(1, 1) = 2;
    d(2, 2) = 9;
    const auto dv = hermitian_eigenvalues(d).values;
    REQUIRE(dv.size() == 3);
    CHECK(dv[0] == Approx(9));
    CHECK(dv[1] == Approx(5));
    CHECK(dv[2] == Approx(2));

    // v v^H with v = [1, j]: trace 2, det 0
    Eigen::VectorXcd v(2);
    v << cplx(1, 0), cplx(0, 1);
    const auto rv = hermitian_eigenvalues(v * v.adjoint()).values;
    CHECK(rv[0] == Approx(2.0).margin(1e-14));
    CHECK(std::abs(rv[1]) < 1e-14);
}

TEST_CASE("hermitian_eigenvalues errors", "[numerics]") {
    CHECK_THROWS_AS(hermitian_eigenvalues(ComplexMatrix::Zero(2, 3)), DimensionError);
    ComplexMatrix m = ComplexMatrix::Identity(2, 2);
    m(0, 1) = cplx(0.5, 0);
    CHECK_THROWS_AS(hermitian_eigenvalues(m), SymmetryError);
    // a skew perturbation below 1e-8 * max|entry| is accepted
    m(1, 0) = cplx(0.5, 1e-10);
    CHECK_NOTHROW(hermitian_eigenvalues(m));
}

TEST_CASE("eigenvalues agree with an independent Jacobi solver", "[numerics][oracle]") {
    std::mt19937_64 rng(5);
    for (Eigen::Index n : {1, 2, 3, 8, 17, 40}) {
        const auto a = random_hermitian(rng, n);
        const auto lib = hermitian_eigenvalues(a).values;
        const auto ref = oracle::jacobi_eigenvalues(a);
        REQUIRE(lib.size() == ref.size());
        for (std::size_t i = 0; i < lib.size(); ++i) CHECK(lib[i] == Approx(ref[i]).margin(1e-9));
    }
}

TEST_CASE("eigenvalue sum equals trace up to order 128", "[numerics][property]") {
    std::mt19937_64 rng(7);
    for (Eigen::Index n : {4, 16, 64, 128}) {
        const auto a = random_hermitian(rng, n);
        const auto ev = hermitian_eigenvalues(a).values;
        const double tr = a.trace().real();
        double sum = 0.0;
        for (double x : ev) sum += x;
        CHECK(std::abs(sum - tr) <= 1e-8 * std::max(1.0, std::abs(tr)));
        CHECK(std::is_sorted(ev.begin(), ev.end(), std::greater<>()));
    }
}

TEST_CASE("eigenvalues scale exactly with a positive factor", "[numerics][property]") {
    std::mt19937_64 rng(8);
    const auto a = random_hermitian(rng, 20);
    const auto base = hermitian_eigenvalues(a).values;
    for (double c : {1e-3, 0.5, 7.3, 1e4}) {
        const auto scaled = hermitian_eigenvalues(c * a).values;
        for (std::size_t i = 0; i < base.size(); ++i)
            CHECK(std::abs(scaled[i] - c * base[i]) <= 1e-10 * std::abs(c) * std::abs(base.front()));
    }
}

TEST_CASE("PSD inputs give nonnegative spectra up to roundoff", "[numerics]") {
    std::mt19937_64 rng(9);
    const auto r = random_matrix(rng, 12, 5);  // rank 5
    const auto ev = hermitian_eigenvalues(r * r.adjoint()).values;
    for (double x : ev) CHECK(x > -1e-10 * ev.front());
}

TEST_CASE("numerical_rank", "[numerics]") {
    CHECK(numerical_rank(ComplexMatrix::Zero(4, 4)) == 0);
    CHECK(numerical_rank(ComplexMatrix::Identity(5, 5)) == 5);
    CHECK_THROWS_AS(numerical_rank(ComplexMatrix(0, 0)), DimensionError);
    CHECK_THROWS_AS(numerical_rank(ComplexMatrix::Identity(2, 2), 1.5), ConfigError);

    std::mt19937_64 rng(3);
    const ComplexMatrix low = random_matrix(rng, 9, 3) * random_matrix(rng, 3, 14);
    CHECK(numerical_rank(low) == 3);
    CHECK(oracle::gaussian_rank(low) == 3);
}

TEST_CASE("numerical_rank is invariant to nonzero complex scaling", "[numerics][property]") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index k = 1 + trial % 6;
        const ComplexMatrix m = random_matrix(rng, 8, k) * random_matrix(rng, k, 11);
        const auto base = numerical_rank(m);
        for (cplx c : {cplx(1e-6, 0), cplx(0, 3), cplx(-2.5, 1.5), cplx(1e6, -1e6)})
            CHECK(numerical_rank(c * m) == base);
        CHECK(base == static_cast<std::size_t>(k));
    }
}
