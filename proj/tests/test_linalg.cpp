#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "esr/linalg.hpp"
#include "test_support.hpp"

using namespace esr;

TEST_CASE("tensor product of identities") {
    const CMatrix id4 = tensor_product(CMatrix::identity(2), CMatrix::identity(2));
    CHECK(test::matrix_close(id4, CMatrix::identity(4), 0.0));
}

TEST_CASE("tensor product of diagonal projectors") {
    CMatrix d1(2, 2), d2(2, 2);
    d1(0, 0) = 1.0;
    d2(1, 1) = 1.0;
    const CMatrix t = tensor_product(d1, d2);
    CMatrix expected(4, 4);
    expected(1, 1) = 1.0;
    CHECK(test::matrix_close(t, expected, 0.0));
}

TEST_CASE("sigma_z x sigma_z has the singlet as a -1 eigenvector") {
    CMatrix sz(2, 2);
    sz(0, 0) = 1.0;
    sz(1, 1) = -1.0;
    const CMatrix zz = tensor_product(sz, sz);
    CVector singlet(4);
    singlet[1] = 1.0 / std::sqrt(2.0);
    singlet[2] = -1.0 / std::sqrt(2.0);
    const CVector image = zz * singlet;
    CHECK((image - cplx(-1.0) * singlet).norm() < 1e-14);
}

TEST_CASE("tensor product matches the raw oracle on random matrices") {
    auto rng = test::make_rng(11);
    const CMatrix a = test::random_hermitian(rng, 3);
    const CMatrix b = test::random_hermitian(rng, 2);
    const auto expected = test::kron_oracle(
        std::vector<cplx>(&a(0, 0), &a(0, 0) + 9), 3, 3,
        std::vector<cplx>(&b(0, 0), &b(0, 0) + 4), 2, 2);
    const CMatrix t = tensor_product(a, b);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) CHECK(std::abs(t(i, j) - expected[i * 6 + j]) == 0.0);
}

TEST_CASE("tensor product is associative on integer matrices") {
    CMatrix a(2, 2, {1.0, 2.0, 3.0, 4.0});
    CMatrix b(2, 2, {0.0, 1.0, 1.0, 0.0});
    CMatrix c(2, 2, {2.0, 0.0, 0.0, 5.0});
    const CMatrix left = tensor_product(tensor_product(a, b), c);
    const CMatrix right = tensor_product(a, tensor_product(b, c));
    CHECK(test::matrix_close(left, right, 0.0));
}

TEST_CASE("partial trace of a product state factorizes") {
    auto rng = test::make_rng(12);
    const CMatrix rho_a = test::random_psd_unit_trace(rng, 2);
    const CMatrix rho_b = test::random_psd_unit_trace(rng, 3);
    const CMatrix joint = tensor_product(rho_a, rho_b);
    CHECK(test::matrix_close(partial_trace(joint, 2, 3, 0), rho_a, 1e-14));
    CHECK(test::matrix_close(partial_trace(joint, 2, 3, 1), rho_b, 1e-14));
}

TEST_CASE("partial trace of the singlet is maximally mixed") {
    CVector singlet(4);
    singlet[1] = 1.0 / std::sqrt(2.0);
    singlet[2] = -1.0 / std::sqrt(2.0);
    const CMatrix reduced = partial_trace(outer(singlet, singlet), 2, 2, 1);
    CHECK(test::matrix_close(reduced, cplx(0.5) * CMatrix::identity(2), 1e-15));
}

TEST_CASE("partial trace of I4/4") {
    const CMatrix reduced = partial_trace(cplx(0.25) * CMatrix::identity(4), 2, 2, 1);
    CHECK(test::matrix_close(reduced, cplx(0.5) * CMatrix::identity(2), 1e-15));
}

TEST_CASE("partial trace preserves the trace of random PSD matrices") {
    auto rng = test::make_rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const CMatrix rho = test::random_psd_unit_trace(rng, 6);
        const CMatrix reduced = partial_trace(rho, 2, 3, trial % 2);
        CHECK(std::abs(reduced.trace().real() - rho.trace().real()) < 1e-12);
    }
}

TEST_CASE("partial trace rejects mismatched dimensions") {
    CHECK_THROWS_AS(partial_trace(CMatrix::identity(5), 2, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(CMatrix::identity(6), 2, 3, 2), std::invalid_argument);
}

TEST_CASE("spectral decomposition of diag(1,1,2)") {
    CMatrix d(3, 3);
    d(0, 0) = 1.0;
    d(1, 1) = 1.0;
    d(2, 2) = 2.0;
    const SpectralDecomposition sd = spectral_decompose(d, 1e-9);
    REQUIRE(sd.eigenvalues.size() == 2);
    CHECK(test::close(sd.eigenvalues[0], 1.0, 1e-12));
    CHECK(test::close(sd.eigenvalues[1], 2.0, 1e-12));
    CHECK(test::close(sd.projectors[0].trace().real(), 2.0, 1e-12));
    CHECK(test::close(sd.projectors[1].trace().real(), 1.0, 1e-12));
}

TEST_CASE("spectral decomposition of sigma_x") {
    CMatrix sx(2, 2);
    sx(0, 1) = 1.0;
    sx(1, 0) = 1.0;
    const SpectralDecomposition sd = spectral_decompose(sx, 1e-9);
    REQUIRE(sd.eigenvalues.size() == 2);
    CHECK(test::close(sd.eigenvalues[0], -1.0, 1e-12));
    CHECK(test::close(sd.eigenvalues[1], 1.0, 1e-12));
    // |+-> = (1, +-1)/sqrt(2)
    CVector plus(2), minus(2);
    plus[0] = plus[1] = 1.0 / std::sqrt(2.0);
    minus[0] = 1.0 / std::sqrt(2.0);
    minus[1] = -1.0 / std::sqrt(2.0);
    CHECK(test::matrix_close(sd.projectors[0], outer(minus, minus), 1e-12));
    CHECK(test::matrix_close(sd.projectors[1], outer(plus, plus), 1e-12));
}

TEST_CASE("spectral decomposition of the identity merges everything") {
    const SpectralDecomposition sd = spectral_decompose(CMatrix::identity(4), 1e-9);
    REQUIRE(sd.eigenvalues.size() == 1);
    CHECK(test::close(sd.eigenvalues[0], 1.0, 1e-12));
    CHECK(test::matrix_close(sd.projectors[0], CMatrix::identity(4), 1e-12));
}

TEST_CASE("spectral decomposition reassembles random Hermitian matrices") {
    auto rng = test::make_rng(14);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t dim = 2 + trial % 7;
        const CMatrix h = test::random_hermitian(rng, dim);
        const SpectralDecomposition sd = spectral_decompose(h, 1e-9);
        CMatrix rebuilt = CMatrix::zero(dim, dim);
        CMatrix sum = CMatrix::zero(dim, dim);
        for (std::size_t i = 0; i < sd.eigenvalues.size(); ++i) {
            rebuilt += cplx(sd.eigenvalues[i]) * sd.projectors[i];
            sum += sd.projectors[i];
            CHECK((sd.projectors[i] * sd.projectors[i] - sd.projectors[i]).max_abs() < 1e-10);
            for (std::size_t j = i + 1; j < sd.eigenvalues.size(); ++j) {
                CHECK((sd.projectors[i] * sd.projectors[j]).max_abs() < 1e-10);
                CHECK(sd.eigenvalues[i] < sd.eigenvalues[j]);
            }
        }
        CHECK(test::matrix_close(rebuilt, h, 1e-10));
        CHECK(test::matrix_close(sum, CMatrix::identity(dim), 1e-10));
    }
}

TEST_CASE("spectral decomposition rejects non-Hermitian input") {
    CMatrix m(2, 2, {1.0, 2.0, 3.0, 4.0});
    CHECK_THROWS_AS(spectral_decompose(m, 1e-9), std::invalid_argument);
}

TEST_CASE("is_psd basics") {
    CHECK(is_psd(CMatrix::identity(2), 1e-12));
    CMatrix d(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = -0.1;
    CHECK_FALSE(is_psd(d, 1e-12));
    auto rng = test::make_rng(15);
    const CVector v = test::random_unit_vector(rng, 3);
    CHECK(is_psd(cplx(0.8) * outer(v, v), 1e-12));
    CMatrix nh(2, 2, {1.0, 2.0, 3.0, 4.0});
    CHECK_THROWS_AS(is_psd(nh, 1e-12), std::invalid_argument);
}

TEST_CASE("vector and matrix shape mismatches are rejected") {
    CHECK_THROWS_AS(CVector(2) + CVector(3), std::invalid_argument);
    CHECK_THROWS_AS(CMatrix(2, 2) * CMatrix(3, 3), std::invalid_argument);
    CHECK_THROWS_AS(CMatrix(2, 3).trace(), std::invalid_argument);
    CHECK_THROWS_AS(CVector(3).normalized(), std::domain_error);
    CHECK_THROWS_AS(CMatrix(2, 2, {1.0, 2.0, 3.0}), std::invalid_argument);
}
