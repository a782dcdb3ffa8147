#include "doctest.h"

#include <cmath>
#include <random>

#include "cvsep/core.hpp"
#include "cvsep/errors.hpp"

using namespace cvsep;

namespace {

Matrix random_physical(std::mt19937& rng, int modes) {
    // thermal diagonal plus a random symplectic-free perturbation that stays
    // above iJ: gamma = n' I + small symmetric part, n' >= 2
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    Matrix g = Matrix::Identity(2 * modes, 2 * modes) * 2.0;
    for (int i = 0; i < 2 * modes; ++i) {
        for (int j = i + 1; j < 2 * modes; ++j) {
            g(i, j) = g(j, i) = u(rng);
        }
    }
    return g;
}

Matrix swap_modes(const Matrix& g, int a, int b) {
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(g.rows());
    perm.setIdentity();
    for (int q = 0; q < 2; ++q) {
        std::swap(perm.indices()[2 * a + q], perm.indices()[2 * b + q]);
    }
    return perm * g * perm.transpose();
}

}  // namespace

TEST_CASE("symplectic form blocks") {
    const Matrix j1 = symplectic_form(1).matrix();
    CHECK(j1(0, 0) == 0.0);
    CHECK(j1(0, 1) == -1.0);
    CHECK(j1(1, 0) == 1.0);
    CHECK(j1(1, 1) == 0.0);
    CHECK((j1 * j1 + Matrix::Identity(2, 2)).norm() == 0.0);

    const Matrix j3 = symplectic_form(3).matrix();
    CHECK(j3.rows() == 6);
    CHECK((j3 + j3.transpose()).norm() == 0.0);
    CHECK(Eigen::FullPivLU<Matrix>(j3).rank() == 6);
    CHECK((j3 * j3 + Matrix::Identity(6, 6)).norm() == 0.0);

    CHECK_THROWS_AS(symplectic_form(0), InvalidArgument);
}

TEST_CASE("two-mode transposed form is J (+) -J") {
    const Matrix jt = transposed_two_mode_form();
    const Matrix j1 = symplectic_form(1).matrix();
    CHECK(jt.block(0, 0, 2, 2) == j1);
    CHECK(jt.block(2, 2, 2, 2) == -j1);
    CHECK(jt.block(0, 2, 2, 2).norm() == 0.0);
}

TEST_CASE("covariance matrix construction") {
    Matrix m = Matrix::Identity(2, 2);
    m(0, 1) = 0.5;
    m(1, 0) = 0.5 + 1e-13;
    const CovarianceMatrix g(m);
    CHECK(g(0, 1) == g(1, 0));

    m(1, 0) = 0.6;
    CHECK_THROWS_AS(CovarianceMatrix{m}, InvalidArgument);
    CHECK_THROWS_AS(CovarianceMatrix{Matrix::Identity(3, 3)}, InvalidArgument);
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 0) = NAN;
    CHECK_THROWS_AS(CovarianceMatrix{bad}, InvalidArgument);
}

TEST_CASE("is_valid_cm examples") {
    CHECK(is_valid_cm(CovarianceMatrix::identity(3)));
    CHECK_FALSE(is_valid_cm(CovarianceMatrix(0.5 * Matrix::Identity(6, 6))));
    CHECK(is_valid_cm(CovarianceMatrix(3.0 * Matrix::Identity(6, 6))));
    const CMatrix h = with_symplectic(0.5 * Matrix::Identity(6, 6), symplectic_form(3).matrix());
    CHECK(min_eigenvalue_hermitian(h) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("partial transposition") {
    const PartialTransposition pt(1, 3);
    CHECK(pt.signs()(1) == -1.0);
    CHECK(pt.signs().sum() == 4.0);
    CHECK((pt.matrix() * pt.matrix() - Matrix::Identity(6, 6)).norm() == 0.0);
    CHECK_THROWS_AS(PartialTransposition(0, 3), InvalidArgument);
    CHECK_THROWS_AS(PartialTransposition(4, 3), InvalidArgument);

    for (int j = 1; j <= 3; ++j) {
        CHECK(partial_transpose(CovarianceMatrix::identity(3), j).matrix() == Matrix::Identity(6, 6));
        Vector diag(6);
        diag << 1, 2, 3, 4, 5, 6;
        const Matrix dg = diag.asDiagonal();
        CHECK(partial_transpose(CovarianceMatrix(dg), j).matrix() == dg);
    }
}

TEST_CASE("partial transpose of a symmetric-family pattern negates the p1 couplings") {
    const double a = 2.0, b = 1.5, c = 0.4, d = -0.3;
    Matrix g = Matrix::Zero(6, 6);
    for (int i = 0; i < 3; ++i) {
        g(2 * i, 2 * i) = a;
        g(2 * i + 1, 2 * i + 1) = b;
        for (int k = 0; k < 3; ++k) {
            if (k != i) {
                g(2 * i, 2 * k) = c;
                g(2 * i + 1, 2 * k + 1) = d;
            }
        }
    }
    Matrix expected = g;
    expected(1, 3) = expected(3, 1) = -d;
    expected(1, 5) = expected(5, 1) = -d;
    CHECK(partial_transpose(CovarianceMatrix(g), 1).matrix() == expected);
}

TEST_CASE("partial transpose is an involution preserving the determinant") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const CovarianceMatrix g(random_physical(rng, 3));
        REQUIRE(is_valid_cm(g));
        for (int j = 1; j <= 3; ++j) {
            const CovarianceMatrix once = partial_transpose(g, j);
            CHECK(partial_transpose(once, j).matrix() == g.matrix());
            CHECK(once.matrix().determinant() == doctest::Approx(g.matrix().determinant()).epsilon(1e-12));
        }
    }
}

TEST_CASE("validity is invariant under mode relabeling") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> scale(0.3, 1.5);
    for (int trial = 0; trial < 30; ++trial) {
        const Matrix g = random_physical(rng, 3) * scale(rng);
        const bool base = is_valid_cm(CovarianceMatrix(g));
        CHECK(is_valid_cm(CovarianceMatrix(swap_modes(g, 0, 1))) == base);
        CHECK(is_valid_cm(CovarianceMatrix(swap_modes(g, 1, 2))) == base);
        CHECK(is_valid_cm(CovarianceMatrix(swap_modes(g, 0, 2))) == base);
    }
}

TEST_CASE("min_eigenvalue_hermitian examples") {
    const CMatrix h = with_symplectic(Matrix::Identity(2, 2), symplectic_form(1).matrix());
    CHECK(std::abs(min_eigenvalue_hermitian(h)) < 1e-15);
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 5.0;
    CHECK(min_eigenvalue_hermitian(d) == doctest::Approx(3.0));
    CMatrix k(2, 2);
    k << 2.0, Complex(0, 1), Complex(0, -1), 2.0;
    CHECK(min_eigenvalue_hermitian(k) == doctest::Approx(1.0).epsilon(1e-14));

    CMatrix nh = k;
    nh(0, 1) = Complex(0, 2);
    CHECK_THROWS_AS(min_eigenvalue_hermitian(nh), InvalidArgument);
}

TEST_CASE("2x2 minimum eigenvalue matches the characteristic polynomial") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double p = u(rng), q = u(rng);
        const Complex r(u(rng), u(rng));
        CMatrix h(2, 2);
        h << p, r, std::conj(r), q;
        const double root = 0.5 * (p + q) - std::sqrt(0.25 * (p - q) * (p - q) + std::norm(r));
        CHECK(std::abs(min_eigenvalue_hermitian(h) - root) < 1e-12);
    }
}
