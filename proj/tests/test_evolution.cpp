#include "doctest.h"

#include <cmath>
#include <random>

#include "cvsep/errors.hpp"
#include "cvsep/evolution.hpp"
#include "cvsep/matrix_functions.hpp"
#include "cvsep/oracles.hpp"

using namespace cvsep;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

CMatrix random_symmetric(std::mt19937& rng, int s, bool complex_entries) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CMatrix e(s, s);
    for (int i = 0; i < s; ++i) {
        for (int j = i; j < s; ++j) {
            e(i, j) = e(j, i) = Complex(u(rng), complex_entries ? u(rng) : 0.0);
        }
    }
    return e;
}

// Real-symmetric 3x3 helper for the symmetric family with Gamma = 2 (so
// eta = eta' and t = t').
AmplifierMatrix family_eta(double zeta0, double zeta1) {
    const double eta0 = (zeta0 + 2.0 * zeta1) / 3.0;
    const double eta1 = (zeta0 - zeta1) / 3.0;
    return AmplifierMatrix::symmetric(eta0, eta1);
}

}  // namespace

TEST_CASE("amplifier matrix validation") {
    CMatrix e(2, 2);
    e << 0.1, 0.2, 0.3, 0.1;
    CHECK_THROWS_AS(AmplifierMatrix{e}, InvalidArgument);
    e(1, 0) = 0.2;
    CHECK(AmplifierMatrix(e).is_real());
    e(0, 1) = e(1, 0) = Complex(0.2, 0.1);
    CHECK_FALSE(AmplifierMatrix(e).is_real());
    const AmplifierMatrix s = AmplifierMatrix::symmetric(0.3, 0.1);
    CHECK(s.modes() == 3);
    CHECK(s.matrix()(0, 0).real() == 0.3);
    CHECK(s.matrix()(1, 2).real() == 0.1);
}

TEST_CASE("equal-damping propagator examples") {
    const auto zero = propagator_equal_damping(AmplifierMatrix(Matrix(Matrix::Zero(3, 3))), 1.0, 2.0);
    CHECK(max_abs(zero.m - std::exp(-1.0) * CMatrix::Identity(3, 3)) < 1e-15);
    CHECK(max_abs(zero.n) == 0.0);

    Matrix one(1, 1);
    one << 0.3;
    const auto p = propagator_equal_damping(AmplifierMatrix(one), 1.0, 2.0);
    CHECK(p.m(0, 0).real() == doctest::Approx(std::exp(-1.0) * std::cosh(0.6)).epsilon(1e-14));
    CHECK(p.n(0, 0).real() == doctest::Approx(-std::exp(-1.0) * std::sinh(0.6)).epsilon(1e-14));
    CHECK(std::abs(p.m(0, 0).real() - 0.436113) < 1e-5);
    CHECK(p.n(0, 0).real() == doctest::Approx(-0.234212).epsilon(1e-6));

    // eigenvalues of 0.2 S are 0.4 (symmetric mode) and -0.2 (twice)
    const auto q = propagator_equal_damping(AmplifierMatrix::symmetric(0.0, 0.2), 1.0, 1.0);
    const double damp = std::exp(-0.5);
    const double diag = damp * (std::cosh(0.4) + 2.0 * std::cosh(0.2)) / 3.0;
    const double off = damp * (std::cosh(0.4) - std::cosh(0.2)) / 3.0;
    CHECK(q.m(0, 0).real() == doctest::Approx(diag).epsilon(1e-13));
    CHECK(q.m(0, 1).real() == doctest::Approx(off).epsilon(1e-12));
    CHECK(diag == doctest::Approx(0.631035).epsilon(1e-6));
    CHECK(off == doctest::Approx(0.012334).epsilon(1e-4));
    const auto rk = oracles::rk4_propagator(AmplifierMatrix::symmetric(0.0, 0.2), BathParams::uniform(3, 1.0, 0.0), 1.0);
    CHECK(max_abs(rk.m - q.m) < 1e-10);
    CHECK(max_abs(rk.n - q.n) < 1e-10);

    CHECK_THROWS_AS(propagator_equal_damping(AmplifierMatrix(one), 1.0, -1.0), InvalidArgument);
}

TEST_CASE("matrix functions") {
    CMatrix a(2, 2);
    a << 0.0, -1.0, 1.0, 0.0;
    const CMatrix e = matrix_exponential(2.0 * a);
    CHECK(e(0, 0).real() == doctest::Approx(std::cos(2.0)).epsilon(1e-13));
    CHECK(e(1, 0).real() == doctest::Approx(std::sin(2.0)).epsilon(1e-13));
    const CMatrix big = matrix_exponential(CMatrix::Identity(3, 3) * 12.0);
    CHECK(big(0, 0).real() == doctest::Approx(std::exp(12.0)).epsilon(1e-13));

    CMatrix x(1, 1);
    x << Complex(0.0, 1.5);
    const auto hs = hyperbolic_series(x);
    // |xi| = 1.5: cosh(1.5) and sinh(1.5)/1.5 xi
    CHECK(hs.cosh_conj(0, 0).real() == doctest::Approx(std::cosh(1.5)).epsilon(1e-14));
    CHECK(hs.sinh_over(0, 0).imag() == doctest::Approx(std::sinh(1.5)).epsilon(1e-14));
    CHECK_THROWS_AS(hyperbolic_series(CMatrix::Identity(1, 1) * 200.0, 1e-16, 20), NumericalFailure);
}

TEST_CASE("real-eta propagator") {
    const Vector rates = (Vector(3) << 0.5, 1.0, 2.0).finished();
    const BathParams bath(rates, Vector::Zero(3));
    const auto zero = propagator_real_eta(AmplifierMatrix(Matrix(Matrix::Zero(3, 3))), bath, 1.5);
    for (int j = 0; j < 3; ++j) {
        CHECK(zero.m(j, j).real() == doctest::Approx(std::exp(-rates(j) * 0.75)).epsilon(1e-14));
    }
    CHECK(max_abs(zero.n) < 1e-16);

    std::mt19937 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const AmplifierMatrix eta(random_symmetric(rng, 3, false));
        const auto a = propagator_real_eta(eta, BathParams::uniform(3, 0.7, 0.0), 1.3);
        const auto b = propagator_equal_damping(eta, 0.7, 1.3);
        CHECK(max_abs(a.m - b.m) < 1e-10);
        CHECK(max_abs(a.n - b.n) < 1e-10);
    }

    Matrix two(2, 2);
    two << 0.0, 0.3, 0.3, 0.0;
    const BathParams unequal((Vector(2) << 1.0, 2.0).finished(), Vector::Zero(2));
    const auto p = propagator_real_eta(AmplifierMatrix(two), unequal, 1.0);
    const auto rk = oracles::rk4_propagator(AmplifierMatrix(two), unequal, 1.0);
    CHECK(max_abs(p.m - rk.m) < 1e-6);
    CHECK(max_abs(p.n - rk.n) < 1e-6);

    CMatrix c = two.cast<Complex>();
    c(0, 1) = c(1, 0) = Complex(0.3, 0.1);
    CHECK_THROWS_AS(propagator_real_eta(AmplifierMatrix(c), unequal, 1.0), InvalidArgument);
}

TEST_CASE("propagators agree with RK4 on random instances") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> time(0.1, 3.0);
    std::uniform_real_distribution<double> rate(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double t = time(rng);
        const AmplifierMatrix complex_eta(random_symmetric(rng, 3, true));
        const double g = rate(rng);
        const auto closed = propagator_equal_damping(complex_eta, g, t);
        const auto rk = oracles::rk4_propagator(complex_eta, BathParams::uniform(3, g, 0.0), t);
        CHECK(max_abs(closed.m - rk.m) < 1e-6);
        CHECK(max_abs(closed.n - rk.n) < 1e-6);

        const AmplifierMatrix real_eta(random_symmetric(rng, 3, false));
        const BathParams bath((Vector(3) << rate(rng), rate(rng), rate(rng)).finished(), Vector::Zero(3));
        const auto closed_r = propagator_real_eta(real_eta, bath, t);
        const auto rk_r = oracles::rk4_propagator(real_eta, bath, t);
        CHECK(max_abs(closed_r.m - rk_r.m) < 1e-6);
        CHECK(max_abs(closed_r.n - rk_r.n) < 1e-6);
    }
}

TEST_CASE("propagator semigroup") {
    // The fundamental matrix of the linear system is [[M, N^*], [N, M^*]].
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> time(0.1, 1.5);
    for (int trial = 0; trial < 10; ++trial) {
        const AmplifierMatrix eta(random_symmetric(rng, 3, trial % 2 == 1));
        const double t1 = time(rng), t2 = time(rng);
        const auto p1 = propagator_equal_damping(eta, 1.0, t1);
        const auto p2 = propagator_equal_damping(eta, 1.0, t2);
        const auto p12 = propagator_equal_damping(eta, 1.0, t1 + t2);
        CHECK(max_abs(p12.m - (p2.m * p1.m + p2.n.conjugate() * p1.n)) < 1e-10);
        CHECK(max_abs(p12.n - (p2.n * p1.m + p2.m.conjugate() * p1.n)) < 1e-10);
    }
}

TEST_CASE("steady moments") {
    Matrix one(1, 1);
    one << 0.25;
    const auto s = steady_alpha_beta(AmplifierMatrix(one), BathParams::uniform(1, 1.0, 0.0));
    CHECK(s.alpha(0, 0).real() == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(s.beta(0, 0).real() == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    const CovarianceMatrix g = complex_to_real_cm(s);
    CHECK(g(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(g(1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(std::abs(g(0, 1)) < 1e-15);

    const auto thermal = steady_alpha_beta(AmplifierMatrix(Matrix(Matrix::Zero(3, 3))), BathParams::uniform(3, 1.0, 0.7));
    CHECK(max_abs(thermal.alpha - 2.4 * CMatrix::Identity(3, 3)) < 1e-14);
    CHECK(max_abs(thermal.beta) < 1e-14);

    std::mt19937 rng(29);
    std::uniform_real_distribution<double> z(-0.9, 0.9);
    std::uniform_real_distribution<double> nb(0.0, 2.0);
    for (int trial = 0; trial < 30; ++trial) {
        const double z0 = z(rng), z1 = z(rng), nbar = nb(rng);
        const AmplifierMatrix eta = family_eta(z0, z1);
        const BathParams bath = BathParams::uniform(3, 2.0, nbar);
        const auto solved = steady_alpha_beta(eta, bath);
        CHECK(steady_residual(eta, bath, solved) < 1e-10);
        const auto closed = symmetric_steady_moments(z0, z1, 2.0 * nbar + 1.0);
        CHECK(max_abs(solved.alpha - closed.alpha) < 1e-10);
        CHECK(max_abs(solved.beta - closed.beta) < 1e-10);
    }

    // complex eta, unequal damping
    for (int trial = 0; trial < 10; ++trial) {
        const AmplifierMatrix eta(random_symmetric(rng, 3, true));
        const BathParams bath((Vector(3) << 1.0, 2.0, 3.0).finished(), (Vector(3) << 0.1, 0.5, 0.0).finished());
        const auto solved = steady_alpha_beta(eta, bath);
        CHECK(steady_residual(eta, bath, solved) < 1e-10);
        solved.validate();
    }
}

TEST_CASE("steady moments reject resonance") {
    Matrix one(1, 1);
    one << 0.5;
    CHECK_THROWS_AS(steady_alpha_beta(AmplifierMatrix(one), BathParams::uniform(1, 1.0, 0.0)), ResonanceError);
    // zeta0 = 1 on the symmetric mode
    CHECK_THROWS_AS(steady_alpha_beta(family_eta(1.0, 0.3), BathParams::uniform(3, 2.0, 0.0)), ResonanceError);
}

TEST_CASE("complex evolution basics") {
    std::mt19937 rng(31);
    const AmplifierMatrix eta(random_symmetric(rng, 3, true));
    const BathParams bath = BathParams::uniform(3, 4.0, 0.2);
    const auto steady = steady_alpha_beta(eta, bath);
    const auto p = propagator_equal_damping(eta, 4.0, 0.8);
    const auto fixed = evolve_complex_cm(steady, p, steady);
    CHECK(max_abs(fixed.alpha - steady.alpha) < 1e-12);
    CHECK(max_abs(fixed.beta - steady.beta) < 1e-12);

    const auto vac = ComplexMoments::vacuum(3);
    const auto same = evolve_complex_cm(vac, PropagatorPair::identity(3), steady);
    CHECK(max_abs(same.alpha - vac.alpha) < 1e-14);
    CHECK(max_abs(same.beta) < 1e-14);

    CHECK(complex_to_real_cm(vac).matrix() == Matrix::Identity(6, 6));
    CHECK_THROWS_AS(evolve_complex_cm(ComplexMoments::vacuum(2), p, steady), InvalidArgument);
}

TEST_CASE("general evolution matches the Lyapunov oracle for complex eta") {
    std::mt19937 rng(37);
    for (int trial = 0; trial < 5; ++trial) {
        const AmplifierMatrix eta(random_symmetric(rng, 3, true));
        const BathParams bath = BathParams::uniform(3, 1.3, 0.4);
        const double t = 0.9;
        const auto moments =
            evolve_complex_cm(ComplexMoments::vacuum(3), propagator_equal_damping(eta, 1.3, t), steady_alpha_beta(eta, bath));
        const Matrix closed = complex_to_real_cm(moments).matrix();
        const Matrix rk = oracles::rk4_covariance(eta, bath, CovarianceMatrix::identity(3), t).matrix();
        CHECK((closed - rk).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(is_valid_cm(CovarianceMatrix(closed)));
    }
}

TEST_CASE("symmetric entries examples") {
    const auto e = symmetric_entries(SymmetricFamily::from_zeta(0.0, 0.0, 3.0, 1.0));
    CHECK(e.a == doctest::Approx(3.0 - 2.0 * std::exp(-2.0)).epsilon(1e-14));
    CHECK(e.b == doctest::Approx(2.729329).epsilon(1e-6));
    CHECK(std::abs(e.c) < 1e-15);
    CHECK(std::abs(e.d) < 1e-15);

    const auto lim = symmetric_entries(SymmetricFamily::from_zeta(0.8, -0.4, 1.0, kAsymptoticTime));
    CHECK(lim.a_p == doctest::Approx(5.0).epsilon(1e-13));
    CHECK(lim.b_p == doctest::Approx(5.0 / 9.0).epsilon(1e-13));
    CHECK(lim.c_p == doctest::Approx(5.0 / 7.0).epsilon(1e-13));
    CHECK(lim.d_p == doctest::Approx(5.0 / 3.0).epsilon(1e-13));

    for (double z0 : {-1.5, 0.3, 2.0}) {
        const auto v = symmetric_entries(SymmetricFamily::from_zeta(z0, -0.7, 2.0, 0.0));
        CHECK(v.a == doctest::Approx(1.0));
        CHECK(v.b == doctest::Approx(1.0));
        CHECK(std::abs(v.c) < 1e-15);
        CHECK(std::abs(v.d) < 1e-15);
    }

    CHECK_THROWS_AS(symmetric_entries(SymmetricFamily::from_zeta(1.0, 0.0, 1.0, 2.0)), ResonanceError);
    CHECK_THROWS_AS(symmetric_entries(SymmetricFamily::from_zeta(0.2, -1.0, 1.0, kAsymptoticTime)), ResonanceError);
    CHECK_THROWS_AS(symmetric_entries(SymmetricFamily::from_zeta(0.2, 0.1, 0.5, 1.0)), InvalidArgument);
    CHECK_THROWS_AS(symmetric_entries(SymmetricFamily::from_zeta(0.2, 0.1, 1.0, -1.0)), InvalidArgument);
}

TEST_CASE("asymptotic growing modes") {
    const auto e = symmetric_entries(SymmetricFamily::from_zeta(2.0, -2.0, 1.0, kAsymptoticTime));
    CHECK(std::isinf(e.a_p));
    CHECK(std::isinf(e.d_p));
    CHECK(e.b_p == doctest::Approx(1.0 / 3.0));
    CHECK(e.c_p == doctest::Approx(1.0 / 3.0));
    CHECK_FALSE(e.finite());
    const auto capped = capped_entries(e, 1e6);
    CHECK(capped.finite());
    CHECK(capped.a_p == 1e6);
}

TEST_CASE("primed entries identities") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> z(-1.8, 1.8);
    std::uniform_real_distribution<double> t(0.0, 3.0);
    int checked = 0;
    while (checked < 50) {
        const double z0 = z(rng), z1 = z(rng);
        if (std::abs(std::abs(z0) - 1.0) < 1e-3 || std::abs(std::abs(z1) - 1.0) < 1e-3) {
            continue;
        }
        const auto e = symmetric_entries(SymmetricFamily::from_zeta(z0, z1, 1.7, t(rng)));
        const double scale = std::max({1.0, std::abs(e.a_p), std::abs(e.b_p), std::abs(e.c_p), std::abs(e.d_p)});
        CHECK(std::abs(e.a_p - (e.a + 2.0 * e.c)) < 1e-12 * scale);
        CHECK(std::abs(e.c_p - (e.a - e.c)) < 1e-12 * scale);
        CHECK(std::abs(e.b_p - (e.b + 2.0 * e.d)) < 1e-12 * scale);
        CHECK(std::abs(e.d_p - (e.b - e.d)) < 1e-12 * scale);
        ++checked;
    }
}

TEST_CASE("asymptotic entries are reached by t' = 40") {
    for (double z0 : {-0.6, -0.2, 0.3, 0.6}) {
        for (double z1 : {-0.55, 0.1, 0.6}) {
            const auto late = symmetric_entries(SymmetricFamily::from_zeta(z0, z1, 1.4, 40.0));
            const auto later = symmetric_entries(SymmetricFamily::from_zeta(z0, z1, 1.4, 80.0));
            const auto lim = symmetric_entries(SymmetricFamily::from_zeta(z0, z1, 1.4, kAsymptoticTime));
            CHECK(std::abs(late.a - lim.a) < 1e-12);
            CHECK(std::abs(late.b - lim.b) < 1e-12);
            CHECK(std::abs(late.c - lim.c) < 1e-12);
            CHECK(std::abs(late.d - lim.d) < 1e-12);
            CHECK(std::abs(later.a - late.a) < 1e-12);
            CHECK(lim.a_p == doctest::Approx(1.4 / (1.0 - z0)).epsilon(1e-13));
            CHECK(lim.d_p == doctest::Approx(1.4 / (1.0 + z1)).epsilon(1e-13));
        }
    }
}

TEST_CASE("build_symmetric_gamma placement") {
    CHECK(build_symmetric_gamma(SymmetricEntries{}).matrix() == Matrix::Identity(6, 6));
    SymmetricEntries e;
    e.a = 2.0;
    e.b = 1.0;
    e.c = 0.5;
    e.d = -0.2;
    const Matrix g = build_symmetric_gamma(e).matrix();
    CHECK(g(0, 2) == 0.5);
    CHECK(g(0, 4) == 0.5);
    CHECK(g(2, 4) == 0.5);
    CHECK(g(1, 3) == -0.2);
    CHECK(g(1, 5) == -0.2);
    CHECK(g(3, 5) == -0.2);
    CHECK(g(0, 1) == 0.0);
    CHECK(g(0, 3) == 0.0);
    CHECK(g(4, 4) == 2.0);
    CHECK(g(5, 5) == 1.0);
    for (int x = 0; x < 3; ++x) {
        for (int y = x + 1; y < 3; ++y) {
            Eigen::PermutationMatrix<Eigen::Dynamic> perm(6);
            perm.setIdentity();
            std::swap(perm.indices()[2 * x], perm.indices()[2 * y]);
            std::swap(perm.indices()[2 * x + 1], perm.indices()[2 * y + 1]);
            CHECK(perm * g * perm.transpose() == g);
        }
    }
    CHECK(build_symmetric_gamma(e, 2.0).matrix() == 2.0 * g);
    e.c = INFINITY;
    CHECK_THROWS_AS(build_symmetric_gamma(e), InvalidArgument);
}

TEST_CASE("pipeline: vacuum through the general evolution equals the family formulas") {
    const double zetas[] = {-1.7, -0.9, -0.25, 0.45, 1.35};
    const double nprimes[] = {1.0, 1.5, 3.0};
    const double times[] = {0.0, 0.3, 1.1, 2.5};
    int points = 0;
    for (double z0 : zetas) {
        for (double z1 : zetas) {
            const AmplifierMatrix eta = family_eta(z0, z1);
            for (double np : nprimes) {
                const BathParams bath = BathParams::uniform(3, 2.0, 0.5 * (np - 1.0));
                const auto steady = steady_alpha_beta(eta, bath);
                for (double tp : times) {
                    const Matrix general =
                        complex_to_real_cm(evolve_complex_cm(ComplexMoments::vacuum(3),
                                                             propagator_equal_damping(eta, 2.0, tp), steady))
                            .matrix();
                    const auto entries = symmetric_entries(SymmetricFamily::from_zeta(z0, z1, np, tp));
                    const Matrix family = build_symmetric_gamma(entries).matrix();
                    const double scale = std::max(1.0, family.cwiseAbs().maxCoeff());
                    CHECK((general - family).cwiseAbs().maxCoeff() < 1e-10 * scale);
                    CHECK(is_valid_cm(CovarianceMatrix(general), 1e-9 * scale));
                    ++points;
                }
            }
        }
    }
    CHECK(points == 300);
}
