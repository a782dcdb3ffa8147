#include "doctest.h"

#include <cmath>

#include "cvsep/errors.hpp"
#include "cvsep/oracles.hpp"

using namespace cvsep;
using namespace cvsep::oracles;

namespace {

SchurPair diagonal_pair(double value) {
    SchurPair p;
    p.k = Matrix2c::Identity() * value;
    p.k_tilde = p.k;
    return p;
}

SchurPair family_pair(double z0, double z1, double n2) {
    return schur_complements(family_gamma(SymmetricFamily::from_zeta(z0, z1, std::sqrt(n2), kAsymptoticTime)));
}

}  // namespace

TEST_CASE("rk4 propagator examples") {
    const BathParams bath((Vector(3) << 0.4, 1.0, 2.5).finished(), Vector::Zero(3));
    const auto zero = rk4_propagator(AmplifierMatrix(Matrix(Matrix::Zero(3, 3))), bath, 2.0);
    for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(zero.m(j, j).real() - std::exp(-bath.damping()(j))) < 1e-10);
    }

    Matrix one(1, 1);
    one << 0.3;
    const auto closed = propagator_equal_damping(AmplifierMatrix(one), 1.0, 2.0);
    const auto rk = rk4_propagator(AmplifierMatrix(one), BathParams::uniform(1, 1.0, 0.0), 2.0);
    CHECK(std::abs(rk.m(0, 0) - closed.m(0, 0)) < 1e-9);
    CHECK(std::abs(rk.n(0, 0) - closed.n(0, 0)) < 1e-9);

    CHECK_THROWS_AS(rk4_propagator(AmplifierMatrix(one), BathParams::uniform(1, 1.0, 0.0), 1.0, OdeConfig{0.0}),
                    InvalidArgument);
    CHECK_THROWS_AS(rk4_propagator(AmplifierMatrix(one), BathParams::uniform(1, 1.0, 0.0), 1.0, OdeConfig{-1e-3}),
                    InvalidArgument);
}

TEST_CASE("rk4 converges at fourth order") {
    Matrix e(2, 2);
    e << 0.6, -0.8, -0.8, 0.2;
    const AmplifierMatrix eta(e);
    const auto closed = propagator_equal_damping(eta, 1.0, 2.0);
    const BathParams bath = BathParams::uniform(2, 1.0, 0.0);
    auto error = [&](double dt) {
        const auto rk = rk4_propagator(eta, bath, 2.0, OdeConfig{dt});
        return std::max((rk.m - closed.m).cwiseAbs().maxCoeff(), (rk.n - closed.n).cwiseAbs().maxCoeff());
    };
    const double coarse = error(0.1);
    const double fine = error(0.05);
    CHECK(coarse / fine == doctest::Approx(16.0).epsilon(0.1));
}

TEST_CASE("rk4 covariance keeps the vacuum without amplification") {
    const auto g = rk4_covariance(AmplifierMatrix(Matrix(Matrix::Zero(3, 3))), BathParams::uniform(3, 1.0, 0.0),
                                  CovarianceMatrix::identity(3), 3.0);
    CHECK((g.matrix() - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
    const auto th = rk4_covariance(AmplifierMatrix(Matrix(Matrix::Zero(1, 1))), BathParams::uniform(1, 1.0, 1.0),
                                   CovarianceMatrix::identity(1), 2.0);
    CHECK(th(0, 0) == doctest::Approx(3.0 - 2.0 * std::exp(-2.0)).epsilon(1e-10));
}

TEST_CASE("grid feasibility examples") {
    const auto unit = grid_feasibility(diagonal_pair(1.0));
    CHECK(unit.feasible);
    REQUIRE(unit.witness);
    CHECK(unit.witness->first == 0.0);
    CHECK(unit.witness->second == 0.0);

    const auto half = grid_feasibility(diagonal_pair(0.5));
    CHECK_FALSE(half.feasible);
    CHECK_FALSE(half.witness);

    CHECK(grid_feasibility(family_pair(0.8, -0.4, 2.6)).feasible);
    CHECK_FALSE(grid_feasibility(family_pair(0.8, -0.4, 2.45)).feasible);

    CHECK_THROWS_AS(grid_feasibility(diagonal_pair(1.0), GridConfig{32, 12, true}), InvalidArgument);
    CHECK_THROWS_AS(grid_feasibility(diagonal_pair(1.0), GridConfig{65, 2, true}), InvalidArgument);
}

TEST_CASE("grid refinement is monotone") {
    for (double n2 : {2.45, 2.5, 2.52, 2.55, 2.6, 4.0}) {
        const auto res = grid_feasibility(family_pair(0.8, -0.4, n2), GridConfig{65, 12, false});
        REQUIRE(res.level_best.size() == 12);
        bool feasible = false;
        for (std::size_t k = 1; k < res.level_best.size(); ++k) {
            CHECK(res.level_best[k] >= res.level_best[k - 1]);
            if (res.level_best[k - 1] >= kFeasibilitySlack) {
                feasible = true;
            }
            if (feasible) {
                CHECK(res.level_best[k] >= kFeasibilitySlack);
            }
        }
    }
}

TEST_CASE("boundary bisection") {
    const double root = boundary_bisection([](double x) { return x >= 1.7; }, 1.0, 4.0);
    CHECK(std::abs(root - 1.7) < 1e-6);
    CHECK_THROWS_AS(boundary_bisection([](double) { return true; }, 1.0, 4.0), BracketError);
    CHECK_THROWS_AS(boundary_bisection([](double x) { return x > 2; }, 4.0, 1.0), InvalidArgument);

    CHECK(std::abs(family_boundary(0.8, -0.4, kAsymptoticTime, BoundaryKind::FullySeparable) - 2.52) < 1e-3);
    CHECK(std::abs(family_boundary(0.8, -0.4, kAsymptoticTime, BoundaryKind::Ppt) - 2.3514) < 1e-3);
    // eta1' = 0: zeta0 = zeta1, the product family is separable without noise
    CHECK_THROWS_AS(family_boundary(0.5, 0.5, kAsymptoticTime, BoundaryKind::FullySeparable), BracketError);
    CHECK_THROWS_AS(family_boundary(0.5, 0.5, kAsymptoticTime, BoundaryKind::Ppt), BracketError);
}

TEST_CASE("strong amplification boundaries from bisection") {
    CHECK(std::abs(family_boundary(2.0, -2.0, kAsymptoticTime, BoundaryKind::FullySeparable) - 9.0) < 1e-3);
    CHECK(std::abs(family_boundary(2.0, -2.0, kAsymptoticTime, BoundaryKind::Ppt) - 8.0) < 1e-3);
    CHECK(std::abs(family_boundary(2.0, 0.0, kAsymptoticTime, BoundaryKind::Ppt) - 25.0 / 9.0) < 1e-3);
}
