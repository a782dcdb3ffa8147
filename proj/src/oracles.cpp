#include "cvsep/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cvsep/errors.hpp"

namespace cvsep::oracles {

namespace {

int step_count(double t, const OdeConfig& cfg) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
        throw InvalidArgument("ODE step must be positive");
    }
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw InvalidArgument("integration horizon must be finite and non-negative");
    }
    if (t == 0.0) {
        return 0;
    }
    return std::max(10, static_cast<int>(std::ceil(t / cfg.dt - 1e-9)));
}

}  // namespace

PropagatorPair rk4_propagator(const AmplifierMatrix& eta, const BathParams& bath, double t, const OdeConfig& cfg) {
    if (eta.modes() != bath.modes()) {
        throw InvalidArgument("rk4_propagator: amplifier and bath differ in mode count");
    }
    const int steps = step_count(t, cfg);
    const int s = eta.modes();
    const CMatrix& e = eta.matrix();
    const CMatrix e_conj = e.conjugate();
    const CMatrix half_gamma = (0.5 * bath.damping()).cast<Complex>().asDiagonal();

    auto rhs = [&](const CMatrix& m, const CMatrix& n) {
        return std::pair<CMatrix, CMatrix>{-e_conj * n - half_gamma * m, -e * m - half_gamma * n};
    };

    CMatrix m = CMatrix::Identity(s, s);
    CMatrix n = CMatrix::Zero(s, s);
    if (steps == 0) {
        return {m, n};
    }
    const double h = t / steps;
    for (int i = 0; i < steps; ++i) {
        const auto [k1m, k1n] = rhs(m, n);
        const auto [k2m, k2n] = rhs(m + 0.5 * h * k1m, n + 0.5 * h * k1n);
        const auto [k3m, k3n] = rhs(m + 0.5 * h * k2m, n + 0.5 * h * k2n);
        const auto [k4m, k4n] = rhs(m + h * k3m, n + h * k3n);
        m += h / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
        n += h / 6.0 * (k1n + 2.0 * k2n + 2.0 * k3n + k4n);
    }
    return {m, n};
}

CovarianceMatrix rk4_covariance(const AmplifierMatrix& eta, const BathParams& bath, const CovarianceMatrix& initial,
                                double t, const OdeConfig& cfg) {
    const int s = eta.modes();
    if (bath.modes() != s || initial.modes() != s) {
        throw InvalidArgument("rk4_covariance: mode counts differ");
    }
    const int steps = step_count(t, cfg);

    // x_j' = sum_k (Re eta_jk x_k + Im eta_jk p_k) - Gamma_j x_j / 2
    // p_j' = sum_k (Im eta_jk x_k - Re eta_jk p_k) - Gamma_j p_j / 2
    Matrix drift = Matrix::Zero(2 * s, 2 * s);
    Matrix diffusion = Matrix::Zero(2 * s, 2 * s);
    const Vector noise = bath.noise_factor();
    for (int j = 0; j < s; ++j) {
        for (int k = 0; k < s; ++k) {
            const Complex v = eta.matrix()(j, k);
            drift(2 * j, 2 * k) = v.real();
            drift(2 * j, 2 * k + 1) = v.imag();
            drift(2 * j + 1, 2 * k) = v.imag();
            drift(2 * j + 1, 2 * k + 1) = -v.real();
        }
        drift(2 * j, 2 * j) -= 0.5 * bath.damping()(j);
        drift(2 * j + 1, 2 * j + 1) -= 0.5 * bath.damping()(j);
        diffusion(2 * j, 2 * j) = bath.damping()(j) * noise(j);
        diffusion(2 * j + 1, 2 * j + 1) = bath.damping()(j) * noise(j);
    }

    auto rhs = [&](const Matrix& g) -> Matrix { return drift * g + g * drift.transpose() + diffusion; };
    Matrix g = initial.matrix();
    if (steps > 0) {
        const double h = t / steps;
        for (int i = 0; i < steps; ++i) {
            const Matrix k1 = rhs(g);
            const Matrix k2 = rhs(g + 0.5 * h * k1);
            const Matrix k3 = rhs(g + 0.5 * h * k2);
            const Matrix k4 = rhs(g + h * k3);
            g += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    return CovarianceMatrix(0.5 * (g + g.transpose()));
}

GridResult grid_feasibility(const SchurPair& pair, const GridConfig& cfg) {
    if (cfg.resolution < 64 || cfg.levels < 3) {
        throw InvalidArgument("grid search needs >= 64 points per axis and >= 3 levels");
    }
    const Matrix2c& k = pair.k;
    const Matrix2c& kt = pair.k_tilde;
    const double tr = k.trace().real();
    const double trt = kt.trace().real();
    const double det = k.determinant().real();
    const double dett = kt.determinant().real();
    const double l0 = (k(0, 0) - k(1, 1)).real();
    const double l1 = 2.0 * k(0, 1).real();
    const double lt0 = (kt(0, 0) - kt(1, 1)).real();
    const double lt1 = 2.0 * kt(0, 1).real();
    const double disk = std::min(tr, trt);

    auto slack = [&](double y, double z) {
        const double x = std::sqrt(1.0 + y * y + z * z);
        const double s0 = disk - 2.0 * x;
        const double s1 = det + 1.0 + l0 * y + l1 * z - x * tr;
        const double s2 = dett + 1.0 + lt0 * y + lt1 * z - x * trt;
        return std::min({s0, s1, s2});
    };

    GridResult out;
    if (!(disk >= 2.0)) {
        out.best_slack = slack(0.0, 0.0);
        out.level_best.push_back(out.best_slack);
        return out;
    }

    const double radius = std::sqrt(disk * disk / 4.0 - 1.0);
    double cy = 0.0;
    double cz = 0.0;
    double half = std::max(radius, 1e-12);
    double best = slack(cy, cz);
    for (int level = 0; level < cfg.levels; ++level) {
        const int n = cfg.resolution;
        const double cell = 2.0 * half / (n - 1);
        double by = cy;
        double bz = cz;
        for (int i = 0; i < n; ++i) {
            const double y = cy - half + i * cell;
            for (int j = 0; j < n; ++j) {
                const double z = cz - half + j * cell;
                const double v = slack(y, z);
                if (v > best) {
                    best = v;
                    by = y;
                    bz = z;
                }
            }
        }
        cy = by;
        cz = bz;
        half = 2.0 * cell;
        out.level_best.push_back(best);
        if (cfg.stop_when_feasible && best >= kFeasibilitySlack) {
            break;
        }
    }
    out.best_slack = best;
    out.feasible = best >= kFeasibilitySlack;
    if (out.feasible) {
        out.witness = std::pair{cy, cz};
    }
    return out;
}

double boundary_bisection(const BoundaryPredicate& predicate, double lo, double hi, double abs_tol) {
    if (!(lo < hi) || !(abs_tol > 0.0)) {
        throw InvalidArgument("bisection needs lo < hi and a positive tolerance");
    }
    const bool at_lo = predicate(lo);
    if (predicate(hi) == at_lo) {
        throw BracketError("predicate does not change across [" + std::to_string(lo) + ", " + std::to_string(hi) +
                           "]");
    }
    while (hi - lo > abs_tol) {
        const double mid = 0.5 * (lo + hi);
        if (predicate(mid) == at_lo) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

BoundaryPredicate family_predicate(double zeta0, double zeta1, double tprime, BoundaryKind kind, double tol) {
    return [=](double n2) {
        const auto family = SymmetricFamily::from_zeta(zeta0, zeta1, std::sqrt(n2), tprime);
        const SeparabilityClass cls = classify_family(family, tol).cls;
        return kind == BoundaryKind::FullySeparable ? cls == SeparabilityClass::FullySeparable
                                                    : cls != SeparabilityClass::FullyInseparable;
    };
}

double family_boundary(double zeta0, double zeta1, double tprime, BoundaryKind kind, double abs_tol) {
    const BoundaryPredicate predicate = family_predicate(zeta0, zeta1, tprime, kind);
    if (predicate(1.0)) {
        throw BracketError("no boundary above n'^2 = 1: the predicate already holds for the noiseless state");
    }
    double hi = 2.0;
    while (!predicate(hi)) {
        hi *= 2.0;
        if (hi > std::ldexp(1.0, 40)) {
            throw BracketError("predicate never holds below n'^2 = 2^40");
        }
    }
    const double lo = hi > 2.0 ? 0.5 * hi : 1.0;
    return boundary_bisection(predicate, lo, hi, abs_tol);
}

}  // namespace cvsep::oracles
