#include "cvsep/separability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "cvsep/errors.hpp"
#include "cvsep/oracles.hpp"

namespace cvsep {

std::string_view to_string(SeparabilityClass c) noexcept {
    switch (c) {
        case SeparabilityClass::FullyInseparable:
            return "FullyInseparable";
        case SeparabilityClass::Biseparable:
            return "Biseparable";
        case SeparabilityClass::FullySeparable:
            return "FullySeparable";
    }
    return "?";
}

// --- Schur complements -----------------------------------------------------

namespace {

Matrix2c schur_against(const Matrix& a, const Matrix& c, const Matrix& b, const Matrix& form) {
    const CMatrix shifted = with_symplectic(b, -form);
    Eigen::JacobiSVD<CMatrix> svd(shifted);
    const auto& sv = svd.singularValues();
    const double condition = sv(0) / sv(sv.size() - 1);
    if (!(condition < 1e12)) {
        std::ostringstream msg;
        msg << "B - iJ is numerically singular (condition " << condition << ")";
        throw SingularityError(msg.str(), condition);
    }
    const CMatrix cc = c.cast<Complex>();
    const CMatrix k = a.cast<Complex>() - cc * shifted.partialPivLu().solve(cc.transpose());
    return 0.5 * (k + k.adjoint());
}

}  // namespace

SchurPair schur_complements(const CovarianceMatrix& gamma) {
    if (gamma.dimension() != 6) {
        throw InvalidArgument("Schur complements are defined for three-mode (6x6) covariance matrices");
    }
    const Matrix& g = gamma.matrix();
    const Matrix a = g.topLeftCorner(2, 2);
    const Matrix c = g.topRightCorner(2, 4);
    const Matrix b = g.bottomRightCorner(4, 4);
    if (c.cwiseAbs().maxCoeff() == 0.0) {
        const Matrix2c k = a.cast<Complex>();
        return {k, k};
    }
    return {schur_against(a, c, b, symplectic_form(2).matrix()),
            schur_against(a, c, b, transposed_two_mode_form())};
}

// --- feasibility -----------------------------------------------------------

FeasibilityProblem FeasibilityProblem::from(const SchurPair& pair) {
    FeasibilityProblem p;
    p.tr_k = pair.u() + pair.w();
    p.tr_k_tilde = pair.u_tilde() + pair.w_tilde();
    p.det_k = pair.u() * pair.w() - std::norm(pair.v());
    p.det_k_tilde = pair.u_tilde() * pair.w_tilde() - std::norm(pair.v_tilde());
    p.l = pair.l();
    p.l_tilde = pair.l_tilde();
    return p;
}

std::array<double, 3> FeasibilityProblem::slacks(double y, double z) const {
    const double x = std::sqrt(1.0 + y * y + z * z);
    return {std::min(tr_k, tr_k_tilde) - 2.0 * x, det_k + 1.0 + l(0) * y + l(1) * z - x * tr_k,
            det_k_tilde + 1.0 + l_tilde(0) * y + l_tilde(1) * z - x * tr_k_tilde};
}

double FeasibilityProblem::min_slack(double y, double z) const {
    const auto s = slacks(y, z);
    return std::min({s[0], s[1], s[2]});
}

namespace {

struct Interval {
    double lo, hi;
    bool empty() const { return !(lo <= hi); }
};

// {y : D + l y >= T sqrt(1 + y^2)} for one ellipse section at z = 0.
// Requires u, w > 0; then T > |l| and the section is the interval between
// the roots of (l^2 - T^2) y^2 + 2 D l y + D^2 - T^2, non-empty iff
// D >= sqrt(T^2 - l^2) = 2 sqrt(u w).
Interval ellipse_section(double u, double w, double det) {
    if (!(u > 0.0) || !(w > 0.0)) {
        return {1.0, -1.0};
    }
    const double d = det + 1.0;
    const double t = u + w;
    const double l = u - w;
    const double q2 = 4.0 * u * w;
    const double q = std::sqrt(q2);
    if (d < q) {
        return {1.0, -1.0};
    }
    const double root = t * std::sqrt(std::max(0.0, d * d - q2));
    return {(d * l - root) / q2, (d * l + root) / q2};
}

// Maximum of a concave function on [lo, hi].
template <typename F>
std::pair<double, double> golden_max(F f, double lo, double hi) {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    return f1 > f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

FeasibilityResult analytic_feasibility(const SchurPair& pair, double tol) {
    const FeasibilityProblem problem = FeasibilityProblem::from(pair);
    const double m = std::min(problem.tr_k, problem.tr_k_tilde);
    FeasibilityResult out;
    out.analytic = true;

    // Constraints are even in z and x grows with |z|, so z = 0 is optimal.
    const double radius = m >= 2.0 ? std::sqrt(m * m / 4.0 - 1.0) : 0.0;
    const double span = std::max(radius, 1.0);
    const auto [y_best, best] = golden_max([&](double y) { return problem.min_slack(y, 0.0); }, -span, span);
    out.margin = best;

    Interval feasible{-radius, radius};
    if (m < 2.0) {
        feasible = {1.0, -1.0};
    }
    for (const auto& [u, w, det] : {std::array{pair.u(), pair.w(), problem.det_k},
                                    std::array{pair.u_tilde(), pair.w_tilde(), problem.det_k_tilde}}) {
        if (feasible.empty()) {
            break;
        }
        const Interval section = ellipse_section(u, w, det);
        feasible = {std::max(feasible.lo, section.lo), std::min(feasible.hi, section.hi)};
    }
    out.feasible = !feasible.empty();
    if (out.feasible) {
        out.witness = std::pair{0.5 * (feasible.lo + feasible.hi), 0.0};
    }
    out.marginal = std::abs(out.margin) <= tol;
    return out;
}

}  // namespace

FeasibilityResult fully_separable_test(const SchurPair& pair, double tol) {
    const double scale = std::max({1.0, pair.k.cwiseAbs().maxCoeff(), pair.k_tilde.cwiseAbs().maxCoeff()});
    if (std::abs(pair.v().real()) <= 1e-10 * scale && std::abs(pair.v_tilde().real()) <= 1e-10 * scale) {
        return analytic_feasibility(pair, tol);
    }
    const oracles::GridResult grid = oracles::grid_feasibility(pair);
    FeasibilityResult out;
    out.feasible = grid.feasible;
    out.witness = grid.witness;
    out.margin = grid.best_slack;
    out.marginal = std::abs(grid.best_slack) <= tol;
    out.analytic = false;
    return out;
}

std::optional<CurveCrossing> curve_crossing(const SchurPair& pair) {
    const FeasibilityProblem p = FeasibilityProblem::from(pair);
    // T x - l y = D for both curves.
    Eigen::Matrix2d lhs;
    lhs << p.tr_k, -p.l(0), p.tr_k_tilde, -p.l_tilde(0);
    const Eigen::Vector2d rhs(p.det_k + 1.0, p.det_k_tilde + 1.0);
    const double det = lhs.determinant();
    if (std::abs(det) <= 1e-14 * std::max(1.0, lhs.cwiseAbs().maxCoeff() * lhs.cwiseAbs().maxCoeff())) {
        return std::nullopt;
    }
    const Eigen::Vector2d sol = lhs.inverse() * rhs;
    return CurveCrossing{sol(0), sol(1), sol(0) >= std::sqrt(1.0 + sol(1) * sol(1))};
}

// --- PPT -------------------------------------------------------------------

double ppt_min_eigenvalue(const CovarianceMatrix& gamma, int mode) {
    const CovarianceMatrix transposed = partial_transpose(gamma, mode);
    const Matrix form = symplectic_form(gamma.modes()).matrix();
    return min_eigenvalue_hermitian(with_symplectic(transposed.matrix(), form));
}

bool ppt_test(const CovarianceMatrix& gamma, int mode, double tol) {
    return ppt_min_eigenvalue(gamma, mode) >= -tol;
}

double ppt_symmetric_expression(const SymmetricEntries& e) {
    if (!e.primed_finite()) {
        throw InvalidArgument("PPT expression needs finite primed entries");
    }
    const double a = e.a_p, b = e.b_p, c = e.c_p, d = e.d_p;
    return 1.0 - (a * b + 8.0 * b * c + 8.0 * a * d + c * d) / 9.0 + a * b * c * d;
}

bool ppt_symmetric_condition(const SymmetricEntries& e) { return ppt_symmetric_expression(e) >= 0.0; }

double intersection_expression(const SymmetricEntries& e) {
    double value;
    if (e.asymptotic) {
        value = (e.a_p * e.d_p - 1.0) * (e.c_p * e.b_p - 1.0);
    } else {
        value = -e.c * e.d * ((e.a - e.c) * (e.b + 2.0 * e.d) - 1.0) * ((e.b - e.d) * (e.a + 2.0 * e.c) - 1.0);
    }
    if (std::isnan(value)) {
        throw InvalidArgument("intersection expression is undetermined for these entries");
    }
    return value;
}

bool intersection_condition(const SymmetricEntries& e) { return intersection_expression(e) >= 0.0; }

// --- closed-form boundaries ------------------------------------------------

double fully_sep_boundary(double zeta0, double zeta1) {
    if (zeta0 > zeta1) {
        return (1.0 + zeta0) * (1.0 - zeta1);
    }
    return (1.0 - zeta0) * (1.0 + zeta1);
}

namespace {

enum class Regime { Weak, Above, Below };

std::vector<Regime> regimes_of(double zeta) {
    constexpr double seam = 1e-12;
    const double mag = std::abs(zeta);
    const Regime strong = zeta > 0.0 ? Regime::Above : Regime::Below;
    if (mag < 1.0 - seam) {
        return {Regime::Weak};
    }
    if (mag > 1.0 + seam) {
        return {strong};
    }
    return {Regime::Weak, strong};
}

std::optional<double> bisep_piece(Regime r0, Regime r1, double z0, double z1) {
    using R = Regime;
    if (r0 == R::Weak && r1 == R::Weak) {
        return 1.0 - (z0 * z0 + 16.0 * z0 * z1 + z1 * z1) / 18.0 +
               std::abs(z0 - z1) * std::sqrt(288.0 + z0 * z0 + 34.0 * z0 * z1 + z1 * z1) / 18.0;
    }
    if (r0 == R::Above && r1 == R::Weak) {
        return (1.0 - z1) * (1.0 + z0) - (1.0 - z1) * (z0 - z1) / 9.0;
    }
    if (r0 == R::Above && r1 == R::Below) {
        return 8.0 / 9.0 * (1.0 - z1) * (1.0 + z0);
    }
    if (r0 == R::Weak && r1 == R::Below) {
        return (1.0 - z1) * (1.0 + z0) - (1.0 + z0) * (z0 - z1) / 9.0;
    }
    if (r0 == R::Weak && r1 == R::Above) {
        return (1.0 + z1) * (1.0 - z0) - (1.0 - z0) * (z1 - z0) / 9.0;
    }
    if (r0 == R::Below && r1 == R::Weak) {
        return (1.0 + z1) * (1.0 - z0) - (1.0 + z1) * (z1 - z0) / 9.0;
    }
    if (r0 == R::Below && r1 == R::Above) {
        return 8.0 / 9.0 * (1.0 + z1) * (1.0 - z0);
    }
    // Both beyond +1 or both beyond -1: PPT for every n'.
    return std::nullopt;
}

}  // namespace

std::optional<double> bisep_boundary(double zeta0, double zeta1) {
    std::optional<double> first_value;
    bool any_unrestricted = false;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Regime r0 : regimes_of(zeta0)) {
        for (Regime r1 : regimes_of(zeta1)) {
            const auto v = bisep_piece(r0, r1, zeta0, zeta1);
            if (!v) {
                any_unrestricted = true;
                continue;
            }
            if (!first_value) {
                first_value = v;
            }
            lo = std::min(lo, *v);
            hi = std::max(hi, *v);
        }
    }
    if (!first_value) {
        return std::nullopt;
    }
    const bool spread = hi - lo > 1e-9 * std::max(1.0, std::abs(hi));
    const bool unrestricted_clash = any_unrestricted && hi > 1.0 + 1e-9;
    if (spread || unrestricted_clash) {
        std::ostringstream msg;
        msg << "biseparable boundary pieces disagree on the seam at zeta = (" << zeta0 << ", " << zeta1
            << "): [" << lo << ", " << hi << "]" << (any_unrestricted ? " vs unrestricted" : "");
        throw InconsistencyError(msg.str());
    }
    return first_value;
}

double fully_sep_boundary_eta(double eta0p, double eta1p) {
    if (eta1p > 0.0) {
        return (1.0 - eta0p + eta1p) * (1.0 + eta0p + 2.0 * eta1p);
    }
    return (1.0 - eta0p - 2.0 * eta1p) * (1.0 + eta0p - eta1p);
}

double bisep_weak_boundary_eta(double eta0p, double eta1p) {
    return 1.0 - eta0p * eta0p - eta0p * eta1p + 1.5 * eta1p * eta1p +
           0.5 * std::abs(eta1p) * std::sqrt(32.0 + 4.0 * eta0p * eta0p + 4.0 * eta0p * eta1p - 7.0 * eta1p * eta1p);
}

// --- classification --------------------------------------------------------

Classification classify(const CovarianceMatrix& gamma, double tol) {
    if (gamma.dimension() != 6) {
        throw InvalidArgument("classification is defined for three-mode states");
    }
    Classification out;
    bool ppt = true;
    for (int mode = 1; mode <= 3; ++mode) {
        const double eig = ppt_min_eigenvalue(gamma, mode);
        out.ppt_min_eig[mode - 1] = eig;
        ppt = ppt && eig >= -tol;
        out.marginal = out.marginal || std::abs(eig) <= tol;
    }
    if (!ppt) {
        out.cls = SeparabilityClass::FullyInseparable;
        return out;
    }
    out.feasibility = fully_separable_test(schur_complements(gamma), tol);
    out.marginal = out.marginal || out.feasibility->marginal;
    out.cls = out.feasibility->feasible ? SeparabilityClass::FullySeparable : SeparabilityClass::Biseparable;
    return out;
}

CovarianceMatrix family_gamma(const SymmetricFamily& family) {
    SymmetricEntries entries = symmetric_entries(family);
    if (!entries.finite()) {
        entries = capped_entries(entries, kGrowingModeCap);
    }
    return build_symmetric_gamma(entries);
}

Classification classify_family(const SymmetricFamily& family, double tol) {
    return classify(family_gamma(family), tol);
}

Classification closed_form_class(double zeta0, double zeta1, double nprime, double tol) {
    const double n2 = nprime * nprime;
    const auto bisep = bisep_boundary(zeta0, zeta1);
    const double full = fully_sep_boundary(zeta0, zeta1);
    Classification out;
    const bool ppt = !bisep || n2 >= *bisep - tol;
    out.marginal = (bisep && std::abs(n2 - *bisep) <= tol) || std::abs(n2 - full) <= tol;
    if (!ppt) {
        out.cls = SeparabilityClass::FullyInseparable;
    } else if (n2 >= full - tol) {
        out.cls = SeparabilityClass::FullySeparable;
    } else {
        out.cls = SeparabilityClass::Biseparable;
    }
    return out;
}

}  // namespace cvsep
