#pragma once

// Three-class separability of three-mode Gaussian states: fully
// inseparable (some single-mode partial transpose is unphysical),
// biseparable (PPT across every single mode, yet not fully separable) and
// fully separable.
//
// Full separability of a PPT state is decided through the Schur complements
//   K  = A - C (B - iJ)^-1 C^T,   K~ = A - C (B - iJ~)^-1 C^T
// of the mode-1 block A against the mode-2,3 block B: the state is fully
// separable iff some pure single-mode covariance
//   a(y, z) = [[x + y, z], [z, x - y]],  x = sqrt(1 + y^2 + z^2)
// fits under both, i.e.
//   min(tr K, tr K~) >= 2x,
//   det K + 1 + L.(y, z) >= x tr K,    L = (u - w, 2 Re v),
//   det K~ + 1 + L~.(y, z) >= x tr K~,
// with K = [[u, v], [v^*, w]] and likewise for K~.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "cvsep/core.hpp"
#include "cvsep/evolution.hpp"

namespace cvsep {

using Matrix2c = Eigen::Matrix2cd;

enum class SeparabilityClass { FullyInseparable = 0, Biseparable = 1, FullySeparable = 2 };

std::string_view to_string(SeparabilityClass c) noexcept;

struct SchurPair {
    Matrix2c k;
    Matrix2c k_tilde;

    double u() const { return k(0, 0).real(); }
    Complex v() const { return k(0, 1); }
    double w() const { return k(1, 1).real(); }
    double u_tilde() const { return k_tilde(0, 0).real(); }
    Complex v_tilde() const { return k_tilde(0, 1); }
    double w_tilde() const { return k_tilde(1, 1).real(); }
    Eigen::Vector2d l() const { return {u() - w(), 2.0 * v().real()}; }
    Eigen::Vector2d l_tilde() const { return {u_tilde() - w_tilde(), 2.0 * v_tilde().real()}; }
};

// The scalar data the full-separability inequalities depend on.
struct FeasibilityProblem {
    double tr_k = 0.0, tr_k_tilde = 0.0;
    double det_k = 0.0, det_k_tilde = 0.0;
    Eigen::Vector2d l = Eigen::Vector2d::Zero();
    Eigen::Vector2d l_tilde = Eigen::Vector2d::Zero();

    static FeasibilityProblem from(const SchurPair& pair);

    // Slacks of the disk and the two ellipse inequalities at (y, z).
    std::array<double, 3> slacks(double y, double z) const;
    double min_slack(double y, double z) const;
};

struct FeasibilityResult {
    bool feasible = false;
    bool marginal = false;
    // Largest achievable minimum slack (negative when infeasible).
    double margin = 0.0;
    std::optional<std::pair<double, double>> witness;
    // True when the Re v = Re v~ = 0 reduction was used, false for the grid
    // fallback.
    bool analytic = false;
};

// Point where the boundary curves
//   det K + 1 + (u - w) y = (u + w) x,  det K~ + 1 + (u~ - w~) y = (u~ + w~) x
// cross, treating (x, y) as free; the curves meet in the (y, z) plane iff
// x >= sqrt(1 + y^2).
struct CurveCrossing {
    double x = 0.0;
    double y = 0.0;
    bool exists = false;
};

// Gamma is partitioned at mode 1. Throws SingularityError if B - iJ or
// B - iJ~ has condition number above 1e12.
SchurPair schur_complements(const CovarianceMatrix& gamma);

// Requires (but does not check) that gamma is PPT across all single modes.
// Uses the z = 0 reduction when |Re v|, |Re v~| <= 1e-10 max(1, |K|), and the
// grid search of the oracles module otherwise.
FeasibilityResult fully_separable_test(const SchurPair& pair, double tol = kDefaultTolerance);

std::optional<CurveCrossing> curve_crossing(const SchurPair& pair);

// min eig(Lambda_j gamma Lambda_j + iJ).
double ppt_min_eigenvalue(const CovarianceMatrix& gamma, int mode);
bool ppt_test(const CovarianceMatrix& gamma, int mode, double tol = kDefaultTolerance);

// 1 - (a'b' + 8b'c' + 8a'd' + c'd')/9 + a'b'c'd'; PPT across any one mode of
// the symmetric family iff non-negative. Throws InvalidArgument on infinite
// primed entries.
double ppt_symmetric_expression(const SymmetricEntries& e);
bool ppt_symmetric_condition(const SymmetricEntries& e);

// Finite time: -cd[(a-c)(b+2d)-1][(b-d)(a+2c)-1]; asymptotic entries:
// (a'd'-1)(c'b'-1). Non-negative iff the ellipse boundaries intersect.
double intersection_expression(const SymmetricEntries& e);
bool intersection_condition(const SymmetricEntries& e);

// Critical n'^2 for full separability of the t' -> infinity state:
// (1+zeta0)(1-zeta1) if zeta0 > zeta1 else (1-zeta0)(1+zeta1).
double fully_sep_boundary(double zeta0, double zeta1);

// Critical n'^2 for biseparability (PPT) of the t' -> infinity state, or
// nullopt where no noise is needed in any case (both zetas beyond +1 or both
// beyond -1). On a |zeta| = 1 seam all adjacent pieces are evaluated; if they
// disagree by more than 1e-9 InconsistencyError is thrown.
std::optional<double> bisep_boundary(double zeta0, double zeta1);

// The same boundaries written in the amplification ratios (eta0', eta1').
// The biseparable form is the weak-amplification piece only.
double fully_sep_boundary_eta(double eta0p, double eta1p);
double bisep_weak_boundary_eta(double eta0p, double eta1p);

struct Classification {
    SeparabilityClass cls = SeparabilityClass::FullyInseparable;
    bool marginal = false;
    std::array<double, 3> ppt_min_eig{};
    std::optional<FeasibilityResult> feasibility;
};

Classification classify(const CovarianceMatrix& gamma, double tol = kDefaultTolerance);

// Primed entries standing in for +inf when classifying an asymptotic state
// with a growing quadrature.
inline constexpr double kGrowingModeCap = 1e6;

// Entries -> gamma (asymptotic growing modes capped) -> classify.
CovarianceMatrix family_gamma(const SymmetricFamily& family);
Classification classify_family(const SymmetricFamily& family, double tol = kDefaultTolerance);

// Class of the asymptotic family read off the closed-form boundaries;
// marginal when n'^2 is within tol of either boundary.
Classification closed_form_class(double zeta0, double zeta1, double nprime, double tol = kDefaultTolerance);

}  // namespace cvsep
