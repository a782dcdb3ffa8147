#pragma once

// Brute-force verifiers kept independent of the closed forms they check:
// fixed-step RK4 for the propagator and covariance ODEs, a refining grid
// search for full-separability witnesses, and bisection for boundaries.

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "cvsep/core.hpp"
#include "cvsep/evolution.hpp"
#include "cvsep/separability.hpp"

namespace cvsep::oracles {

struct OdeConfig {
    // Upper bound on the step; the horizon is split into max(ceil(t/dt), 10)
    // equal steps.
    double dt = 1e-3;
};

// dM/dt = -eta^* N - Gamma M/2, dN/dt = -eta M - Gamma N/2 from (I, 0).
PropagatorPair rk4_propagator(const AmplifierMatrix& eta, const BathParams& bath, double t,
                              const OdeConfig& cfg = {});

// Quadrature covariance under d gamma/dt = A gamma + gamma A^T + D, with the
// drift A read from da/dt = eta a^dagger - Gamma a/2 and D = diag(Gamma n').
// Shares no code with the characteristic-function solution.
CovarianceMatrix rk4_covariance(const AmplifierMatrix& eta, const BathParams& bath,
                                const CovarianceMatrix& initial, double t, const OdeConfig& cfg = {});

struct GridConfig {
    int resolution = 65;  // points per axis, >= 64
    int levels = 12;      // refinement levels, >= 3
    bool stop_when_feasible = true;
};

struct GridResult {
    bool feasible = false;
    std::optional<std::pair<double, double>> witness;
    double best_slack = 0.0;
    // Best slack after each level; non-decreasing.
    std::vector<double> level_best;
};

// Searches the disk min(tr K, tr K~) >= 2 sqrt(1 + y^2 + z^2) and zooms on
// the cell of largest minimum slack. Feasible when a point reaches slack
// >= -1e-12.
GridResult grid_feasibility(const SchurPair& pair, const GridConfig& cfg = {});

inline constexpr double kFeasibilitySlack = -1e-12;

// Predicate on n'^2 whose value changes exactly once across the bracket.
using BoundaryPredicate = std::function<bool(double)>;

// Locates the switch of `predicate` in [lo, hi] to within `abs_tol`. Throws
// BracketError if predicate(lo) == predicate(hi).
double boundary_bisection(const BoundaryPredicate& predicate, double lo, double hi, double abs_tol = 1e-6);

enum class BoundaryKind { FullySeparable, Ppt };

// classify_family at fixed (zeta0, zeta1, t'), as a predicate on n'^2.
BoundaryPredicate family_predicate(double zeta0, double zeta1, double tprime, BoundaryKind kind,
                                   double tol = kDefaultTolerance);

// Bracket [1, hi] with hi doubled from 2 until the predicate holds, then
// bisection. Throws BracketError when the predicate already holds at
// n'^2 = 1 or never holds below 2^40.
double family_boundary(double zeta0, double zeta1, double tprime, BoundaryKind kind,
                       double abs_tol = 1e-6);

}  // namespace cvsep::oracles
