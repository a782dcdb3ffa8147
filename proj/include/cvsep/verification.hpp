#pragma once

// Oracle-equivalence suites. Each suite compares a closed form against an
// independent computation and reports its largest deviation; the CLI
// `verify` command and the acceptance binary both run them.

#include <string>
#include <vector>

namespace cvsep::verification {

enum class Level { Quick, Full };

struct SuiteResult {
    std::string name;
    bool passed = true;
    std::vector<std::string> details;   // measured values, one per line
    std::vector<std::string> failures;  // individual failing points
    double seconds = 0.0;

    void fail(std::string what);
};

// Closed-form propagators against RK4 (dt = 1e-3): equal damping and real
// eta with unequal damping, t in {0.5, 1, 3}.
SuiteResult propagator_suite(Level level);

// Stationary-equation residuals and the symmetric closed-form coefficients
// against the linear solve, |zeta| <= 0.9.
SuiteResult steady_suite(Level level);

// vacuum -> general evolution -> real CM against the family formulas,
// including asymptotic points for |zeta| < 1.
SuiteResult pipeline_suite(Level level);

// Sign of the symmetric PPT polynomial against min eig(gamma~_1 + iJ) on a
// 20x20x5 (zeta0, zeta1, n') grid at t' in {0.5, 2, inf}.
SuiteResult ppt_algebra_suite(Level level);

// Analytic feasibility reduction against the grid search on the PPT,
// non-marginal points of the same sweep.
SuiteResult feasibility_suite(Level level);

// Fully separable boundary formula against bisection over classify.
SuiteResult fullsep_boundary_suite(Level level);

// Biseparable boundary values (weak and strong pieces), each confirmed by
// bisection over the PPT predicate.
SuiteResult bisep_boundary_suite(Level level);

// FullyInseparable / Biseparable / FullySeparable at (0.8, -0.4), with the
// analytic and grid feasibility tests agreeing.
SuiteResult three_class_suite();

// Noiseless boundary curves: containment, small gap, runtime.
SuiteResult figure3_suite(int jobs);

// Class never moves toward entanglement along rays of increasing n'.
SuiteResult monotonicity_suite(Level level);

std::vector<SuiteResult> run_all(Level level, int jobs);

std::string format(const SuiteResult& result);

}  // namespace cvsep::verification
