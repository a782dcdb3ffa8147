#pragma once

#include "cvsep/core.hpp"

namespace cvsep {

// exp(A) by scaling and squaring with a Taylor core; relative accuracy about
// 1e-13 for the small, well-conditioned matrices used here.
CMatrix matrix_exponential(const CMatrix& a);

struct HyperbolicSeries {
    CMatrix cosh_conj;  // sum_k (xi^* xi)^k / (2k)!
    CMatrix sinh_over;  // sum_k (xi xi^*)^k xi / (2k+1)!
    int terms = 0;
};

// Matrix cosh and sinh(|xi|)/|xi| xi of a complex symmetric argument,
// summed until both new terms fall below `rel_tol` relative to the running
// sums. Throws NumericalFailure past `max_terms`.
HyperbolicSeries hyperbolic_series(const CMatrix& xi, double rel_tol = 1e-16, int max_terms = 200);

}  // namespace cvsep
