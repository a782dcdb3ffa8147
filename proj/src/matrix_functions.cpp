#include "cvsep/matrix_functions.hpp"

#include <cmath>

#include "cvsep/errors.hpp"

namespace cvsep {

namespace {

double one_norm(const CMatrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

}  // namespace

CMatrix matrix_exponential(const CMatrix& a) {
    if (a.rows() != a.cols()) {
        throw InvalidArgument("matrix exponential needs a square matrix");
    }
    if (!a.allFinite()) {
        throw InvalidArgument("matrix exponential of non-finite matrix");
    }
    const auto n = a.rows();
    const double norm = one_norm(a);
    int squarings = 0;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    }
    const CMatrix scaled = a / std::ldexp(1.0, squarings);

    CMatrix sum = CMatrix::Identity(n, n);
    CMatrix term = CMatrix::Identity(n, n);
    for (int k = 1; k <= 40; ++k) {
        term = term * scaled / static_cast<double>(k);
        sum += term;
        if (one_norm(term) <= 1e-18 * one_norm(sum)) {
            break;
        }
    }
    for (int i = 0; i < squarings; ++i) {
        sum = sum * sum;
    }
    return sum;
}

HyperbolicSeries hyperbolic_series(const CMatrix& xi, double rel_tol, int max_terms) {
    if (xi.rows() != xi.cols()) {
        throw InvalidArgument("hyperbolic series needs a square matrix");
    }
    const auto n = xi.rows();
    const CMatrix left = xi.conjugate() * xi;   // xi^* xi, drives the cosh series
    const CMatrix right = xi * xi.conjugate();  // xi xi^*, drives the sinh series

    HyperbolicSeries out;
    CMatrix cosh_term = CMatrix::Identity(n, n);
    CMatrix sinh_term = xi;
    out.cosh_conj = cosh_term;
    out.sinh_over = sinh_term;
    for (int k = 1; k < max_terms; ++k) {
        const double kk = static_cast<double>(k);
        cosh_term = cosh_term * left / ((2.0 * kk - 1.0) * (2.0 * kk));
        sinh_term = right * sinh_term / ((2.0 * kk) * (2.0 * kk + 1.0));
        out.cosh_conj += cosh_term;
        out.sinh_over += sinh_term;
        const double c = cosh_term.norm();
        const double s = sinh_term.norm();
        if (c <= rel_tol * out.cosh_conj.norm() && s <= rel_tol * std::max(out.sinh_over.norm(), 1e-300)) {
            out.terms = k + 1;
            return out;
        }
        if (!std::isfinite(c) || !std::isfinite(s)) {
            break;
        }
    }
    throw NumericalFailure("matrix cosh/sinh series did not converge within " + std::to_string(max_terms) +
                           " terms");
}

}  // namespace cvsep
