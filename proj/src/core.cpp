#include "cvsep/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cvsep/errors.hpp"

namespace cvsep {

namespace {

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

CovarianceMatrix::CovarianceMatrix(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0 || m.rows() % 2 != 0) {
        throw InvalidArgument("covariance matrix must be square with positive even dimension");
    }
    if (!m.allFinite()) {
        throw InvalidArgument("covariance matrix has non-finite entries");
    }
    const double asym = max_abs(m - m.transpose());
    if (asym > 1e-12 * std::max(1.0, max_abs(m))) {
        throw InvalidArgument("covariance matrix is not symmetric (asymmetry " + std::to_string(asym) + ")");
    }
    entries_ = 0.5 * (m + m.transpose());
}

CovarianceMatrix CovarianceMatrix::identity(int modes) {
    if (modes < 1) {
        throw InvalidArgument("mode count must be positive");
    }
    return CovarianceMatrix(Matrix::Identity(2 * modes, 2 * modes));
}

SymplecticForm::SymplecticForm(int modes) {
    if (modes < 1) {
        throw InvalidArgument("symplectic form needs at least one mode");
    }
    entries_ = Matrix::Zero(2 * modes, 2 * modes);
    for (int k = 0; k < modes; ++k) {
        entries_(2 * k, 2 * k + 1) = -1.0;
        entries_(2 * k + 1, 2 * k) = 1.0;
    }
}

SymplecticForm symplectic_form(int modes) { return SymplecticForm(modes); }

Matrix transposed_two_mode_form() {
    Matrix form = symplectic_form(2).matrix();
    form.block(2, 2, 2, 2) *= -1.0;
    return form;
}

PartialTransposition::PartialTransposition(int mode, int total_modes) : mode_(mode) {
    if (total_modes < 1 || mode < 1 || mode > total_modes) {
        throw InvalidArgument("partial transposition mode " + std::to_string(mode) + " out of range 1.." +
                              std::to_string(total_modes));
    }
    signs_ = Vector::Ones(2 * total_modes);
    signs_(2 * (mode - 1) + 1) = -1.0;
}

CovarianceMatrix partial_transpose(const CovarianceMatrix& gamma, int mode) {
    const PartialTransposition pt(mode, gamma.modes());
    const Vector& s = pt.signs();
    // Lambda gamma Lambda, entrywise: signs are exactly +-1 so no rounding.
    Matrix out = gamma.matrix();
    for (int i = 0; i < out.rows(); ++i) {
        for (int j = 0; j < out.cols(); ++j) {
            out(i, j) *= s(i) * s(j);
        }
    }
    return CovarianceMatrix(out);
}

double min_eigenvalue_hermitian(const CMatrix& h) {
    if (h.rows() != h.cols() || h.rows() == 0) {
        throw InvalidArgument("Hermitian eigenvalue input must be square and non-empty");
    }
    const double scale = h.cwiseAbs().maxCoeff();
    const double defect = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (!std::isfinite(scale) || defect > 1e-12 * std::max(1.0, scale)) {
        throw InvalidArgument("matrix is not Hermitian within tolerance");
    }
    const CMatrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("Hermitian eigenvalue solver did not converge");
    }
    return solver.eigenvalues().minCoeff();
}

CMatrix with_symplectic(const Matrix& gamma, const Matrix& form) {
    if (gamma.rows() != form.rows() || gamma.cols() != form.cols()) {
        throw InvalidArgument("covariance matrix and symplectic form differ in shape");
    }
    CMatrix out(gamma.rows(), gamma.cols());
    out.real() = gamma;
    out.imag() = form;
    return out;
}

bool is_valid_cm(const CovarianceMatrix& gamma, double tol) {
    const Matrix form = symplectic_form(gamma.modes()).matrix();
    return min_eigenvalue_hermitian(with_symplectic(gamma.matrix(), form)) >= -tol;
}

}  // namespace cvsep
