#pragma once

// Covariance-matrix conventions shared by every other module.
//
// Quadratures are ordered interleaved, (x1, p1, x2, p2, ..., xs, ps), and
// normalized so that the vacuum covariance matrix is the identity. A state is
// physical iff gamma + iJ is positive semidefinite.

#include <complex>

#include <Eigen/Dense>

namespace cvsep {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultTolerance = 1e-9;

class CovarianceMatrix {
public:
    // Symmetrizes (m + m^T)/2. Throws InvalidArgument if m is not square with
    // even dimension, has non-finite entries, or is asymmetric beyond 1e-12
    // (relative to its largest entry when that exceeds one).
    explicit CovarianceMatrix(const Matrix& m);

    static CovarianceMatrix identity(int modes);

    int modes() const noexcept { return static_cast<int>(entries_.rows() / 2); }
    int dimension() const noexcept { return static_cast<int>(entries_.rows()); }
    const Matrix& matrix() const noexcept { return entries_; }
    double operator()(int row, int col) const { return entries_(row, col); }

private:
    Matrix entries_;
};

class SymplecticForm {
public:
    // s diagonal blocks [[0,-1],[1,0]].
    explicit SymplecticForm(int modes);

    int modes() const noexcept { return static_cast<int>(entries_.rows() / 2); }
    const Matrix& matrix() const noexcept { return entries_; }

private:
    Matrix entries_;
};

SymplecticForm symplectic_form(int modes);

// J (+) (-J) on two modes: the symplectic form after transposing the second
// mode.
Matrix transposed_two_mode_form();

// Lambda_j = diag(1, .., -1, .., 1) flipping the momentum of `mode`
// (1-based).
class PartialTransposition {
public:
    PartialTransposition(int mode, int total_modes);

    int mode() const noexcept { return mode_; }
    const Vector& signs() const noexcept { return signs_; }
    Matrix matrix() const { return signs_.asDiagonal(); }

private:
    int mode_;
    Vector signs_;
};

CovarianceMatrix partial_transpose(const CovarianceMatrix& gamma, int mode);

// Smallest eigenvalue of a Hermitian matrix. Throws InvalidArgument if
// max|H - H^dagger| exceeds 1e-12 * max(1, max|H|).
double min_eigenvalue_hermitian(const CMatrix& h);

// gamma + iJ as a complex Hermitian matrix.
CMatrix with_symplectic(const Matrix& gamma, const Matrix& form);

bool is_valid_cm(const CovarianceMatrix& gamma, double tol = kDefaultTolerance);

}  // namespace cvsep
