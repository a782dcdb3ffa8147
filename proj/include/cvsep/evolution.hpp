#pragma once

// Gaussian moment dynamics under parametric amplification, amplitude damping
// and thermal noise.
//
// The characteristic function keeps the form
//   chi(mu, t) = chi(nu, 0) exp{ 1/4 (nu,-nu^*) G (nu^*,-nu)^T
//                               - 1/4 (mu,-mu^*) G (mu^*,-mu)^T },
// with nu = mu M + mu^* N and G = [[alpha, beta^*], [beta, alpha^*]] the
// stationary complex moments. M and N solve
//   dM/dt = -eta^* N - Gamma M / 2,   dN/dt = -eta M - Gamma N / 2,
// from M = I, N = 0.

#include <array>
#include <limits>
#include <optional>

#include "cvsep/core.hpp"

namespace cvsep {

// Bath squeezing source in the stationary amplification equation. Only a
// thermal (unsqueezed) bath is modelled.
inline constexpr double kBathSqueezing = 0.0;

// Complex symmetric pair-creation strengths eta (inverse time).
class AmplifierMatrix {
public:
    // Throws InvalidArgument unless eta is square, finite and symmetric within
    // 1e-12; the stored matrix is exactly symmetric.
    explicit AmplifierMatrix(const CMatrix& eta);
    explicit AmplifierMatrix(const Matrix& eta);

    // eta = eta0 I + eta1 S on three modes, S the all-ones off-diagonal matrix.
    static AmplifierMatrix symmetric(double eta0, double eta1);

    int modes() const noexcept { return static_cast<int>(eta_.rows()); }
    const CMatrix& matrix() const noexcept { return eta_; }
    bool is_real() const noexcept { return is_real_; }

private:
    CMatrix eta_;
    bool is_real_;
};

// Diagonal damping rates Gamma_j >= 0 and thermal occupations nbar_j >= 0.
class BathParams {
public:
    BathParams(const Vector& damping, const Vector& occupation);
    static BathParams uniform(int modes, double damping, double occupation);

    int modes() const noexcept { return static_cast<int>(damping_.size()); }
    const Vector& damping() const noexcept { return damping_; }
    const Vector& occupation() const noexcept { return occupation_; }
    // n' = 2 nbar + 1 per mode.
    Vector noise_factor() const { return 2.0 * occupation_.array() + 1.0; }
    // The common rate if all modes are damped equally.
    std::optional<double> equal_damping() const;

private:
    Vector damping_;
    Vector occupation_;
};

struct PropagatorPair {
    CMatrix m;
    CMatrix n;

    static PropagatorPair identity(int modes);
};

// Hermitian alpha and complex symmetric beta.
struct ComplexMoments {
    CMatrix alpha;
    CMatrix beta;

    static ComplexMoments vacuum(int modes);
    int modes() const noexcept { return static_cast<int>(alpha.rows()); }
    // Throws InvalidArgument if shapes differ or alpha/beta violate their
    // symmetry beyond `tol` (relative to the largest entry).
    void validate(double tol = 1e-10) const;
    // The 2s x 2s block form [[alpha, beta^*], [beta, alpha^*]].
    CMatrix block() const;
};

// M = e^{-Gamma0 t/2} cosh^*(|eta| t), N = -e^{-Gamma0 t/2} sinh(|eta| t)/|eta| eta.
PropagatorPair propagator_equal_damping(const AmplifierMatrix& eta, double damping, double t);

// Real eta with arbitrary diagonal damping:
// M = (exp(-eta t - Gamma t/2) + exp(eta t - Gamma t/2)) / 2,
// N = (exp(-eta t - Gamma t/2) - exp(eta t - Gamma t/2)) / 2.
PropagatorPair propagator_real_eta(const AmplifierMatrix& eta, const BathParams& bath, double t);

// Stationary (alpha, beta). Throws ResonanceError when the drift has a pair
// of eigenvalues summing to (numerically) zero, which includes any
// |2 eta_k / Gamma| = 1.
ComplexMoments steady_alpha_beta(const AmplifierMatrix& eta, const BathParams& bath);

// Largest entry of the two stationary-equation residual matrices.
double steady_residual(const AmplifierMatrix& eta, const BathParams& bath, const ComplexMoments& moments);

// gamma_c(t) = T (gamma_c(0) - G) T^dagger + G with T = [[M, -N^*], [-N, M^*]].
ComplexMoments evolve_complex_cm(const ComplexMoments& initial, const PropagatorPair& propagator,
                                 const ComplexMoments& steady);

// Real quadrature covariance: x-x block Re(alpha+beta), p-p block
// Re(alpha-beta), x_j-p_k entry Im(alpha+beta)_jk, interleaved.
CovarianceMatrix complex_to_real_cm(const ComplexMoments& moments);

// ---------------------------------------------------------------------------
// Fully symmetric three-mode family (equal damping Gamma, equal noise, real
// eta = eta0 I + eta1 S, vacuum initial state).

inline constexpr double kAsymptoticTime = std::numeric_limits<double>::infinity();

struct SymmetricFamily {
    double eta0p = 0.0;   // 2 eta0 / Gamma
    double eta1p = 0.0;   // 2 eta1 / Gamma
    double nprime = 1.0;  // 2 nbar + 1
    double tprime = 0.0;  // Gamma t / 2, or kAsymptoticTime

    static SymmetricFamily from_nbar(double eta0p, double eta1p, double nbar, double tprime);
    static SymmetricFamily from_zeta(double zeta0, double zeta1, double nprime, double tprime);

    double zeta0() const noexcept { return eta0p + 2.0 * eta1p; }
    double zeta1() const noexcept { return eta0p - eta1p; }
    bool asymptotic() const noexcept { return tprime == kAsymptoticTime; }
    // Throws InvalidArgument on nprime < 1, negative/NaN tprime or non-finite
    // amplification.
    void validate() const;
};

// Covariance coefficients of the symmetric family. a, b are the x and p
// variances of each mode, c and d the x-x and p-p cross correlations. The
// primed values are the eigenvalues of the x block (a' on the symmetric mode,
// c' twice) and p block (b', d'). They already contain n', so the vacuum has
// a = b = 1.
//
// In the asymptotic evaluation a growing mode has a primed entry of +inf;
// the unprimed entries are then not all determined and finite() is false.
struct SymmetricEntries {
    double a = 1.0, b = 1.0, c = 0.0, d = 0.0;
    double a_p = 1.0, b_p = 1.0, c_p = 0.0, d_p = 0.0;
    bool asymptotic = false;

    bool finite() const noexcept;
    bool primed_finite() const noexcept;
    std::array<double, 4> primed() const noexcept { return {a_p, b_p, c_p, d_p}; }
};

// Throws ResonanceError when zeta0 or zeta1 is +-1 (within 1e-12).
SymmetricEntries symmetric_entries(const SymmetricFamily& family);

// Entries rebuilt from primed values, with +inf primed values replaced by
// `cap`. Used to classify limit states that have a growing quadrature.
SymmetricEntries capped_entries(const SymmetricEntries& entries, double cap);

// 6x6 gamma: diagonal (a, b) per mode, x-x cross c, p-p cross d, all times
// `scale`.
CovarianceMatrix build_symmetric_gamma(const SymmetricEntries& entries, double scale = 1.0);

// Closed-form stationary moments alpha = n'(alpha1 I + alpha2 S),
// beta = n'(beta1 I + beta2 S).
struct SymmetricSteadyCoefficients {
    double alpha1, alpha2, beta1, beta2;
};
SymmetricSteadyCoefficients symmetric_steady_coefficients(double zeta0, double zeta1);
ComplexMoments symmetric_steady_moments(double zeta0, double zeta1, double nprime);

}  // namespace cvsep
