#include "cvsep/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "cvsep/errors.hpp"
#include "cvsep/matrix_functions.hpp"

namespace cvsep {

namespace {

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Matrix all_ones_offdiag(int modes) {
    return Matrix::Ones(modes, modes) - Matrix::Identity(modes, modes);
}

void require_modes(int expected, int actual, const char* what) {
    if (expected != actual) {
        std::ostringstream msg;
        msg << what << ": expected " << expected << " modes, got " << actual;
        throw InvalidArgument(msg.str());
    }
}

}  // namespace

// --- AmplifierMatrix -------------------------------------------------------

AmplifierMatrix::AmplifierMatrix(const CMatrix& eta) {
    if (eta.rows() != eta.cols() || eta.rows() == 0) {
        throw InvalidArgument("amplifier matrix must be square and non-empty");
    }
    if (!eta.allFinite()) {
        throw InvalidArgument("amplifier matrix has non-finite entries");
    }
    if (max_abs(eta - eta.transpose()) > 1e-12 * std::max(1.0, max_abs(eta))) {
        throw InvalidArgument("amplifier matrix must be symmetric");
    }
    eta_ = 0.5 * (eta + eta.transpose());
    is_real_ = eta_.imag().cwiseAbs().maxCoeff() == 0.0;
}

AmplifierMatrix::AmplifierMatrix(const Matrix& eta) : AmplifierMatrix(CMatrix(eta.cast<Complex>())) {}

AmplifierMatrix AmplifierMatrix::symmetric(double eta0, double eta1) {
    const Matrix eta = eta0 * Matrix::Identity(3, 3) + eta1 * all_ones_offdiag(3);
    return AmplifierMatrix(eta);
}

// --- BathParams ------------------------------------------------------------

BathParams::BathParams(const Vector& damping, const Vector& occupation)
    : damping_(damping), occupation_(occupation) {
    if (damping.size() == 0 || damping.size() != occupation.size()) {
        throw InvalidArgument("damping and occupation vectors must be non-empty and of equal length");
    }
    if (!damping.allFinite() || !occupation.allFinite() || damping.minCoeff() < 0.0 ||
        occupation.minCoeff() < 0.0) {
        throw InvalidArgument("damping rates and thermal occupations must be finite and non-negative");
    }
}

BathParams BathParams::uniform(int modes, double damping, double occupation) {
    if (modes < 1) {
        throw InvalidArgument("bath needs at least one mode");
    }
    return BathParams(Vector::Constant(modes, damping), Vector::Constant(modes, occupation));
}

std::optional<double> BathParams::equal_damping() const {
    if (damping_.maxCoeff() == damping_.minCoeff()) {
        return damping_(0);
    }
    return std::nullopt;
}

// --- moments ---------------------------------------------------------------

PropagatorPair PropagatorPair::identity(int modes) {
    return {CMatrix::Identity(modes, modes), CMatrix::Zero(modes, modes)};
}

ComplexMoments ComplexMoments::vacuum(int modes) {
    return {CMatrix::Identity(modes, modes), CMatrix::Zero(modes, modes)};
}

void ComplexMoments::validate(double tol) const {
    if (alpha.rows() != alpha.cols() || beta.rows() != beta.cols() || alpha.rows() != beta.rows() ||
        alpha.rows() == 0) {
        throw InvalidArgument("complex moments must be square blocks of equal size");
    }
    const double scale = std::max({1.0, max_abs(alpha), max_abs(beta)});
    if (max_abs(alpha - alpha.adjoint()) > tol * scale) {
        throw InvalidArgument("alpha must be Hermitian");
    }
    if (max_abs(beta - beta.transpose()) > tol * scale) {
        throw InvalidArgument("beta must be symmetric");
    }
}

CMatrix ComplexMoments::block() const {
    const auto s = alpha.rows();
    CMatrix g(2 * s, 2 * s);
    g.topLeftCorner(s, s) = alpha;
    g.topRightCorner(s, s) = beta.conjugate();
    g.bottomLeftCorner(s, s) = beta;
    g.bottomRightCorner(s, s) = alpha.conjugate();
    return g;
}

// --- propagators -----------------------------------------------------------

PropagatorPair propagator_equal_damping(const AmplifierMatrix& eta, double damping, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw InvalidArgument("propagation time must be finite and non-negative");
    }
    if (!(damping >= 0.0) || !std::isfinite(damping)) {
        throw InvalidArgument("damping rate must be finite and non-negative");
    }
    const HyperbolicSeries series = hyperbolic_series(eta.matrix() * t);
    const double decay = std::exp(-0.5 * damping * t);
    return {decay * series.cosh_conj, -decay * series.sinh_over};
}

PropagatorPair propagator_real_eta(const AmplifierMatrix& eta, const BathParams& bath, double t) {
    if (!eta.is_real()) {
        throw InvalidArgument("propagator_real_eta requires a real amplifier matrix");
    }
    require_modes(eta.modes(), bath.modes(), "propagator_real_eta");
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw InvalidArgument("propagation time must be finite and non-negative");
    }
    const CMatrix half_gamma = (0.5 * bath.damping()).cast<Complex>().asDiagonal();
    const CMatrix plus = matrix_exponential((-eta.matrix() - half_gamma) * t);
    const CMatrix minus = matrix_exponential((eta.matrix() - half_gamma) * t);
    return {0.5 * (plus + minus), 0.5 * (plus - minus)};
}

// --- stationary moments ----------------------------------------------------

namespace {

struct SteadyResidual {
    CMatrix amplification;  // 2 eta alpha + 2 alpha^* eta - Gamma beta - beta Gamma + Gamma w + w Gamma
    CMatrix damping;        // Gamma alpha + alpha Gamma - 2 eta^* beta - 2 beta^* eta - Gamma n' - n' Gamma
};

SteadyResidual steady_equations(const AmplifierMatrix& eta, const BathParams& bath, const CMatrix& alpha,
                                const CMatrix& beta, bool with_source) {
    const CMatrix& e = eta.matrix();
    const CMatrix gamma = bath.damping().cast<Complex>().asDiagonal();
    SteadyResidual r;
    r.amplification = 2.0 * e * alpha + 2.0 * alpha.conjugate() * e - gamma * beta - beta * gamma;
    r.damping = gamma * alpha + alpha * gamma - 2.0 * e.conjugate() * beta - 2.0 * beta.conjugate() * e;
    if (with_source) {
        r.amplification += 2.0 * kBathSqueezing * gamma;
        const CMatrix noise = bath.noise_factor().cast<Complex>().asDiagonal();
        r.damping -= gamma * noise + noise * gamma;
    }
    return r;
}

// Unknowns and equations flattened as [Re alpha, Im alpha, Re beta, Im beta]
// and [Re r_amp, Im r_amp, Re r_damp, Im r_damp], column-major.
Vector flatten(const CMatrix& a, const CMatrix& b) {
    const auto k = a.size();
    Vector v(4 * k);
    v.segment(0, k) = Eigen::Map<const Matrix>(a.real().eval().data(), k, 1);
    v.segment(k, k) = Eigen::Map<const Matrix>(a.imag().eval().data(), k, 1);
    v.segment(2 * k, k) = Eigen::Map<const Matrix>(b.real().eval().data(), k, 1);
    v.segment(3 * k, k) = Eigen::Map<const Matrix>(b.imag().eval().data(), k, 1);
    return v;
}

std::pair<CMatrix, CMatrix> unflatten(const Vector& v, int s) {
    const int k = s * s;
    CMatrix a(s, s), b(s, s);
    for (int idx = 0; idx < k; ++idx) {
        a(idx % s, idx / s) = Complex(v(idx), v(k + idx));
        b(idx % s, idx / s) = Complex(v(2 * k + idx), v(3 * k + idx));
    }
    return {a, b};
}

void check_resonance(const AmplifierMatrix& eta, const BathParams& bath) {
    const int s = eta.modes();
    CMatrix drift(2 * s, 2 * s);
    const CMatrix half_gamma = (0.5 * bath.damping()).cast<Complex>().asDiagonal();
    drift.topLeftCorner(s, s) = -half_gamma;
    drift.topRightCorner(s, s) = -eta.matrix().conjugate();
    drift.bottomLeftCorner(s, s) = -eta.matrix();
    drift.bottomRightCorner(s, s) = -half_gamma;
    Eigen::ComplexEigenSolver<CMatrix> solver(drift, false);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("drift eigenvalue solver did not converge");
    }
    const auto& lambda = solver.eigenvalues();
    const double scale = std::max(bath.damping().maxCoeff(), max_abs(eta.matrix()));
    double worst = std::numeric_limits<double>::infinity();
    Complex li, lj;
    for (int i = 0; i < lambda.size(); ++i) {
        for (int j = i; j < lambda.size(); ++j) {
            const double gap = std::abs(lambda(i) + lambda(j));
            if (gap < worst) {
                worst = gap;
                li = lambda(i);
                lj = lambda(j);
            }
        }
    }
    if (scale == 0.0 || worst <= 1e-9 * scale) {
        std::ostringstream msg;
        msg << "resonance: drift eigenvalues " << li << " and " << lj
            << " sum to zero, so amplification balances damping and no steady state exists";
        throw ResonanceError(msg.str());
    }
}

}  // namespace

ComplexMoments steady_alpha_beta(const AmplifierMatrix& eta, const BathParams& bath) {
    require_modes(eta.modes(), bath.modes(), "steady_alpha_beta");
    check_resonance(eta, bath);

    const int s = eta.modes();
    const int n = 4 * s * s;
    const CMatrix zero = CMatrix::Zero(s, s);
    const SteadyResidual r0 = steady_equations(eta, bath, zero, zero, true);
    const Vector offset = flatten(r0.amplification, r0.damping);

    Matrix system(n, n);
    for (int col = 0; col < n; ++col) {
        Vector unit = Vector::Zero(n);
        unit(col) = 1.0;
        const auto [a, b] = unflatten(unit, s);
        const SteadyResidual r = steady_equations(eta, bath, a, b, false);
        system.col(col) = flatten(r.amplification, r.damping);
    }
    const Eigen::FullPivLU<Matrix> lu(system);
    const Vector solution = lu.solve(-offset);
    auto [alpha, beta] = unflatten(solution, s);

    ComplexMoments out{0.5 * (alpha + alpha.adjoint()), 0.5 * (beta + beta.transpose())};
    const double residual = steady_residual(eta, bath, out);
    const double scale = std::max({1.0, max_abs(out.alpha), max_abs(out.beta)}) *
                         std::max({1.0, bath.damping().maxCoeff(), max_abs(eta.matrix())});
    if (!(residual <= 1e-8 * scale)) {
        throw NumericalFailure("stationary moment solve left residual " + std::to_string(residual));
    }
    return out;
}

double steady_residual(const AmplifierMatrix& eta, const BathParams& bath, const ComplexMoments& moments) {
    const SteadyResidual r = steady_equations(eta, bath, moments.alpha, moments.beta, true);
    return std::max(max_abs(r.amplification), max_abs(r.damping));
}

ComplexMoments evolve_complex_cm(const ComplexMoments& initial, const PropagatorPair& propagator,
                                 const ComplexMoments& steady) {
    initial.validate();
    steady.validate();
    const int s = initial.modes();
    if (steady.modes() != s || propagator.m.rows() != s || propagator.m.cols() != s ||
        propagator.n.rows() != s || propagator.n.cols() != s) {
        throw InvalidArgument("evolve_complex_cm: dimension mismatch");
    }
    CMatrix transfer(2 * s, 2 * s);
    transfer.topLeftCorner(s, s) = propagator.m;
    transfer.topRightCorner(s, s) = -propagator.n.conjugate();
    transfer.bottomLeftCorner(s, s) = -propagator.n;
    transfer.bottomRightCorner(s, s) = propagator.m.conjugate();

    const CMatrix fixed = steady.block();
    const CMatrix evolved = transfer * (initial.block() - fixed) * transfer.adjoint() + fixed;
    const CMatrix alpha = evolved.topLeftCorner(s, s);
    const CMatrix beta = evolved.bottomLeftCorner(s, s);
    return {0.5 * (alpha + alpha.adjoint()), 0.5 * (beta + beta.transpose())};
}

CovarianceMatrix complex_to_real_cm(const ComplexMoments& moments) {
    moments.validate();
    const int s = moments.modes();
    const CMatrix sum = moments.alpha + moments.beta;
    const CMatrix diff = moments.alpha - moments.beta;
    Matrix gamma(2 * s, 2 * s);
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
            gamma(2 * i, 2 * j) = sum(i, j).real();
            gamma(2 * i + 1, 2 * j + 1) = diff(i, j).real();
            gamma(2 * i, 2 * j + 1) = sum(i, j).imag();
            gamma(2 * i + 1, 2 * j) = sum(j, i).imag();
        }
    }
    return CovarianceMatrix(gamma);
}

// --- symmetric family ------------------------------------------------------

SymmetricFamily SymmetricFamily::from_nbar(double eta0p, double eta1p, double nbar, double tprime) {
    if (!(nbar >= 0.0)) {
        throw InvalidArgument("thermal occupation must be non-negative");
    }
    SymmetricFamily f{eta0p, eta1p, 2.0 * nbar + 1.0, tprime};
    f.validate();
    return f;
}

SymmetricFamily SymmetricFamily::from_zeta(double zeta0, double zeta1, double nprime, double tprime) {
    SymmetricFamily f{(zeta0 + 2.0 * zeta1) / 3.0, (zeta0 - zeta1) / 3.0, nprime, tprime};
    f.validate();
    return f;
}

void SymmetricFamily::validate() const {
    if (!std::isfinite(eta0p) || !std::isfinite(eta1p)) {
        throw InvalidArgument("amplification ratios must be finite");
    }
    if (!(nprime >= 1.0 - 1e-12) || !std::isfinite(nprime)) {
        throw InvalidArgument("noise factor n' = 2 nbar + 1 must be finite and at least 1");
    }
    if (!(tprime >= 0.0)) {
        throw InvalidArgument("rescaled time must be non-negative");
    }
}

bool SymmetricEntries::finite() const noexcept {
    return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d) && primed_finite();
}

bool SymmetricEntries::primed_finite() const noexcept {
    return std::isfinite(a_p) && std::isfinite(b_p) && std::isfinite(c_p) && std::isfinite(d_p);
}

namespace {

void require_off_resonance(double zeta, const char* name) {
    if (std::abs(std::abs(zeta) - 1.0) <= 1e-12) {
        std::ostringstream msg;
        msg << "resonance: " << name << " = " << zeta << " has |zeta| = 1 (amplification equals damping)";
        throw ResonanceError(msg.str());
    }
}

// One eigen-direction: exp(-2 k t')(1 - n'/k) + n'/k, with k = 1 -+ zeta.
double relaxed(double rate, double nprime, double tprime) {
    if (tprime == kAsymptoticTime) {
        return rate > 0.0 ? nprime / rate : std::numeric_limits<double>::infinity();
    }
    return std::exp(-2.0 * rate * tprime) * (1.0 - nprime / rate) + nprime / rate;
}

}  // namespace

SymmetricEntries symmetric_entries(const SymmetricFamily& family) {
    family.validate();
    const double z0 = family.zeta0();
    const double z1 = family.zeta1();
    require_off_resonance(z0, "zeta0");
    require_off_resonance(z1, "zeta1");
    const double n = family.nprime;
    const double t = family.tprime;

    SymmetricEntries e;
    e.asymptotic = family.asymptotic();
    e.a_p = relaxed(1.0 - z0, n, t);
    e.b_p = relaxed(1.0 + z0, n, t);
    e.c_p = relaxed(1.0 - z1, n, t);
    e.d_p = relaxed(1.0 + z1, n, t);

    if (e.asymptotic) {
        e.a = (e.a_p + 2.0 * e.c_p) / 3.0;
        e.c = (e.a_p - e.c_p) / 3.0;
        e.b = (e.b_p + 2.0 * e.d_p) / 3.0;
        e.d = (e.b_p - e.d_p) / 3.0;
        return e;
    }

    const double x0 = std::exp(2.0 * (z0 - 1.0) * t) * (1.0 - n / (1.0 - z0));
    const double x1 = std::exp(2.0 * (z1 - 1.0) * t) * (1.0 - n / (1.0 - z1));
    const double p0 = std::exp(-2.0 * (z0 + 1.0) * t) * (1.0 - n / (1.0 + z0));
    const double p1 = std::exp(-2.0 * (z1 + 1.0) * t) * (1.0 - n / (1.0 + z1));
    e.a = x0 / 3.0 + 2.0 * x1 / 3.0 + n / 3.0 * (1.0 / (1.0 - z0) + 2.0 / (1.0 - z1));
    e.b = p0 / 3.0 + 2.0 * p1 / 3.0 + n / 3.0 * (1.0 / (1.0 + z0) + 2.0 / (1.0 + z1));
    e.c = x0 / 3.0 - x1 / 3.0 + n / 3.0 * (1.0 / (1.0 - z0) - 1.0 / (1.0 - z1));
    e.d = p0 / 3.0 - p1 / 3.0 + n / 3.0 * (1.0 / (1.0 + z0) - 1.0 / (1.0 + z1));
    if (!e.finite()) {
        throw NumericalFailure("symmetric entries overflow at t' = " + std::to_string(t));
    }
    return e;
}

SymmetricEntries capped_entries(const SymmetricEntries& entries, double cap) {
    SymmetricEntries e = entries;
    auto clip = [cap](double v) { return std::isinf(v) && v > 0.0 ? cap : v; };
    e.a_p = clip(e.a_p);
    e.b_p = clip(e.b_p);
    e.c_p = clip(e.c_p);
    e.d_p = clip(e.d_p);
    e.a = (e.a_p + 2.0 * e.c_p) / 3.0;
    e.c = (e.a_p - e.c_p) / 3.0;
    e.b = (e.b_p + 2.0 * e.d_p) / 3.0;
    e.d = (e.b_p - e.d_p) / 3.0;
    return e;
}

CovarianceMatrix build_symmetric_gamma(const SymmetricEntries& e, double scale) {
    if (!std::isfinite(e.a) || !std::isfinite(e.b) || !std::isfinite(e.c) || !std::isfinite(e.d) ||
        !std::isfinite(scale)) {
        throw InvalidArgument("symmetric gamma needs finite entries");
    }
    Matrix g = Matrix::Zero(6, 6);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            g(2 * i, 2 * j) = i == j ? e.a : e.c;
            g(2 * i + 1, 2 * j + 1) = i == j ? e.b : e.d;
        }
    }
    return CovarianceMatrix(scale * g);
}

SymmetricSteadyCoefficients symmetric_steady_coefficients(double zeta0, double zeta1) {
    require_off_resonance(zeta0, "zeta0");
    require_off_resonance(zeta1, "zeta1");
    const double g0 = 1.0 / (1.0 - zeta0 * zeta0);
    const double g1 = 1.0 / (1.0 - zeta1 * zeta1);
    return {(g0 + 2.0 * g1) / 3.0, (g0 - g1) / 3.0, (zeta0 * g0 + 2.0 * zeta1 * g1) / 3.0,
            (zeta0 * g0 - zeta1 * g1) / 3.0};
}

ComplexMoments symmetric_steady_moments(double zeta0, double zeta1, double nprime) {
    const auto k = symmetric_steady_coefficients(zeta0, zeta1);
    const Matrix id = Matrix::Identity(3, 3);
    const Matrix s = all_ones_offdiag(3);
    const Matrix alpha = nprime * (k.alpha1 * id + k.alpha2 * s);
    const Matrix beta = nprime * (k.beta1 * id + k.beta2 * s);
    return {alpha.cast<Complex>(), beta.cast<Complex>()};
}

}  // namespace cvsep
