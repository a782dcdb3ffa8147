#include "cvsep/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "cvsep/errors.hpp"
#include "cvsep/evolution.hpp"
#include "cvsep/oracles.hpp"
#include "cvsep/separability.hpp"
#include "cvsep/sweep.hpp"

namespace cvsep::verification {

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

class Timer {
public:
    explicit Timer(SuiteResult& r) : result_(r), start_(Clock::now()) {}
    ~Timer() { result_.seconds = std::chrono::duration<double>(Clock::now() - start_).count(); }

private:
    SuiteResult& result_;
    Clock::time_point start_;
};

constexpr std::size_t kMaxListedFailures = 20;

void note_failure(SuiteResult& r, std::size_t& count, const std::string& what) {
    if (count < kMaxListedFailures) {
        r.failures.push_back(what);
    }
    ++count;
    r.passed = false;
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

Matrix random_real_symmetric(std::mt19937_64& rng, int s) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix e(s, s);
    for (int i = 0; i < s; ++i) {
        for (int j = i; j < s; ++j) {
            e(i, j) = e(j, i) = u(rng);
        }
    }
    return e;
}

AmplifierMatrix family_eta(double zeta0, double zeta1, double damping) {
    // eta' = 2 eta / Gamma
    const double eta0 = 0.5 * damping * (zeta0 + 2.0 * zeta1) / 3.0;
    const double eta1 = 0.5 * damping * (zeta0 - zeta1) / 3.0;
    return AmplifierMatrix::symmetric(eta0, eta1);
}

std::string point(double z0, double z1, double np, double tp) {
    return "(zeta0=" + num(z0) + ", zeta1=" + num(z1) + ", n'=" + num(np) + ", t'=" + num(tp) + ")";
}

std::vector<double> ppt_grid_zetas() { return sweep::linspace(-1.9, 1.9, 20); }
const double kPptNprimes[] = {1.0, 1.2, 1.5, 2.0, 3.0};
const double kPptTimes[] = {0.5, 2.0, kAsymptoticTime};

SymmetricEntries grid_entries(double z0, double z1, double np, double tp) {
    const SymmetricEntries e = symmetric_entries(SymmetricFamily::from_zeta(z0, z1, np, tp));
    return e.finite() ? e : capped_entries(e, kGrowingModeCap);
}

}  // namespace

void SuiteResult::fail(std::string what) {
    passed = false;
    failures.push_back(std::move(what));
}

SuiteResult propagator_suite(Level level) {
    SuiteResult r;
    r.name = "propagator-vs-rk4";
    Timer timer(r);
    const int instances = level == Level::Full ? 20 : 5;
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> rate(0.5, 2.0);
    double worst_equal = 0.0, worst_unequal = 0.0;
    std::size_t failures = 0;
    for (int k = 0; k < instances; ++k) {
        const AmplifierMatrix eta(random_real_symmetric(rng, 3));
        const Vector rates = (Vector(3) << rate(rng), rate(rng), rate(rng)).finished();
        const BathParams unequal(rates, Vector::Zero(3));
        const BathParams equal = BathParams::uniform(3, 1.0, 0.0);
        for (double t : {0.5, 1.0, 3.0}) {
            const auto closed = propagator_equal_damping(eta, 1.0, t);
            const auto rk = oracles::rk4_propagator(eta, equal, t, oracles::OdeConfig{1e-3});
            const double e1 = std::max(max_abs(closed.m - rk.m), max_abs(closed.n - rk.n));
            const auto closed_r = propagator_real_eta(eta, unequal, t);
            const auto rk_r = oracles::rk4_propagator(eta, unequal, t, oracles::OdeConfig{1e-3});
            const double e2 = std::max(max_abs(closed_r.m - rk_r.m), max_abs(closed_r.n - rk_r.n));
            worst_equal = std::max(worst_equal, e1);
            worst_unequal = std::max(worst_unequal, e2);
            if (!(e1 < 1e-6) || !(e2 < 1e-6)) {
                note_failure(r, failures, "instance " + std::to_string(k) + " t=" + num(t) + ": errors " + num(e1) +
                                              ", " + num(e2));
            }
        }
    }
    r.details.push_back("instances: " + std::to_string(instances) + " x 3 times");
    r.details.push_back("max |closed - rk4|, equal damping: " + num(worst_equal) + " (limit 1e-6)");
    r.details.push_back("max |closed - rk4|, unequal damping: " + num(worst_unequal) + " (limit 1e-6)");
    return r;
}

SuiteResult steady_suite(Level level) {
    SuiteResult r;
    r.name = "steady-moments";
    Timer timer(r);
    const int sets = level == Level::Full ? 50 : 10;
    std::mt19937_64 rng(7031);
    std::uniform_real_distribution<double> z(-0.9, 0.9);
    std::uniform_real_distribution<double> nb(0.0, 2.0);
    std::uniform_real_distribution<double> g(0.5, 3.0);
    double worst_residual = 0.0, worst_closed = 0.0;
    std::size_t failures = 0;
    for (int k = 0; k < sets; ++k) {
        const double z0 = z(rng), z1 = z(rng), nbar = nb(rng), damping = g(rng);
        const AmplifierMatrix eta = family_eta(z0, z1, damping);
        const BathParams bath = BathParams::uniform(3, damping, nbar);
        try {
            const ComplexMoments solved = steady_alpha_beta(eta, bath);
            const double residual = steady_residual(eta, bath, solved);
            const ComplexMoments closed = symmetric_steady_moments(z0, z1, 2.0 * nbar + 1.0);
            const double gap = std::max(max_abs(solved.alpha - closed.alpha), max_abs(solved.beta - closed.beta));
            worst_residual = std::max(worst_residual, residual);
            worst_closed = std::max(worst_closed, gap);
            if (!(residual < 1e-10) || !(gap < 1e-10)) {
                note_failure(r, failures, point(z0, z1, 2 * nbar + 1, kAsymptoticTime) + ": residual " +
                                              num(residual) + ", closed-form gap " + num(gap));
            }
        } catch (const std::exception& e) {
            note_failure(r, failures, point(z0, z1, 2 * nbar + 1, kAsymptoticTime) + ": " + e.what());
        }
    }
    r.details.push_back("parameter sets: " + std::to_string(sets));
    r.details.push_back("max stationary residual: " + num(worst_residual) + " (limit 1e-10)");
    r.details.push_back("max |closed-form - linear solve|: " + num(worst_closed) + " (limit 1e-10)");
    return r;
}

SuiteResult pipeline_suite(Level level) {
    SuiteResult r;
    r.name = "pipeline";
    Timer timer(r);
    // chosen so that no two drift eigenvalues of the general system sum to zero
    const std::vector<double> zetas = level == Level::Full ? std::vector<double>{-1.7, -0.9, -0.25, 0.45, 1.35}
                                                           : std::vector<double>{-0.9, 0.45, 1.35};
    const std::vector<double> weak = {-0.9, -0.25, 0.45};
    const double nprimes[] = {1.0, 1.5, 3.0};
    const double times[] = {0.0, 0.3, 1.1, 2.5};
    const double damping = 2.0;  // t = t'
    double worst = 0.0;
    int points = 0;
    std::size_t failures = 0;
    auto compare = [&](double z0, double z1, double np, double tp) {
        const AmplifierMatrix eta = family_eta(z0, z1, damping);
        const BathParams bath = BathParams::uniform(3, damping, 0.5 * (np - 1.0));
        try {
            const ComplexMoments steady = steady_alpha_beta(eta, bath);
            const ComplexMoments evolved =
                tp == kAsymptoticTime
                    ? steady
                    : evolve_complex_cm(ComplexMoments::vacuum(3), propagator_equal_damping(eta, damping, tp), steady);
            const Matrix general = complex_to_real_cm(evolved).matrix();
            const Matrix family =
                build_symmetric_gamma(symmetric_entries(SymmetricFamily::from_zeta(z0, z1, np, tp))).matrix();
            const double scale = std::max(1.0, family.cwiseAbs().maxCoeff());
            const double gap = (general - family).cwiseAbs().maxCoeff() / scale;
            worst = std::max(worst, gap);
            if (!(gap < 1e-10)) {
                note_failure(r, failures, point(z0, z1, np, tp) + ": relative gap " + num(gap));
            }
            if (!is_valid_cm(CovarianceMatrix(general), 1e-9 * scale)) {
                note_failure(r, failures, point(z0, z1, np, tp) + ": evolved state unphysical");
            }
        } catch (const std::exception& e) {
            note_failure(r, failures, point(z0, z1, np, tp) + ": " + e.what());
        }
        ++points;
    };
    for (double z0 : zetas) {
        for (double z1 : zetas) {
            for (double np : nprimes) {
                for (double tp : times) {
                    compare(z0, z1, np, tp);
                }
            }
        }
    }
    for (double z0 : weak) {
        for (double z1 : weak) {
            for (double np : nprimes) {
                compare(z0, z1, np, kAsymptoticTime);
            }
        }
    }
    r.details.push_back("grid points: " + std::to_string(points) + " (asymptotic: " +
                        std::to_string(weak.size() * weak.size() * 3) + ")");
    r.details.push_back("max |general - family| / max(1, |gamma|): " + num(worst) + " (limit 1e-10)");
    if (level == Level::Full && points < 300) {
        r.fail("fewer than 300 grid points");
    }
    return r;
}

SuiteResult ppt_algebra_suite(Level level) {
    SuiteResult r;
    r.name = "wq2-vs-spectrum";
    Timer timer(r);
    const std::vector<double> zetas = ppt_grid_zetas();
    const std::size_t stride = level == Level::Full ? 1 : 3;
    int compared = 0, banded = 0;
    std::size_t disagreements = 0;
    for (double tp : kPptTimes) {
        for (std::size_t i = 0; i < zetas.size(); i += stride) {
            for (std::size_t j = 0; j < zetas.size(); j += stride) {
                for (double np : kPptNprimes) {
                    const double z0 = zetas[i], z1 = zetas[j];
                    const SymmetricEntries e = grid_entries(z0, z1, np, tp);
                    const double expr = ppt_symmetric_expression(e);
                    if (std::abs(expr) <= 1e-6) {
                        ++banded;
                        continue;
                    }
                    const double eig = ppt_min_eigenvalue(build_symmetric_gamma(e), 1);
                    ++compared;
                    if ((eig >= 0.0) != (expr >= 0.0)) {
                        note_failure(r, disagreements, point(z0, z1, np, tp) + ": polynomial " + num(expr) +
                                                           ", min eig " + num(eig));
                    }
                }
            }
        }
    }
    const double rate = compared > 0 ? 100.0 * (compared - static_cast<double>(disagreements)) / compared : 0.0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f%%", rate);
    r.details.push_back("compared: " + std::to_string(compared) + ", inside 1e-6 band: " + std::to_string(banded));
    r.details.push_back("disagreements: " + std::to_string(disagreements) + ", agreement off-band: " + buf);
    r.details.push_back("asymptotic growing quadratures use primed entries capped at " + num(kGrowingModeCap));
    return r;
}

SuiteResult feasibility_suite(Level level) {
    SuiteResult r;
    r.name = "feasibility-analytic-vs-grid";
    Timer timer(r);
    const std::vector<double> zetas = ppt_grid_zetas();
    const std::size_t stride = level == Level::Full ? 1 : 4;
    int compared = 0, analytic = 0, witnesses = 0;
    std::size_t disagreements = 0;
    for (double tp : kPptTimes) {
        for (std::size_t i = 0; i < zetas.size(); i += stride) {
            for (std::size_t j = 0; j < zetas.size(); j += stride) {
                for (double np : kPptNprimes) {
                    const double z0 = zetas[i], z1 = zetas[j];
                    try {
                        const CovarianceMatrix gamma = build_symmetric_gamma(grid_entries(z0, z1, np, tp));
                        const Classification c = classify(gamma);
                        if (!c.feasibility || c.marginal) {
                            continue;
                        }
                        const SchurPair pair = schur_complements(gamma);
                        const auto grid = oracles::grid_feasibility(pair);
                        ++compared;
                        analytic += c.feasibility->analytic;
                        if (grid.feasible != c.feasibility->feasible) {
                            note_failure(r, disagreements,
                                         point(z0, z1, np, tp) + ": analytic " +
                                             (c.feasibility->feasible ? "feasible" : "infeasible") + " (margin " +
                                             num(c.feasibility->margin) + "), grid best slack " +
                                             num(grid.best_slack));
                        }
                        if (grid.feasible && c.feasibility->witness) {
                            const auto prob = FeasibilityProblem::from(pair);
                            const auto [y, z] = *c.feasibility->witness;
                            witnesses += prob.min_slack(y, z) >= -1e-9;
                        }
                    } catch (const std::exception& e) {
                        note_failure(r, disagreements, point(z0, z1, np, tp) + ": " + e.what());
                    }
                }
            }
        }
    }
    r.details.push_back("compared PPT points: " + std::to_string(compared) + " (analytic path on " +
                        std::to_string(analytic) + ")");
    r.details.push_back("disagreements: " + std::to_string(disagreements));
    r.details.push_back("analytic witnesses re-checked against the raw inequalities: " + std::to_string(witnesses));
    return r;
}

SuiteResult fullsep_boundary_suite(Level level) {
    SuiteResult r;
    r.name = "fullsep-boundary-vs-bisection";
    Timer timer(r);
    std::vector<std::pair<double, double>> pairs = {{0.8, -0.4}, {2.0, -2.0}, {0.5, -0.5}, {-0.6, 0.3},
                                                    {0.3, 0.9},  {1.5, 0.2},  {-1.5, 0.5}, {0.4, -1.5},
                                                    {-0.3, 1.6}, {1.8, -1.4}};
    if (level == Level::Quick) {
        pairs.resize(4);
    }
    double worst = 0.0;
    std::size_t failures = 0;
    for (const auto& [z0, z1] : pairs) {
        const double formula = fully_sep_boundary(z0, z1);
        try {
            const double oracle = oracles::family_boundary(z0, z1, kAsymptoticTime, oracles::BoundaryKind::FullySeparable);
            const double gap = std::abs(oracle - formula);
            worst = std::max(worst, gap);
            r.details.push_back("(" + num(z0) + ", " + num(z1) + "): formula " + num(formula) + ", bisection " +
                                num(oracle));
            if (!(gap < 1e-3)) {
                note_failure(r, failures, "(" + num(z0) + ", " + num(z1) + "): gap " + num(gap));
            }
        } catch (const std::exception& e) {
            note_failure(r, failures, "(" + num(z0) + ", " + num(z1) + "): " + e.what());
        }
    }
    r.details.push_back("max |formula - bisection|: " + num(worst) + " (limit 1e-3)");
    return r;
}

SuiteResult bisep_boundary_suite(Level level) {
    SuiteResult r;
    r.name = "bisep-boundary-values";
    Timer timer(r);
    std::size_t failures = 0;
    auto exact = [&](const std::string& what, double got, double want) {
        const double gap = std::abs(got - want);
        r.details.push_back(what + ": " + num(got) + " (expected " + num(want) + ", gap " + num(gap) + ")");
        if (!(gap < 1e-12)) {
            note_failure(r, failures, what + " off by " + num(gap));
        }
    };
    exact("weak piece at (eta0', eta1') = (0, 0.5)", bisep_weak_boundary_eta(0.0, 0.5), 2.75);
    exact("seam evaluation at (zeta0, zeta1) = (1, -0.5)", bisep_boundary(1.0, -0.5).value_or(NAN), 2.75);
    exact("strong piece at (2, 0)", bisep_boundary(2.0, 0.0).value_or(NAN), 25.0 / 9.0);
    exact("strong piece at (2, -2)", bisep_boundary(2.0, -2.0).value_or(NAN), 8.0);

    // zeta0 = 1 itself is a resonance, so the bisection runs next to it.
    struct Probe {
        double z0, z1, want;
        std::string label;
    };
    std::vector<Probe> probes = {{1.0 - 1e-6, -0.5, 2.75, "(1 - 1e-6, -0.5) vs 2.75"},
                                 {2.0, 0.0, 25.0 / 9.0, "(2, 0) vs 25/9"},
                                 {2.0, -2.0, 8.0, "(2, -2) vs 8"}};
    if (level == Level::Full) {
        probes.push_back({0.8, -0.4, bisep_boundary(0.8, -0.4).value(), "(0.8, -0.4) vs weak piece"});
        probes.push_back({-0.5, 1.7, bisep_boundary(-0.5, 1.7).value(), "(-0.5, 1.7) vs strong piece"});
        probes.push_back({-1.6, 0.4, bisep_boundary(-1.6, 0.4).value(), "(-1.6, 0.4) vs strong piece"});
    }
    double worst = 0.0;
    for (const auto& p : probes) {
        try {
            const double oracle = oracles::family_boundary(p.z0, p.z1, kAsymptoticTime, oracles::BoundaryKind::Ppt);
            const double gap = std::abs(oracle - p.want);
            worst = std::max(worst, gap);
            r.details.push_back("bisection " + p.label + ": " + num(oracle));
            if (!(gap < 1e-3)) {
                note_failure(r, failures, "bisection " + p.label + " off by " + num(gap));
            }
        } catch (const std::exception& e) {
            note_failure(r, failures, "bisection " + p.label + ": " + e.what());
        }
    }
    r.details.push_back("max |piece - bisection|: " + num(worst) + " (limit 1e-3)");
    return r;
}

SuiteResult three_class_suite() {
    SuiteResult r;
    r.name = "three-class-witness";
    Timer timer(r);
    const struct {
        double n2;
        SeparabilityClass want;
    } cases[] = {{1.0, SeparabilityClass::FullyInseparable},
                 {2.45, SeparabilityClass::Biseparable},
                 {2.6, SeparabilityClass::FullySeparable}};
    for (const auto& c : cases) {
        const CovarianceMatrix gamma =
            family_gamma(SymmetricFamily::from_zeta(0.8, -0.4, std::sqrt(c.n2), kAsymptoticTime));
        const Classification got = classify(gamma);
        const SchurPair pair = schur_complements(gamma);
        const FeasibilityResult analytic = fully_separable_test(pair);
        const auto grid = oracles::grid_feasibility(pair);
        const bool want_feasible = c.want == SeparabilityClass::FullySeparable;
        r.details.push_back("n'^2 = " + num(c.n2) + ": " + std::string(to_string(got.cls)) + ", analytic " +
                            (analytic.feasible ? "feasible" : "infeasible") + ", grid " +
                            (grid.feasible ? "feasible" : "infeasible"));
        if (got.cls != c.want) {
            r.fail("n'^2 = " + num(c.n2) + ": expected " + std::string(to_string(c.want)));
        }
        if (analytic.feasible != grid.feasible || analytic.feasible != want_feasible) {
            r.fail("n'^2 = " + num(c.n2) + ": feasibility paths disagree");
        }
    }
    return r;
}

SuiteResult figure3_suite(int jobs) {
    SuiteResult r;
    r.name = "figure3-curves";
    Timer timer(r);
    const auto start = Clock::now();
    const auto rows = sweep::figure3(jobs);
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    double worst = 0.0, least = INFINITY;
    std::size_t failures = 0;
    for (const auto& row : rows) {
        if (row.status != "ok") {
            note_failure(r, failures, "eta0'=" + num(row.eta0p) + " branch " + std::to_string(row.branch) + ": " +
                                          row.status);
            continue;
        }
        worst = std::max(worst, row.difference);
        least = std::min(least, row.difference);
        if (!(row.difference >= 0.0)) {
            note_failure(r, failures, "eta0'=" + num(row.eta0p) + " branch " + std::to_string(row.branch) +
                                          ": negative difference " + num(row.difference));
        }
    }
    const double limit = 0.05 * 2.0 * sweep::kFigureRange;
    r.details.push_back("rows: " + std::to_string(rows.size()) + ", min difference " + num(least));
    r.details.push_back("max difference: " + num(worst) + " (limit " + num(limit) + " = 5% of the eta range)");
    r.details.push_back("runtime: " + num(elapsed) + " s (limit 30 s)");
    if (!(worst < limit)) {
        r.fail("maximum gap " + num(worst) + " not below " + num(limit));
    }
    if (!(elapsed < 30.0)) {
        r.fail("runtime " + num(elapsed) + " s exceeds 30 s");
    }
    return r;
}

SuiteResult monotonicity_suite(Level level) {
    SuiteResult r;
    r.name = "monotone-in-noise";
    Timer timer(r);
    const int rays = level == Level::Full ? 50 : 10;
    std::mt19937_64 rng(99173);
    std::uniform_real_distribution<double> z(-2.0, 2.0);
    std::size_t failures = 0;
    int done = 0, steps = 0, errors = 0;
    while (done < rays) {
        const double z0 = z(rng), z1 = z(rng);
        if (std::abs(std::abs(z0) - 1.0) < 1e-3 || std::abs(std::abs(z1) - 1.0) < 1e-3) {
            continue;
        }
        int previous = -1;
        for (int k = 0; k <= 60; ++k) {
            const double np = 1.0 + 0.05 * k;
            try {
                const int cls =
                    static_cast<int>(classify_family(SymmetricFamily::from_zeta(z0, z1, np, kAsymptoticTime)).cls);
                if (cls < previous) {
                    note_failure(r, failures, point(z0, z1, np, kAsymptoticTime) + ": class moved toward entanglement");
                }
                previous = std::max(previous, cls);
                ++steps;
            } catch (const std::exception& e) {
                ++errors;
                note_failure(r, failures, point(z0, z1, np, kAsymptoticTime) + ": " + e.what());
            }
        }
        ++done;
    }
    r.details.push_back("rays: " + std::to_string(done) + ", classified points: " + std::to_string(steps) +
                        ", errors: " + std::to_string(errors));
    return r;
}

std::vector<SuiteResult> run_all(Level level, int jobs) {
    std::vector<SuiteResult> out;
    out.push_back(propagator_suite(level));
    out.push_back(steady_suite(level));
    out.push_back(pipeline_suite(level));
    out.push_back(ppt_algebra_suite(level));
    out.push_back(feasibility_suite(level));
    out.push_back(fullsep_boundary_suite(level));
    out.push_back(bisep_boundary_suite(level));
    out.push_back(three_class_suite());
    out.push_back(monotonicity_suite(level));
    if (level == Level::Full) {
        out.push_back(figure3_suite(jobs));
    }
    return out;
}

std::string format(const SuiteResult& result) {
    std::ostringstream os;
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2f", result.seconds);
    os << "[" << (result.passed ? "PASS" : "FAIL") << "] " << result.name << " (" << secs << " s)\n";
    for (const auto& d : result.details) {
        os << "    " << d << "\n";
    }
    for (const auto& f : result.failures) {
        os << "    failure: " << f << "\n";
    }
    return os.str();
}

}  // namespace cvsep::verification
