#pragma once

// Parameter sweeps over the symmetric family: grid axes, a deterministic
// worker pool, CSV serialization and the boundary / figure row builders.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "cvsep/core.hpp"

namespace cvsep::sweep {

struct Axis {
    std::string name;  // eta0p, eta1p, nbar or tprime
    double min = 0.0;
    double max = 1.0;
    int count = 2;

    // min + (max - min) i / (count - 1); the last point is max exactly.
    double value(int i) const;
    std::vector<double> values() const;
};

// "NAME:MIN:MAX:COUNT". Throws InvalidArgument on unknown names, count < 2,
// min >= max or unparsable numbers.
Axis parse_axis(std::string_view spec);

std::vector<double> linspace(double lo, double hi, int count);

// Evaluates f(0..n-1) on `jobs` threads and returns the results in index
// order. f must not throw.
template <class F>
auto parallel_map(std::size_t n, int jobs, F f) -> std::vector<decltype(f(std::size_t{0}))> {
    using R = decltype(f(std::size_t{0}));
    std::vector<R> out(n);
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = f(i);
        }
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                out[i] = f(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    return out;
}

// Scientific notation with 12 significant digits ("%.11e"); inf, -inf and
// nan spelled as such.
std::string format_number(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string str() const;
};

// Label for a failed point: "error:<reason>" with the reason taken from the
// exception type (resonance, singular, inconsistent, invalid, numerical).
std::string error_label(const std::exception_ptr& error);

// ---------------------------------------------------------------------------
// Boundary rows at t' = infinity.

struct BoundaryRow {
    double eta0p = 0.0, eta1p = 0.0;
    double zeta0 = 0.0, zeta1 = 0.0;
    double fullsep_n2 = 0.0;
    double fullsep_nbar = 0.0;
    double bisep_n2 = 0.0;  // -inf where no noise is ever needed
    double bisep_nbar = 0.0;
    // Bisection over the classifier, clamped to n'^2 >= 1 (it cannot probe
    // below the noiseless state); filled when checking.
    std::optional<double> oracle_fullsep_n2, oracle_bisep_n2;
    std::optional<double> gap_fullsep, gap_bisep;
    std::string status = "ok";
};

// nbar for a critical n'^2, zero when n'^2 <= 1.
double nbar_of(double n2);

BoundaryRow boundary_row(double eta0p, double eta1p, bool check, double tol = kDefaultTolerance);

// Header: eta0p,eta1p,zeta0,zeta1,fullsep_n2,fullsep_nbar,bisep_n2,bisep_nbar
// [,oracle_fullsep_n2,oracle_bisep_n2,gap_fullsep,gap_bisep],status
CsvTable boundary_table(const std::vector<BoundaryRow>& rows, bool check);

// ---------------------------------------------------------------------------
// Figures.

inline constexpr int kFigureGrid = 101;
inline constexpr double kFigureRange = 2.0;

// Figure 1: eta0p,eta1p,zeta0,zeta1,fullsep_n2,fullsep_nbar,status
// Figure 2: adds bisep_n2,bisep_nbar.
CsvTable figure1_table(const std::vector<BoundaryRow>& rows);
CsvTable figure2_table(const std::vector<BoundaryRow>& rows);
std::vector<BoundaryRow> figure_surface(int jobs, bool check = false, double tol = kDefaultTolerance);

// Noiseless (n' = 1) curves: for fixed eta0p and a branch sign, the smallest
// |eta1p| at which each boundary exceeds n'^2 = 1. difference =
// |eta1p_bisep| - |eta1p_fullsep| >= 0.
struct Figure3Row {
    double eta0p = 0.0;
    int branch = 1;
    double eta1p_fullsep = 0.0;
    double eta1p_bisep = 0.0;
    double difference = 0.0;
    std::string status = "ok";
};

Figure3Row figure3_row(double eta0p, int branch);
std::vector<Figure3Row> figure3(int jobs);

// eta0p,branch,eta1p_fullsep,eta1p_bisep,difference,difference_x100,status
CsvTable figure3_table(const std::vector<Figure3Row>& rows);

}  // namespace cvsep::sweep
