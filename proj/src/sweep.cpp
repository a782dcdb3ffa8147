#include "cvsep/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "cvsep/errors.hpp"
#include "cvsep/oracles.hpp"
#include "cvsep/separability.hpp"

namespace cvsep::sweep {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_real(std::string_view text, std::string_view what) {
    const std::string s(text);
    if (s == "inf" || s == "+inf") {
        return std::numeric_limits<double>::infinity();
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size()) {
        throw InvalidArgument("cannot parse " + std::string(what) + " '" + s + "'");
    }
    return v;
}

}  // namespace

double Axis::value(int i) const {
    if (i == count - 1) {
        return max;
    }
    return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
}

std::vector<double> Axis::values() const {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = value(i);
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, int count) {
    return Axis{"", lo, hi, count}.values();
}

Axis parse_axis(std::string_view spec) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t colon = spec.find(':', start);
        parts.push_back(spec.substr(start, colon - start));
        if (colon == std::string_view::npos) {
            break;
        }
        start = colon + 1;
    }
    if (parts.size() != 4) {
        throw InvalidArgument("grid axis must be NAME:MIN:MAX:COUNT, got '" + std::string(spec) + "'");
    }
    Axis axis;
    axis.name = std::string(parts[0]);
    if (axis.name != "eta0p" && axis.name != "eta1p" && axis.name != "nbar" && axis.name != "tprime") {
        throw InvalidArgument("unknown grid axis '" + axis.name + "'");
    }
    axis.min = parse_real(parts[1], "axis minimum");
    axis.max = parse_real(parts[2], "axis maximum");
    const double count = parse_real(parts[3], "axis count");
    if (!std::isfinite(axis.min) || !std::isfinite(axis.max) || !(axis.min < axis.max)) {
        throw InvalidArgument("grid axis needs finite MIN < MAX");
    }
    if (!(count >= 2.0) || count != std::floor(count) || count > 1e7) {
        throw InvalidArgument("grid axis COUNT must be an integer >= 2");
    }
    axis.count = static_cast<int>(count);
    return axis;
}

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    return buf;
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) {
                out += ',';
            }
            out += cells[i];
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows) {
        line(r);
    }
    return out;
}

std::string error_label(const std::exception_ptr& error) {
    try {
        std::rethrow_exception(error);
    } catch (const ResonanceError&) {
        return "error:resonance";
    } catch (const SingularityError&) {
        return "error:singular";
    } catch (const InconsistencyError&) {
        return "error:inconsistent";
    } catch (const BracketError&) {
        return "error:bracket";
    } catch (const InvalidArgument&) {
        return "error:invalid";
    } catch (const NumericalFailure&) {
        return "error:numerical";
    } catch (...) {
        return "error:unknown";
    }
}

// --- boundary rows ---------------------------------------------------------

double nbar_of(double n2) {
    if (!(n2 > 1.0)) {
        return 0.0;
    }
    return 0.5 * (std::sqrt(n2) - 1.0);
}

namespace {

double oracle_boundary(double z0, double z1, oracles::BoundaryKind kind, double tol) {
    if (oracles::family_predicate(z0, z1, kAsymptoticTime, kind, tol)(1.0)) {
        return 1.0;
    }
    return oracles::family_boundary(z0, z1, kAsymptoticTime, kind);
}

}  // namespace

BoundaryRow boundary_row(double eta0p, double eta1p, bool check, double tol) {
    BoundaryRow row;
    row.eta0p = eta0p;
    row.eta1p = eta1p;
    row.zeta0 = eta0p + 2.0 * eta1p;
    row.zeta1 = eta0p - eta1p;
    row.fullsep_n2 = fully_sep_boundary(row.zeta0, row.zeta1);
    row.fullsep_nbar = nbar_of(row.fullsep_n2);
    try {
        const auto bisep = bisep_boundary(row.zeta0, row.zeta1);
        row.bisep_n2 = bisep ? *bisep : -std::numeric_limits<double>::infinity();
        row.bisep_nbar = nbar_of(row.bisep_n2);
        if (row.bisep_n2 > row.fullsep_n2 + 1e-9 * std::max(1.0, std::abs(row.fullsep_n2))) {
            throw InconsistencyError("biseparable boundary above the fully separable one");
        }
    } catch (...) {
        row.bisep_n2 = kNaN;
        row.bisep_nbar = kNaN;
        row.status = error_label(std::current_exception());
        return row;
    }
    if (check) {
        try {
            row.oracle_fullsep_n2 = oracle_boundary(row.zeta0, row.zeta1, oracles::BoundaryKind::FullySeparable, tol);
            row.oracle_bisep_n2 = oracle_boundary(row.zeta0, row.zeta1, oracles::BoundaryKind::Ppt, tol);
            row.gap_fullsep = std::abs(std::max(row.fullsep_n2, 1.0) - *row.oracle_fullsep_n2);
            row.gap_bisep = std::abs(std::max(row.bisep_n2, 1.0) - *row.oracle_bisep_n2);
        } catch (...) {
            row.oracle_fullsep_n2.reset();
            row.oracle_bisep_n2.reset();
            row.gap_fullsep.reset();
            row.gap_bisep.reset();
            row.status = error_label(std::current_exception());
        }
    }
    return row;
}

namespace {

std::string opt(const std::optional<double>& v) { return format_number(v ? *v : kNaN); }

}  // namespace

CsvTable boundary_table(const std::vector<BoundaryRow>& rows, bool check) {
    CsvTable t;
    t.header = {"eta0p", "eta1p", "zeta0", "zeta1", "fullsep_n2", "fullsep_nbar", "bisep_n2", "bisep_nbar"};
    if (check) {
        t.header.insert(t.header.end(), {"oracle_fullsep_n2", "oracle_bisep_n2", "gap_fullsep", "gap_bisep"});
    }
    t.header.push_back("status");
    for (const auto& r : rows) {
        std::vector<std::string> cells = {format_number(r.eta0p),      format_number(r.eta1p),
                                          format_number(r.zeta0),      format_number(r.zeta1),
                                          format_number(r.fullsep_n2), format_number(r.fullsep_nbar),
                                          format_number(r.bisep_n2),   format_number(r.bisep_nbar)};
        if (check) {
            cells.insert(cells.end(),
                         {opt(r.oracle_fullsep_n2), opt(r.oracle_bisep_n2), opt(r.gap_fullsep), opt(r.gap_bisep)});
        }
        cells.push_back(r.status);
        t.rows.push_back(std::move(cells));
    }
    return t;
}

CsvTable figure1_table(const std::vector<BoundaryRow>& rows) {
    CsvTable t;
    t.header = {"eta0p", "eta1p", "zeta0", "zeta1", "fullsep_n2", "fullsep_nbar", "status"};
    for (const auto& r : rows) {
        t.rows.push_back({format_number(r.eta0p), format_number(r.eta1p), format_number(r.zeta0),
                          format_number(r.zeta1), format_number(r.fullsep_n2), format_number(r.fullsep_nbar),
                          r.status});
    }
    return t;
}

CsvTable figure2_table(const std::vector<BoundaryRow>& rows) {
    CsvTable t;
    t.header = {"eta0p", "eta1p", "zeta0", "zeta1", "fullsep_n2", "fullsep_nbar", "bisep_n2", "bisep_nbar",
                "status"};
    for (const auto& r : rows) {
        t.rows.push_back({format_number(r.eta0p), format_number(r.eta1p), format_number(r.zeta0),
                          format_number(r.zeta1), format_number(r.fullsep_n2), format_number(r.fullsep_nbar),
                          format_number(r.bisep_n2), format_number(r.bisep_nbar), r.status});
    }
    return t;
}

std::vector<BoundaryRow> figure_surface(int jobs, bool check, double tol) {
    const std::vector<double> axis = linspace(-kFigureRange, kFigureRange, kFigureGrid);
    const std::size_t n = axis.size();
    return parallel_map(n * n, jobs, [&](std::size_t k) { return boundary_row(axis[k / n], axis[k % n], check, tol); });
}

// --- figure 3 ----------------------------------------------------------------

namespace {

// First |eta1p| along the branch where `needs_noise` turns true, refined by
// bisection inside the scan cell.
template <class P>
double first_crossing(double eta0p, int branch, P needs_noise) {
    const std::vector<double> scan = linspace(0.0, kFigureRange, (kFigureGrid + 1) / 2);
    double lo = 0.0;
    for (double mag : scan) {
        if (needs_noise(eta0p, branch * mag)) {
            double hi = mag;
            for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (needs_noise(eta0p, branch * mid)) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return branch * 0.5 * (lo + hi);
        }
        lo = mag;
    }
    return kNaN;
}

bool fullsep_needs_noise(double e0, double e1) { return fully_sep_boundary(e0 + 2.0 * e1, e0 - e1) > 1.0; }

bool bisep_needs_noise(double e0, double e1) {
    const auto b = bisep_boundary(e0 + 2.0 * e1, e0 - e1);
    return b && *b > 1.0;
}

}  // namespace

Figure3Row figure3_row(double eta0p, int branch) {
    Figure3Row row;
    row.eta0p = eta0p;
    row.branch = branch;
    try {
        row.eta1p_fullsep = first_crossing(eta0p, branch, fullsep_needs_noise);
        row.eta1p_bisep = first_crossing(eta0p, branch, bisep_needs_noise);
        row.difference = std::abs(row.eta1p_bisep) - std::abs(row.eta1p_fullsep);
        if (std::isnan(row.difference)) {
            row.status = "error:no-crossing";
        }
    } catch (...) {
        row.eta1p_fullsep = row.eta1p_bisep = row.difference = kNaN;
        row.status = error_label(std::current_exception());
    }
    return row;
}

std::vector<Figure3Row> figure3(int jobs) {
    const std::vector<double> axis = linspace(-kFigureRange, kFigureRange, kFigureGrid);
    return parallel_map(2 * axis.size(), jobs, [&](std::size_t k) {
        return figure3_row(axis[k / 2], k % 2 == 0 ? 1 : -1);
    });
}

CsvTable figure3_table(const std::vector<Figure3Row>& rows) {
    CsvTable t;
    t.header = {"eta0p", "branch", "eta1p_fullsep", "eta1p_bisep", "difference", "difference_x100", "status"};
    for (const auto& r : rows) {
        t.rows.push_back({format_number(r.eta0p), r.branch > 0 ? "+1" : "-1", format_number(r.eta1p_fullsep),
                          format_number(r.eta1p_bisep), format_number(r.difference),
                          format_number(100.0 * r.difference), r.status});
    }
    return t;
}

}  // namespace cvsep::sweep
