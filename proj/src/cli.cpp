#include "cvsep/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "cvsep/errors.hpp"
#include "cvsep/evolution.hpp"
#include "cvsep/separability.hpp"
#include "cvsep/sweep.hpp"
#include "cvsep/verification.hpp"

namespace cvsep::cli {

namespace {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    double eta0p = 0.0;
    double eta1p = 0.0;
    double nbar = 0.0;
    std::string tprime = "inf";
    std::vector<std::string> grids;
    std::string out;
    bool check = false;
    double tol = kDefaultTolerance;
    std::string config;
    int jobs = 1;
    // positional
    std::string which = "both";
    int figure = 0;
    std::string level = "quick";
};

int default_jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

double parse_double(const std::string& text, const std::string& key) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (text.empty() || used != text.size()) {
        throw InvalidArgument("invalid value '" + text + "' for " + key);
    }
    return v;
}

double parse_tprime(const std::string& text) {
    if (text == "inf" || text == "infinity") {
        return kAsymptoticTime;
    }
    const double t = parse_double(text, "tprime");
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw InvalidArgument("tprime must be a non-negative number or 'inf'");
    }
    return t;
}

bool parse_bool(const std::string& text, const std::string& key) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") {
        return true;
    }
    if (text == "false" || text == "0" || text == "no" || text == "off") {
        return false;
    }
    throw InvalidArgument("invalid boolean '" + text + "' for " + key);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// key = value lines; '#' starts a comment. Keys may repeat only for grid.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read config file '" + path + "'");
    }
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidArgument("config line " + std::to_string(number) + ": expected 'key = value'");
        }
        entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return entries;
}

void apply_config(const std::vector<std::pair<std::string, std::string>>& entries, const CLI::App& sub,
                  Options& o) {
    auto given = [&sub](const std::string& flag) { return sub.get_option("--" + flag)->count() > 0; };
    std::vector<std::string> grids;
    for (const auto& [key, value] : entries) {
        if (key == "grid") {
            grids.push_back(value);
            continue;
        }
        if (key == "config") {
            throw InvalidArgument("config files cannot include other config files");
        }
        static const std::vector<std::string> known = {"eta0p", "eta1p", "nbar", "tprime", "out", "check", "tol", "jobs"};
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw InvalidArgument("unknown config key '" + key + "'");
        }
        if (given(key)) {
            continue;
        }
        if (key == "eta0p") {
            o.eta0p = parse_double(value, key);
        } else if (key == "eta1p") {
            o.eta1p = parse_double(value, key);
        } else if (key == "nbar") {
            o.nbar = parse_double(value, key);
        } else if (key == "tprime") {
            o.tprime = value;
        } else if (key == "out") {
            o.out = value;
        } else if (key == "check") {
            o.check = parse_bool(value, key);
        } else if (key == "tol") {
            o.tol = parse_double(value, key);
        } else if (key == "jobs") {
            const double j = parse_double(value, key);
            if (j != std::floor(j)) {
                throw InvalidArgument("jobs must be an integer");
            }
            o.jobs = static_cast<int>(j);
        }
    }
    if (!given("grid")) {
        o.grids.insert(o.grids.end(), grids.begin(), grids.end());
    }
}

void validate(const Options& o) {
    if (!std::isfinite(o.eta0p) || !std::isfinite(o.eta1p)) {
        throw InvalidArgument("eta0p and eta1p must be finite");
    }
    if (!(o.nbar >= 0.0) || !std::isfinite(o.nbar)) {
        throw InvalidArgument("nbar must be finite and non-negative");
    }
    if (!(o.tol > 0.0) || !std::isfinite(o.tol)) {
        throw InvalidArgument("tol must be positive");
    }
    if (o.jobs < 1 || o.jobs > 1024) {
        throw InvalidArgument("jobs must be between 1 and 1024");
    }
    if (o.grids.size() > 2) {
        throw InvalidArgument("at most two --grid axes");
    }
    parse_tprime(o.tprime);
}

std::vector<sweep::Axis> parse_grids(const Options& o, const std::vector<std::string>& allowed) {
    std::vector<sweep::Axis> axes;
    for (const auto& g : o.grids) {
        sweep::Axis a = sweep::parse_axis(g);
        if (std::find(allowed.begin(), allowed.end(), a.name) == allowed.end()) {
            throw InvalidArgument("axis '" + a.name + "' is not available for this command");
        }
        for (const auto& prev : axes) {
            if (prev.name == a.name) {
                throw InvalidArgument("axis '" + a.name + "' given twice");
            }
        }
        axes.push_back(a);
    }
    return axes;
}

void emit(const sweep::CsvTable& table, const Options& o, std::ostream& out) {
    const std::string text = table.str();
    if (o.out.empty()) {
        out << text;
        return;
    }
    std::ofstream file(o.out, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw IoError("cannot open output file '" + o.out + "'");
    }
    file << text;
    file.close();
    if (!file) {
        throw IoError("failed writing output file '" + o.out + "'");
    }
}

// Report lines go to standard output only when the CSV is not written there.
std::ostream& report_stream(const Options& o, std::ostream& out, std::ostream& err) {
    return o.out.empty() ? err : out;
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

// --- family point rows ---------------------------------------------------------

struct FamilyPoint {
    double eta0p, eta1p, nbar, tprime;
};

std::vector<std::string> family_cells(const FamilyPoint& p, double tol) {
    using sweep::format_number;
    const auto f = SymmetricFamily::from_nbar(p.eta0p, p.eta1p, p.nbar, p.tprime);
    std::vector<std::string> cells = {format_number(p.eta0p), format_number(p.eta1p),  format_number(p.nbar),
                                      format_number(p.tprime), format_number(f.zeta0()), format_number(f.zeta1()),
                                      format_number(f.nprime)};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
        const SymmetricEntries e = symmetric_entries(f);
        const Classification c = classify_family(f, tol);
        for (double v : {e.a, e.b, e.c, e.d, e.a_p, e.b_p, e.c_p, e.d_p}) {
            cells.push_back(format_number(v));
        }
        cells.push_back(format_number(*std::min_element(c.ppt_min_eig.begin(), c.ppt_min_eig.end())));
        cells.push_back(std::string(to_string(c.cls)));
        cells.push_back(yes_no(c.marginal));
        cells.push_back("ok");
    } catch (...) {
        cells.resize(7);
        for (int i = 0; i < 9; ++i) {
            cells.push_back(format_number(nan));
        }
        cells.push_back("nan");
        cells.push_back("nan");
        cells.push_back(sweep::error_label(std::current_exception()));
    }
    return cells;
}

const std::vector<std::string> kFamilyHeader = {"eta0p", "eta1p", "nbar", "tprime", "zeta0", "zeta1", "nprime",
                                                 "a",     "b",     "c",    "d",      "a_p",   "b_p",   "c_p",
                                                 "d_p",   "ppt_min_eig", "class", "marginal", "status"};

void set_axis(FamilyPoint& p, const std::string& name, double v) {
    if (name == "eta0p") {
        p.eta0p = v;
    } else if (name == "eta1p") {
        p.eta1p = v;
    } else if (name == "nbar") {
        p.nbar = v;
    } else {
        p.tprime = v;
    }
}

sweep::CsvTable family_sweep(const Options& o, const std::vector<sweep::Axis>& axes) {
    const FamilyPoint base{o.eta0p, o.eta1p, o.nbar, parse_tprime(o.tprime)};
    for (const auto& a : axes) {
        if ((a.name == "nbar" || a.name == "tprime") && a.min < 0.0) {
            throw InvalidArgument("axis '" + a.name + "' must be non-negative");
        }
    }
    const std::size_t inner = axes.size() > 1 ? static_cast<std::size_t>(axes[1].count) : 1;
    const std::size_t total = static_cast<std::size_t>(axes[0].count) * inner;
    sweep::CsvTable t;
    t.header = kFamilyHeader;
    t.rows = sweep::parallel_map(total, o.jobs, [&](std::size_t k) {
        FamilyPoint p = base;
        set_axis(p, axes[0].name, axes[0].value(static_cast<int>(k / inner)));
        if (axes.size() > 1) {
            set_axis(p, axes[1].name, axes[1].value(static_cast<int>(k % inner)));
        }
        return family_cells(p, o.tol);
    });
    return t;
}

// --- commands ------------------------------------------------------------------

int cmd_classify(const Options& o, std::ostream& out, std::ostream& err) {
    const auto axes = parse_grids(o, {"eta0p", "eta1p", "nbar", "tprime"});
    if (!axes.empty()) {
        const auto table = family_sweep(o, axes);
        emit(table, o, out);
        if (!o.out.empty()) {
            out << "classified " << table.rows.size() << " points into " << o.out << "\n";
        }
        return kOk;
    }
    using sweep::format_number;
    const auto f = SymmetricFamily::from_nbar(o.eta0p, o.eta1p, o.nbar, parse_tprime(o.tprime));
    const SymmetricEntries e = symmetric_entries(f);
    const Classification c = classify_family(f, o.tol);
    std::ostringstream os;
    os << "eta0' = " << format_number(f.eta0p) << "  eta1' = " << format_number(f.eta1p) << "\n";
    os << "zeta0 = " << format_number(f.zeta0()) << "  zeta1 = " << format_number(f.zeta1()) << "\n";
    os << "n' = " << format_number(f.nprime) << "  n'^2 = " << format_number(f.nprime * f.nprime)
       << "  t' = " << format_number(f.tprime) << "\n";
    os << "entries a b c d: " << format_number(e.a) << " " << format_number(e.b) << " " << format_number(e.c) << " "
       << format_number(e.d) << "\n";
    os << "primed a' b' c' d': " << format_number(e.a_p) << " " << format_number(e.b_p) << " "
       << format_number(e.c_p) << " " << format_number(e.d_p) << "\n";
    if (!e.finite()) {
        os << "growing quadrature: infinite primed entries capped at " << format_number(kGrowingModeCap)
           << " for classification\n";
    }
    for (int j = 0; j < 3; ++j) {
        os << "PPT mode " << (j + 1) << ": min eig " << format_number(c.ppt_min_eig[static_cast<std::size_t>(j)])
           << (c.ppt_min_eig[static_cast<std::size_t>(j)] >= -o.tol ? "  pass" : "  fail") << "\n";
    }
    if (c.feasibility) {
        os << "full separability: " << (c.feasibility->feasible ? "feasible" : "infeasible") << " ("
           << (c.feasibility->analytic ? "analytic" : "grid") << " path, margin "
           << format_number(c.feasibility->margin) << ")\n";
    }
    if (f.asymptotic()) {
        const Classification cf = closed_form_class(f.zeta0(), f.zeta1(), f.nprime, o.tol);
        const auto bisep = bisep_boundary(f.zeta0(), f.zeta1());
        os << "closed-form boundaries: fullsep n'^2 = " << format_number(fully_sep_boundary(f.zeta0(), f.zeta1()))
           << "  bisep n'^2 = "
           << format_number(bisep ? *bisep : -std::numeric_limits<double>::infinity()) << "\n";
        os << "closed-form class: " << to_string(cf.cls) << "\n";
    }
    os << "class: " << to_string(c.cls) << "  marginal: " << yes_no(c.marginal) << "\n";
    os << "result," << format_number(f.eta0p) << "," << format_number(f.eta1p) << "," << format_number(o.nbar) << ","
       << format_number(f.tprime) << "," << format_number(f.zeta0()) << "," << format_number(f.zeta1()) << ","
       << format_number(f.nprime) << "," << to_string(c.cls) << "," << yes_no(c.marginal) << "\n";
    out << os.str();
    (void)err;
    return kOk;
}

int cmd_evolve(const Options& o, std::ostream& out, std::ostream& err) {
    auto axes = parse_grids(o, {"tprime"});
    if (axes.empty()) {
        axes.push_back(sweep::Axis{"tprime", 0.0, 5.0, 51});
    }
    if (axes[0].min < 0.0) {
        throw InvalidArgument("tprime axis must be non-negative");
    }
    Options fixed = o;
    const auto table = family_sweep(fixed, axes);
    emit(table, o, out);
    report_stream(o, out, err) << "evolved " << table.rows.size() << " time points\n";
    return kOk;
}

std::vector<std::string> keep_columns(const std::vector<std::string>& header, const std::string& which) {
    std::vector<std::string> drop;
    if (which == "fullsep") {
        drop = {"bisep"};
    } else if (which == "bisep") {
        drop = {"fullsep"};
    }
    std::vector<std::string> kept;
    for (const auto& h : header) {
        const bool dropped = std::any_of(drop.begin(), drop.end(),
                                         [&h](const std::string& d) { return h.find(d) != std::string::npos; });
        if (!dropped) {
            kept.push_back(h);
        }
    }
    return kept;
}

sweep::CsvTable select_columns(const sweep::CsvTable& t, const std::vector<std::string>& kept) {
    std::vector<std::size_t> index;
    for (const auto& k : kept) {
        index.push_back(static_cast<std::size_t>(std::find(t.header.begin(), t.header.end(), k) - t.header.begin()));
    }
    sweep::CsvTable out;
    out.header = kept;
    for (const auto& row : t.rows) {
        std::vector<std::string> r;
        for (std::size_t i : index) {
            r.push_back(row[i]);
        }
        out.rows.push_back(std::move(r));
    }
    return out;
}

void boundary_summary(const std::vector<sweep::BoundaryRow>& rows, bool check, std::ostream& os) {
    double gap_full = 0.0, gap_bi = 0.0;
    std::size_t errors = 0;
    for (const auto& r : rows) {
        errors += r.status != "ok";
        if (r.gap_fullsep) {
            gap_full = std::max(gap_full, *r.gap_fullsep);
        }
        if (r.gap_bisep) {
            gap_bi = std::max(gap_bi, *r.gap_bisep);
        }
    }
    os << "boundary rows: " << rows.size() << ", error rows: " << errors << "\n";
    if (check) {
        os << "max |closed form - bisection|: fullsep " << sweep::format_number(gap_full) << ", bisep "
           << sweep::format_number(gap_bi) << "\n";
    }
}

int cmd_boundary(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.which != "fullsep" && o.which != "bisep" && o.which != "both") {
        throw InvalidArgument("boundary selection must be fullsep, bisep or both");
    }
    auto axes = parse_grids(o, {"eta0p", "eta1p"});
    if (axes.empty()) {
        axes = {sweep::Axis{"eta0p", -sweep::kFigureRange, sweep::kFigureRange, sweep::kFigureGrid},
                sweep::Axis{"eta1p", -sweep::kFigureRange, sweep::kFigureRange, sweep::kFigureGrid}};
    }
    const std::size_t inner = axes.size() > 1 ? static_cast<std::size_t>(axes[1].count) : 1;
    const std::size_t total = static_cast<std::size_t>(axes[0].count) * inner;
    const auto rows = sweep::parallel_map(total, o.jobs, [&](std::size_t k) {
        double e0 = o.eta0p, e1 = o.eta1p;
        const double v0 = axes[0].value(static_cast<int>(k / inner));
        (axes[0].name == "eta0p" ? e0 : e1) = v0;
        if (axes.size() > 1) {
            (axes[1].name == "eta0p" ? e0 : e1) = axes[1].value(static_cast<int>(k % inner));
        }
        return sweep::boundary_row(e0, e1, o.check, o.tol);
    });
    const auto table = sweep::boundary_table(rows, o.check);
    emit(select_columns(table, keep_columns(table.header, o.which)), o, out);
    boundary_summary(rows, o.check, report_stream(o, out, err));
    return kOk;
}

int cmd_figure(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.check) {
        throw InvalidArgument("--check applies to the boundary command");
    }
    if (!o.grids.empty()) {
        throw InvalidArgument("figure grids are fixed; use the boundary command for custom grids");
    }
    std::ostream& report = report_stream(o, out, err);
    if (o.figure == 1 || o.figure == 2) {
        const auto rows = sweep::figure_surface(o.jobs);
        emit(o.figure == 1 ? sweep::figure1_table(rows) : sweep::figure2_table(rows), o, out);
        boundary_summary(rows, false, report);
        return kOk;
    }
    if (o.figure == 3) {
        const auto rows = sweep::figure3(o.jobs);
        emit(sweep::figure3_table(rows), o, out);
        double worst = 0.0, least = std::numeric_limits<double>::infinity();
        for (const auto& r : rows) {
            if (r.status == "ok") {
                worst = std::max(worst, r.difference);
                least = std::min(least, r.difference);
            }
        }
        report << "figure 3 rows: " << rows.size() << ", difference range [" << sweep::format_number(least) << ", "
               << sweep::format_number(worst) << "]\n";
        return kOk;
    }
    throw InvalidArgument("figure number must be 1, 2 or 3");
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
    using verification::Level;
    if (o.level != "quick" && o.level != "full") {
        throw InvalidArgument("verify level must be quick or full");
    }
    const Level level = o.level == "full" ? Level::Full : Level::Quick;
    const auto results = verification::run_all(level, o.jobs);
    std::size_t passed = 0;
    std::ostringstream report;
    for (const auto& r : results) {
        report << verification::format(r);
        passed += r.passed;
    }
    report << "verify " << o.level << ": " << passed << "/" << results.size() << " suites passed\n";
    if (o.out.empty()) {
        out << report.str();
    } else {
        std::ofstream file(o.out, std::ios::binary | std::ios::trunc);
        if (!file || !(file << report.str())) {
            throw IoError("cannot write report to '" + o.out + "'");
        }
        out << "verify " << o.level << ": " << passed << "/" << results.size() << " suites passed\n";
    }
    if (passed != results.size()) {
        for (const auto& r : results) {
            if (!r.passed) {
                err << "failed suite: " << r.name << "\n";
            }
        }
        return kVerificationFailed;
    }
    return kOk;
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--eta0p", o.eta0p, "single-mode amplification ratio 2 eta0 / Gamma");
    sub->add_option("--eta1p", o.eta1p, "inter-mode amplification ratio 2 eta1 / Gamma");
    sub->add_option("--nbar", o.nbar, "thermal occupation of the bath");
    sub->add_option("--tprime", o.tprime, "rescaled time Gamma t / 2, or inf");
    sub->add_option("--grid", o.grids, "swept axis NAME:MIN:MAX:COUNT (repeatable, at most 2)")->expected(1)->allow_extra_args(false)->take_all();
    sub->add_option("--out", o.out, "CSV output path (default: standard output)");
    sub->add_flag("--check", o.check, "add bisection-oracle columns");
    sub->add_option("--tol", o.tol, "PSD / marginality tolerance");
    sub->add_option("--config", o.config, "file of key = value defaults");
    sub->add_option("--jobs", o.jobs, "worker threads");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    o.jobs = default_jobs();
    CLI::App app{"Entanglement classes of symmetric three-mode Gaussian states in amplifier channels", "cvsep"};
    app.require_subcommand(1);
    auto* classify_cmd = app.add_subcommand("classify", "classify one family point, or a --grid sweep");
    auto* evolve_cmd = app.add_subcommand("evolve", "trace entries and class along a tprime grid");
    auto* boundary_cmd = app.add_subcommand("boundary", "closed-form boundary surfaces at t' = inf");
    auto* figure_cmd = app.add_subcommand("figure", "figure data: 1, 2 or 3");
    auto* verify_cmd = app.add_subcommand("verify", "oracle-equivalence suites: quick or full");
    for (auto* sub : {classify_cmd, evolve_cmd, boundary_cmd, figure_cmd, verify_cmd}) {
        add_common(sub, o);
    }
    boundary_cmd->add_option("which", o.which, "fullsep, bisep or both");
    figure_cmd->add_option("n", o.figure, "figure number")->required();
    verify_cmd->add_option("level", o.level, "quick or full");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kDomainError;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        if (!o.config.empty()) {
            apply_config(read_config(o.config), *sub, o);
        }
        validate(o);
        if (sub == classify_cmd) {
            return cmd_classify(o, out, err);
        }
        if (sub == evolve_cmd) {
            return cmd_evolve(o, out, err);
        }
        if (sub == boundary_cmd) {
            return cmd_boundary(o, out, err);
        }
        if (sub == figure_cmd) {
            return cmd_figure(o, out, err);
        }
        return cmd_verify(o, out, err);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const ResonanceError& e) {
        err << "domain error: " << e.what() << "\n";
        return kDomainError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kDomainError;
    }
}

}  // namespace cvsep::cli
