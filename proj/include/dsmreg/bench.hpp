#pragma once

// Benchmark harness: experiment configs, instance construction per family,
// method dispatch with per-method solve accounting, CSV emission, and the
// Hilbert condition-number table.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsmreg/dsm.hpp"
#include "dsmreg/ode.hpp"
#include "dsmreg/problems.hpp"
#include "dsmreg/vr.hpp"

namespace dsmreg {

enum class Family { Hilbert, Heat, Deriv2 };
enum class Method { Dsm, DsmQ1, DsmDopri, VrI, VrN };

inline Family family_from_string(const std::string& s) {
    if (s == "hilbert") return Family::Hilbert;
    if (s == "heat") return Family::Heat;
    if (s == "deriv2") return Family::Deriv2;
    throw std::invalid_argument("unknown family: " + s);
}

inline std::string to_string(Family f) {
    switch (f) {
        case Family::Hilbert: return "hilbert";
        case Family::Heat: return "heat";
        default: return "deriv2";
    }
}

inline Method method_from_string(const std::string& s) {
    if (s == "dsm") return Method::Dsm;
    if (s == "dsm-q1") return Method::DsmQ1;
    if (s == "dsm-dopri") return Method::DsmDopri;
    if (s == "vr-i") return Method::VrI;
    if (s == "vr-n") return Method::VrN;
    throw std::invalid_argument("unknown method: " + s);
}

inline std::string to_string(Method m) {
    switch (m) {
        case Method::Dsm: return "dsm";
        case Method::DsmQ1: return "dsm-q1";
        case Method::DsmDopri: return "dsm-dopri";
        case Method::VrI: return "vr-i";
        default: return "vr-n";
    }
}

struct ExperimentConfig {
    Family family = Family::Hilbert;
    std::string selector = "sqrt";  ///< profile name (hilbert) or case number (deriv2)
    std::vector<int> n_list;
    double delta_rel = 0.01;
    std::vector<std::uint64_t> seeds;
    std::vector<Method> methods;
    double q = 2.0;
    int itermax = 30;
    double kappa = 1.0;
    std::string output_dir = ".";
    bool include_a0_cost = false;
    bool emit_profiles = false;
    OdeConfig ode;
};

struct ReportRow {
    std::string family;
    std::string case_;
    int n = 0;
    std::uint64_t seed = 0;
    std::string method;
    double a0 = 0.0;
    double a_final = 0.0;
    long n_linsol = 0;
    long a0_solves = 0;  ///< cost of the shared find-a₀ search, kept out of n_linsol
    double rel_error = 0.0;
    double residual = 0.0;
    std::string status = "failed";
    double wall_time_ms = 0.0;
};

/// Build the labeled instance for one (family, selector, n, seed) cell.
inline ProblemInstance build_instance(Family family, const std::string& selector, int n,
                                      double delta_rel, std::uint64_t seed,
                                      double kappa = 1.0) {
    NoiseSpec noise{delta_rel, seed};
    switch (family) {
        case Family::Hilbert: {
            const Profile p = profile_from_string(selector);
            return make_instance(hilbert(n), exact_profile(p, n), noise,
                                 "hilbert-" + selector);
        }
        case Family::Heat: {
            HeatSystem sys = heat_system(n, kappa);
            return make_instance(sys.a, sys.y, noise, "heat");
        }
        default: {
            const int case_id = std::stoi(selector);
            Deriv2System sys = deriv2_system(n, case_id);
            return make_instance(sys.a, sys.y, noise, "deriv2-case" + selector);
        }
    }
}

namespace detail {

inline double rel_error(const Vector& u, const Vector& y) {
    Vector d = u;
    if (d.size() != y.size()) return std::nan("");
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= y[i];
    return norm2(d) / norm2(y);
}

}  // namespace detail

/// Run one method on a fresh-counter copy of the shared context.
inline ReportRow run_method(const ProblemInstance& inst, const RegContext& shared,
                            const A0Result& a0res, long a0_solves, Method method,
                            const ExperimentConfig& cfg) {
    ReportRow row;
    row.n = inst.a.rows();
    row.seed = inst.seed;
    row.method = to_string(method);
    row.a0 = a0res.a0;
    row.a0_solves = a0_solves;

    RegContext ctx = shared.fresh_counter();
    const auto t_start = std::chrono::steady_clock::now();
    switch (method) {
        case Method::Dsm:
        case Method::DsmQ1: {
            const double q = method == Method::DsmQ1 ? 1.0 : cfg.q;
            SolverResult r = dsm_solve(ctx, inst.delta, a0res.a0, q, cfg.itermax);
            row.a_final = r.a_final;
            row.n_linsol = r.n_linsol;
            row.residual = r.residual;
            row.status = to_string(r.status);
            row.rel_error = r.status == SolveStatus::Failed ? std::nan("")
                                                            : detail::rel_error(r.u, inst.y);
            break;
        }
        case Method::DsmDopri: {
            SolverResult r = dopri45_dsm(ctx, inst.delta, a0res.a0, cfg.ode);
            row.a_final = r.a_final;
            row.n_linsol = r.n_linsol;
            row.residual = r.residual;
            row.status = to_string(r.status);
            row.rel_error = r.status == SolveStatus::Failed ? std::nan("")
                                                            : detail::rel_error(r.u, inst.y);
            break;
        }
        case Method::VrI: {
            VrResult r = vr_i(ctx, a0res.a0);
            row.a_final = r.a_used;
            row.n_linsol = r.n_linsol;
            row.residual = r.residual;
            row.status = to_string(r.status);
            row.rel_error = r.status == VrStatus::Failed ? std::nan("")
                                                         : detail::rel_error(r.u, inst.y);
            break;
        }
        case Method::VrN: {
            VrResult r = vr_n(ctx, inst.delta, a0res.a0);
            row.a_final = r.a_used;
            row.n_linsol = r.n_linsol;
            row.residual = r.residual;
            row.status = to_string(r.status);
            row.rel_error = r.status == VrStatus::Failed ? std::nan("")
                                                         : detail::rel_error(r.u, inst.y);
            break;
        }
    }
    const auto t_end = std::chrono::steady_clock::now();
    row.wall_time_ms = std::chrono::duration<double, std::milli>(t_end - t_start).count();
    if (cfg.include_a0_cost) row.n_linsol += a0_solves;
    return row;
}

/// Run the whole sweep. find-a₀ runs once per (n, seed) and the resulting a₀
/// is shared by all methods. A method failure becomes a `failed` row rather
/// than aborting the sweep. Rows come back ordered by (family, n, seed,
/// method) with methods in declaration order.
inline std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg) {
    if (cfg.n_list.empty() || cfg.seeds.empty() || cfg.methods.empty())
        throw std::invalid_argument("run_experiment: n_list, seeds and methods must be nonempty");

    std::vector<ReportRow> rows;
    for (int n : cfg.n_list) {
        for (std::uint64_t seed : cfg.seeds) {
            const ProblemInstance inst =
                build_instance(cfg.family, cfg.selector, n, cfg.delta_rel, seed, cfg.kappa);
            RegContext shared = new_context(inst.a, inst.f_delta);
            A0Result a0res;
            long a0_solves = 0;
            bool a0_ok = true;
            try {
                a0res = find_a0(shared, inst.delta, inst.delta_rel);
                a0_solves = 1 + a0res.iterations;
            } catch (const std::exception&) {
                a0_ok = false;
            }
            for (Method m : cfg.methods) {
                if (!a0_ok) {
                    ReportRow row;
                    row.n = n;
                    row.seed = seed;
                    row.method = to_string(m);
                    row.status = "failed";
                    row.family = to_string(cfg.family);
                    row.case_ = cfg.selector;
                    rows.push_back(row);
                    continue;
                }
                ReportRow row = run_method(inst, shared, a0res, a0_solves, m, cfg);
                row.family = to_string(cfg.family);
                row.case_ = cfg.selector;
                rows.push_back(row);
            }
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [&](const ReportRow& a, const ReportRow& b) {
        if (a.family != b.family) return a.family < b.family;
        if (a.n != b.n) return a.n < b.n;
        return a.seed < b.seed;  // method order preserved by stability
    });
    return rows;
}

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

inline std::string format_real(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline constexpr const char* kCsvHeader =
    "family,case,n,seed,method,a0,a_final,n_linsol,rel_error,residual,status,wall_time_ms";

inline void emit_csv(const std::vector<ReportRow>& rows, const std::string& path) {
    if (rows.empty()) throw std::invalid_argument("emit_csv: no rows");
    std::ofstream out(path, std::ios::binary);  // binary keeps LF on every platform
    if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
    out << kCsvHeader << "\n";
    for (const ReportRow& r : rows) {
        out << r.family << ',' << r.case_ << ',' << r.n << ',' << r.seed << ','
            << r.method << ',' << format_real(r.a0) << ',' << format_real(r.a_final) << ','
            << r.n_linsol << ',' << format_real(r.rel_error) << ','
            << format_real(r.residual) << ',' << r.status << ','
            << format_real(r.wall_time_ms) << "\n";
    }
    if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

inline std::vector<ReportRow> parse_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("parse_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw std::runtime_error("parse_csv: bad header in " + path);
    std::vector<ReportRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> parts;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) parts.push_back(tok);
        if (parts.size() != 12) throw std::runtime_error("parse_csv: bad row in " + path);
        ReportRow r;
        r.family = parts[0];
        r.case_ = parts[1];
        r.n = std::stoi(parts[2]);
        r.seed = std::stoull(parts[3]);
        r.method = parts[4];
        r.a0 = std::stod(parts[5]);
        r.a_final = std::stod(parts[6]);
        r.n_linsol = std::stol(parts[7]);
        r.rel_error = std::stod(parts[8]);
        r.residual = std::stod(parts[9]);
        r.status = parts[10];
        r.wall_time_ms = std::stod(parts[11]);
        rows.push_back(std::move(r));
    }
    return rows;
}

/// Figure-data file: one row per component, columns (index, t, y_exact,
/// then one solution column per method in map order).
inline void emit_solution_profiles(const ProblemInstance& inst,
                                   const std::map<std::string, Vector>& results,
                                   const std::string& path) {
    const std::size_t n = inst.y.size();
    for (const auto& [name, u] : results)
        if (u.size() != n)
            throw DimensionMismatch("emit_solution_profiles: length mismatch for " + name);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_solution_profiles: cannot open " + path);
    out << "index,t,y_exact";
    for (const auto& [name, u] : results) out << ",u_" << name;
    out << "\n";
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        out << i + 1 << ',' << format_real(t) << ',' << format_real(inst.y[i]);
        for (const auto& [name, u] : results) out << ',' << format_real(u[i]);
        out << "\n";
    }
    if (!out) throw std::runtime_error("emit_solution_profiles: write failed for " + path);
}

/// Hilbert condition numbers at the table sizes.
inline std::vector<std::pair<int, double>> cond_table() {
    std::vector<std::pair<int, double>> out;
    for (int n : {20, 40, 60, 80, 100, 120}) out.emplace_back(n, cond_hilbert(n));
    return out;
}

// ---------------------------------------------------------------------------
// Flat key-value config files
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T, class F>
std::vector<T> parse_list(const std::string& s, F&& convert) {
    std::vector<T> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(convert(tok));
    }
    return out;
}

}  // namespace detail

/// Parse `key = value` lines; '#' starts a comment. Recognized keys mirror
/// the ExperimentConfig fields (family, case, n_list, delta_rel, seeds,
/// methods, q, itermax, kappa, output_dir, include_a0_cost, emit_profiles).
inline ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value, got: " + line);
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key == "family") cfg.family = family_from_string(val);
        else if (key == "case") cfg.selector = val;
        else if (key == "n_list")
            cfg.n_list = detail::parse_list<int>(val, [](const std::string& t) { return std::stoi(t); });
        else if (key == "delta_rel") cfg.delta_rel = std::stod(val);
        else if (key == "seeds")
            cfg.seeds = detail::parse_list<std::uint64_t>(
                val, [](const std::string& t) { return std::stoull(t); });
        else if (key == "methods")
            cfg.methods = detail::parse_list<Method>(
                val, [](const std::string& t) { return method_from_string(t); });
        else if (key == "q") cfg.q = std::stod(val);
        else if (key == "itermax") cfg.itermax = std::stoi(val);
        else if (key == "kappa") cfg.kappa = std::stod(val);
        else if (key == "output_dir") cfg.output_dir = val;
        else if (key == "include_a0_cost") cfg.include_a0_cost = (val == "true" || val == "1");
        else if (key == "emit_profiles") cfg.emit_profiles = (val == "true" || val == "1");
        else throw std::invalid_argument("config: unknown key: " + key);
    }
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse_config(in);
}

}  // namespace dsmreg
