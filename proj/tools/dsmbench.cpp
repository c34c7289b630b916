// dsmbench: build ill-conditioned test instances, solve them with the DSM
// and VR family of methods, and reproduce the benchmark tables as CSV.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsmreg/bench.hpp"

namespace fs = std::filesystem;
using namespace dsmreg;

namespace {

int cmd_gen(const std::string& family, const std::string& selector, int n,
            double delta_rel, std::uint64_t seed, double kappa, const std::string& out) {
    const ProblemInstance inst =
        build_instance(family_from_string(family), selector, n, delta_rel, seed, kappa);
    save_instance(inst, out);
    std::cout << "wrote " << out << " (n=" << n << ", delta=" << inst.delta << ")\n";
    return 0;
}

int cmd_solve(const std::string& in_path, const std::string& method_name, double q,
              int itermax, bool include_a0_cost, const std::string& out) {
    const ProblemInstance inst = load_instance(in_path);
    RegContext shared = new_context(inst.a, inst.f_delta);
    const A0Result a0res = find_a0(shared, inst.delta, inst.delta_rel);

    ExperimentConfig cfg;
    cfg.q = q;
    cfg.itermax = itermax;
    cfg.include_a0_cost = include_a0_cost;
    ReportRow row = run_method(inst, shared, a0res, 1 + a0res.iterations,
                               method_from_string(method_name), cfg);
    row.family = inst.label;
    row.case_ = inst.label;

    std::cout << "method=" << row.method << " a0=" << row.a0 << " a_final=" << row.a_final
              << " n_linsol=" << row.n_linsol << " (find-a0: " << row.a0_solves << ")"
              << " rel_error=" << row.rel_error << " residual=" << row.residual
              << " status=" << row.status << "\n";
    if (!out.empty()) emit_csv({row}, out);
    return row.status == "failed" ? 1 : 0;
}

int cmd_bench(const std::string& config_path, const std::string& out_dir_override,
              bool include_a0_cost) {
    ExperimentConfig cfg = parse_config_file(config_path);
    if (!out_dir_override.empty()) cfg.output_dir = out_dir_override;
    if (include_a0_cost) cfg.include_a0_cost = true;
    fs::create_directories(cfg.output_dir);

    const std::vector<ReportRow> rows = run_experiment(cfg);
    const std::string csv_path = (fs::path(cfg.output_dir) / "results.csv").string();
    emit_csv(rows, csv_path);
    std::cout << "wrote " << csv_path << " (" << rows.size() << " rows)\n";

    if (cfg.emit_profiles) {
        // One profile file per n, using the first seed.
        for (int n : cfg.n_list) {
            const ProblemInstance inst = build_instance(cfg.family, cfg.selector, n,
                                                        cfg.delta_rel, cfg.seeds.front(),
                                                        cfg.kappa);
            RegContext shared = new_context(inst.a, inst.f_delta);
            const A0Result a0res = find_a0(shared, inst.delta, inst.delta_rel);
            std::map<std::string, Vector> solutions;
            for (Method m : cfg.methods) {
                RegContext ctx = shared.fresh_counter();
                switch (m) {
                    case Method::Dsm:
                        solutions["dsm"] =
                            dsm_solve(ctx, inst.delta, a0res.a0, cfg.q, cfg.itermax).u;
                        break;
                    case Method::DsmQ1:
                        solutions["dsm_q1"] =
                            dsm_solve(ctx, inst.delta, a0res.a0, 1.0, cfg.itermax).u;
                        break;
                    case Method::DsmDopri:
                        solutions["dsm_dopri"] =
                            dopri45_dsm(ctx, inst.delta, a0res.a0, cfg.ode).u;
                        break;
                    case Method::VrI:
                        solutions["vr_i"] = vr_i(ctx, a0res.a0).u;
                        break;
                    case Method::VrN:
                        solutions["vr_n"] = vr_n(ctx, inst.delta, a0res.a0).u;
                        break;
                }
            }
            const std::string prof_path =
                (fs::path(cfg.output_dir) / ("profiles_n" + std::to_string(n) + ".csv")).string();
            emit_solution_profiles(inst, solutions, prof_path);
            std::cout << "wrote " << prof_path << "\n";
        }
    }

    for (const ReportRow& r : rows)
        if (r.status == "failed") return 1;
    return 0;
}

int cmd_cond_hilbert() {
    std::cout << "n,cond\n";
    for (const auto& [n, cond] : cond_table()) std::cout << n << ',' << cond << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DSM / VR regularization benchmark harness"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a problem instance as JSON");
    std::string family = "hilbert", selector = "sqrt", out = "instance.json";
    int n = 100;
    double delta_rel = 0.01, kappa = 1.0;
    std::uint64_t seed = 1;
    gen->add_option("--family", family, "hilbert, heat or deriv2");
    gen->add_option("--case", selector, "profile (sqrt/square/sine) or deriv2 case (1/2/3)");
    gen->add_option("--n", n, "system size");
    gen->add_option("--delta-rel", delta_rel, "relative noise level");
    gen->add_option("--seeds", seed, "noise seed");
    gen->add_option("--kappa", kappa, "heat kernel parameter");
    gen->add_option("--out", out, "output JSON path");

    // solve
    auto* solve = app.add_subcommand("solve", "solve one instance with one method");
    std::string in_path, method = "dsm", solve_out;
    double q = 2.0;
    int itermax = 30;
    bool include_a0 = false;
    solve->add_option("--in", in_path, "instance JSON")->required();
    solve->add_option("--methods", method, "dsm, dsm-q1, dsm-dopri, vr-i or vr-n");
    solve->add_option("--q", q, "step growth factor in [1,2]");
    solve->add_option("--itermax", itermax, "DSM iteration cap");
    solve->add_flag("--include-a0-cost", include_a0, "fold find-a0 solves into n_linsol");
    solve->add_option("--out", solve_out, "optional single-row CSV");

    // bench
    auto* bench = app.add_subcommand("bench", "run a sweep from a config file");
    std::string config_path, bench_out;
    bool bench_include_a0 = false;
    bench->add_option("--config", config_path, "flat key=value config file")->required();
    bench->add_option("--out", bench_out, "override output_dir");
    bench->add_flag("--include-a0-cost", bench_include_a0, "fold find-a0 solves into n_linsol");

    // cond-hilbert
    auto* cond = app.add_subcommand("cond-hilbert", "print the Hilbert condition-number table");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(family, selector, n, delta_rel, seed, kappa, out);
        if (solve->parsed())
            return cmd_solve(in_path, method, q, itermax, include_a0, solve_out);
        if (bench->parsed()) return cmd_bench(config_path, bench_out, bench_include_a0);
        if (cond->parsed()) return cmd_cond_hilbert();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
