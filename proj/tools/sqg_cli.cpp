// sqg_cli: experiment driver.
//
//   sqg_cli simulate <config> [--out DIR]
//   sqg_cli verify-inequality [--A 1 --delta 1e-4 --gamma 1e-5 --xi-min 1e-12 --xi-max 1e4 --points 400]
//   sqg_cli scan-params --A <A>
//   sqg_cli empirical-modulus <snapshot> [--cutoff pi]
//   sqg_cli calibrate-A <config> [--golden FILE]
//
// Exit codes: 0 success / PASS, 1 failure / FAIL / error, 2 blow-up during simulate.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "sqg/sqg.hpp"

namespace fs = std::filesystem;
using namespace sqg;

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    return f;
}

std::string snapshot_name(std::size_t index) {
    std::ostringstream s;
    s << "snapshot_" << std::setw(5) << std::setfill('0') << index << ".sqg";
    return s.str();
}

const char* preset_name(config::Preset p) {
    switch (p) {
        case config::Preset::benchmark: return "benchmark";
        case config::Preset::zero: return "zero";
        case config::Preset::modes: return "modes";
        case config::Preset::random: return "random";
    }
    return "?";
}

int cmd_simulate(const std::string& config_path, const std::string& out_override) {
    config::ExperimentConfig cfg = config::parse_file(config_path);
    if (!out_override.empty()) cfg.output_dir = out_override;
    fs::create_directories(cfg.output_dir);

    const ScalarField theta0 = config::initial_field(cfg);
    RunHooks hooks;
    double scale = 0.0;
    if (cfg.min_C) {
        const double sup = theta0.sup_norm();
        scale = cfg.probe_scale ? *cfg.probe_scale : (sup > 0.0 ? probe_scale(sup, cfg.modulus) : 1.0);
        hooks.snapshot_probe = min_C_probe(cfg.modulus, scale);
    }
    const Trajectory traj = run(theta0, cfg.solver, hooks);

    for (std::size_t i = 0; i < traj.snapshots.size(); ++i)
        io::write_snapshot(cfg.output_dir / snapshot_name(i), {traj.times[i], cfg.solver.alpha, traj.snapshots[i]});
    {
        auto f = open_out(cfg.output_dir / "diagnostics.csv");
        io::write_diagnostics_csv(f, traj.diagnostics);
    }
    {
        auto f = open_out(cfg.output_dir / "manifest.txt");
        io::full_precision(f);
        f << "config = " << fs::absolute(config_path).string() << '\n'
          << "n = " << cfg.n << '\n'
          << "alpha = " << cfg.solver.alpha << '\n'
          << "t_end = " << cfg.solver.t_end << '\n'
          << "advection_sign = " << (cfg.solver.advection_sign == AdvectionSign::paper ? "paper" : "standard") << '\n'
          << "preset = " << preset_name(cfg.initial.preset) << '\n'
          << "seed = " << cfg.initial.seed << '\n'
          << "threads = " << thread_count() << '\n'
          << "steps = " << traj.steps << '\n'
          << "snapshots = " << traj.snapshots.size() << '\n';
        if (cfg.min_C) f << "probe_scale = " << scale << '\n';
        f << "status = " << (traj.completed() ? "completed" : "blow-up") << '\n';
    }

    if (traj.blow_up) {
        std::cerr << "blow-up at t=" << traj.blow_up->t << ": " << traj.blow_up->reason << '\n';
        return 2;
    }
    const DiagnosticsRecord& last = traj.diagnostics.back();
    std::cout << "completed " << traj.steps << " steps to t=" << last.t << "; sup_theta=" << last.sup_theta
              << " sup_grad=" << last.sup_grad << " l2=" << last.l2 << '\n'
              << "outputs in " << cfg.output_dir.string() << '\n';
    return 0;
}

int cmd_verify(double A, double delta, double gamma, double xi_min, double xi_max, std::size_t points,
               const std::string& csv_path) {
    const KnvModulusParams p{delta, gamma};
    const auto violations = feasibility_violations(p, A);
    for (const auto& v : violations) std::cout << "infeasible: " << v << '\n';
    if (points == 1) std::cout << "warning: single-point grid; the scan says nothing about other xi\n";

    if (!(A > 0.0 && delta > 0.0 && gamma > 0.0)) {
        std::cout << "FAIL\n";
        return 1;
    }
    FunctionalOptions opt;
    opt.allow_nonconcave = !violations.empty();  // still report margins for infeasible input
    const MarginScan scan = scan_margins(log_grid(xi_min, xi_max, points), p, A, opt);
    {
        auto f = open_out(csv_path);
        io::write_margins_csv(f, scan.reports);
    }
    std::size_t uncertified = 0;
    for (const auto& r : scan.reports) uncertified += r.certified() ? 0 : 1;

    bool chains_ok = true;
    if (violations.empty()) {
        const ChainSuite suite = check_case_chains(p, A, 64);
        std::size_t failed = 0;
        for (const auto* set : {&suite.small, &suite.large})
            for (const auto& rec : *set)
                for (const auto& name : rec.failures()) {
                    if (failed++ < 10) std::cout << "chain link failed at xi=" << rec.xi << ": " << name << '\n';
                }
        chains_ok = failed == 0;
        std::cout << "chains: " << (chains_ok ? "all links hold" : std::to_string(failed) + " link failures")
                  << " at 64+64 sampled xi\n";
    }

    const MarginReport& worst = scan.worst();
    io::full_precision(std::cout);
    std::cout << "max margin " << worst.margin << " at xi=" << worst.xi << " (quad_error " << worst.quad_error
              << "); " << uncertified << " of " << scan.reports.size() << " points not certified; csv: " << csv_path
              << '\n';
    const bool pass = violations.empty() && uncertified == 0 && chains_ok;
    std::cout << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? 0 : 1;
}

int cmd_scan_params(double A) {
    const ParamSearchResult r = search_params(A);
    io::full_precision(std::cout);
    std::cout << "delta,gamma,max_margin,xi_at_max,quad_error,certified\n";
    for (const auto& c : r.tried)
        std::cout << c.params.delta << ',' << c.params.gamma << ',' << c.max_margin << ',' << c.xi_at_max << ','
                  << c.quad_error << ',' << (c.certified ? 1 : 0) << '\n';
    if (!r.found) {
        std::cerr << r.message << '\n';
        return 1;
    }
    std::cerr << "found delta=" << r.found->params.delta << " gamma=" << r.found->params.gamma
              << " (delta bound " << small_case_delta_bound(A) << ")\n";
    return 0;
}

int cmd_empirical_modulus(const std::string& path, double cutoff) {
    const io::Snapshot s = io::read_snapshot(path);
    EmpiricalModulusOptions opt;
    opt.cutoff = cutoff;
    const EmpiricalModulus em = empirical_modulus(s.theta, opt);
    io::write_empirical_modulus_csv(std::cout, em);
    if (em.subsampled) std::cerr << "note: offsets subsampled at n=" << s.theta.n() << "; values are lower bounds\n";
    return 0;
}

int cmd_calibrate(const std::string& config_path, const std::string& golden) {
    const config::ExperimentConfig cfg = config::parse_file(config_path);
    const auto corpus = single_mode_corpus(TorusGrid(cfg.n), cfg.modulus);
    const CalibrationResult r = calibrate_A(corpus, cfg.modulus);
    io::full_precision(std::cout);
    std::cout << "field,C,ratio,xi_at_max\n";
    for (std::size_t i = 0; i < r.fields.size(); ++i)
        std::cout << i << ',' << r.fields[i].C << ',' << r.fields[i].ratio << ',' << r.fields[i].xi_at_max << '\n';
    std::cout << "A = " << r.A << '\n';
    if (golden.empty()) return 0;

    std::ifstream g(golden);
    double expected = 0.0, rel_tol = 0.0;
    if (!(g >> expected >> rel_tol)) throw Error("golden file " + golden + ": expected '<A> <relative tolerance>'");
    const double rel = std::abs(r.A - expected) / expected;
    std::cout << "golden " << expected << " relative difference " << rel << '\n';
    const bool pass = rel <= rel_tol;
    std::cout << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dissipative quasi-geostrophic workbench"};
    app.require_subcommand(1);

    std::string sim_config, sim_out;
    auto* sim = app.add_subcommand("simulate", "run the solver from a config file");
    sim->add_option("config", sim_config, "config file")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", sim_out, "output directory (overrides [output] dir)");

    double A = 1.0, delta = 1e-4, gamma = 1e-5, xi_min = 1e-12, xi_max = 1e4;
    std::size_t points = 400;
    std::string margins_csv = "margins.csv";
    auto* verify = app.add_subcommand("verify-inequality", "scan the breakthrough margin and the bound chains");
    verify->add_option("--A", A, "velocity modulus constant")->capture_default_str();
    verify->add_option("--delta", delta, "breakpoint")->capture_default_str();
    verify->add_option("--gamma", gamma, "tail strength")->capture_default_str();
    verify->add_option("--xi-min", xi_min)->capture_default_str()->check(CLI::PositiveNumber);
    verify->add_option("--xi-max", xi_max)->capture_default_str()->check(CLI::PositiveNumber);
    verify->add_option("--points", points)->capture_default_str()->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
    verify->add_option("--csv", margins_csv, "margin report")->capture_default_str();

    double scan_A = 1.0;
    auto* scan = app.add_subcommand("scan-params", "search for certified (delta, gamma) at a given A");
    scan->add_option("--A", scan_A)->required()->check(CLI::PositiveNumber);

    std::string snapshot_path;
    double cutoff = std::numbers::pi;
    auto* em = app.add_subcommand("empirical-modulus", "pairwise-difference modulus of a snapshot (CSV on stdout)");
    em->add_option("snapshot", snapshot_path)->required()->check(CLI::ExistingFile);
    em->add_option("--cutoff", cutoff, "largest separation")->capture_default_str();

    std::string cal_config, golden;
    auto* cal = app.add_subcommand("calibrate-A", "estimate A on the single-mode corpus");
    cal->add_option("config", cal_config)->required()->check(CLI::ExistingFile);
    cal->add_option("--golden", golden, "file holding '<A> <relative tolerance>'")->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) return cmd_simulate(sim_config, sim_out);
        if (*verify) {
            if (xi_max < xi_min) throw InvalidArgument("--xi-max must be >= --xi-min");
            return cmd_verify(A, delta, gamma, xi_min, xi_max, points, margins_csv);
        }
        if (*scan) return cmd_scan_params(scan_A);
        if (*em) return cmd_empirical_modulus(snapshot_path, cutoff);
        if (*cal) return cmd_calibrate(cal_config, golden);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
