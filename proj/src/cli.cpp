#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "nss/io.hpp"

// Command-line surface:
//   converge <config>       manufactured-solution convergence study
//   run <config>            coarsening run with sampling and checkpoints
//   resume <ckpt> <config>  continue a coarsening run from a checkpoint
//   fit <trace.csv>         scaling-law fits on a recorded trace
//   constants               stability constants incl. A_min
//   check                   property suites (operators|stability|convexity)

namespace nss {

namespace fs = std::filesystem;

namespace {

int cmd_converge(const std::string& config_path) {
    RunConfig cfg = load_config(config_path);
    ConvergenceConfig cc = convergence_config(cfg);
    if (cc.Ns.size() < 2) {
        std::cerr << "converge: config needs a [convergence] Ns list with >= 2 values\n";
        return 1;
    }
    ConvergenceResult res = run_convergence(cc);
    std::printf("%6s %12s %12s %14s %14s %14s\n", "N", "h", "dt", "err_l1",
                "err_l2", "err_linf");
    for (const auto& r : res.rows)
        std::printf("%6d %12.5e %12.5e %14.6e %14.6e %14.6e\n", r.N, r.h, r.dt,
                    r.err_l1, r.err_l2, r.err_linf);
    std::printf("fitted order: L1 %.4f  L2 %.4f (stderr %.4f)  Linf %.4f\n",
                res.order_l1, res.order_l2, res.slope_stderr_l2, res.order_linf);
    fs::create_directories(cfg.output_dir);
    write_convergence_csv(res, fs::path(cfg.output_dir) / "convergence.csv");
    return 0;
}

StepCallback checkpoint_callback(const RunConfig& cfg) {
    if (cfg.checkpoint_interval <= 0.0) return {};
    const fs::path path = fs::path(cfg.output_dir) / "checkpoint.bin";
    auto next = std::make_shared<double>(cfg.checkpoint_interval);
    const double interval = cfg.checkpoint_interval;
    return [path, next, interval, cfg](SchemeState& s) {
        if (s.t() + 1e-9 >= *next) {
            write_checkpoint(s, cfg, path);
            while (*next <= s.t() + 1e-9) *next += interval;
        }
    };
}

int cmd_run(const std::string& config_path) {
    RunConfig cfg = load_config(config_path);
    fs::create_directories(cfg.output_dir);
    CoarseningTrace trace = run_coarsening(coarsening_config(cfg),
                                           checkpoint_callback(cfg));
    write_trace_csv(trace, fs::path(cfg.output_dir) / "trace.csv");
    std::printf("run complete: t = %.6g, %zu samples -> %s\n",
                trace.rows.empty() ? 0.0 : trace.rows.back().t,
                trace.rows.size(),
                (fs::path(cfg.output_dir) / "trace.csv").c_str());
    return 0;
}

int cmd_resume(const std::string& ckpt_path, const std::string& config_path) {
    RunConfig cfg = load_config(config_path);
    fs::create_directories(cfg.output_dir);
    SpectralGrid grid = make_grid(cfg.N, cfg.L);
    SchemeState state = read_checkpoint(ckpt_path, cfg, grid);
    CoarseningTrace trace;
    continue_coarsening(state, coarsening_config(cfg), trace,
                        checkpoint_callback(cfg));
    write_trace_csv(trace, fs::path(cfg.output_dir) / "trace_resumed.csv");
    std::printf("resumed from t = %.6g to t = %.6g, %zu samples\n",
                trace.rows.empty() ? state.t() : trace.rows.front().t,
                state.t(), trace.rows.size());
    return 0;
}

int cmd_fit(const std::string& trace_path, const std::string& kind,
            double w_lo, double w_hi, const std::string& plot_script) {
    CoarseningTrace trace = read_trace_csv(trace_path);
    FitKind fk;
    if (kind == "energy") fk = FitKind::SemilogEnergy;
    else if (kind == "roughness") fk = FitKind::LoglogRoughness;
    else if (kind == "slope") fk = FitKind::LoglogSlope;
    else {
        std::cerr << "fit: unknown kind '" << kind << "'\n";
        return 2;
    }
    FitResult fit = fit_scaling(trace, fk, w_lo, w_hi);
    if (fk == FitKind::SemilogEnergy)
        std::printf("fit: E(t) ~ %.6g * ln(t) + %.6g  (rms %.3e, %zu samples)\n",
                    fit.a, fit.b, fit.residual_rms, fit.samples);
    else
        std::printf("fit: y(t) ~ %.6g * t^%.6g  (rms %.3e, %zu samples)\n", fit.a,
                    fit.b, fit.residual_rms, fit.samples);
    if (!plot_script.empty()) {
        const int col = fk == FitKind::SemilogEnergy ? 2
                        : fk == FitKind::LoglogRoughness ? 4
                                                         : 5;
        char fbuf[96];
        if (fk == FitKind::SemilogEnergy)
            std::snprintf(fbuf, sizeof(fbuf), "%.17g * log(x) + %.17g", fit.a,
                          fit.b);
        else
            std::snprintf(fbuf, sizeof(fbuf), "%.17g * x**%.17g", fit.a, fit.b);
        std::string gp;
        gp += "set datafile separator ','\n";
        gp += "set logscale x\n";
        if (fk != FitKind::SemilogEnergy) gp += "set logscale y\n";
        gp += std::string("f(x) = ") + fbuf + "\n";
        gp += "plot '" + trace_path + "' using 1:" + std::to_string(col) +
              " with lines title 'data', f(x) title 'fit'\n";
        std::ofstream out(plot_script);
        out << gp;
        std::printf("plot script written to %s\n", plot_script.c_str());
    }
    return 0;
}

int cmd_constants(double kappa, double eps) {
    ModelParams p;
    p.kappa = kappa;
    p.eps = eps;
    StabilityConstants sc = stability_constants(p);
    std::printf("C4 = C5   = %.12g\n", sc.C4);
    std::printf("kappa0    = %.12g\n", sc.kappa0);
    std::printf("kappa*    = %.12g\n", sc.kappa_star);
    std::printf("gamma1    = %.12g\n", sc.gamma1);
    std::printf("gamma2    = %.12g\n", sc.gamma2);
    std::printf("gamma3    = %.12g\n", sc.gamma3);
    std::printf("gamma0    = %.12g\n", sc.gamma0);
    std::printf("alpha0    = %.12g\n", sc.alpha0);
    std::printf("A_min     = %.12g\n", sc.A_min);
    if (!sc.hypotheses_met) std::printf("warning: %s\n", sc.warning.c_str());
    return 0;
}

int cmd_check(const std::string& suite) {
    int failures = 0;
    auto report = [&failures](const char* name, bool ok) {
        std::printf("%-40s %s\n", name, ok ? "ok" : "FAILED");
        if (!ok) ++failures;
    };

    if (suite == "operators" || suite == "all") {
        SpectralGrid grid = make_grid(32, 1.0);
        FftWorkspace ws(grid);
        PhiTables tb = build_tables(grid, 0.1, 0.25, 0.0, 0.1);
        bool ok = true;
        for (std::uint64_t seed = 0; seed < 100 && ok; ++seed) {
            Field f = random_initial_data(grid, seed + 1, 1.0);
            ok = check_operator_bounds(grid, tb, ws, f).ok;
        }
        report("operator inequalities (100 random fields)", ok);

        bool mono = true, ratio = true;
        double prev0 = 1.0, prev1 = 0.5, prev2 = 1.0 / 3.0;
        const double C4 = 1.0 / (1.0 - std::exp(-2.0));
        for (int i = 0; i < 10000; ++i) {
            const double x = std::pow(10.0, -6.0 + 8.0 * i / 9999.0);
            GValues g = eval_g(x);
            mono = mono && g.g0 <= prev0 + 1e-14 && g.g1 <= prev1 + 1e-14 &&
                   g.g2 <= prev2 + 1e-14;
            ratio = ratio && g.g1 / g.g0 <= C4 + 1e-12 && g.g2 / g.g0 <= C4 + 1e-12;
            prev0 = g.g0;
            prev1 = g.g1;
            prev2 = g.g2;
        }
        report("g-function monotonicity", mono);
        report("g-function ratio bounds", ratio);
    }
    if (suite == "stability" || suite == "all") {
        SpectralGrid grid = make_grid(32, 1.0);
        ModelParams p;
        p.eps = 0.1;
        p.kappa = 0.25;
        StabilityConstants sc = stability_constants(p);
        p.A = sc.A_min;
        Field u0 = random_initial_data(grid, 7, 0.1);
        SchemeState state(grid, u0, 0.1, p, StartupPolicy::CopyInitial);
        FftWorkspace& ws = state.workspace();
        double prev = modified_energy(ws, state.u(), state.u_prev(),
                                      state.u_prev2(), sc, p);
        bool mono = true;
        for (int s = 0; s < 200; ++s) {
            state.step(Scheme::Etd3, p);
            const double cur = modified_energy(ws, state.u(), state.u_prev(),
                                               state.u_prev2(), sc, p);
            mono = mono && cur <= prev + 1e-10;
            prev = cur;
        }
        report("modified-energy monotonicity (200 steps)", mono);
    }
    if (suite == "convexity" || suite == "all") {
        report("H convex at kappa0 = 1/8",
               convexity_check(0.125, 301).min_eigenvalue >= -1e-12);
        report("H non-convex at kappa0 = 0.05",
               convexity_check(0.05, 301).min_eigenvalue < 0.0);
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int cli(int argc, char** argv) {
    CLI::App app{"no-slope-selection thin-film ETD solver"};
    app.require_subcommand(1);

    std::string config_path, ckpt_path, trace_path, fit_kind = "energy";
    std::string plot_script;
    std::pair<double, double> window{10.0, 400.0};
    double kappa = 0.25, eps = 0.1;
    std::string suite = "all";

    auto* converge = app.add_subcommand("converge", "run the convergence study");
    converge->add_option("config", config_path)->required();

    auto* run = app.add_subcommand("run", "run a coarsening simulation");
    run->add_option("config", config_path)->required();

    auto* resume = app.add_subcommand("resume", "resume from a checkpoint");
    resume->add_option("checkpoint", ckpt_path)->required();
    resume->add_option("config", config_path)->required();

    auto* fit = app.add_subcommand("fit", "fit scaling laws to a trace");
    fit->add_option("trace", trace_path)->required();
    fit->add_option("--kind", fit_kind, "energy|roughness|slope");
    fit->add_option("--window", window, "fit window t_lo,t_hi")->delimiter(',');
    fit->add_option("--plot-script", plot_script, "emit a gnuplot script");

    auto* constants = app.add_subcommand("constants", "print stability constants");
    constants->add_option("--kappa", kappa);
    constants->add_option("--eps", eps);

    auto* check = app.add_subcommand("check", "run property suites");
    check->add_option("--suite", suite, "operators|stability|convexity|all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::cerr << app.help();
        return 2;
    }

    try {
        if (converge->parsed()) return cmd_converge(config_path);
        if (run->parsed()) return cmd_run(config_path);
        if (resume->parsed()) return cmd_resume(ckpt_path, config_path);
        if (fit->parsed())
            return cmd_fit(trace_path, fit_kind, window.first, window.second,
                           plot_script);
        if (constants->parsed()) return cmd_constants(kappa, eps);
        if (check->parsed()) return cmd_check(suite);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace nss
