#include "nsebox/commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "nsebox/fft.hpp"
#include "nsebox/initial_conditions.hpp"

namespace nsebox {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw SnapshotIoError(SnapshotIoError::Kind::io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string snapshot_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snap_%06zu.nsef", i);
    return buf;
}

std::string status_string(RunStatus s) {
    switch (s) {
        case RunStatus::completed: return "completed";
        case RunStatus::resolution_lost: return "resolution_lost";
        case RunStatus::blowup_detected: return "blowup_detected";
    }
    return "unknown";
}

unsigned worker_cap() {
    unsigned cap = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("NSE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) cap = std::min<unsigned>(cap, unsigned(v));
    }
    return cap;
}

RunConfig config_of_run(const fs::path& dir) {
    return parse_config(read_text_file(dir / "config.txt"));
}

void check_cylinder_index(long idx, std::size_t count) {
    if (idx < 0 || std::size_t(idx) >= count)
        throw std::invalid_argument("cylinder index " + std::to_string(idx) +
                                    " out of range (config has " + std::to_string(count) + ")");
}

}  // namespace

SimulateOutcome cmd_simulate(const std::string& config_path, const std::string& out_override,
                             std::ostream& log) {
    const std::string config_text = read_text_file(config_path);
    RunConfig cfg = parse_config(config_text);
    cfg.validate();

    const fs::path dir = out_override.empty() ? fs::path(cfg.output_dir)
                                              : fs::path(out_override);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw SnapshotIoError(SnapshotIoError::Kind::io,
                              "cannot create output directory " + dir.string());
    {
        std::ofstream out(dir / "config.txt", std::ios::trunc);
        out << config_text;
        if (!out)
            throw SnapshotIoError(SnapshotIoError::Kind::io, "cannot write config copy");
    }

    log << "simulate: n = " << cfg.solver.grid.n << ", dt = " << fmt(cfg.solver.dt)
        << ", t_end = " << fmt(cfg.solver.t_end) << "\n";
    const Trajectory traj = simulate(cfg.solver, make_initial_condition(cfg));

    RunManifest manifest;
    manifest.grid = cfg.solver.grid;
    manifest.dt = cfg.solver.dt;
    manifest.snapshot_interval = cfg.solver.snapshot_interval;
    manifest.status = status_string(traj.status);
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        const std::string name = snapshot_name(i);
        write_snapshot(traj.snapshots[i], dir / name);
        manifest.times.push_back(traj.snapshots[i].t);
        manifest.files.push_back(name);
    }
    write_manifest(manifest, dir);

    SimulateOutcome outcome;
    outcome.dir = dir;
    outcome.status = traj.status;
    outcome.status_detail = traj.status_detail;
    outcome.snapshots = traj.snapshots.size();
    log << "simulate: wrote " << outcome.snapshots << " snapshots to " << dir.string() << " ("
        << manifest.status << ")\n";
    if (traj.status != RunStatus::completed) log << "simulate: " << traj.status_detail << "\n";
    return outcome;
}

void write_diagnostics_csv(const DiagnosticsSeries& series, const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw SnapshotIoError(SnapshotIoError::Kind::io, "cannot write " + path.string());
    out << "t,alpha,grad_norm_S,criterion,local_enstrophy,set_volume,"
           "alpha_S,grad_norm_ball,criterion_ball\n";
    for (const auto& r : series.rows) {
        out << fmt(r.t) << ',' << fmt(r.alpha) << ',' << fmt(r.grad_norm_S) << ','
            << fmt(r.criterion) << ',' << fmt(r.local_enstrophy) << ',' << fmt(r.set_volume)
            << ',' << fmt(r.alpha_S) << ',' << fmt(r.grad_norm_ball) << ','
            << fmt(r.criterion_ball) << '\n';
    }
    if (!out)
        throw SnapshotIoError(SnapshotIoError::Kind::io, "write failed for " + path.string());
}

void cmd_diagnose(const std::string& run_dir, long cylinder_index, std::ostream& log) {
    const fs::path dir(run_dir);
    const RunConfig cfg = config_of_run(dir);
    if (cfg.cylinders.empty())
        throw std::invalid_argument("diagnose: config defines no cylinders");
    const RunDirectoryProvider provider(dir);

    std::vector<long> targets;
    if (cylinder_index < 0) {
        for (std::size_t i = 0; i < cfg.cylinders.size(); ++i) targets.push_back(long(i));
    } else {
        check_cylinder_index(cylinder_index, cfg.cylinders.size());
        targets.push_back(cylinder_index);
    }

    auto run_one = [&](long idx) {
        const Cylinder& cyl = cfg.cylinders[std::size_t(idx)];
        CutoffSpec spec;
        spec.cylinder = cyl;
        spec.delta = cfg.delta;
        spec.profile_order = cfg.profile_order;
        const CutoffPair cutoff = build_cutoff(spec, provider.grid());
        const RegionMask ball = ball_mask(provider.grid(), cyl.x0, 2.0 * cyl.r);
        DiagnosticsSeries series;
        for (std::size_t i = 0; i < provider.size(); ++i)
            series.rows.push_back(
                diagnose_snapshot(provider.load(i), cutoff, ball, cfg.M, cfg.eps_reg));
        return series;
    };

    // fan out over cylinders, capped by NSE_THREADS; results are written in
    // cylinder order regardless of completion order
    const unsigned cap = worker_cap();
    std::vector<DiagnosticsSeries> results(targets.size());
    for (std::size_t base = 0; base < targets.size(); base += cap) {
        const std::size_t batch = std::min<std::size_t>(cap, targets.size() - base);
        std::vector<std::future<DiagnosticsSeries>> futs;
        for (std::size_t b = 0; b < batch; ++b)
            futs.push_back(std::async(std::launch::async, run_one, targets[base + b]));
        for (std::size_t b = 0; b < batch; ++b) results[base + b] = futs[b].get();
    }
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const fs::path csv = dir / ("diagnostics_cyl" + std::to_string(targets[k]) + ".csv");
        write_diagnostics_csv(results[k], csv);
        log << "diagnose: wrote " << csv.string() << " (" << results[k].rows.size()
            << " rows)\n";
    }
}

void write_ledger_csv(const LedgerReport& r, const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw SnapshotIoError(SnapshotIoError::Kind::io, "cannot write " + path.string());
    std::vector<std::pair<std::string, double>> cols = {
        {"t", r.t},
        {"stride", double(r.stride)},
        {"term_time", r.term_time},
        {"term_time_ibp", r.term_time_ibp},
        {"boundary_term", r.boundary_term},
        {"term_diff_direct", r.term_diff_direct},
        {"term_diff", r.term_diff},
        {"term_nl", r.term_nl},
        {"term_nl_true", r.term_nl_true},
        {"term_nl_ibp", r.term_nl_ibp},
        {"term_nl_ibp_curl", r.term_nl_ibp_curl},
        {"term_nl_ibp_grad", r.term_nl_ibp_grad},
        {"residual_major1", r.residual_major1},
        {"residual_est1", r.residual_est1},
        {"residual_est2", r.residual_est2},
        {"residual_est3", r.residual_est3},
        {"residual_est1_pairwise", r.residual_est1_pairwise},
        {"residual_est3_pairwise", r.residual_est3_pairwise},
        {"residual_scale", r.residual_scale},
        {"I1", r.I1},
        {"I2_lo", r.I2_lo},
        {"I2_hi", r.I2_hi},
        {"I2_unsplit", r.I2_unsplit},
        {"I3_lo", r.I3_lo},
        {"I3_hi", r.I3_hi},
        {"I3_unsplit", r.I3_unsplit},
        {"partition_residual_I2", r.partition_residual_I2},
        {"partition_residual_I3", r.partition_residual_I3},
        {"u0_l2_ball", r.u0_l2_ball},
        {"u0_l2_global", r.u0_l2_global},
        {"sup_u_l2_ball", r.sup_u_l2_ball},
        {"grad_u_sq_Q", r.grad_u_sq_Q},
        {"grad_psiom_sq_Q", r.grad_psiom_sq_Q},
        {"sup_K", r.sup_K},
        {"sup_K_ball", r.sup_K_ball},
        {"sup_psiom_sq", r.sup_psiom_sq},
        {"initial_local_enstrophy", r.initial_local_enstrophy},
        {"sup_local_enstrophy", r.sup_local_enstrophy},
        {"cutoff_C_achieved", r.cutoff_C_achieved},
    };
    for (const auto& b : r.bounds) {
        cols.push_back({b.name + ".lhs", b.lhs});
        cols.push_back({b.name + ".rhs", b.rhs});
        cols.push_back({b.name + ".holds", b.holds ? 1.0 : 0.0});
        cols.push_back({b.name + ".ratio", b.ratio});
    }
    for (std::size_t i = 0; i < cols.size(); ++i)
        out << cols[i].first << (i + 1 < cols.size() ? ',' : '\n');
    for (std::size_t i = 0; i < cols.size(); ++i)
        out << fmt(cols[i].second) << (i + 1 < cols.size() ? ',' : '\n');
    if (!out)
        throw SnapshotIoError(SnapshotIoError::Kind::io, "write failed for " + path.string());
}

void write_ledger_text(const LedgerReport& r, const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw SnapshotIoError(SnapshotIoError::Kind::io, "cannot write " + path.string());
    out << "localized energy ledger at t = " << fmt(r.t) << " (stride " << r.stride << ")\n\n";
    out << "identity terms over Q_2r^t:\n";
    out << "  time term (direct)        " << fmt(r.term_time) << "\n";
    out << "  time term (parts + bdry)  " << fmt(r.term_time_ibp) << "\n";
    out << "  boundary term             " << fmt(r.boundary_term) << "\n";
    out << "  diffusion (direct)        " << fmt(r.term_diff_direct) << "\n";
    out << "  diffusion (parts)         " << fmt(r.term_diff) << "\n";
    out << "  nonlinear (dealiased)     " << fmt(r.term_nl) << "\n";
    out << "  nonlinear (unfiltered)    " << fmt(r.term_nl_true) << "\n";
    out << "  nonlinear (parts)         " << fmt(r.term_nl_ibp) << "\n\n";
    out << "residuals (relative to " << fmt(r.residual_scale) << "):\n";
    out << "  identity     " << fmt(r.residual_major1) << "\n";
    out << "  est1         " << fmt(r.residual_est1) << " (pairwise "
        << fmt(r.residual_est1_pairwise) << ")\n";
    out << "  est2         " << fmt(r.residual_est2) << "\n";
    out << "  est3         " << fmt(r.residual_est3) << " (pairwise "
        << fmt(r.residual_est3_pairwise) << ")\n\n";
    out << "nonlinearity decomposition (analytic cutoff):\n";
    out << "  I1           " << fmt(r.I1) << "\n";
    out << "  I2 lo/hi     " << fmt(r.I2_lo) << " / " << fmt(r.I2_hi) << " (partition residual "
        << fmt(r.partition_residual_I2) << ")\n";
    out << "  I3 lo/hi     " << fmt(r.I3_lo) << " / " << fmt(r.I3_hi) << " (partition residual "
        << fmt(r.partition_residual_I3) << ")\n\n";
    out << "context:\n";
    out << "  ||u0|| ball / global      " << fmt(r.u0_l2_ball) << " / " << fmt(r.u0_l2_global)
        << "\n";
    out << "  sup_s ||u(s)|| ball       " << fmt(r.sup_u_l2_ball) << "\n";
    out << "  int int |grad u|^2        " << fmt(r.grad_u_sq_Q) << "\n";
    out << "  int int |grad(psi om)|^2  " << fmt(r.grad_psiom_sq_Q) << "\n";
    out << "  sup K (S_s / ball norm)   " << fmt(r.sup_K) << " / " << fmt(r.sup_K_ball) << "\n";
    out << "  localized enstrophy       initial " << fmt(r.initial_local_enstrophy) << ", sup "
        << fmt(r.sup_local_enstrophy) << "\n\n";
    out << "bounds (empirical rows report ratios, not pass/fail):\n";
    for (const auto& b : r.bounds) {
        out << "  " << b.name;
        for (std::size_t pad = b.name.size(); pad < 26; ++pad) out << ' ';
        out << "lhs " << fmt(b.lhs) << "  rhs " << fmt(b.rhs);
        if (b.empirical)
            out << "  ratio " << fmt(b.ratio) << "\n";
        else
            out << "  " << (b.holds ? "holds" : "VIOLATED") << "\n";
    }
}

LedgerReport cmd_ledger(const std::string& run_dir, const LedgerCliOptions& opts,
                        std::ostream& log) {
    const fs::path dir(run_dir);
    const RunConfig cfg = config_of_run(dir);
    if (cfg.cylinders.empty())
        throw std::invalid_argument("ledger: config defines no cylinders");
    check_cylinder_index(opts.cylinder_index, cfg.cylinders.size());
    const RunDirectoryProvider provider(dir);

    LedgerConfig lcfg;
    lcfg.cutoff.cylinder = cfg.cylinders[std::size_t(opts.cylinder_index)];
    lcfg.cutoff.delta = cfg.delta;
    lcfg.cutoff.profile_order = cfg.profile_order;
    lcfg.M = cfg.M;
    lcfg.eps_reg = cfg.eps_reg;
    lcfg.time_quadrature = opts.quadrature;
    lcfg.omega_t_mode = opts.omega_t_mode;

    LedgerEvaluator ev(provider, lcfg);
    const LedgerReport report = ev.evaluate(opts.t, opts.stride);

    char suffix[64];
    std::snprintf(suffix, sizeof(suffix), "cyl%ld_t%.6g", opts.cylinder_index, opts.t);
    const fs::path csv = dir / ("ledger_" + std::string(suffix) + ".csv");
    const fs::path txt = dir / ("ledger_" + std::string(suffix) + ".txt");
    write_ledger_csv(report, csv);
    write_ledger_text(report, txt);
    log << "ledger: wrote " << csv.string() << " and " << txt.string() << "\n";
    log << "ledger: residuals identity/est1/est2/est3 = " << fmt(report.residual_major1) << " / "
        << fmt(report.residual_est1) << " / " << fmt(report.residual_est2) << " / "
        << fmt(report.residual_est3) << "\n";
    return report;
}

bool cmd_verify_cutoff(const std::string& config_path, long cylinder_index, std::ostream& out) {
    const RunConfig cfg = parse_config(read_text_file(config_path));
    if (cfg.cylinders.empty())
        throw std::invalid_argument("verify-cutoff: config defines no cylinders");
    check_cylinder_index(cylinder_index, cfg.cylinders.size());

    CutoffSpec spec;
    spec.cylinder = cfg.cylinders[std::size_t(cylinder_index)];
    spec.delta = cfg.delta;
    spec.profile_order = cfg.profile_order;
    const CutoffPair pair = build_cutoff(spec, cfg.solver.grid);
    const CutoffReport report = verify_cutoff(pair, cfg.solver.grid);

    out << "cutoff verification for cylinder " << cylinder_index << " (r = " << fmt(spec.cylinder.r)
        << ", delta = " << fmt(spec.delta) << ", profile order " << spec.profile_order << ")\n";
    out << "  C theory " << fmt(pair.C_theory) << ", C achieved " << fmt(pair.C_achieved) << "\n";
    for (const auto& c : report.checks) {
        out << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << " (measured "
            << fmt(c.measured) << ", bound " << fmt(c.bound) << ")\n";
    }
    return report.all_pass;
}

bool cmd_selftest(std::ostream& out) {
    bool all = true;
    auto record = [&](const std::string& name, bool pass, const std::string& detail) {
        out << "[" << (pass ? "PASS" : "FAIL") << "] " << name << " (" << detail << ")\n";
        all = all && pass;
    };

    {  // transform round trip
        const Grid g(16);
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        ScalarField f(g);
        for (auto& x : f.v) x = dist(rng);
        const ScalarField f2 = fft_inverse(fft_forward(f));
        double diff = 0.0;
        for (std::size_t i = 0; i < f.v.size(); ++i)
            diff = std::max(diff, std::abs(f.v[i] - f2.v[i]));
        record("fft round trip", diff < 1e-12, "max error " + fmt(diff));
    }
    {  // curl adjointness
        const Grid g(16);
        const VectorField f = init_random_solenoidal(g, 2, 2.0, 3.0);
        const VectorField h = init_random_solenoidal(g, 3, 2.0, 3.0);
        const double lhs = inner(fft_inverse(curl(fft_forward(f))), h);
        const double rhs = inner(f, fft_inverse(curl(fft_forward(h))));
        const double rel = std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-30);
        record("curl adjointness", rel < 1e-10, "relative gap " + fmt(rel));
    }
    {  // Leray projector annihilates gradients
        const Grid g(16);
        ScalarField p(g);
        const double h = g.h();
        std::size_t idx = 0;
        for (int k = 0; k < g.n; ++k)
            for (int j = 0; j < g.n; ++j)
                for (int i = 0; i < g.n; ++i, ++idx)
                    p.v[idx] = std::sin(i * h) * std::cos(2 * j * h) + std::cos(k * h);
        const double rem = max_mode_modulus(leray_project(gradient(fft_forward(p))));
        record("leray annihilates gradients", rem < 1e-13, "max mode " + fmt(rem));
    }
    {  // one ABC step decays exactly
        const Grid g(16);
        Snapshot s{0.0, init_abc(g)};
        const Snapshot s2 = step(s, 1e-3);
        double diff = 0.0;
        const double decay = std::exp(-g.nu * 1e-3);
        for (int a = 0; a < 3; ++a)
            for (std::size_t i = 0; i < s.u.comp[a].size(); ++i)
                diff = std::max(diff, std::abs(s2.u.comp[a][i] - decay * s.u.comp[a][i]));
        record("ABC single-step decay", diff < 1e-13, "max error " + fmt(diff));
    }
    {  // short ABC run against the exact solution
        SolverConfig sc;
        sc.grid = Grid(16);
        sc.dt = 1e-3;
        sc.t_end = 0.02;
        sc.snapshot_interval = 0.01;
        const Trajectory traj = simulate(sc, init_abc(sc.grid));
        double worst = 0.0;
        for (const auto& s : traj.snapshots) {
            const VectorField e = exact_abc(sc.grid, s.t);
            for (int a = 0; a < 3; ++a)
                for (std::size_t i = 0; i < e.comp[a].size(); ++i)
                    worst = std::max(worst, std::abs(s.u.comp[a][i] - e.comp[a][i]));
        }
        record("ABC trajectory decay", traj.status == RunStatus::completed && worst < 1e-10,
               "max error " + fmt(worst));
    }
    {  // cutoff contract
        const Grid g(32);
        CutoffSpec spec;
        spec.cylinder = Cylinder{{std::numbers::pi, std::numbers::pi, std::numbers::pi}, 1.0, 0.5};
        const CutoffPair pair = build_cutoff(spec, g);
        const CutoffReport rep = verify_cutoff(pair, g);
        record("cutoff contract", rep.all_pass && pair.C_achieved <= 3.0 + 1e-12,
               "C achieved " + fmt(pair.C_achieved));
    }
    {  // partition exactness of the nonlinearity split
        const Grid g(32);
        Trajectory traj;
        traj.config.grid = g;
        traj.config.dt = 0.025;
        traj.config.snapshot_interval = 0.025;
        traj.config.t_end = 0.25;
        const VectorField u = init_random_solenoidal(g, 11, 2.0, 2.0);
        for (int i = 0; i <= 10; ++i) traj.snapshots.push_back({0.025 * i, u});
        const TrajectoryProvider provider(traj);
        LedgerConfig cfg;
        cfg.cutoff.cylinder =
            Cylinder{{std::numbers::pi, std::numbers::pi, std::numbers::pi}, 1.0, 0.5};
        cfg.M = 0.5;
        LedgerEvaluator ev(provider, cfg);
        const LedgerReport rep = ev.evaluate(0.25);
        const bool ok = rep.partition_residual_I2 < 1e-12 && rep.partition_residual_I3 < 1e-12;
        record("nonlinearity partition exactness", ok,
               "residuals " + fmt(rep.partition_residual_I2) + ", " +
                   fmt(rep.partition_residual_I3));
    }
    return all;
}

}  // namespace nsebox
