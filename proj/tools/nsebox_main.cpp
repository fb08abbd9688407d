// nsebox: periodic-box pseudo-spectral Navier-Stokes runs with localized
// vorticity-alignment diagnostics and an energy-identity ledger.
//
// Exit codes: 0 success, 1 validation error, 2 runtime/numerical failure,
// 3 I/O error.

#include <CLI11.hpp>

#include <exception>
#include <iostream>

#include "nsebox/commands.hpp"

namespace {

template <typename F>
int run_guarded(F&& fn) {
    try {
        return fn();
    } catch (const nsebox::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const nsebox::SnapshotIoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"periodic-box Navier-Stokes solver with local alignment diagnostics"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string run_dir;
    long cylinder = 0;
    double t_eval = 0.0;
    int stride = 1;
    std::string quadrature = "trapezoid";
    std::string omega_mode = "semi-discrete-rhs";

    auto* sim = app.add_subcommand("simulate", "run a configured simulation and store snapshots");
    sim->add_option("--config", config_path, "configuration file")->required();
    sim->add_option("--out", out_dir, "output directory (overrides config output_dir)");

    auto* diag = app.add_subcommand("diagnose", "alignment diagnostics of a stored run");
    diag->add_option("--run", run_dir, "run directory written by simulate")->required();
    diag->add_option("--cylinder", cylinder, "cylinder index (-1 = all)")->default_val(0);

    auto* led = app.add_subcommand("ledger", "localized energy-identity ledger of a stored run");
    led->add_option("--run", run_dir, "run directory written by simulate")->required();
    led->add_option("--cylinder", cylinder, "cylinder index")->default_val(0);
    led->add_option("--t", t_eval, "evaluation endpoint inside (t0-4r^2, t0]")->required();
    led->add_option("--stride", stride, "snapshot stride")->default_val(1);
    led->add_option("--quadrature", quadrature, "trapezoid | simpson")
        ->check(CLI::IsMember({"trapezoid", "simpson"}));
    led->add_option("--omega-t", omega_mode, "semi-discrete-rhs | central-difference")
        ->check(CLI::IsMember({"semi-discrete-rhs", "central-difference"}));

    auto* vc = app.add_subcommand("verify-cutoff", "build and check the cutoff pair");
    vc->add_option("--config", config_path, "configuration file")->required();
    vc->add_option("--cylinder", cylinder, "cylinder index")->default_val(0);

    app.add_subcommand("selftest", "run the built-in oracle suite");

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed()) {
        return run_guarded([&]() {
            const auto outcome = nsebox::cmd_simulate(config_path, out_dir, std::cout);
            return outcome.status == nsebox::RunStatus::completed ? 0 : 2;
        });
    }
    if (diag->parsed()) {
        return run_guarded([&]() {
            nsebox::cmd_diagnose(run_dir, cylinder, std::cout);
            return 0;
        });
    }
    if (led->parsed()) {
        return run_guarded([&]() {
            nsebox::LedgerCliOptions opts;
            opts.cylinder_index = cylinder;
            opts.t = t_eval;
            opts.stride = stride;
            opts.quadrature = quadrature == "simpson" ? nsebox::TimeQuadrature::simpson
                                                      : nsebox::TimeQuadrature::trapezoid;
            opts.omega_t_mode = omega_mode == "central-difference"
                                    ? nsebox::OmegaTMode::central_difference
                                    : nsebox::OmegaTMode::semi_discrete_rhs;
            nsebox::cmd_ledger(run_dir, opts, std::cout);
            return 0;
        });
    }
    if (vc->parsed()) {
        return run_guarded([&]() {
            return nsebox::cmd_verify_cutoff(config_path, cylinder, std::cout) ? 0 : 2;
        });
    }
    return run_guarded([]() { return nsebox::cmd_selftest(std::cout) ? 0 : 2; });
}
