#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "nsebox/ledger.hpp"
#include "nsebox/run_config.hpp"

namespace nsebox {

/// @file commands.hpp
/// Experiment orchestration behind the CLI: simulate -> persist -> diagnose
/// -> ledger. All functions throw on failure (ConfigError / invalid_argument
/// for validation, SnapshotIoError for I/O, runtime_error for numerical
/// trouble); the CLI shell maps the exception type to its exit code.

struct SimulateOutcome {
    std::filesystem::path dir;
    RunStatus status = RunStatus::completed;
    std::string status_detail;
    std::size_t snapshots = 0;
};

/// Run the configured simulation and persist config copy, snapshots, and
/// manifest into the output directory (out_override, when non-empty, wins
/// over the config's output_dir).
SimulateOutcome cmd_simulate(const std::string& config_path, const std::string& out_override,
                             std::ostream& log);

/// Diagnostics series for one cylinder of a stored run, written as CSV.
/// cylinder_index = -1 processes every configured cylinder concurrently
/// (worker count capped by NSE_THREADS), merging outputs in cylinder order.
void cmd_diagnose(const std::string& run_dir, long cylinder_index, std::ostream& log);

struct LedgerCliOptions {
    long cylinder_index = 0;
    double t = 0.0;
    int stride = 1;
    TimeQuadrature quadrature = TimeQuadrature::trapezoid;
    OmegaTMode omega_t_mode = OmegaTMode::semi_discrete_rhs;
};

/// Evaluate the energy ledger of a stored run at one endpoint; writes a
/// one-row CSV and a human-readable text report next to the run.
LedgerReport cmd_ledger(const std::string& run_dir, const LedgerCliOptions& opts,
                        std::ostream& log);

/// Build and verify the cutoff for one configured cylinder; prints the
/// check table. Returns true when every check passes.
bool cmd_verify_cutoff(const std::string& config_path, long cylinder_index, std::ostream& out);

/// Self-contained oracle suite (transform round trips, adjointness, exact
/// ABC decay, cutoff contract, partition exactness). Prints one PASS/FAIL
/// line per check; returns true when everything passed.
bool cmd_selftest(std::ostream& out);

/// CSV writers shared by commands and tests (fixed %.17g formatting keeps
/// outputs byte-reproducible).
void write_diagnostics_csv(const DiagnosticsSeries& series, const std::filesystem::path& path);
void write_ledger_csv(const LedgerReport& report, const std::filesystem::path& path);
void write_ledger_text(const LedgerReport& report, const std::filesystem::path& path);

}  // namespace nsebox
