#pragma once

#include <string>
#include <vector>

#include "nsebox/field.hpp"

namespace nsebox {

/// @file solver.hpp
/// Pseudo-spectral time integration of the incompressible Navier-Stokes
/// equations in rotational form, u_t = P(u x omega) + nu Lap(u), where P is
/// the Leray projector. The nonlinear product is formed in real space and
/// dealiased by the 2/3 rule; the state stays band-limited throughout.

enum class TimeScheme {
    rk4_integrating_factor,  // viscous term integrated exactly (default)
    rk4_plain,               // classical RK4 on the full right-hand side
};

struct SolverConfig {
    Grid grid;
    double dt = 1e-3;
    double t_end = 0.1;
    double snapshot_interval = 1e-2;
    TimeScheme scheme = TimeScheme::rk4_integrating_factor;

    /// Checks positivity and that snapshot_interval and t_end sit on the dt
    /// lattice; throws std::invalid_argument otherwise.
    void validate() const;
};

struct Snapshot {
    double t = 0.0;
    VectorField u;

    /// Vorticity curl u computed spectrally on demand.
    VectorField omega() const;
};

enum class RunStatus { completed, resolution_lost, blowup_detected };

struct Trajectory {
    SolverConfig config;
    std::vector<Snapshot> snapshots;
    RunStatus status = RunStatus::completed;
    std::string status_detail;
};

/// Full right-hand side P(u x omega) + nu Lap(u), dealiased. Rejects input
/// whose spectral divergence exceeds 1e-8 relative to its largest mode.
SpectralVectorField rhs(const SpectralVectorField& u_hat);

/// Right-hand side of the rotational vorticity equation,
/// omega_t = nu Lap(omega) - curl(omega x u), with the same dealiasing as
/// rhs(); equals curl(rhs(u)) mode for mode.
SpectralVectorField vorticity_rhs(const SpectralVectorField& u_hat,
                                  const SpectralVectorField& omega_hat);

/// One time step on a real-space snapshot. Throws std::runtime_error on
/// non-finite state.
Snapshot step(const Snapshot& state, double dt,
              TimeScheme scheme = TimeScheme::rk4_integrating_factor);

/// March the initial condition (projected and dealiased first) to t_end,
/// storing snapshots at multiples of snapshot_interval. Detects energy
/// growth / NaN (blowup_detected) and spectral-tail pileup above 1e-6
/// (resolution_lost); in both cases the trajectory is truncated at the last
/// healthy snapshot and the status records the reason.
Trajectory simulate(const SolverConfig& config, const VectorField& ic);

/// Kinetic energy (1/2) integral |u|^2 dx, evaluated spectrally.
double kinetic_energy(const SpectralVectorField& u_hat);

}  // namespace nsebox
