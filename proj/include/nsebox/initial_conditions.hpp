#pragma once

#include <cstdint>

#include "nsebox/field.hpp"

namespace nsebox {

/// ABC Beltrami field (A sin z + C cos y, B sin x + A cos z, C sin y + B cos x):
/// curl u = u, so the nonlinearity omega x u vanishes pointwise.
VectorField init_abc(const Grid& g, double A = 1.0, double B = 1.0, double C = 1.0);

/// Taylor-Green vortex (sin x cos y cos z, -cos x sin y cos z, 0):
/// solenoidal with pointwise zero helicity density u.omega.
VectorField init_taylor_green(const Grid& g);

/// Random solenoidal field: white noise filtered to the amplitude profile
/// |k|^slope * exp(-(|k|/k_peak)^2), projected, dealiased, and scaled to
/// max|u| = 1. Reproducible per seed.
VectorField init_random_solenoidal(const Grid& g, std::uint64_t seed, double spectrum_slope = 2.0,
                                   double k_peak = 2.5);

/// ABC(1,1,1) plus epsilon times a unit-max random solenoidal field, so the
/// velocity-vorticity misalignment at t=0 is O(epsilon).
VectorField init_perturbed_beltrami(const Grid& g, double epsilon, std::uint64_t seed);

/// Exact ABC solution at time t: exp(-nu t) times the t=0 field (the
/// Beltrami eigenfield decays by the heat semigroup; unit wavenumber).
VectorField exact_abc(const Grid& g, double t, double A = 1.0, double B = 1.0, double C = 1.0);

}  // namespace nsebox
