#pragma once

#include <complex>

#include "nsebox/field.hpp"

namespace nsebox {

/// @file spectral_ops.hpp
/// Fourier-space vector calculus on the periodic box. First derivatives
/// multiply mode k by i*k*(2pi/L) with the Nyquist mode dropped; the
/// Laplacian multiplies by -|k*(2pi/L)|^2 over the full mode range. All
/// operations are pure and safe to call concurrently on distinct inputs.

SpectralVectorField gradient(const SpectralScalarField& f);
SpectralScalarField divergence(const SpectralVectorField& u);
SpectralVectorField curl(const SpectralVectorField& u);
SpectralScalarField laplacian(const SpectralScalarField& f);
SpectralVectorField laplacian(const SpectralVectorField& u);

/// Orthogonal projection onto divergence-free fields: u - k (k.u)/|k|^2 per
/// mode, with the k=0 mode (mean flow) passed through. Gradients are
/// annihilated exactly; divergence of the result vanishes mode-wise.
SpectralVectorField leray_project(const SpectralVectorField& u);
void leray_project_inplace(SpectralVectorField& u);

/// 2/3-rule truncation: zero every mode with any |k_i| > n/3.
SpectralScalarField dealias(const SpectralScalarField& f);
SpectralVectorField dealias(const SpectralVectorField& u);
void dealias_inplace(SpectralScalarField& f);
void dealias_inplace(SpectralVectorField& u);

/// Coefficient lookup by signed integer wavevector; kx < 0 is resolved via
/// conjugate symmetry.
std::complex<double> get_mode(const SpectralScalarField& f, int kx, int ky, int kz);

/// Parseval energy integral(|f|^2 dx) = L^3 sum_k |f_k|^2.
double spectral_energy(const SpectralScalarField& f);
double spectral_energy(const SpectralVectorField& u);

/// integral(|grad f|^2 dx) evaluated spectrally (full velocity-gradient
/// contraction for vector fields).
double spectral_gradient_energy(const SpectralVectorField& u);

double max_mode_modulus(const SpectralScalarField& f);
double max_mode_modulus(const SpectralVectorField& u);

/// max_k |i k . u_k|, the spectral measure of div u.
double spectral_divergence_max(const SpectralVectorField& u);

/// Fraction of spectral energy carried by modes with max_i |k_i| above the
/// top quarter of the retained (dealiased) band. Used as the solver's
/// resolution-health indicator.
double spectral_tail_fraction(const SpectralVectorField& u);

/// Pointwise |grad u|^2. Frobenius contracts all nine entries; the operator
/// variant squares the largest singular value of the 3x3 gradient.
enum class GradNorm { frobenius, operator_norm };
ScalarField gradient_sq_magnitude(const SpectralVectorField& u, GradNorm norm = GradNorm::frobenius);

// --- real-space quadrature (uniform grid, deterministic Kahan reductions) ---

RegionMask full_mask(const Grid& g);
/// Ball B(center, radius) under the minimum-image metric.
RegionMask ball_mask(const Grid& g, const std::array<double, 3>& center, double radius);

/// ( sum_{mask} |f|^2 h^3 )^{1/2}; empty mask gives 0.
double masked_l2(const ScalarField& f, const RegionMask& mask);
double masked_l2(const VectorField& f, const RegionMask& mask);

/// sum_{mask} f h^3
double masked_integral(const ScalarField& f, const RegionMask& mask);

double l2_norm(const ScalarField& f);
double l2_norm(const VectorField& f);
double linf_norm(const ScalarField& f);
double linf_norm(const VectorField& f);

/// sum_x f.g h^3 over the full box.
double inner(const VectorField& f, const VectorField& g);

// --- pointwise field algebra ---

VectorField cross(const VectorField& a, const VectorField& b);
ScalarField dot(const VectorField& a, const VectorField& b);
ScalarField magnitude(const VectorField& a);

}  // namespace nsebox
