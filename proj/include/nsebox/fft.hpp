#pragma once

#include "nsebox/field.hpp"

namespace nsebox {

/// Forward DFT with 1/n^3 normalization, so the k=0 coefficient is the
/// spatial mean. Rejects non-finite input.
SpectralScalarField fft_forward(const ScalarField& f);
SpectralVectorField fft_forward(const VectorField& f);

/// Unnormalized inverse DFT; fft_inverse(fft_forward(f)) == f to round-off.
ScalarField fft_inverse(const SpectralScalarField& f);
VectorField fft_inverse(const SpectralVectorField& f);

/// Zero-fill a spectrum onto a finer grid with n_pad >= n points per axis
/// (same box). Nyquist planes |k_i| = n/2 are dropped: the result is the
/// Nyquist-free trigonometric interpolant, which is what every padded
/// (alias-free) product evaluation in the library is defined against.
SpectralScalarField pad_spectrum(const SpectralScalarField& f, int n_pad);
SpectralVectorField pad_spectrum(const SpectralVectorField& f, int n_pad);

}  // namespace nsebox
