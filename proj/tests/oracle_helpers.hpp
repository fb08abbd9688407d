#pragma once

// Test-only oracles, independent of the implementation paths they check.

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "nsebox/field.hpp"
#include "nsebox/grid.hpp"

namespace nsebox::test {

/// Naive O(N^2) DFT of a real field with 1/n^3 normalization; the reference
/// for the FFT wrapper. Only sane for tiny grids.
inline std::complex<double> naive_dft_mode(const ScalarField& f, int kx, int ky, int kz) {
    const int n = f.grid.n;
    const double w = -2.0 * std::numbers::pi / n;
    std::complex<double> sum{0.0, 0.0};
    std::size_t idx = 0;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i, ++idx) {
                const double phase = w * (double(kx) * i + double(ky) * j + double(kz) * k);
                sum += f.v[idx] * std::complex<double>(std::cos(phase), std::sin(phase));
            }
    return sum / double(f.grid.npoints());
}

template <typename F>
ScalarField sample_scalar(const Grid& g, F&& fn) {
    ScalarField f(g);
    const double h = g.h();
    std::size_t idx = 0;
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i, ++idx) f.v[idx] = fn(i * h, j * h, k * h);
    return f;
}

template <typename F>
VectorField sample_vector(const Grid& g, F&& fn) {
    VectorField u(g);
    const double h = g.h();
    std::size_t idx = 0;
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i, ++idx) {
                const std::array<double, 3> v = fn(i * h, j * h, k * h);
                u.comp[0][idx] = v[0];
                u.comp[1][idx] = v[1];
                u.comp[2][idx] = v[2];
            }
    return u;
}

/// Random trigonometric polynomial with modes |k_i| <= kmax, built in real
/// space from explicit sines/cosines so it is band-limited by construction.
inline ScalarField random_band_limited_scalar(const Grid& g, int kmax, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    struct Tone {
        double a, b;
        int kx, ky, kz;
    };
    std::vector<Tone> tones;
    for (int kz = -kmax; kz <= kmax; ++kz)
        for (int ky = -kmax; ky <= kmax; ++ky)
            for (int kx = 0; kx <= kmax; ++kx)
                tones.push_back({amp(rng), amp(rng), kx, ky, kz});
    return sample_scalar(g, [&](double x, double y, double z) {
        double s = 0.0;
        for (const auto& t : tones) {
            const double ph = t.kx * x + t.ky * y + t.kz * z;
            s += t.a * std::cos(ph) + t.b * std::sin(ph);
        }
        return s;
    });
}

inline VectorField random_band_limited_vector(const Grid& g, int kmax, std::mt19937_64& rng) {
    VectorField u(g);
    for (int a = 0; a < 3; ++a) u.comp[a] = random_band_limited_scalar(g, kmax, rng).v;
    return u;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs_diff(const VectorField& a, const VectorField& b) {
    double m = 0.0;
    for (int c = 0; c < 3; ++c) m = std::max(m, max_abs_diff(a.comp[c], b.comp[c]));
    return m;
}

}  // namespace nsebox::test
