#include "nsebox/initial_conditions.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "nsebox/fft.hpp"
#include "nsebox/spectral_ops.hpp"

namespace nsebox {

namespace {

// Project, dealias, and return to real space. Idempotent on conforming fields.
VectorField conform(const VectorField& u) {
    SpectralVectorField uh = fft_forward(u);
    leray_project_inplace(uh);
    dealias_inplace(uh);
    return fft_inverse(uh);
}

template <typename F>
VectorField sample(const Grid& g, F&& fn) {
    VectorField u(g);
    const int n = g.n;
    const double h = g.h();
    std::size_t idx = 0;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i, ++idx) {
                const auto v = fn(i * h, j * h, k * h);
                u.comp[0][idx] = v[0];
                u.comp[1][idx] = v[1];
                u.comp[2][idx] = v[2];
            }
    return u;
}

}  // namespace

VectorField init_abc(const Grid& g, double A, double B, double C) {
    return conform(sample(g, [&](double x, double y, double z) {
        return std::array<double, 3>{A * std::sin(z) + C * std::cos(y),
                                     B * std::sin(x) + A * std::cos(z),
                                     C * std::sin(y) + B * std::cos(x)};
    }));
}

VectorField init_taylor_green(const Grid& g) {
    return conform(sample(g, [&](double x, double y, double z) {
        return std::array<double, 3>{std::sin(x) * std::cos(y) * std::cos(z),
                                     -std::cos(x) * std::sin(y) * std::cos(z), 0.0};
    }));
}

VectorField init_random_solenoidal(const Grid& g, std::uint64_t seed, double spectrum_slope,
                                   double k_peak) {
    if (!(k_peak > 0.0))
        throw std::invalid_argument("init_random_solenoidal: k_peak must be positive");
    std::mt19937_64 rng(seed);
    // Box-Muller with a fixed draw count per sample keeps the stream
    // layout-stable, so fields are bit-identical for a given seed.
    auto gauss = [&rng]() {
        const double u1 = (double(rng()) + 1.0) / (double(std::mt19937_64::max()) + 2.0);
        const double u2 = double(rng()) / (double(std::mt19937_64::max()) + 1.0);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    };
    VectorField noise(g);
    for (int a = 0; a < 3; ++a)
        for (auto& x : noise.comp[a]) x = gauss();

    SpectralVectorField uh = fft_forward(noise);
    const int n = g.n;
    const int nxs = n / 2 + 1;
    std::size_t idx = 0;
    for (int iz = 0; iz < n; ++iz) {
        const int kz = signed_mode(iz, n);
        for (int iy = 0; iy < n; ++iy) {
            const int ky = signed_mode(iy, n);
            for (int ix = 0; ix < nxs; ++ix, ++idx) {
                const double kk = std::sqrt(double(ix) * ix + double(ky) * ky + double(kz) * kz);
                double amp = 0.0;
                if (kk > 0.0)
                    amp = std::pow(kk, spectrum_slope) * std::exp(-(kk * kk) / (k_peak * k_peak));
                for (int a = 0; a < 3; ++a) uh.comp[a].c[idx] *= amp;
            }
        }
    }
    leray_project_inplace(uh);
    dealias_inplace(uh);
    VectorField u = fft_inverse(uh);
    const double m = linf_norm(u);
    if (m > 0.0)
        for (int a = 0; a < 3; ++a)
            for (auto& x : u.comp[a]) x /= m;
    return u;
}

VectorField init_perturbed_beltrami(const Grid& g, double epsilon, std::uint64_t seed) {
    if (epsilon < 0.0)
        throw std::invalid_argument("init_perturbed_beltrami: epsilon must be >= 0");
    VectorField u = init_abc(g);
    const VectorField w = init_random_solenoidal(g, seed, 2.0, 2.0);
    for (int a = 0; a < 3; ++a)
        for (std::size_t i = 0; i < u.comp[a].size(); ++i) u.comp[a][i] += epsilon * w.comp[a][i];
    return conform(u);
}

VectorField exact_abc(const Grid& g, double t, double A, double B, double C) {
    VectorField u = init_abc(g, A, B, C);
    const double decay = std::exp(-g.nu * t);
    for (int a = 0; a < 3; ++a)
        for (auto& x : u.comp[a]) x *= decay;
    return u;
}

}  // namespace nsebox
