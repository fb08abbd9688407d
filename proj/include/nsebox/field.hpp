#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "nsebox/grid.hpp"

namespace nsebox {

/// Real scalar samples at grid points, x-fastest ordering:
/// idx = i + n*(j + n*k) for the point (i*h, j*h, k*h).
struct ScalarField {
    Grid grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid& g) : grid(g), v(g.npoints(), 0.0) {}

    double& at(int i, int j, int k) {
        return v[std::size_t(i) + std::size_t(grid.n) * (std::size_t(j) + std::size_t(grid.n) * k)];
    }
    double at(int i, int j, int k) const {
        return v[std::size_t(i) + std::size_t(grid.n) * (std::size_t(j) + std::size_t(grid.n) * k)];
    }
};

/// Three scalar components on a shared grid.
struct VectorField {
    Grid grid;
    std::array<std::vector<double>, 3> comp;

    VectorField() = default;
    explicit VectorField(const Grid& g) : grid(g) {
        for (auto& c : comp) c.assign(g.npoints(), 0.0);
    }

    std::array<double, 3> at(std::size_t idx) const {
        return {comp[0][idx], comp[1][idx], comp[2][idx]};
    }
};

/// Fourier coefficients of a real scalar field in half-complex (r2c) layout.
/// Stored modes: kx in [0, n/2], ky and kz full signed range [-n/2, n/2);
/// modes with kx < 0 are implied by conjugate symmetry. Storage index:
/// idx = kx + (n/2+1)*(iy + n*iz) with iy, iz raw axis indices.
struct SpectralScalarField {
    Grid grid;
    std::vector<std::complex<double>> c;

    SpectralScalarField() = default;
    explicit SpectralScalarField(const Grid& g) : grid(g), c(nmodes(g), {0.0, 0.0}) {}

    static std::size_t nmodes(const Grid& g) {
        return std::size_t(g.n / 2 + 1) * g.n * g.n;
    }
    int nx() const { return grid.n / 2 + 1; }

    std::complex<double>& at(int ix, int iy, int iz) {
        return c[std::size_t(ix) + std::size_t(nx()) * (std::size_t(iy) + std::size_t(grid.n) * iz)];
    }
    std::complex<double> at(int ix, int iy, int iz) const {
        return c[std::size_t(ix) + std::size_t(nx()) * (std::size_t(iy) + std::size_t(grid.n) * iz)];
    }
};

struct SpectralVectorField {
    Grid grid;
    std::array<SpectralScalarField, 3> comp;

    SpectralVectorField() = default;
    explicit SpectralVectorField(const Grid& g)
        : grid(g), comp{SpectralScalarField(g), SpectralScalarField(g), SpectralScalarField(g)} {}
};

/// Boolean membership per grid point, same ordering as ScalarField.
struct RegionMask {
    Grid grid;
    std::vector<std::uint8_t> in;

    RegionMask() = default;
    explicit RegionMask(const Grid& g, bool value = false)
        : grid(g), in(g.npoints(), value ? 1 : 0) {}

    std::size_t count() const {
        std::size_t c = 0;
        for (auto b : in) c += b;
        return c;
    }
};

/// Compensated (Kahan) accumulator. All reductions in the library use it in a
/// fixed index order so results are reproducible across runs and thread counts.
struct KahanSum {
    double s = 0.0;
    double c = 0.0;

    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

}  // namespace nsebox
