#include "nsebox/spectral_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nsebox/fft.hpp"

namespace nsebox {

namespace {

constexpr std::complex<double> I{0.0, 1.0};

// Visit every stored half-complex mode. fn(idx, kx, ky, kz) receives the
// storage index and signed integer modes (kx in [0, n/2] with n/2 = Nyquist).
template <typename F>
void for_each_mode(const Grid& g, F&& fn) {
    const int n = g.n;
    const int nx = n / 2 + 1;
    std::size_t idx = 0;
    for (int iz = 0; iz < n; ++iz) {
        const int kz = signed_mode(iz, n);
        for (int iy = 0; iy < n; ++iy) {
            const int ky = signed_mode(iy, n);
            for (int ix = 0; ix < nx; ++ix, ++idx) {
                fn(idx, ix, ky, kz);
            }
        }
    }
}

// Parseval weight: off-axis kx modes stand for themselves and their conjugate.
inline double hermitian_weight(int ix, int n) {
    return (ix == 0 || ix == n / 2) ? 1.0 : 2.0;
}

void check_compatible(const Grid& a, const Grid& b, const char* what) {
    if (!a.compatible(b)) throw std::invalid_argument(std::string(what) + ": mismatched grids");
}

double sym3_largest_eig(double a00, double a01, double a02, double a11, double a12, double a22) {
    // Largest eigenvalue of a symmetric 3x3 matrix (trigonometric form).
    const double q = (a00 + a11 + a22) / 3.0;
    const double b00 = a00 - q, b11 = a11 - q, b22 = a22 - q;
    const double p2 = b00 * b00 + b11 * b11 + b22 * b22 + 2.0 * (a01 * a01 + a02 * a02 + a12 * a12);
    if (p2 <= 0.0) return q;
    const double p = std::sqrt(p2 / 6.0);
    const double det = b00 * (b11 * b22 - a12 * a12) - a01 * (a01 * b22 - a12 * a02) +
                       a02 * (a01 * a12 - b11 * a02);
    double r = det / (2.0 * p * p * p);
    r = std::clamp(r, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    return q + 2.0 * p * std::cos(phi);
}

}  // namespace

SpectralVectorField gradient(const SpectralScalarField& f) {
    SpectralVectorField out(f.grid);
    const double ku = f.grid.k_unit();
    const int n = f.grid.n;
    for_each_mode(f.grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const std::complex<double> v = f.c[idx];
        out.comp[0].c[idx] = I * (ku * deriv_mode(kx, n)) * v;
        out.comp[1].c[idx] = I * (ku * deriv_mode(ky, n)) * v;
        out.comp[2].c[idx] = I * (ku * deriv_mode(kz, n)) * v;
    });
    return out;
}

SpectralScalarField divergence(const SpectralVectorField& u) {
    SpectralScalarField out(u.grid);
    const double ku = u.grid.k_unit();
    const int n = u.grid.n;
    for_each_mode(u.grid, [&](std::size_t idx, int kx, int ky, int kz) {
        out.c[idx] = I * ku *
                     (double(deriv_mode(kx, n)) * u.comp[0].c[idx] +
                      double(deriv_mode(ky, n)) * u.comp[1].c[idx] +
                      double(deriv_mode(kz, n)) * u.comp[2].c[idx]);
    });
    return out;
}

SpectralVectorField curl(const SpectralVectorField& u) {
    SpectralVectorField out(u.grid);
    const double ku = u.grid.k_unit();
    const int n = u.grid.n;
    for_each_mode(u.grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const double k0 = ku * deriv_mode(kx, n);
        const double k1 = ku * deriv_mode(ky, n);
        const double k2 = ku * deriv_mode(kz, n);
        const std::complex<double> u0 = u.comp[0].c[idx];
        const std::complex<double> u1 = u.comp[1].c[idx];
        const std::complex<double> u2 = u.comp[2].c[idx];
        out.comp[0].c[idx] = I * (k1 * u2 - k2 * u1);
        out.comp[1].c[idx] = I * (k2 * u0 - k0 * u2);
        out.comp[2].c[idx] = I * (k0 * u1 - k1 * u0);
    });
    return out;
}

SpectralScalarField laplacian(const SpectralScalarField& f) {
    SpectralScalarField out(f.grid);
    const double ku2 = f.grid.k_unit() * f.grid.k_unit();
    for_each_mode(f.grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const double k2 = ku2 * (double(kx) * kx + double(ky) * ky + double(kz) * kz);
        out.c[idx] = -k2 * f.c[idx];
    });
    return out;
}

SpectralVectorField laplacian(const SpectralVectorField& u) {
    SpectralVectorField out;
    out.grid = u.grid;
    for (int a = 0; a < 3; ++a) out.comp[a] = laplacian(u.comp[a]);
    return out;
}

void leray_project_inplace(SpectralVectorField& u) {
    const int n = u.grid.n;
    for_each_mode(u.grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const double k0 = deriv_mode(kx, n);
        const double k1 = deriv_mode(ky, n);
        const double k2 = deriv_mode(kz, n);
        const double k2sum = k0 * k0 + k1 * k1 + k2 * k2;
        if (k2sum == 0.0) return;  // mean flow (and pure-Nyquist modes) pass through
        const std::complex<double> kdotu =
            k0 * u.comp[0].c[idx] + k1 * u.comp[1].c[idx] + k2 * u.comp[2].c[idx];
        const std::complex<double> f = kdotu / k2sum;
        u.comp[0].c[idx] -= k0 * f;
        u.comp[1].c[idx] -= k1 * f;
        u.comp[2].c[idx] -= k2 * f;
    });
}

SpectralVectorField leray_project(const SpectralVectorField& u) {
    SpectralVectorField out = u;
    leray_project_inplace(out);
    return out;
}

void dealias_inplace(SpectralScalarField& f) {
    const int n = f.grid.n;
    for_each_mode(f.grid, [&](std::size_t idx, int kx, int ky, int kz) {
        if (3 * std::abs(kx) > n || 3 * std::abs(ky) > n || 3 * std::abs(kz) > n)
            f.c[idx] = 0.0;
    });
}

void dealias_inplace(SpectralVectorField& u) {
    for (int a = 0; a < 3; ++a) dealias_inplace(u.comp[a]);
}

SpectralScalarField dealias(const SpectralScalarField& f) {
    SpectralScalarField out = f;
    dealias_inplace(out);
    return out;
}

SpectralVectorField dealias(const SpectralVectorField& u) {
    SpectralVectorField out = u;
    dealias_inplace(out);
    return out;
}

std::complex<double> get_mode(const SpectralScalarField& f, int kx, int ky, int kz) {
    const int n = f.grid.n;
    auto wrap = [n](int k) { return k >= 0 ? k : k + n; };
    if (kx < -n / 2 || kx > n / 2 || ky < -n / 2 || ky >= n / 2 || kz < -n / 2 || kz >= n / 2)
        throw std::invalid_argument("get_mode: wavevector out of range");
    if (kx >= 0) return f.at(kx, wrap(ky), wrap(kz));
    return std::conj(f.at(-kx, wrap(-ky), wrap(-kz)));
}

double spectral_energy(const SpectralScalarField& f) {
    const int n = f.grid.n;
    KahanSum sum;
    for_each_mode(f.grid, [&](std::size_t idx, int kx, int, int) {
        sum.add(hermitian_weight(kx, n) * std::norm(f.c[idx]));
    });
    return f.grid.volume() * sum.value();
}

double spectral_energy(const SpectralVectorField& u) {
    return spectral_energy(u.comp[0]) + spectral_energy(u.comp[1]) + spectral_energy(u.comp[2]);
}

double spectral_gradient_energy(const SpectralVectorField& u) {
    const int n = u.grid.n;
    const double ku2 = u.grid.k_unit() * u.grid.k_unit();
    KahanSum sum;
    for_each_mode(u.grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const double k0 = deriv_mode(kx, n), k1 = deriv_mode(ky, n), k2 = deriv_mode(kz, n);
        const double k2sum = ku2 * (k0 * k0 + k1 * k1 + k2 * k2);
        const double m = std::norm(u.comp[0].c[idx]) + std::norm(u.comp[1].c[idx]) +
                         std::norm(u.comp[2].c[idx]);
        sum.add(hermitian_weight(kx, n) * k2sum * m);
    });
    return u.grid.volume() * sum.value();
}

double max_mode_modulus(const SpectralScalarField& f) {
    double m = 0.0;
    for (const auto& v : f.c) m = std::max(m, std::abs(v));
    return m;
}

double max_mode_modulus(const SpectralVectorField& u) {
    double m = 0.0;
    for (int a = 0; a < 3; ++a) m = std::max(m, max_mode_modulus(u.comp[a]));
    return m;
}

double spectral_divergence_max(const SpectralVectorField& u) {
    const double ku = u.grid.k_unit();
    const int n = u.grid.n;
    double m = 0.0;
    for_each_mode(u.grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const std::complex<double> d =
            I * ku *
            (double(deriv_mode(kx, n)) * u.comp[0].c[idx] +
             double(deriv_mode(ky, n)) * u.comp[1].c[idx] +
             double(deriv_mode(kz, n)) * u.comp[2].c[idx]);
        m = std::max(m, std::abs(d));
    });
    return m;
}

double spectral_tail_fraction(const SpectralVectorField& u) {
    const int n = u.grid.n;
    const int keep = n / 3;           // retained band of the 2/3 rule
    const int tail_from = 3 * keep / 4;
    KahanSum total, tail;
    for_each_mode(u.grid, [&](std::size_t idx, int kx, int ky, int kz) {
        const double m = hermitian_weight(kx, n) *
                         (std::norm(u.comp[0].c[idx]) + std::norm(u.comp[1].c[idx]) +
                          std::norm(u.comp[2].c[idx]));
        total.add(m);
        const int kmax = std::max({std::abs(kx), std::abs(ky), std::abs(kz)});
        if (kmax > tail_from) tail.add(m);
    });
    const double t = total.value();
    return t > 0.0 ? tail.value() / t : 0.0;
}

ScalarField gradient_sq_magnitude(const SpectralVectorField& u, GradNorm norm) {
    // Nine spectral derivatives d_a u_b brought back to real space.
    std::array<std::array<ScalarField, 3>, 3> d;
    for (int b = 0; b < 3; ++b) {
        SpectralVectorField g = gradient(u.comp[b]);
        for (int a = 0; a < 3; ++a) d[a][b] = fft_inverse(g.comp[a]);
    }
    ScalarField out(u.grid);
    const std::size_t np = u.grid.npoints();
    if (norm == GradNorm::frobenius) {
        for (std::size_t i = 0; i < np; ++i) {
            double s = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) s += d[a][b].v[i] * d[a][b].v[i];
            out.v[i] = s;
        }
    } else {
        for (std::size_t i = 0; i < np; ++i) {
            // G^T G entries; largest eigenvalue = squared operator norm.
            double g[3][3];
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) g[a][b] = d[a][b].v[i];
            double a00 = 0, a01 = 0, a02 = 0, a11 = 0, a12 = 0, a22 = 0;
            for (int a = 0; a < 3; ++a) {
                a00 += g[a][0] * g[a][0];
                a01 += g[a][0] * g[a][1];
                a02 += g[a][0] * g[a][2];
                a11 += g[a][1] * g[a][1];
                a12 += g[a][1] * g[a][2];
                a22 += g[a][2] * g[a][2];
            }
            out.v[i] = std::max(0.0, sym3_largest_eig(a00, a01, a02, a11, a12, a22));
        }
    }
    return out;
}

RegionMask full_mask(const Grid& g) { return RegionMask(g, true); }

RegionMask ball_mask(const Grid& g, const std::array<double, 3>& center, double radius) {
    RegionMask m(g);
    const int n = g.n;
    const double L = g.box_length;
    const double h = g.h();
    auto min_image = [L](double d) {
        d = std::fmod(d, L);
        if (d < -L / 2) d += L;
        if (d >= L / 2) d -= L;
        return d;
    };
    const double r2 = radius * radius;
    std::size_t idx = 0;
    for (int k = 0; k < n; ++k) {
        const double dz = min_image(k * h - center[2]);
        for (int j = 0; j < n; ++j) {
            const double dy = min_image(j * h - center[1]);
            for (int i = 0; i < n; ++i, ++idx) {
                const double dx = min_image(i * h - center[0]);
                m.in[idx] = (dx * dx + dy * dy + dz * dz <= r2) ? 1 : 0;
            }
        }
    }
    return m;
}

double masked_l2(const ScalarField& f, const RegionMask& mask) {
    check_compatible(f.grid, mask.grid, "masked_l2");
    KahanSum s;
    for (std::size_t i = 0; i < f.v.size(); ++i)
        if (mask.in[i]) s.add(f.v[i] * f.v[i]);
    return std::sqrt(s.value() * f.grid.cell_volume());
}

double masked_l2(const VectorField& f, const RegionMask& mask) {
    check_compatible(f.grid, mask.grid, "masked_l2");
    KahanSum s;
    for (std::size_t i = 0; i < f.comp[0].size(); ++i)
        if (mask.in[i])
            s.add(f.comp[0][i] * f.comp[0][i] + f.comp[1][i] * f.comp[1][i] +
                  f.comp[2][i] * f.comp[2][i]);
    return std::sqrt(s.value() * f.grid.cell_volume());
}

double masked_integral(const ScalarField& f, const RegionMask& mask) {
    check_compatible(f.grid, mask.grid, "masked_integral");
    KahanSum s;
    for (std::size_t i = 0; i < f.v.size(); ++i)
        if (mask.in[i]) s.add(f.v[i]);
    return s.value() * f.grid.cell_volume();
}

double l2_norm(const ScalarField& f) {
    KahanSum s;
    for (double x : f.v) s.add(x * x);
    return std::sqrt(s.value() * f.grid.cell_volume());
}

double l2_norm(const VectorField& f) {
    KahanSum s;
    for (int a = 0; a < 3; ++a)
        for (double x : f.comp[a]) s.add(x * x);
    return std::sqrt(s.value() * f.grid.cell_volume());
}

double linf_norm(const ScalarField& f) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::abs(x));
    return m;
}

double linf_norm(const VectorField& f) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.comp[0].size(); ++i) {
        const double s = f.comp[0][i] * f.comp[0][i] + f.comp[1][i] * f.comp[1][i] +
                         f.comp[2][i] * f.comp[2][i];
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

double inner(const VectorField& f, const VectorField& g) {
    check_compatible(f.grid, g.grid, "inner");
    KahanSum s;
    for (std::size_t i = 0; i < f.comp[0].size(); ++i)
        s.add(f.comp[0][i] * g.comp[0][i] + f.comp[1][i] * g.comp[1][i] +
              f.comp[2][i] * g.comp[2][i]);
    return s.value() * f.grid.cell_volume();
}

VectorField cross(const VectorField& a, const VectorField& b) {
    check_compatible(a.grid, b.grid, "cross");
    VectorField out(a.grid);
    for (std::size_t i = 0; i < a.comp[0].size(); ++i) {
        const double a0 = a.comp[0][i], a1 = a.comp[1][i], a2 = a.comp[2][i];
        const double b0 = b.comp[0][i], b1 = b.comp[1][i], b2 = b.comp[2][i];
        out.comp[0][i] = a1 * b2 - a2 * b1;
        out.comp[1][i] = a2 * b0 - a0 * b2;
        out.comp[2][i] = a0 * b1 - a1 * b0;
    }
    return out;
}

ScalarField dot(const VectorField& a, const VectorField& b) {
    check_compatible(a.grid, b.grid, "dot");
    ScalarField out(a.grid);
    for (std::size_t i = 0; i < a.comp[0].size(); ++i)
        out.v[i] = a.comp[0][i] * b.comp[0][i] + a.comp[1][i] * b.comp[1][i] +
                   a.comp[2][i] * b.comp[2][i];
    return out;
}

ScalarField magnitude(const VectorField& a) {
    ScalarField out(a.grid);
    for (std::size_t i = 0; i < a.comp[0].size(); ++i)
        out.v[i] = std::sqrt(a.comp[0][i] * a.comp[0][i] + a.comp[1][i] * a.comp[1][i] +
                             a.comp[2][i] * a.comp[2][i]);
    return out;
}

}  // namespace nsebox
