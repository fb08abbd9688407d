#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nsebox/fft.hpp"
#include "nsebox/initial_conditions.hpp"
#include "nsebox/spectral_ops.hpp"
#include "oracle_helpers.hpp"

using namespace nsebox;
using namespace nsebox::test;

namespace {

// Band-limit a random real field by spectral truncation (for property loops).
VectorField random_band_limited_fast(const Grid& g, int kmax, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    VectorField u(g);
    for (int a = 0; a < 3; ++a)
        for (auto& x : u.comp[a]) x = dist(rng);
    SpectralVectorField uh = fft_forward(u);
    const int n = g.n;
    const int nxs = n / 2 + 1;
    std::size_t idx = 0;
    for (int iz = 0; iz < n; ++iz) {
        const int kz = signed_mode(iz, n);
        for (int iy = 0; iy < n; ++iy) {
            const int ky = signed_mode(iy, n);
            for (int ix = 0; ix < nxs; ++ix, ++idx) {
                if (std::abs(ix) > kmax || std::abs(ky) > kmax || std::abs(kz) > kmax)
                    for (int a = 0; a < 3; ++a) uh.comp[a].c[idx] = 0.0;
            }
        }
    }
    return fft_inverse(uh);
}

}  // namespace

TEST_CASE("fft_forward: constant field has only the DC mode") {
    const Grid g(8);
    auto f = sample_scalar(g, [](double, double, double) { return 2.75; });
    const SpectralScalarField fh = fft_forward(f);
    CHECK(std::abs(get_mode(fh, 0, 0, 0) - 2.75) < 1e-14);
    double off_dc = 0.0;
    for (std::size_t i = 1; i < fh.c.size(); ++i) off_dc = std::max(off_dc, std::abs(fh.c[i]));
    CHECK(off_dc < 1e-14);
}

TEST_CASE("fft_forward: sin(x) on n=16 puts -i/2 and +i/2 at k=(+-1,0,0)") {
    const Grid g(16);
    auto f = sample_scalar(g, [](double x, double, double) { return std::sin(x); });
    const SpectralScalarField fh = fft_forward(f);
    CHECK(std::abs(get_mode(fh, 1, 0, 0) - std::complex<double>(0.0, -0.5)) < 1e-13);
    CHECK(std::abs(get_mode(fh, -1, 0, 0) - std::complex<double>(0.0, 0.5)) < 1e-13);
    // every other mode vanishes
    double rest = 0.0;
    const int n = g.n;
    for (int iz = 0; iz < n; ++iz)
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix <= n / 2; ++ix) {
                if (ix == 1 && iy == 0 && iz == 0) continue;
                rest = std::max(rest, std::abs(fh.at(ix, iy, iz)));
            }
    CHECK(rest < 1e-13);
}

TEST_CASE("fft_forward agrees with the naive DFT oracle on a random n=8 field") {
    const Grid g(8);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ScalarField f(g);
    for (auto& x : f.v) x = dist(rng);
    const SpectralScalarField fh = fft_forward(f);
    for (int kz = -3; kz <= 3; kz += 2)
        for (int ky = -2; ky <= 3; ky += 3)
            for (int kx = 0; kx <= 4; kx += 2) {
                const auto oracle = naive_dft_mode(f, kx, ky, kz);
                CHECK(std::abs(get_mode(fh, kx, ky, kz) - oracle) < 1e-12);
            }
}

TEST_CASE("fft round trip is identity to 1e-12 for scalar and vector fields") {
    const Grid g(16);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    ScalarField f(g);
    for (auto& x : f.v) x = dist(rng);
    const ScalarField f2 = fft_inverse(fft_forward(f));
    CHECK(max_abs_diff(f.v, f2.v) < 1e-12 * linf_norm(f));

    VectorField u(g);
    for (int a = 0; a < 3; ++a)
        for (auto& x : u.comp[a]) x = dist(rng);
    const VectorField u2 = fft_inverse(fft_forward(u));
    CHECK(max_abs_diff(u, u2) < 1e-12 * linf_norm(u));
}

TEST_CASE("fft_forward rejects non-finite input") {
    const Grid g(8);
    ScalarField f(g);
    f.v[17] = std::nan("");
    CHECK_THROWS_AS((void)fft_forward(f), std::invalid_argument);
}

TEST_CASE("gradient: constant, sin(x), and sin(x)cos(y) closed forms") {
    const Grid g(16);
    {
        auto f = sample_scalar(g, [](double, double, double) { return 4.0; });
        const VectorField grad = fft_inverse(gradient(fft_forward(f)));
        CHECK(linf_norm(grad) < 1e-13);
    }
    {
        auto f = sample_scalar(g, [](double x, double, double) { return std::sin(x); });
        const VectorField grad = fft_inverse(gradient(fft_forward(f)));
        auto expect = sample_vector(g, [](double x, double, double) {
            return std::array<double, 3>{std::cos(x), 0.0, 0.0};
        });
        CHECK(max_abs_diff(grad, expect) < 1e-12);
    }
    {
        auto f = sample_scalar(g, [](double x, double y, double) { return std::sin(x) * std::cos(y); });
        const VectorField grad = fft_inverse(gradient(fft_forward(f)));
        auto expect = sample_vector(g, [](double x, double y, double) {
            return std::array<double, 3>{std::cos(x) * std::cos(y), -std::sin(x) * std::sin(y), 0.0};
        });
        CHECK(max_abs_diff(grad, expect) < 1e-12);
    }
}

TEST_CASE("curl: annihilates gradients, fixes the ABC field, matches Taylor-Green") {
    const Grid g(16);
    {
        auto f = sample_scalar(g, [](double x, double y, double z) {
            return std::sin(x) * std::cos(y) + std::cos(2 * z);
        });
        const SpectralVectorField grad = gradient(fft_forward(f));
        CHECK(max_mode_modulus(curl(grad)) < 1e-13);
    }
    {
        const VectorField abc = init_abc(g, 1.0, 2.0, 0.5);
        const VectorField curl_abc = fft_inverse(curl(fft_forward(abc)));
        CHECK(max_abs_diff(curl_abc, abc) < 1e-12);
    }
    {
        const VectorField tg = init_taylor_green(g);
        const VectorField om = fft_inverse(curl(fft_forward(tg)));
        auto expect = sample_vector(g, [](double x, double y, double z) {
            return std::array<double, 3>{-std::cos(x) * std::sin(y) * std::sin(z),
                                         -std::sin(x) * std::cos(y) * std::sin(z),
                                         2.0 * std::sin(x) * std::sin(y) * std::cos(z)};
        });
        CHECK(max_abs_diff(om, expect) < 1e-12);
    }
}

TEST_CASE("laplacian: constant, eigenfunction, and k=(1,2,2) tone") {
    const Grid g(16);
    {
        auto f = sample_scalar(g, [](double, double, double) { return 1.5; });
        CHECK(max_mode_modulus(laplacian(fft_forward(f))) < 1e-14);
    }
    {
        auto f = sample_scalar(g, [](double x, double, double) { return std::sin(x); });
        const ScalarField lap = fft_inverse(laplacian(fft_forward(f)));
        auto expect = sample_scalar(g, [](double x, double, double) { return -std::sin(x); });
        CHECK(max_abs_diff(lap.v, expect.v) < 1e-12);
    }
    {
        auto f = sample_scalar(g, [](double x, double y, double z) { return std::cos(x + 2 * y + 2 * z); });
        const ScalarField lap = fft_inverse(laplacian(fft_forward(f)));
        ScalarField expect = f;
        for (auto& x : expect.v) x *= -9.0;
        CHECK(max_abs_diff(lap.v, expect.v) < 1e-11);
    }
}

TEST_CASE("leray_project: fixed point, null space, linearity, idempotence") {
    const Grid g(16);
    std::mt19937_64 rng(3);
    const VectorField u = random_band_limited_fast(g, 4, rng);
    SpectralVectorField uh = fft_forward(u);
    leray_project_inplace(uh);
    const double scale = max_mode_modulus(uh);

    // projector output is divergence-free and a fixed point
    CHECK(spectral_divergence_max(uh) < 1e-12 * scale);
    const SpectralVectorField twice = leray_project(uh);
    double diff = 0.0;
    for (int a = 0; a < 3; ++a)
        for (std::size_t i = 0; i < uh.comp[a].c.size(); ++i)
            diff = std::max(diff, std::abs(uh.comp[a].c[i] - twice.comp[a].c[i]));
    CHECK(diff < 1e-12 * scale);

    // pure gradients are annihilated
    auto gscalar = sample_scalar(g, [](double x, double y, double z) {
        return std::cos(x) * std::sin(2 * y) + std::sin(z);
    });
    const SpectralVectorField grad = gradient(fft_forward(gscalar));
    CHECK(max_mode_modulus(leray_project(grad)) < 1e-13);

    // P(u + grad g) = P(u)
    SpectralVectorField sum = fft_forward(u);
    for (int a = 0; a < 3; ++a)
        for (std::size_t i = 0; i < sum.comp[a].c.size(); ++i)
            sum.comp[a].c[i] += grad.comp[a].c[i];
    const SpectralVectorField psum = leray_project(sum);
    diff = 0.0;
    for (int a = 0; a < 3; ++a)
        for (std::size_t i = 0; i < uh.comp[a].c.size(); ++i)
            diff = std::max(diff, std::abs(psum.comp[a].c[i] - uh.comp[a].c[i]));
    CHECK(diff < 1e-12 * std::max(scale, max_mode_modulus(grad)));
}

TEST_CASE("dealias: retained band unchanged, high tone removed, Parseval on the mask") {
    const Grid g(16);  // retained band |k_i| <= 5
    {
        std::mt19937_64 rng(5);
        const VectorField u = random_band_limited_fast(g, 5, rng);
        const SpectralVectorField uh = fft_forward(u);
        const SpectralVectorField ud = dealias(uh);
        double diff_retained = 0.0;
        double truncated = 0.0;
        const int n = g.n;
        for (int a = 0; a < 3; ++a)
            for (int iz = 0; iz < n; ++iz)
                for (int iy = 0; iy < n; ++iy)
                    for (int ix = 0; ix <= n / 2; ++ix) {
                        const int ky = signed_mode(iy, n), kz = signed_mode(iz, n);
                        const bool kept =
                            3 * ix <= n && 3 * std::abs(ky) <= n && 3 * std::abs(kz) <= n;
                        const auto before = uh.comp[a].at(ix, iy, iz);
                        const auto after = ud.comp[a].at(ix, iy, iz);
                        if (kept)
                            diff_retained = std::max(diff_retained, std::abs(before - after));
                        else
                            truncated = std::max(truncated, std::abs(after));
                    }
        CHECK(diff_retained == 0.0);  // retained modes pass through untouched
        CHECK(truncated == 0.0);      // truncated modes exactly zero
    }
    {
        auto f = sample_scalar(g, [](double x, double, double) { return std::cos(7.0 * x); });
        const SpectralScalarField fd = dealias(fft_forward(f));
        CHECK(max_mode_modulus(fd) < 1e-14);
    }
    {
        auto f = sample_scalar(g, [](double x, double y, double z) {
            return std::cos(2 * x) + std::sin(7.0 * y) + std::cos(4.0 * z) * std::sin(x);
        });
        const SpectralScalarField fh = fft_forward(f);
        const SpectralScalarField fd = dealias(fh);
        // energy after truncation = energy summed over the retained band only
        KahanSum retained;
        const int n = g.n;
        for (int iz = 0; iz < n; ++iz) {
            const int kz = signed_mode(iz, n);
            for (int iy = 0; iy < n; ++iy) {
                const int ky = signed_mode(iy, n);
                for (int ix = 0; ix <= n / 2; ++ix) {
                    if (3 * ix > n || 3 * std::abs(ky) > n || 3 * std::abs(kz) > n) continue;
                    const double w = (ix == 0 || ix == n / 2) ? 1.0 : 2.0;
                    retained.add(w * std::norm(fh.at(ix, iy, iz)));
                }
            }
        }
        CHECK(spectral_energy(fd) ==
              doctest::Approx(g.volume() * retained.value()).epsilon(1e-12));
    }
}

TEST_CASE("masked_l2: constants, empty mask, sine integral") {
    const Grid g(16);
    const RegionMask full = full_mask(g);
    {
        auto f = sample_scalar(g, [](double, double, double) { return 1.0; });
        CHECK(masked_l2(f, full) == doctest::Approx(std::sqrt(g.volume())).epsilon(1e-13));
    }
    {
        auto f = sample_scalar(g, [](double x, double, double) { return std::sin(x); });
        RegionMask empty(g);
        CHECK(masked_l2(f, empty) == 0.0);
        CHECK(masked_l2(f, full) == doctest::Approx(std::sqrt(g.volume() / 2.0)).epsilon(1e-12));
    }
}

TEST_CASE("Parseval: real-space L2 on the full mask matches spectral energy") {
    const Grid g(16);
    std::mt19937_64 rng(9);
    const VectorField u = random_band_limited_fast(g, 6, rng);
    const double real_space = masked_l2(u, full_mask(g));
    const double spectral = std::sqrt(spectral_energy(fft_forward(u)));
    CHECK(real_space == doctest::Approx(spectral).epsilon(1e-10));
}

TEST_CASE("curl adjointness <curl f, g> = <f, curl g> on random band-limited pairs") {
    const Grid g(8);
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const VectorField f = random_band_limited_fast(g, 2, rng);
        const VectorField h = random_band_limited_fast(g, 2, rng);
        const VectorField cf = fft_inverse(curl(fft_forward(f)));
        const VectorField ch = fft_inverse(curl(fft_forward(h)));
        const double lhs = inner(cf, h);
        const double rhs = inner(f, ch);
        const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
        CHECK(std::abs(lhs - rhs) / scale < 1e-10);
    }
}

TEST_CASE("product rule curl(phi A) = phi curl A + grad phi x A, alias-free") {
    const Grid g(16);
    const int n_pad = 32;
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 10; ++trial) {
        ScalarField phi(g);
        {
            const VectorField tmp = random_band_limited_fast(g, 3, rng);
            phi.v = tmp.comp[0];
        }
        const VectorField A = random_band_limited_fast(g, 3, rng);

        const SpectralScalarField phih = fft_forward(phi);
        const SpectralVectorField Ah = fft_forward(A);

        const ScalarField phi_p = fft_inverse(pad_spectrum(phih, n_pad));
        const VectorField A_p = fft_inverse(pad_spectrum(Ah, n_pad));
        const VectorField curlA_p = fft_inverse(pad_spectrum(curl(Ah), n_pad));
        const VectorField gphi_p = fft_inverse(pad_spectrum(gradient(phih), n_pad));

        // left side: curl applied to the (exactly represented) product phi A
        VectorField prod = A_p;
        for (int a = 0; a < 3; ++a)
            for (std::size_t i = 0; i < prod.comp[a].size(); ++i) prod.comp[a][i] *= phi_p.v[i];
        const VectorField lhs = fft_inverse(curl(fft_forward(prod)));

        // right side: phi curl A + grad phi x A
        VectorField rhs_f = cross(gphi_p, A_p);
        for (int a = 0; a < 3; ++a)
            for (std::size_t i = 0; i < rhs_f.comp[a].size(); ++i)
                rhs_f.comp[a][i] += phi_p.v[i] * curlA_p.comp[a][i];

        const double scale = std::max(linf_norm(lhs), 1e-30);
        CHECK(max_abs_diff(lhs, rhs_f) / scale < 1e-10);
    }
}

TEST_CASE("div(curl u) vanishes in spectral arithmetic") {
    const Grid g(16);
    std::mt19937_64 rng(13);
    const VectorField u = random_band_limited_fast(g, 5, rng);
    const SpectralScalarField d = divergence(curl(fft_forward(u)));
    CHECK(max_mode_modulus(d) < 1e-13);
}

TEST_CASE("mask-boundary quadrature error shrinks under refinement") {
    const std::array<double, 3> c{std::numbers::pi, std::numbers::pi, std::numbers::pi};
    const double r = 1.0;
    const double exact = 4.0 / 3.0 * std::numbers::pi * r * r * r;
    auto vol_err = [&](int n) {
        const Grid g(n);
        const RegionMask m = ball_mask(g, c, r);
        return std::abs(double(m.count()) * g.cell_volume() - exact);
    };
    CHECK(vol_err(64) < vol_err(16) / 1.5);
}

TEST_CASE("spectral gradient energy matches integral of |grad u|^2") {
    const Grid g(16);
    std::mt19937_64 rng(17);
    const VectorField u = random_band_limited_fast(g, 4, rng);
    const SpectralVectorField uh = fft_forward(u);
    const ScalarField gsq = gradient_sq_magnitude(uh, GradNorm::frobenius);
    const double direct = masked_integral(gsq, full_mask(g));
    CHECK(direct == doctest::Approx(spectral_gradient_energy(uh)).epsilon(1e-10));
}
