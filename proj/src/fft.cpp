#include "nsebox/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace nsebox {

namespace {

// FFTW's planner is not thread-safe; plan creation is serialized globally.
// Each thread keeps its own workspace per grid size, so execution needs no
// locking. Plans use FFTW_ESTIMATE: the chosen algorithm depends only on the
// size, keeping results bit-reproducible run to run.
std::mutex g_planner_mutex;

struct FftWorkspace {
    int n = 0;
    double* real_buf = nullptr;
    fftw_complex* cplx_buf = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    explicit FftWorkspace(int n_) : n(n_) {
        std::size_t nr = std::size_t(n) * n * n;
        std::size_t nc = std::size_t(n) * n * (n / 2 + 1);
        real_buf = fftw_alloc_real(nr);
        cplx_buf = fftw_alloc_complex(nc);
        if (!real_buf || !cplx_buf) throw std::bad_alloc();
        std::lock_guard<std::mutex> lock(g_planner_mutex);
        fwd = fftw_plan_dft_r2c_3d(n, n, n, real_buf, cplx_buf, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_3d(n, n, n, cplx_buf, real_buf, FFTW_ESTIMATE);
        if (!fwd || !bwd) throw std::runtime_error("fft: plan creation failed");
    }
    ~FftWorkspace() {
        std::lock_guard<std::mutex> lock(g_planner_mutex);
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        fftw_free(real_buf);
        fftw_free(cplx_buf);
    }
    FftWorkspace(const FftWorkspace&) = delete;
    FftWorkspace& operator=(const FftWorkspace&) = delete;
};

FftWorkspace& workspace_for(int n) {
    thread_local std::map<int, std::unique_ptr<FftWorkspace>> cache;
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, std::make_unique<FftWorkspace>(n)).first;
    return *it->second;
}

void check_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x))
            throw std::invalid_argument("fft_forward: non-finite sample in input field");
}

}  // namespace

SpectralScalarField fft_forward(const ScalarField& f) {
    f.grid.validate();
    check_finite(f.v);
    auto& ws = workspace_for(f.grid.n);
    std::memcpy(ws.real_buf, f.v.data(), f.v.size() * sizeof(double));
    fftw_execute(ws.fwd);
    SpectralScalarField out(f.grid);
    const double scale = 1.0 / double(f.grid.npoints());
    auto* src = reinterpret_cast<std::complex<double>*>(ws.cplx_buf);
    for (std::size_t i = 0; i < out.c.size(); ++i) out.c[i] = src[i] * scale;
    return out;
}

SpectralVectorField fft_forward(const VectorField& f) {
    SpectralVectorField out(f.grid);
    for (int a = 0; a < 3; ++a) {
        ScalarField s;
        s.grid = f.grid;
        s.v = f.comp[a];
        out.comp[a] = fft_forward(s);
    }
    return out;
}

ScalarField fft_inverse(const SpectralScalarField& f) {
    f.grid.validate();
    auto& ws = workspace_for(f.grid.n);
    // c2r destroys its input, so the spectrum is copied into the plan buffer.
    std::memcpy(ws.cplx_buf, f.c.data(), f.c.size() * sizeof(fftw_complex));
    fftw_execute(ws.bwd);
    ScalarField out(f.grid);
    std::memcpy(out.v.data(), ws.real_buf, out.v.size() * sizeof(double));
    return out;
}

VectorField fft_inverse(const SpectralVectorField& f) {
    VectorField out(f.grid);
    for (int a = 0; a < 3; ++a) out.comp[a] = fft_inverse(f.comp[a]).v;
    return out;
}

SpectralScalarField pad_spectrum(const SpectralScalarField& f, int n_pad) {
    const int n = f.grid.n;
    if (n_pad < n) throw std::invalid_argument("pad_spectrum: n_pad must be >= n");
    if (n_pad == n) {
        SpectralScalarField copy = f;
        // Drop Nyquist planes for consistency with the padded convention.
        const int nx = copy.nx();
        for (int iz = 0; iz < n; ++iz)
            for (int iy = 0; iy < n; ++iy)
                for (int ix = 0; ix < nx; ++ix) {
                    if (ix == n / 2 || iy == n / 2 || iz == n / 2)
                        copy.at(ix, iy, iz) = 0.0;
                }
        return copy;
    }
    Grid gp(n_pad, f.grid.box_length, f.grid.nu);
    SpectralScalarField out(gp);
    for (int iz = 0; iz < n; ++iz) {
        int kz = signed_mode(iz, n);
        if (kz == -n / 2) continue;
        int iz_p = kz >= 0 ? kz : kz + n_pad;
        for (int iy = 0; iy < n; ++iy) {
            int ky = signed_mode(iy, n);
            if (ky == -n / 2) continue;
            int iy_p = ky >= 0 ? ky : ky + n_pad;
            for (int ix = 0; ix < n / 2; ++ix) {  // kx = n/2 (Nyquist) dropped
                out.at(ix, iy_p, iz_p) = f.at(ix, iy, iz);
            }
        }
    }
    return out;
}

SpectralVectorField pad_spectrum(const SpectralVectorField& f, int n_pad) {
    SpectralVectorField out;
    out.comp[0] = pad_spectrum(f.comp[0], n_pad);
    out.comp[1] = pad_spectrum(f.comp[1], n_pad);
    out.comp[2] = pad_spectrum(f.comp[2], n_pad);
    out.grid = out.comp[0].grid;
    return out;
}

}  // namespace nsebox
