#include "nsebox/solver.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "nsebox/fft.hpp"
#include "nsebox/spectral_ops.hpp"

namespace nsebox {

namespace {

bool is_aligned(double value, double unit, double tol = 1e-9) {
    const double q = value / unit;
    return std::abs(q - std::round(q)) <= tol * std::max(1.0, std::abs(q));
}

void check_solenoidal(const SpectralVectorField& u_hat, const char* what) {
    const double m = max_mode_modulus(u_hat);
    if (m == 0.0) return;
    if (spectral_divergence_max(u_hat) > 1e-8 * m)
        throw std::invalid_argument(std::string(what) + ": input field is not solenoidal");
}

void check_finite_spectrum(const SpectralVectorField& u_hat, double t) {
    for (int a = 0; a < 3; ++a)
        for (const auto& v : u_hat.comp[a].c)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                char buf[128];
                std::snprintf(buf, sizeof(buf), "solver: non-finite state at t = %.9g", t);
                throw std::runtime_error(buf);
            }
}

// Dealiased Leray-projected nonlinear term P(u x omega); the stiff viscous
// part is handled separately by each scheme.
SpectralVectorField nonlinear_term(const SpectralVectorField& u_hat) {
    const VectorField u = fft_inverse(u_hat);
    const VectorField om = fft_inverse(curl(u_hat));
    SpectralVectorField nl = fft_forward(cross(u, om));
    dealias_inplace(nl);
    leray_project_inplace(nl);
    return nl;
}

void axpy(SpectralVectorField& y, double a, const SpectralVectorField& x) {
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < y.comp[c].c.size(); ++i) y.comp[c].c[i] += a * x.comp[c].c[i];
}

// Per-mode viscous decay factors exp(-nu |k|^2 dt) (full |k|^2, Nyquist included).
std::vector<double> decay_factors(const Grid& g, double dt) {
    const int n = g.n;
    const int nxs = n / 2 + 1;
    const double ku2 = g.k_unit() * g.k_unit();
    std::vector<double> e(SpectralScalarField::nmodes(g));
    std::size_t idx = 0;
    for (int iz = 0; iz < n; ++iz) {
        const double kz = signed_mode(iz, n);
        for (int iy = 0; iy < n; ++iy) {
            const double ky = signed_mode(iy, n);
            for (int ix = 0; ix < nxs; ++ix, ++idx) {
                const double k2 = ku2 * (double(ix) * ix + ky * ky + kz * kz);
                e[idx] = std::exp(-g.nu * k2 * dt);
            }
        }
    }
    return e;
}

void scale_modes(SpectralVectorField& u, const std::vector<double>& e) {
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < e.size(); ++i) u.comp[c].c[i] *= e[i];
}

SpectralVectorField scaled(const SpectralVectorField& u, const std::vector<double>& e) {
    SpectralVectorField out = u;
    scale_modes(out, e);
    return out;
}

// Lawson (integrating-factor) RK4: the heat semigroup is applied exactly,
// classical RK4 handles only the nonlinearity.
SpectralVectorField step_if_rk4(const SpectralVectorField& u, double dt) {
    const Grid& g = u.grid;
    const std::vector<double> Eh = decay_factors(g, dt / 2.0);
    const std::vector<double> Ef = decay_factors(g, dt);

    const SpectralVectorField n1 = nonlinear_term(u);

    SpectralVectorField s2 = u;
    axpy(s2, dt / 2.0, n1);
    scale_modes(s2, Eh);
    const SpectralVectorField n2 = nonlinear_term(s2);

    SpectralVectorField s3 = scaled(u, Eh);
    axpy(s3, dt / 2.0, n2);
    const SpectralVectorField n3 = nonlinear_term(s3);

    SpectralVectorField s4 = scaled(u, Ef);
    axpy(s4, dt, scaled(n3, Eh));
    const SpectralVectorField n4 = nonlinear_term(s4);

    SpectralVectorField out = scaled(u, Ef);
    axpy(out, dt / 6.0, scaled(n1, Ef));
    axpy(out, dt / 3.0, scaled(n2, Eh));
    axpy(out, dt / 3.0, scaled(n3, Eh));
    axpy(out, dt / 6.0, n4);
    return out;
}

SpectralVectorField step_plain_rk4(const SpectralVectorField& u, double dt) {
    auto full_rhs = [](const SpectralVectorField& v) {
        SpectralVectorField f = nonlinear_term(v);
        const SpectralVectorField lap = laplacian(v);
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < f.comp[c].c.size(); ++i)
                f.comp[c].c[i] += v.grid.nu * lap.comp[c].c[i];
        return f;
    };
    const SpectralVectorField k1 = full_rhs(u);
    SpectralVectorField s = u;
    axpy(s, dt / 2.0, k1);
    const SpectralVectorField k2 = full_rhs(s);
    s = u;
    axpy(s, dt / 2.0, k2);
    const SpectralVectorField k3 = full_rhs(s);
    s = u;
    axpy(s, dt, k3);
    const SpectralVectorField k4 = full_rhs(s);
    SpectralVectorField out = u;
    axpy(out, dt / 6.0, k1);
    axpy(out, dt / 3.0, k2);
    axpy(out, dt / 3.0, k3);
    axpy(out, dt / 6.0, k4);
    return out;
}

SpectralVectorField step_spectral(const SpectralVectorField& u, double dt, TimeScheme scheme) {
    SpectralVectorField out = (scheme == TimeScheme::rk4_integrating_factor)
                                  ? step_if_rk4(u, dt)
                                  : step_plain_rk4(u, dt);
    leray_project_inplace(out);  // re-project to absorb round-off divergence
    return out;
}

}  // namespace

void SolverConfig::validate() const {
    grid.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be positive");
    if (!(t_end > 0.0)) throw std::invalid_argument("SolverConfig: t_end must be positive");
    if (snapshot_interval < dt)
        throw std::invalid_argument("SolverConfig: snapshot_interval must be >= dt");
    if (!is_aligned(snapshot_interval, dt))
        throw std::invalid_argument("SolverConfig: snapshot_interval must be a multiple of dt");
    if (!is_aligned(t_end, snapshot_interval))
        throw std::invalid_argument("SolverConfig: t_end must be a multiple of snapshot_interval");
}

VectorField Snapshot::omega() const { return fft_inverse(curl(fft_forward(u))); }

SpectralVectorField rhs(const SpectralVectorField& u_hat) {
    check_solenoidal(u_hat, "rhs");
    SpectralVectorField f = nonlinear_term(u_hat);
    const SpectralVectorField lap = laplacian(u_hat);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < f.comp[c].c.size(); ++i)
            f.comp[c].c[i] += u_hat.grid.nu * lap.comp[c].c[i];
    return f;
}

SpectralVectorField vorticity_rhs(const SpectralVectorField& u_hat,
                                  const SpectralVectorField& omega_hat) {
    check_solenoidal(u_hat, "vorticity_rhs");
    {
        // omega must be curl u.
        const SpectralVectorField cu = curl(u_hat);
        double diff = 0.0, scale = max_mode_modulus(cu);
        for (int a = 0; a < 3; ++a)
            for (std::size_t i = 0; i < cu.comp[a].c.size(); ++i)
                diff = std::max(diff, std::abs(cu.comp[a].c[i] - omega_hat.comp[a].c[i]));
        if (scale > 0.0 && diff > 1e-8 * scale)
            throw std::invalid_argument("vorticity_rhs: omega is not curl u");
    }
    const VectorField u = fft_inverse(u_hat);
    const VectorField om = fft_inverse(omega_hat);
    // curl(omega x u) = -curl(u x omega)
    SpectralVectorField nl = fft_forward(cross(u, om));
    dealias_inplace(nl);
    SpectralVectorField f = curl(nl);
    const SpectralVectorField lap = laplacian(omega_hat);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < f.comp[c].c.size(); ++i)
            f.comp[c].c[i] += u_hat.grid.nu * lap.comp[c].c[i];
    return f;
}

Snapshot step(const Snapshot& state, double dt, TimeScheme scheme) {
    SpectralVectorField u_hat = fft_forward(state.u);
    check_finite_spectrum(u_hat, state.t);
    const SpectralVectorField out = step_spectral(u_hat, dt, scheme);
    Snapshot next;
    next.t = state.t + dt;
    next.u = fft_inverse(out);
    return next;
}

double kinetic_energy(const SpectralVectorField& u_hat) { return 0.5 * spectral_energy(u_hat); }

Trajectory simulate(const SolverConfig& config, const VectorField& ic) {
    config.validate();
    if (!ic.grid.compatible(config.grid))
        throw std::invalid_argument("simulate: initial condition grid does not match config");

    Trajectory traj;
    traj.config = config;

    SpectralVectorField u_hat = fft_forward(ic);
    leray_project_inplace(u_hat);
    dealias_inplace(u_hat);

    {
        const double umax = linf_norm(fft_inverse(u_hat));
        if (umax > 0.0 && config.dt > config.grid.h() / (4.0 * umax))
            std::fprintf(stderr,
                         "simulate: warning: dt = %g exceeds CFL advisory h/(4 max|u|) = %g\n",
                         config.dt, config.grid.h() / (4.0 * umax));
    }

    const long steps_per_snap = std::lround(config.snapshot_interval / config.dt);
    const long n_snaps = std::lround(config.t_end / config.snapshot_interval);

    double energy_prev = kinetic_energy(u_hat);
    traj.snapshots.push_back({0.0, fft_inverse(u_hat)});

    for (long s = 1; s <= n_snaps; ++s) {
        for (long q = 0; q < steps_per_snap; ++q)
            u_hat = step_spectral(u_hat, config.dt, config.scheme);
        const double t = double(s) * config.snapshot_interval;

        bool finite = true;
        for (int a = 0; a < 3 && finite; ++a)
            for (const auto& v : u_hat.comp[a].c)
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                    finite = false;
                    break;
                }
        const double energy = finite ? kinetic_energy(u_hat) : 0.0;
        if (!finite || energy > energy_prev * (1.0 + 1e-12)) {
            traj.status = RunStatus::blowup_detected;
            traj.status_detail = finite ? "kinetic energy increased under zero forcing"
                                        : "non-finite state";
            traj.status_detail += " at t = " + std::to_string(t);
            return traj;
        }
        if (spectral_tail_fraction(u_hat) > 1e-6) {
            traj.status = RunStatus::resolution_lost;
            traj.status_detail =
                "spectral tail energy fraction exceeded 1e-6 at t = " + std::to_string(t);
            return traj;
        }
        energy_prev = energy;
        traj.snapshots.push_back({t, fft_inverse(u_hat)});
    }
    return traj;
}

}  // namespace nsebox
