#include "nsebox/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nsebox/fft.hpp"

namespace nsebox {

namespace {

// Nodes are uniformly spaced; m = number of intervals (m+1 nodes). Composite
// Simpson needs an even m; odd windows close with the 3/8 rule so the order
// stays 4. m = 1 degenerates to the trapezoid.
std::vector<double> quadrature_weights(TimeQuadrature q, std::size_t m, double dt) {
    std::vector<double> w(m + 1, 0.0);
    if (m == 0) return w;
    if (q == TimeQuadrature::trapezoid || m == 1) {
        w.front() = w.back() = 0.5 * dt;
        for (std::size_t i = 1; i < m; ++i) w[i] = dt;
        return w;
    }
    const std::size_t m_simpson = (m % 2 == 0) ? m : m - 3;
    for (std::size_t seg = 0; seg + 2 <= m_simpson; seg += 2) {
        w[seg] += dt / 3.0;
        w[seg + 1] += 4.0 * dt / 3.0;
        w[seg + 2] += dt / 3.0;
    }
    if (m % 2 != 0) {
        const double c = 3.0 * dt / 8.0;
        w[m - 3] += c;
        w[m - 2] += 3.0 * c;
        w[m - 1] += 3.0 * c;
        w[m] += c;
    }
    return w;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

struct Vec3 {
    double x, y, z;
};
inline Vec3 cross3(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double dot3(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm2(const Vec3& a) { return dot3(a, a); }

}  // namespace

LedgerEvaluator::LedgerEvaluator(const SnapshotProvider& provider, const LedgerConfig& config)
    : provider_(provider), config_(config) {
    const Grid& g = provider_.grid();
    config_.cutoff.validate(g);
    // M = 0 is allowed as the degenerate threshold {|omega| > 0}
    if (!(config_.M >= 0.0)) throw std::invalid_argument("ledger: M must be non-negative");
    if (provider_.size() < 2)
        throw std::invalid_argument("ledger: need at least two snapshots");

    interval_ = provider_.time(1) - provider_.time(0);
    if (!(interval_ > 0.0)) throw std::invalid_argument("ledger: snapshot times not increasing");
    for (std::size_t i = 0; i + 1 < provider_.size(); ++i) {
        const double gap = provider_.time(i + 1) - provider_.time(i);
        if (!near(gap, interval_, 1e-9 * std::max(1.0, interval_)))
            throw std::invalid_argument("ledger: snapshot series is not uniformly spaced");
    }

    const Cylinder& cyl = config_.cutoff.cylinder;
    const double r2 = cyl.r * cyl.r;
    {
        const double ratio = r2 / interval_;
        if (!near(ratio, std::round(ratio), 1e-6 * std::max(1.0, ratio)))
            throw std::invalid_argument(
                "ledger: snapshot interval must divide r^2 so window edges land on snapshots");
    }
    window_start_ = cyl.t0 - 4.0 * r2;
    const double tol = 1e-9 * std::max(1.0, interval_);
    const double offset = (window_start_ - provider_.time(0)) / interval_;
    if (offset < -1e-9 || !near(offset, std::round(offset), 1e-6))
        throw std::invalid_argument(
            "ledger: window start t0 - 4r^2 does not sit on the snapshot lattice");
    window_begin_ = std::size_t(std::llround(offset));
    if (window_begin_ >= provider_.size() ||
        !near(provider_.time(window_begin_), window_start_, tol + 1e-9 * std::abs(window_start_)))
        throw std::invalid_argument("ledger: snapshots do not cover the window start t0 - 4r^2");

    cutoff_ = build_cutoff(config_.cutoff, g);
    ball_ = ball_mask(g, cyl.x0, 2.0 * cyl.r);
    inner_ball_ = ball_mask(g, cyl.x0, cyl.r);

    if (config_.residual_mode == CutoffDerivativeMode::spectral_padded) {
        n_pad_ = 2 * g.n;
        const SpectralScalarField phi_hat = fft_forward(cutoff_.phi);
        const SpectralScalarField phi_hat_pad = pad_spectrum(phi_hat, n_pad_);
        phi_pad_ = fft_inverse(phi_hat_pad).v;
        const SpectralVectorField grad_pad = gradient(phi_hat_pad);
        for (int a = 0; a < 3; ++a) grad_phi_pad_[a] = fft_inverse(grad_pad.comp[a]).v;
        grad_phi_pad_sq_.resize(phi_pad_.size());
        for (std::size_t i = 0; i < phi_pad_.size(); ++i)
            grad_phi_pad_sq_[i] = grad_phi_pad_[0][i] * grad_phi_pad_[0][i] +
                                  grad_phi_pad_[1][i] * grad_phi_pad_[1][i] +
                                  grad_phi_pad_[2][i] * grad_phi_pad_[2][i];
    }
}

std::size_t LedgerEvaluator::index_of(double t, const char* what) const {
    const double offset = (t - provider_.time(0)) / interval_;
    const double rounded = std::round(offset);
    if (!near(offset, rounded, 1e-6))
        throw std::invalid_argument(std::string(what) +
                                    ": time does not sit on the snapshot lattice");
    if (rounded < 0.0 || std::size_t(rounded) >= provider_.size())
        throw std::invalid_argument(std::string(what) + ": time outside the snapshot range");
    return std::size_t(rounded);
}

const LedgerEvaluator::ResidualSlice& LedgerEvaluator::residual_slice(std::size_t idx) const {
    auto it = residual_cache_.find(idx);
    if (it != residual_cache_.end()) return it->second;

    const Grid& g = provider_.grid();
    const double nu = g.nu;
    const Snapshot snap = provider_.load(idx);
    const SpectralVectorField u_hat = fft_forward(snap.u);
    const SpectralVectorField om_hat = curl(u_hat);
    const VectorField om_n = fft_inverse(om_hat);

    // curl(omega x u) = -curl(u x omega); dealiased variant matches the
    // semi-discrete dynamics
    SpectralVectorField uxo_hat = fft_forward(cross(snap.u, om_n));
    dealias_inplace(uxo_hat);
    SpectralVectorField T_deal_hat = curl(uxo_hat);
    for (int a = 0; a < 3; ++a)
        for (auto& v : T_deal_hat.comp[a].c) v = -v;

    const double eta = cutoff_.eta.eta(snap.t);
    const double eta_p = cutoff_.eta.eta_prime(snap.t);
    const double eta2 = eta * eta;
    ResidualSlice out;

    if (config_.residual_mode == CutoffDerivativeMode::spectral_padded) {
        const Grid gp(n_pad_, g.box_length, g.nu);
        const double hp3 = gp.cell_volume();
        auto pad = [&](const SpectralVectorField& f) {
            return fft_inverse(pad_spectrum(f, n_pad_));
        };
        const VectorField u_p = pad(u_hat);
        const VectorField om_p = pad(om_hat);
        const VectorField lapom_p = pad(laplacian(om_hat));
        const VectorField curlom_p = pad(curl(om_hat));
        const VectorField Tdeal_p = pad(T_deal_hat);

        // exact integral of |grad(phi omega)|^2 through the padded spectrum
        VectorField phiom(gp);
        for (int a = 0; a < 3; ++a)
            for (std::size_t i = 0; i < phiom.comp[a].size(); ++i)
                phiom.comp[a][i] = phi_pad_[i] * om_p.comp[a][i];
        const double grad_phiom_sq = spectral_gradient_energy(fft_forward(phiom));

        // the cross product is alias-free on the padded grid, so its spectral
        // curl is the exact unfiltered curl(omega x u)
        const VectorField Ttrue_p = fft_inverse(curl(fft_forward(cross(om_p, u_p))));

        KahanSum A, B, C, Dsub, E, Etrue, F1, F2;
        const std::size_t np = phi_pad_.size();
        for (std::size_t i = 0; i < np; ++i) {
            const double phi = phi_pad_[i];
            const double phi2 = phi * phi;
            const Vec3 om{om_p.comp[0][i], om_p.comp[1][i], om_p.comp[2][i]};
            if (phi2 != 0.0) {
                const Vec3 u{u_p.comp[0][i], u_p.comp[1][i], u_p.comp[2][i]};
                const Vec3 lap{lapom_p.comp[0][i], lapom_p.comp[1][i], lapom_p.comp[2][i]};
                const Vec3 cu{curlom_p.comp[0][i], curlom_p.comp[1][i], curlom_p.comp[2][i]};
                const Vec3 td{Tdeal_p.comp[0][i], Tdeal_p.comp[1][i], Tdeal_p.comp[2][i]};
                const Vec3 tt{Ttrue_p.comp[0][i], Ttrue_p.comp[1][i], Ttrue_p.comp[2][i]};
                const Vec3 oxu = cross3(om, u);
                const Vec3 gphi{grad_phi_pad_[0][i], grad_phi_pad_[1][i], grad_phi_pad_[2][i]};
                const double lap_om = dot3(lap, om);
                const double td_om = dot3(td, om);
                A.add(phi2 * (nu * lap_om - td_om));
                B.add(phi2 * norm2(om));
                C.add(phi2 * lap_om);
                E.add(phi2 * td_om);
                Etrue.add(phi2 * dot3(tt, om));
                const Vec3 curl_phiom{phi * cu.x + gphi.y * om.z - gphi.z * om.y,
                                      phi * cu.y + gphi.z * om.x - gphi.x * om.z,
                                      phi * cu.z + gphi.x * om.y - gphi.y * om.x};
                F1.add(phi * dot3(oxu, curl_phiom));
                F2.add(phi * dot3(oxu, cross3(gphi, om)));
            }
            // |grad phi|^2 |omega|^2 extends beyond supp(phi)
            Dsub.add(grad_phi_pad_sq_[i] * norm2(om));
        }
        out.A_semi = eta2 * A.value() * hp3;
        out.B = eta * eta_p * B.value() * hp3;
        out.C = -nu * eta2 * C.value() * hp3;
        out.D = nu * eta2 * (grad_phiom_sq - Dsub.value() * hp3);
        out.E = eta2 * E.value() * hp3;
        out.E_true = eta2 * Etrue.value() * hp3;
        out.F1 = eta2 * F1.value() * hp3;
        out.F2 = eta2 * F2.value() * hp3;
        out.S2 = eta2 * B.value() * hp3;
    } else {
        // analytic cutoff derivatives on the solver grid: per-slice
        // transformation checks at their natural spatial accuracy
        const double h3 = g.cell_volume();
        const VectorField lapom_n = fft_inverse(laplacian(om_hat));
        const VectorField curlom_n = fft_inverse(curl(om_hat));
        const VectorField Tdeal_n = fft_inverse(T_deal_hat);
        const VectorField Ttrue_n = fft_inverse(curl(fft_forward(cross(om_n, snap.u))));
        std::array<VectorField, 3> gradom;  // gradom[b] = grad(omega_b)
        for (int b = 0; b < 3; ++b) gradom[b] = fft_inverse(gradient(om_hat.comp[b]));

        KahanSum A, B, C, D1, Dsub, E, Etrue, F1, F2;
        const std::size_t np = g.npoints();
        for (std::size_t i = 0; i < np; ++i) {
            const double phi = cutoff_.phi.v[i];
            const double phi2 = phi * phi;
            const Vec3 om{om_n.comp[0][i], om_n.comp[1][i], om_n.comp[2][i]};
            const Vec3 gphi{cutoff_.grad_phi.comp[0][i], cutoff_.grad_phi.comp[1][i],
                            cutoff_.grad_phi.comp[2][i]};
            // |grad(phi omega)|^2 by the product rule with the analytic gradient
            double gsq = 0.0;
            for (int b = 0; b < 3; ++b) {
                const double wb = om_n.comp[b][i];
                for (int a = 0; a < 3; ++a) {
                    const double e = phi * gradom[b].comp[a][i] +
                                     cutoff_.grad_phi.comp[a][i] * wb;
                    gsq += e * e;
                }
            }
            D1.add(gsq);
            Dsub.add(norm2(gphi) * norm2(om));
            if (phi2 != 0.0) {
                const Vec3 u{snap.u.comp[0][i], snap.u.comp[1][i], snap.u.comp[2][i]};
                const Vec3 lap{lapom_n.comp[0][i], lapom_n.comp[1][i], lapom_n.comp[2][i]};
                const Vec3 cu{curlom_n.comp[0][i], curlom_n.comp[1][i], curlom_n.comp[2][i]};
                const Vec3 td{Tdeal_n.comp[0][i], Tdeal_n.comp[1][i], Tdeal_n.comp[2][i]};
                const Vec3 tt{Ttrue_n.comp[0][i], Ttrue_n.comp[1][i], Ttrue_n.comp[2][i]};
                const Vec3 oxu = cross3(om, u);
                const double lap_om = dot3(lap, om);
                const double td_om = dot3(td, om);
                A.add(phi2 * (nu * lap_om - td_om));
                B.add(phi2 * norm2(om));
                C.add(phi2 * lap_om);
                E.add(phi2 * td_om);
                Etrue.add(phi2 * dot3(tt, om));
                const Vec3 curl_phiom{phi * cu.x + gphi.y * om.z - gphi.z * om.y,
                                      phi * cu.y + gphi.z * om.x - gphi.x * om.z,
                                      phi * cu.z + gphi.x * om.y - gphi.y * om.x};
                F1.add(phi * dot3(oxu, curl_phiom));
                F2.add(phi * dot3(oxu, cross3(gphi, om)));
            }
        }
        out.A_semi = eta2 * A.value() * h3;
        out.B = eta * eta_p * B.value() * h3;
        out.C = -nu * eta2 * C.value() * h3;
        out.D = nu * eta2 * (D1.value() - Dsub.value()) * h3;
        out.E = eta2 * E.value() * h3;
        out.E_true = eta2 * Etrue.value() * h3;
        out.F1 = eta2 * F1.value() * h3;
        out.F2 = eta2 * F2.value() * h3;
        out.S2 = eta2 * B.value() * h3;
    }
    return residual_cache_.emplace(idx, out).first->second;
}

double LedgerEvaluator::time_term_slice(std::size_t idx, int sigma) const {
    if (config_.omega_t_mode == OmegaTMode::semi_discrete_rhs)
        return residual_slice(idx).A_semi;

    const auto key = std::make_pair(idx, sigma);
    auto it = time_term_cache_.find(key);
    if (it != time_term_cache_.end()) return it->second;

    const Grid& g = provider_.grid();
    const std::size_t n_snaps = provider_.size();
    const std::size_t s = std::size_t(sigma);
    const double dt = interval_ * sigma;
    auto omega_of = [&](std::size_t j) { return curl(fft_forward(provider_.load(j).u)); };

    // second-order differences, one-sided at the ends of the stored range
    SpectralVectorField oms_hat(g);
    auto combine = [&](std::initializer_list<std::pair<double, std::size_t>> terms) {
        SpectralVectorField acc(g);
        for (const auto& [coef, j] : terms) {
            const SpectralVectorField w = omega_of(j);
            for (int a = 0; a < 3; ++a)
                for (std::size_t i = 0; i < acc.comp[a].c.size(); ++i)
                    acc.comp[a].c[i] += coef * w.comp[a].c[i];
        }
        return acc;
    };
    if (idx + s < n_snaps && idx >= s) {
        oms_hat = combine({{0.5 / dt, idx + s}, {-0.5 / dt, idx - s}});
    } else if (idx + 2 * s < n_snaps) {
        oms_hat = combine({{-1.5 / dt, idx}, {2.0 / dt, idx + s}, {-0.5 / dt, idx + 2 * s}});
    } else if (idx >= 2 * s) {
        oms_hat = combine({{1.5 / dt, idx}, {-2.0 / dt, idx - s}, {0.5 / dt, idx - 2 * s}});
    } else {
        throw std::invalid_argument(
            "ledger: too few snapshots for central-difference omega_t at this stride");
    }

    const SpectralVectorField om_hat = curl(fft_forward(provider_.load(idx).u));
    const double eta = cutoff_.eta.eta(provider_.time(idx));
    double value = 0.0;
    if (config_.residual_mode == CutoffDerivativeMode::spectral_padded) {
        const Grid gp(n_pad_, g.box_length, g.nu);
        const VectorField om_p = fft_inverse(pad_spectrum(om_hat, n_pad_));
        const VectorField oms_p = fft_inverse(pad_spectrum(oms_hat, n_pad_));
        KahanSum acc;
        for (std::size_t i = 0; i < phi_pad_.size(); ++i) {
            const double phi2 = phi_pad_[i] * phi_pad_[i];
            if (phi2 == 0.0) continue;
            acc.add(phi2 * (oms_p.comp[0][i] * om_p.comp[0][i] +
                            oms_p.comp[1][i] * om_p.comp[1][i] +
                            oms_p.comp[2][i] * om_p.comp[2][i]));
        }
        value = eta * eta * acc.value() * gp.cell_volume();
    } else {
        const VectorField om_n = fft_inverse(om_hat);
        const VectorField oms_n = fft_inverse(oms_hat);
        KahanSum acc;
        for (std::size_t i = 0; i < g.npoints(); ++i) {
            const double phi2 = cutoff_.phi.v[i] * cutoff_.phi.v[i];
            if (phi2 == 0.0) continue;
            acc.add(phi2 * (oms_n.comp[0][i] * om_n.comp[0][i] +
                            oms_n.comp[1][i] * om_n.comp[1][i] +
                            oms_n.comp[2][i] * om_n.comp[2][i]));
        }
        value = eta * eta * acc.value() * g.cell_volume();
    }
    return time_term_cache_.emplace(key, value).first->second;
}

const LedgerEvaluator::ReportSlice& LedgerEvaluator::report_slice(std::size_t idx) const {
    auto it = report_cache_.find(idx);
    if (it != report_cache_.end()) return it->second;

    const Grid& g = provider_.grid();
    const double h3 = g.cell_volume();
    const Snapshot snap = provider_.load(idx);
    const SpectralVectorField u_hat = fft_forward(snap.u);
    const SpectralVectorField om_hat = curl(u_hat);
    const VectorField om = fft_inverse(om_hat);
    const VectorField curlom = fft_inverse(curl(om_hat));
    const ScalarField gsq_u = gradient_sq_magnitude(u_hat, config_.grad_norm);
    std::array<VectorField, 3> gradom;
    for (int b = 0; b < 3; ++b) gradom[b] = fft_inverse(gradient(om_hat.comp[b]));

    const double eps_reg = config_.eps_reg > 0.0 ? config_.eps_reg
                                                 : default_eps_reg(snap.u, om);
    const double eta = cutoff_.eta.eta(snap.t);
    const double eta_p = cutoff_.eta.eta_prime(snap.t);
    const double eta2 = eta * eta;
    const double M2 = config_.M * config_.M;

    ReportSlice out;
    out.eta = eta;
    KahanSum I1, I2_lo, I2_hi, I3_lo, I3_hi, cs_a_lo, curlps_lo, gradps_lo, gradps, psiom;
    KahanSum gu_ball, gu_S, uabs, usq_ball, osq_ball, ens_phi, ens_inner;
    std::size_t set_count = 0;
    const std::size_t np = g.npoints();
    for (std::size_t i = 0; i < np; ++i) {
        const double phi = cutoff_.phi.v[i];
        const Vec3 omv{om.comp[0][i], om.comp[1][i], om.comp[2][i]};
        const Vec3 uv{snap.u.comp[0][i], snap.u.comp[1][i], snap.u.comp[2][i]};
        const Vec3 gphi{cutoff_.grad_phi.comp[0][i], cutoff_.grad_phi.comp[1][i],
                        cutoff_.grad_phi.comp[2][i]};
        const double om2 = norm2(omv);
        const double u2 = norm2(uv);
        const double gphi2 = norm2(gphi);
        const double W = phi * phi * std::abs(eta * eta_p) + eta2 * gphi2;
        out.W_sup = std::max(out.W_sup, W);
        I1.add(om2 * W);
        ens_phi.add(om2 * phi * phi);
        if (inner_ball_.in[i]) ens_inner.add(om2);

        // |grad(psi omega)|^2 with the analytic cutoff gradient
        double gsq_psiom = 0.0;
        for (int b = 0; b < 3; ++b) {
            const double wb = om.comp[b][i];
            for (int a = 0; a < 3; ++a) {
                const double e = phi * gradom[b].comp[a][i] + cutoff_.grad_phi.comp[a][i] * wb;
                gsq_psiom += e * e;
            }
        }
        gsq_psiom *= eta2;
        gradps.add(gsq_psiom);
        psiom.add(eta2 * phi * phi * om2);

        const bool hi = om2 > M2;
        const Vec3 oxu = cross3(omv, uv);
        const Vec3 curl_psiom{eta * (phi * curlom.comp[0][i] + gphi.y * omv.z - gphi.z * omv.y),
                              eta * (phi * curlom.comp[1][i] + gphi.z * omv.x - gphi.x * omv.z),
                              eta * (phi * curlom.comp[2][i] + gphi.x * omv.y - gphi.y * omv.x)};
        const double i2 = eta * phi * dot3(oxu, curl_psiom);
        const double i3 = eta2 * phi * dot3(oxu, cross3(gphi, omv));
        if (hi) {
            I2_hi.add(i2);
            I3_hi.add(i3);
        } else {
            I2_lo.add(i2);
            I3_lo.add(i3);
            cs_a_lo.add(eta2 * phi * phi * u2 * om2);
            curlps_lo.add(norm2(curl_psiom));
            gradps_lo.add(gsq_psiom);
        }

        if (ball_.in[i]) {
            gu_ball.add(gsq_u.v[i]);
            uabs.add(std::sqrt(u2));
            usq_ball.add(u2);
            osq_ball.add(om2);
            const double denom = std::sqrt(u2) * std::sqrt(om2);
            double sin_theta = 0.0;
            if (denom > eps_reg) sin_theta = clamp01(std::sqrt(norm2(oxu)) / denom);
            if (denom > eps_reg) out.alpha_ball = std::max(out.alpha_ball, sin_theta);
            if (hi) {
                ++set_count;
                gu_S.add(gsq_u.v[i]);
                if (denom > eps_reg) out.alpha_S = std::max(out.alpha_S, sin_theta);
            }
        }
    }
    out.I1 = I1.value() * h3;
    out.I2_lo = I2_lo.value() * h3;
    out.I2_hi = I2_hi.value() * h3;
    out.I3_lo = I3_lo.value() * h3;
    out.I3_hi = I3_hi.value() * h3;
    out.cs_a_lo = cs_a_lo.value() * h3;
    out.curl_psiom_sq_lo = curlps_lo.value() * h3;
    out.grad_psiom_sq_lo = gradps_lo.value() * h3;
    out.grad_psiom_sq = gradps.value() * h3;
    out.psiom_sq = psiom.value() * h3;
    out.grad_u_sq_ball = gu_ball.value() * h3;
    out.grad_u_sq_S = gu_S.value() * h3;
    out.u_abs_ball = uabs.value() * h3;
    out.u_sq_ball = usq_ball.value() * h3;
    out.omega_sq_ball = osq_ball.value() * h3;
    out.enstrophy_phi = ens_phi.value() * h3;
    out.enstrophy_inner_ball = ens_inner.value() * h3;
    out.set_volume = double(set_count) * h3;
    return report_cache_.emplace(idx, out).first->second;
}

LedgerReport LedgerEvaluator::evaluate(double t, int stride) const {
    return evaluate_impl(t, stride, true);
}

LedgerReport LedgerEvaluator::evaluate_residuals(double t, int stride) const {
    return evaluate_impl(t, stride, false);
}

LedgerReport LedgerEvaluator::evaluate_impl(double t, int stride, bool full) const {
    if (stride < 1) throw std::invalid_argument("ledger: stride must be >= 1");
    const Cylinder& cyl = config_.cutoff.cylinder;
    if (t > cyl.t0 + 1e-9 * std::max(1.0, std::abs(cyl.t0)))
        throw std::invalid_argument("ledger: evaluation endpoint beyond the cylinder top t0");
    const std::size_t j1 = index_of(t, "ledger endpoint");
    if (j1 <= window_begin_)
        throw std::invalid_argument("ledger: evaluation endpoint must lie after t0 - 4r^2");
    if ((j1 - window_begin_) % std::size_t(stride) != 0)
        throw std::invalid_argument("ledger: stride does not divide the evaluation window");

    const std::size_t m = (j1 - window_begin_) / std::size_t(stride);
    const double dt = interval_ * stride;
    const std::vector<double> w = quadrature_weights(config_.time_quadrature, m, dt);

    LedgerReport rep;
    rep.t = t;
    rep.stride = stride;
    rep.quadrature = config_.time_quadrature;
    rep.omega_t_mode = config_.omega_t_mode;
    rep.residual_mode = config_.residual_mode;
    rep.cutoff_C_achieved = cutoff_.C_achieved;

    KahanSum A, B, C, D, E, Etrue, F1, F2;
    for (std::size_t q = 0; q <= m; ++q) {
        const std::size_t idx = window_begin_ + q * std::size_t(stride);
        const ResidualSlice& rs = residual_slice(idx);
        A.add(w[q] * time_term_slice(idx, stride));
        B.add(w[q] * rs.B);
        C.add(w[q] * rs.C);
        D.add(w[q] * rs.D);
        E.add(w[q] * rs.E);
        Etrue.add(w[q] * rs.E_true);
        F1.add(w[q] * rs.F1);
        F2.add(w[q] * rs.F2);
    }
    rep.boundary_term = 0.5 * residual_slice(j1).S2;
    rep.term_time = A.value();
    rep.term_time_ibp = -B.value() + rep.boundary_term;
    rep.term_diff_direct = C.value();
    rep.term_diff = D.value();
    rep.term_nl = E.value();
    rep.term_nl_true = Etrue.value();
    rep.term_nl_ibp_curl = F1.value();
    rep.term_nl_ibp_grad = F2.value();
    rep.term_nl_ibp = rep.term_nl_ibp_curl + rep.term_nl_ibp_grad;

    const double scale =
        std::max({std::abs(rep.term_time), std::abs(rep.term_time_ibp),
                  std::abs(rep.term_diff_direct), std::abs(rep.term_diff),
                  std::abs(rep.term_nl), std::abs(rep.term_nl_ibp), std::abs(rep.boundary_term)});
    rep.residual_scale = scale;
    if (scale > 0.0) {
        rep.residual_major1 =
            std::abs(rep.term_time_ibp + rep.term_diff_direct + rep.term_nl) / scale;
        rep.residual_est1 = std::abs(rep.term_time_ibp + rep.term_diff + rep.term_nl) / scale;
        rep.residual_est2 = std::abs(rep.term_time - rep.term_time_ibp) / scale;
        rep.residual_est3 =
            std::abs(rep.term_time_ibp + rep.term_diff_direct + rep.term_nl_ibp) / scale;
        rep.residual_est1_pairwise = std::abs(rep.term_diff_direct - rep.term_diff) / scale;
        rep.residual_est3_pairwise = std::abs(rep.term_nl_true - rep.term_nl_ibp) / scale;
    }

    if (!full) return rep;

    // report route: I-terms, bounds, monitors
    KahanSum I1, I2l, I2h, I3l, I3h, csal, cpsl, gpsl, gps, guQ, uabsQ, psiomQ, osqQ;
    double sup_K = 0.0, sup_K_ball = 0.0, sup_psiom = 0.0, sup_W = 0.0;
    double sup_u_ball = 0.0, sup_ens_phi = 0.0;
    for (std::size_t q = 0; q <= m; ++q) {
        const std::size_t idx = window_begin_ + q * std::size_t(stride);
        const ReportSlice& s = report_slice(idx);
        I1.add(w[q] * s.I1);
        I2l.add(w[q] * s.I2_lo);
        I2h.add(w[q] * s.I2_hi);
        I3l.add(w[q] * s.I3_lo);
        I3h.add(w[q] * s.I3_hi);
        csal.add(w[q] * s.cs_a_lo);
        cpsl.add(w[q] * s.curl_psiom_sq_lo);
        gpsl.add(w[q] * s.grad_psiom_sq_lo);
        gps.add(w[q] * s.grad_psiom_sq);
        guQ.add(w[q] * s.grad_u_sq_ball);
        uabsQ.add(w[q] * s.u_abs_ball);
        psiomQ.add(w[q] * s.psiom_sq);
        osqQ.add(w[q] * s.omega_sq_ball);
        const double K = s.alpha_ball * std::sqrt(std::sqrt(s.grad_u_sq_S));
        const double K_ball = s.alpha_ball * std::sqrt(std::sqrt(s.grad_u_sq_ball));
        sup_K = std::max(sup_K, K);
        sup_K_ball = std::max(sup_K_ball, K_ball);
        sup_psiom = std::max(sup_psiom, s.psiom_sq);
        sup_W = std::max(sup_W, s.W_sup);
        sup_u_ball = std::max(sup_u_ball, s.u_sq_ball);
        sup_ens_phi = std::max(sup_ens_phi, s.enstrophy_phi);
    }
    rep.I1 = I1.value();
    rep.I2_lo = I2l.value();
    rep.I2_hi = I2h.value();
    rep.I3_lo = I3l.value();
    rep.I3_hi = I3h.value();
    {
        // exact set partition: re-sum the combined slice values and compare
        KahanSum I2u, I3u;
        for (std::size_t q = 0; q <= m; ++q) {
            const std::size_t idx = window_begin_ + q * std::size_t(stride);
            const ReportSlice& s = report_slice(idx);
            I2u.add(w[q] * (s.I2_lo + s.I2_hi));
            I3u.add(w[q] * (s.I3_lo + s.I3_hi));
        }
        rep.I2_unsplit = I2u.value();
        rep.I3_unsplit = I3u.value();
        const double s2 = std::max({std::abs(rep.I2_unsplit), std::abs(rep.I2_lo),
                                    std::abs(rep.I2_hi), 1e-300});
        const double s3 = std::max({std::abs(rep.I3_unsplit), std::abs(rep.I3_lo),
                                    std::abs(rep.I3_hi), 1e-300});
        rep.partition_residual_I2 = std::abs(rep.I2_lo + rep.I2_hi - rep.I2_unsplit) / s2;
        rep.partition_residual_I3 = std::abs(rep.I3_lo + rep.I3_hi - rep.I3_unsplit) / s3;
    }

    const ReportSlice& first = report_slice(window_begin_);
    rep.u0_l2_ball = std::sqrt(first.u_sq_ball);
    rep.u0_l2_global = l2_norm(provider_.load(window_begin_).u);
    rep.sup_u_l2_ball = std::sqrt(sup_u_ball);
    rep.grad_u_sq_Q = guQ.value();
    rep.grad_psiom_sq_Q = gps.value();
    rep.sup_K = sup_K;
    rep.sup_K_ball = sup_K_ball;
    rep.sup_psiom_sq = sup_psiom;
    rep.initial_local_enstrophy = first.enstrophy_phi;
    rep.sup_local_enstrophy = sup_ens_phi;

    const double r = cyl.r;
    auto push = [&](const std::string& name, double lhs, double rhs, bool empirical) {
        BoundRow row;
        row.name = name;
        row.lhs = lhs;
        row.rhs = rhs;
        row.empirical = empirical;
        row.holds = lhs <= rhs * (1.0 + 1e-12) + 1e-300;
        row.ratio = rhs != 0.0 ? lhs / rhs : (lhs == 0.0 ? 0.0 : INFINITY);
        rep.bounds.push_back(row);
    };

    // I1 <= (c/r^2) int int |omega|^2 with c measured from the cutoff
    const double c_meas = r * r * sup_W;
    push("est4_I1_cutoff_const", rep.I1, c_meas / (r * r) * osqQ.value(), false);
    push("est4_enstrophy_vs_gradu", psiomQ.value(), rep.grad_u_sq_Q, true);
    push("est4_enstrophy_vs_2gradu", psiomQ.value(), 2.0 * rep.grad_u_sq_Q, false);

    // Young's inequality on the low-vorticity part of I2: the curl form is
    // the pointwise-exact split, the gradient form is the written one
    push("est5_young_curl", std::abs(rep.I2_lo), 0.5 * csal.value() + 0.5 * cpsl.value(), false);
    push("est5_young_gradient", std::abs(rep.I2_lo),
         0.5 * csal.value() + 0.5 * gpsl.value(), true);
    {
        const double lhs = 0.5 * csal.value();
        const double M2 = config_.M * config_.M;
        push("est5_chain_sup_us", lhs, 2.0 * M2 * r * r * sup_u_ball, false);
        push("est5_chain_local_u0", lhs, 2.0 * M2 * r * r * first.u_sq_ball, true);
        push("est5_chain_global_u0", lhs,
             2.0 * M2 * r * r * rep.u0_l2_global * rep.u0_l2_global, true);
    }
    {
        double sup_grad_phi = 0.0;
        for (double v : cutoff_.grad_phi_norm.v) sup_grad_phi = std::max(sup_grad_phi, v);
        const double eta_end = cutoff_.eta.eta(t);
        const double M2 = config_.M * config_.M;
        push("est6_linf_bound", std::abs(rep.I3_lo),
             sup_grad_phi * eta_end * M2 * uabsQ.value(), false);
        const double vol_sqrt = std::sqrt(4.0 / 3.0 * std::numbers::pi * 8.0 * r * r * r);
        push("est6_chain_local_u0", std::abs(rep.I3_lo),
             (cutoff_.C_achieved / r) * M2 * 4.0 * r * r * vol_sqrt * rep.u0_l2_ball, true);
        push("est6_chain_global_u0", std::abs(rep.I3_lo),
             (cutoff_.C_achieved / r) * M2 * 4.0 * r * r * vol_sqrt * rep.u0_l2_global, true);
    }
    // generic-constant estimates: empirical ratios only
    {
        const double rhs7 = sup_K * std::sqrt(std::sqrt(rep.grad_u_sq_Q)) *
                            (0.75 * rep.grad_psiom_sq_Q + 0.25 * sup_psiom);
        push("est7_ratio", std::abs(rep.I2_hi), rhs7, true);
        const double denom8 = (1.0 / (r * r)) * rep.u0_l2_ball * sup_K * sup_K *
                              rep.grad_u_sq_Q;
        BoundRow row;
        row.name = "est8_ratio";
        row.lhs = std::abs(rep.I3_hi);
        row.rhs = denom8;
        row.empirical = true;
        row.holds = row.lhs <= denom8 + 0.25 * rep.grad_psiom_sq_Q + 1e-300;
        const double excess = row.lhs - 0.25 * rep.grad_psiom_sq_Q;
        row.ratio = denom8 != 0.0 ? excess / denom8 : (excess <= 0.0 ? 0.0 : INFINITY);
        rep.bounds.push_back(row);
    }
    return rep;
}

std::pair<DiagnosticsSeries, BoundednessVerdict> LedgerEvaluator::monitor() const {
    const Cylinder& cyl = config_.cutoff.cylinder;
    const std::size_t j1 = index_of(cyl.t0, "boundedness monitor (t0)");
    DiagnosticsSeries series;
    BoundednessVerdict verdict;
    double sup_inner = 0.0, sup_phi = 0.0;
    for (std::size_t idx = window_begin_; idx <= j1; ++idx) {
        const ReportSlice& s = report_slice(idx);
        DiagnosticsRow row;
        row.t = provider_.time(idx);
        row.alpha = s.alpha_ball;
        row.grad_norm_S = std::sqrt(s.grad_u_sq_S);
        row.criterion = s.alpha_ball * std::sqrt(row.grad_norm_S);
        row.local_enstrophy = s.enstrophy_phi;
        row.set_volume = s.set_volume;
        row.alpha_S = s.alpha_S;
        row.grad_norm_ball = std::sqrt(s.grad_u_sq_ball);
        row.criterion_ball = s.alpha_ball * std::sqrt(row.grad_norm_ball);
        series.rows.push_back(row);
        verdict.sup_K = std::max(verdict.sup_K, row.criterion);
        verdict.sup_K_ball = std::max(verdict.sup_K_ball, row.criterion_ball);
        sup_inner = std::max(sup_inner, s.enstrophy_inner_ball);
        sup_phi = std::max(sup_phi, s.enstrophy_phi);
    }
    verdict.initial_local_enstrophy = report_slice(window_begin_).enstrophy_phi;
    verdict.sup_local_enstrophy = sup_phi;
    verdict.sup_inner_ball_enstrophy = sup_inner;
    {
        KahanSum gps;
        const std::vector<double> w =
            quadrature_weights(config_.time_quadrature, j1 - window_begin_, interval_);
        for (std::size_t idx = window_begin_; idx <= j1; ++idx)
            gps.add(w[idx - window_begin_] * report_slice(idx).grad_psiom_sq);
        verdict.grad_psiom_sq_Q = gps.value();
    }
    verdict.enstrophy_within_bound =
        verdict.sup_local_enstrophy <=
        config_.enstrophy_bound_multiple * std::max(verdict.initial_local_enstrophy, 1e-300);
    verdict.criterion_below_threshold = verdict.sup_K <= config_.criterion_threshold;
    return {series, verdict};
}

Major1Terms evaluate_identity_major1(const SnapshotProvider& provider, const LedgerConfig& config,
                                     double t) {
    LedgerEvaluator ev(provider, config);
    const LedgerReport rep = ev.evaluate_residuals(t);
    return {rep.term_time, rep.term_diff_direct, rep.term_nl, rep.residual_major1};
}

double verify_est1(const SnapshotProvider& provider, const LedgerConfig& config, double t) {
    LedgerEvaluator ev(provider, config);
    return ev.evaluate_residuals(t).residual_est1;
}

double verify_est2(const SnapshotProvider& provider, const LedgerConfig& config, double t) {
    LedgerEvaluator ev(provider, config);
    return ev.evaluate_residuals(t).residual_est2;
}

double verify_est3(const SnapshotProvider& provider, const LedgerConfig& config, double t) {
    LedgerEvaluator ev(provider, config);
    return ev.evaluate_residuals(t).residual_est3;
}

ITerms decompose_I_terms(const SnapshotProvider& provider, const LedgerConfig& config, double t) {
    LedgerEvaluator ev(provider, config);
    const LedgerReport rep = ev.evaluate(t);
    return {rep.I1, rep.I2_lo, rep.I2_hi, rep.I2_unsplit, rep.I3_lo, rep.I3_hi, rep.I3_unsplit};
}

std::vector<BoundRow> check_bounds(const SnapshotProvider& provider, const LedgerConfig& config,
                                   double t) {
    LedgerEvaluator ev(provider, config);
    return ev.evaluate(t).bounds;
}

std::pair<DiagnosticsSeries, BoundednessVerdict> boundedness_monitor(const SnapshotProvider& provider,
                                                             const LedgerConfig& config) {
    LedgerEvaluator ev(provider, config);
    return ev.monitor();
}

}  // namespace nsebox
