#include "nsebox/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nsebox/fft.hpp"

namespace nsebox {

double default_eps_reg(const VectorField& u, const VectorField& omega) {
    return 1e-12 * linf_norm(u) * linf_norm(omega);
}

AlignmentField alignment_sine(const VectorField& u, const VectorField& omega, double eps_reg) {
    if (!u.grid.compatible(omega.grid))
        throw std::invalid_argument("alignment_sine: mismatched grids");
    if (eps_reg <= 0.0) eps_reg = default_eps_reg(u, omega);
    AlignmentField af;
    af.grid = u.grid;
    af.sin_theta = ScalarField(u.grid);
    af.validity = RegionMask(u.grid);
    const std::size_t np = u.grid.npoints();
    for (std::size_t i = 0; i < np; ++i) {
        const double u0 = u.comp[0][i], u1 = u.comp[1][i], u2 = u.comp[2][i];
        const double w0 = omega.comp[0][i], w1 = omega.comp[1][i], w2 = omega.comp[2][i];
        const double nu2 = u0 * u0 + u1 * u1 + u2 * u2;
        const double nw2 = w0 * w0 + w1 * w1 + w2 * w2;
        const double denom = std::sqrt(nu2) * std::sqrt(nw2);
        if (denom <= eps_reg) continue;  // stagnation point: invalid, sin = 0
        const double c0 = u1 * w2 - u2 * w1;
        const double c1 = u2 * w0 - u0 * w2;
        const double c2 = u0 * w1 - u1 * w0;
        const double cr = std::sqrt(c0 * c0 + c1 * c1 + c2 * c2);
        af.sin_theta.v[i] = clamp01(cr / denom);
        af.validity.in[i] = 1;
    }
    return af;
}

double alpha_sup(const AlignmentField& af, const RegionMask& ball) {
    if (!af.grid.compatible(ball.grid))
        throw std::invalid_argument("alpha_sup: mismatched grids");
    double sup = 0.0;
    for (std::size_t i = 0; i < af.sin_theta.v.size(); ++i)
        if (ball.in[i] && af.validity.in[i]) sup = std::max(sup, af.sin_theta.v[i]);
    return sup;
}

double alpha(const Snapshot& snap, const RegionMask& ball, double eps_reg) {
    return alpha_sup(alignment_sine(snap.u, snap.omega(), eps_reg), ball);
}

RegionMask superlevel_set(const VectorField& omega, double M, const RegionMask& ball) {
    if (!omega.grid.compatible(ball.grid))
        throw std::invalid_argument("superlevel_set: mismatched grids");
    RegionMask s(omega.grid);
    for (std::size_t i = 0; i < s.in.size(); ++i) {
        if (!ball.in[i]) continue;
        const double w2 = omega.comp[0][i] * omega.comp[0][i] +
                          omega.comp[1][i] * omega.comp[1][i] +
                          omega.comp[2][i] * omega.comp[2][i];
        s.in[i] = (w2 > M * M) ? 1 : 0;
    }
    return s;
}

double criterion(const Snapshot& snap, double M, const RegionMask& ball, double eps_reg,
                 GradNorm norm) {
    const SpectralVectorField uh = fft_forward(snap.u);
    const VectorField om = fft_inverse(curl(uh));
    const double a = alpha_sup(alignment_sine(snap.u, om, eps_reg), ball);
    const RegionMask s = superlevel_set(om, M, ball);
    const ScalarField gsq = gradient_sq_magnitude(uh, norm);
    const double grad_norm = std::sqrt(std::max(0.0, masked_integral(gsq, s)));
    return a * std::sqrt(grad_norm);
}

double localized_enstrophy(const VectorField& omega, const ScalarField& phi) {
    if (!omega.grid.compatible(phi.grid))
        throw std::invalid_argument("localized_enstrophy: mismatched grids");
    KahanSum s;
    for (std::size_t i = 0; i < phi.v.size(); ++i) {
        const double w2 = omega.comp[0][i] * omega.comp[0][i] +
                          omega.comp[1][i] * omega.comp[1][i] +
                          omega.comp[2][i] * omega.comp[2][i];
        s.add(w2 * phi.v[i] * phi.v[i]);
    }
    return s.value() * omega.grid.cell_volume();
}

HelicityStats helicity_stats(const Snapshot& snap, double dissipation_quantile, double eps_reg,
                             int bins) {
    if (dissipation_quantile <= 0.0 || dissipation_quantile >= 1.0)
        throw std::invalid_argument("helicity_stats: quantile must lie in (0,1)");
    if (bins < 3) throw std::invalid_argument("helicity_stats: need at least 3 bins");

    const SpectralVectorField uh = fft_forward(snap.u);
    const VectorField om = fft_inverse(curl(uh));
    const ScalarField gsq = gradient_sq_magnitude(uh, GradNorm::frobenius);
    const VectorField& u = snap.u;
    if (eps_reg <= 0.0) eps_reg = default_eps_reg(u, om);

    HelicityStats stats;
    stats.bin_centers.resize(bins);
    stats.low_dissipation.assign(bins, 0.0);
    stats.high_dissipation.assign(bins, 0.0);
    for (int b = 0; b < bins; ++b)
        stats.bin_centers[b] = -1.0 + (2.0 * b + 1.0) / bins;

    {
        std::vector<double> d = gsq.v;
        const std::size_t pos =
            std::min(d.size() - 1, std::size_t(dissipation_quantile * double(d.size())));
        std::nth_element(d.begin(), d.begin() + pos, d.end());
        stats.dissipation_threshold = d[pos];
    }

    std::size_t n_low = 0, n_high = 0;
    KahanSum sum_h, sum_e, sum_hh, sum_ee, sum_he;
    const std::size_t np = u.grid.npoints();
    for (std::size_t i = 0; i < np; ++i) {
        const double u0 = u.comp[0][i], u1 = u.comp[1][i], u2 = u.comp[2][i];
        const double w0 = om.comp[0][i], w1 = om.comp[1][i], w2 = om.comp[2][i];
        const double hel = u0 * w0 + u1 * w1 + u2 * w2;
        const double ens = w0 * w0 + w1 * w1 + w2 * w2;
        sum_h.add(std::abs(hel));
        sum_e.add(ens);
        sum_hh.add(hel * hel);
        sum_ee.add(ens * ens);
        sum_he.add(std::abs(hel) * ens);

        const double denom = std::sqrt(u0 * u0 + u1 * u1 + u2 * u2) * std::sqrt(ens);
        if (denom <= eps_reg) continue;
        const double c = std::clamp(hel / denom, -1.0, 1.0);
        int b = int((c + 1.0) / 2.0 * bins);
        b = std::clamp(b, 0, bins - 1);
        if (gsq.v[i] > stats.dissipation_threshold) {
            stats.high_dissipation[b] += 1.0;
            ++n_high;
        } else {
            stats.low_dissipation[b] += 1.0;
            ++n_low;
        }
    }
    stats.valid_points = n_low + n_high;
    for (int b = 0; b < bins; ++b) {
        if (n_low) stats.low_dissipation[b] /= double(n_low);
        if (n_high) stats.high_dissipation[b] /= double(n_high);
    }

    // Pearson correlation of |u.omega| with |omega|^2 over all points.
    const double N = double(np);
    const double var_h = sum_hh.value() - sum_h.value() * sum_h.value() / N;
    const double var_e = sum_ee.value() - sum_e.value() * sum_e.value() / N;
    const double cov = sum_he.value() - sum_h.value() * sum_e.value() / N;
    stats.corr_helicity_enstrophy =
        (var_h > 0.0 && var_e > 0.0) ? std::clamp(cov / std::sqrt(var_h * var_e), -1.0, 1.0)
                                     : 0.0;
    return stats;
}

DiagnosticsRow diagnose_snapshot(const Snapshot& snap, const CutoffPair& cutoff,
                                 const RegionMask& ball, double M, double eps_reg,
                                 GradNorm norm) {
    const Grid& g = snap.u.grid;
    const SpectralVectorField uh = fft_forward(snap.u);
    const VectorField om = fft_inverse(curl(uh));
    const AlignmentField af = alignment_sine(snap.u, om, eps_reg);
    const RegionMask s = superlevel_set(om, M, ball);
    const ScalarField gsq = gradient_sq_magnitude(uh, norm);

    DiagnosticsRow row;
    row.t = snap.t;
    row.alpha = alpha_sup(af, ball);
    row.grad_norm_S = std::sqrt(std::max(0.0, masked_integral(gsq, s)));
    row.criterion = row.alpha * std::sqrt(row.grad_norm_S);
    row.local_enstrophy = localized_enstrophy(om, cutoff.phi);
    row.set_volume = double(s.count()) * g.cell_volume();
    row.alpha_S = alpha_sup(af, s);
    row.grad_norm_ball = std::sqrt(std::max(0.0, masked_integral(gsq, ball)));
    row.criterion_ball = row.alpha * std::sqrt(row.grad_norm_ball);
    return row;
}

DiagnosticsSeries diagnose(const Trajectory& traj, const Cylinder& cyl, double M, double delta,
                           double eps_reg, GradNorm norm, int profile_order) {
    const Grid& g = traj.config.grid;
    CutoffSpec spec;
    spec.cylinder = cyl;
    spec.delta = delta;
    spec.profile_order = profile_order;
    const CutoffPair cutoff = build_cutoff(spec, g);
    const RegionMask ball = ball_mask(g, cyl.x0, 2.0 * cyl.r);

    DiagnosticsSeries series;
    series.rows.reserve(traj.snapshots.size());
    for (const auto& snap : traj.snapshots)
        series.rows.push_back(diagnose_snapshot(snap, cutoff, ball, M, eps_reg, norm));
    return series;
}

}  // namespace nsebox
