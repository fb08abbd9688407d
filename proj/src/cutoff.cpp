#include "nsebox/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nsebox {

namespace {

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

double min_image(double d, double L) {
    d = std::fmod(d, L);
    if (d < -L / 2) d += L;
    if (d >= L / 2) d -= L;
    return d;
}

}  // namespace

void validate_cylinder_spatial(const Cylinder& c, const Grid& g) {
    if (!(c.r > 0.0)) throw std::invalid_argument("Cylinder: r must be positive");
    if (!(4.0 * c.r < g.box_length / 2.0))
        throw std::invalid_argument(
            "Cylinder: support ball does not fit in the box (need 4r < box_length/2)");
    if (c.r < 2.0 * g.h())
        throw std::invalid_argument("Cylinder: r < 2h is unresolved on this grid");
}

void CutoffSpec::validate(const Grid& g) const {
    validate_cylinder_spatial(cylinder, g);
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("CutoffSpec: delta must lie in (0,1)");
    if (profile_order != 3 && profile_order != 5)
        throw std::invalid_argument("CutoffSpec: profile_order must be 3 or 5");
}

double smoothstep(double x, int order) {
    x = clamp_unit(x);
    if (order == 3) return x * x * (3.0 - 2.0 * x);
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

double smoothstep_derivative(double x, int order) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    if (order == 3) return 6.0 * x * (1.0 - x);
    return 30.0 * x * x * (1.0 - x) * (1.0 - x);
}

double smoothstep_max_slope(int order) { return order == 3 ? 1.5 : 15.0 / 8.0; }

double TimeProfile::eta(double t) const {
    const double ramp_start = t0 - 4.0 * r * r;
    const double ramp_len = 3.0 * r * r;
    return smoothstep((t - ramp_start) / ramp_len, profile_order);
}

double TimeProfile::eta_prime(double t) const {
    const double ramp_start = t0 - 4.0 * r * r;
    const double ramp_len = 3.0 * r * r;
    return smoothstep_derivative((t - ramp_start) / ramp_len, profile_order) / ramp_len;
}

double TimeProfile::max_slope() const {
    return smoothstep_max_slope(profile_order) / (3.0 * r * r);
}

double periodic_distance(const Grid& g, const std::array<double, 3>& x,
                         const std::array<double, 3>& x0) {
    const double dx = min_image(x[0] - x0[0], g.box_length);
    const double dy = min_image(x[1] - x0[1], g.box_length);
    const double dz = min_image(x[2] - x0[2], g.box_length);
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

CutoffPair build_cutoff(const CutoffSpec& spec, const Grid& g) {
    spec.validate(g);
    CutoffPair pair;
    pair.spec = spec;
    pair.phi = ScalarField(g);
    pair.grad_phi = VectorField(g);
    pair.grad_phi_norm = ScalarField(g);
    pair.eta = TimeProfile{spec.cylinder.t0, spec.cylinder.r, spec.profile_order};
    pair.C_theory = smoothstep_max_slope(spec.profile_order) / (1.0 - spec.delta);

    const Cylinder& cyl = spec.cylinder;
    const double r = cyl.r;
    const double power = 1.0 / (1.0 - spec.delta);
    const double L = g.box_length;
    const double h = g.h();
    const int n = g.n;

    double sup_ratio = 0.0;
    std::size_t idx = 0;
    for (int k = 0; k < n; ++k) {
        const double dz = min_image(k * h - cyl.x0[2], L);
        for (int j = 0; j < n; ++j) {
            const double dy = min_image(j * h - cyl.x0[1], L);
            for (int i = 0; i < n; ++i, ++idx) {
                const double dx = min_image(i * h - cyl.x0[0], L);
                const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
                const double s = (dist - r) / r;
                if (s <= 0.0) {
                    pair.phi.v[idx] = 1.0;
                    continue;  // flat inside B(x0, r): gradient zero
                }
                if (s >= 1.0) continue;  // outside B(x0, 2r): phi = 0 exactly
                // zeta = 1 - smoothstep(s); phi = zeta^{1/(1-delta)}
                const double zeta = 1.0 - smoothstep(s, spec.profile_order);
                const double zeta_p = -smoothstep_derivative(s, spec.profile_order);
                const double phi = std::pow(zeta, power);
                // dphi/ds = power * zeta^{power-1} * zeta'; |grad s| = 1/r, radial
                const double dphi_ds = power * std::pow(zeta, power - 1.0) * zeta_p;
                const double gmag = std::abs(dphi_ds) / r;
                pair.phi.v[idx] = phi;
                pair.grad_phi_norm.v[idx] = gmag;
                if (dist > 0.0) {
                    const double scale = (dphi_ds / r) / dist;
                    pair.grad_phi.comp[0][idx] = scale * dx;
                    pair.grad_phi.comp[1][idx] = scale * dy;
                    pair.grad_phi.comp[2][idx] = scale * dz;
                }
                if (phi > 1e-8) {
                    const double ratio = r * gmag / std::pow(phi, spec.delta);
                    sup_ratio = std::max(sup_ratio, ratio);
                }
            }
        }
    }
    pair.C_achieved = sup_ratio;
    return pair;
}

CutoffReport verify_cutoff(const CutoffPair& pair, const Grid& g) {
    CutoffReport report;
    const CutoffSpec& spec = pair.spec;
    const Cylinder& cyl = spec.cylinder;
    const double r = cyl.r;
    const double h = g.h();
    const double L = g.box_length;
    const int n = g.n;

    bool range_ok = true;
    bool inner_ok = true;
    bool support_ok = true;
    double sup_ratio = 0.0;
    double range_worst = 0.0;
    double inner_worst = 0.0;
    double support_worst = 0.0;

    std::size_t idx = 0;
    for (int k = 0; k < n; ++k) {
        const double dz = min_image(k * h - cyl.x0[2], L);
        for (int j = 0; j < n; ++j) {
            const double dy = min_image(j * h - cyl.x0[1], L);
            for (int i = 0; i < n; ++i, ++idx) {
                const double dx = min_image(i * h - cyl.x0[0], L);
                const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
                const double phi = pair.phi.v[idx];
                if (phi < 0.0 || phi > 1.0) {
                    range_ok = false;
                    range_worst = std::max(range_worst, std::max(-phi, phi - 1.0));
                }
                if (dist <= r && std::abs(phi - 1.0) > 1e-12) {
                    inner_ok = false;
                    inner_worst = std::max(inner_worst, std::abs(phi - 1.0));
                }
                if (dist >= 2.0 * r && phi != 0.0) {
                    support_ok = false;
                    support_worst = std::max(support_worst, std::abs(phi));
                }
                if (phi > 1e-8) {
                    const double ratio =
                        r * pair.grad_phi_norm.v[idx] / std::pow(phi, spec.delta);
                    sup_ratio = std::max(sup_ratio, ratio);
                }
            }
        }
    }

    report.checks.push_back({"phi_in_unit_range", range_ok, range_worst, 0.0});
    report.checks.push_back({"phi_one_on_inner_ball", inner_ok, inner_worst, 1e-12});
    report.checks.push_back({"phi_zero_outside_double_ball", support_ok, support_worst, 0.0});
    report.checks.push_back(
        {"r_grad_phi_over_phi_delta", sup_ratio <= pair.C_theory + 1e-9, sup_ratio,
         pair.C_theory});

    // Temporal profile, sampled densely across the ramp with the midpoint hit.
    const TimeProfile& eta = pair.eta;
    const double T0 = cyl.t0 - 4.0 * r * r;
    const double T1 = cyl.t0 - r * r;
    double eta_slope_max = 0.0;
    bool eta_range_ok = true;
    const int samples = 4000;
    for (int s = 0; s <= samples; ++s) {
        const double t = T0 + (T1 - T0) * double(s) / samples;
        eta_slope_max = std::max(eta_slope_max, std::abs(eta.eta_prime(t)));
        const double e = eta.eta(t);
        if (e < 0.0 || e > 1.0) eta_range_ok = false;
    }
    const double paper_slope_bound = 2.0 / (r * r);
    report.checks.push_back({"eta_in_unit_range", eta_range_ok, 0.0, 0.0});
    report.checks.push_back(
        {"eta_one_on_inner_window", std::abs(eta.eta(cyl.t0) - 1.0) <= 1e-15 &&
                                        std::abs(eta.eta(T1) - 1.0) <= 1e-15,
         eta.eta(T1), 1.0});
    report.checks.push_back(
        {"eta_zero_at_window_start", std::abs(eta.eta(T0)) <= 1e-15, eta.eta(T0), 0.0});
    report.checks.push_back(
        {"eta_slope_within_paper_bound", eta_slope_max <= paper_slope_bound, eta_slope_max,
         paper_slope_bound});
    report.checks.push_back({"eta_slope_matches_construction",
                             std::abs(eta_slope_max - eta.max_slope()) <= 0.01 * eta.max_slope(),
                             eta_slope_max, eta.max_slope()});

    report.all_pass = true;
    for (const auto& c : report.checks) report.all_pass = report.all_pass && c.pass;
    return report;
}

}  // namespace nsebox
