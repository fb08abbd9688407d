#pragma once

#include <array>
#include <string>
#include <vector>

#include "nsebox/field.hpp"

namespace nsebox {

/// @file cutoff.hpp
/// Spatiotemporal cutoff psi(x,t) = phi(x) eta(t): phi equals 1 on
/// B(x0, r), vanishes outside B(x0, 2r), and satisfies
/// |grad phi| / phi^delta <= C / r with a computable C; eta equals 1 on
/// [t0 - r^2, t0], vanishes for t <= t0 - 4r^2, and has |eta'| <= 2/r^2.

/// Parabolic cylinder B(x0, r) x (t0 - r^2, t0) with its double companion
/// B(x0, 2r) x (t0 - 4r^2, t0).
struct Cylinder {
    std::array<double, 3> x0{0.0, 0.0, 0.0};
    double t0 = 0.0;
    double r = 0.0;
};

/// Spatial admissibility: the support ball must sit strictly inside the box
/// (4r < box_length/2) and r must resolve at least two cells (r >= 2h).
/// Throws std::invalid_argument otherwise.
void validate_cylinder_spatial(const Cylinder& c, const Grid& g);

struct CutoffSpec {
    Cylinder cylinder;
    double delta = 0.5;      // exponent in |grad phi|/phi^delta <= C/r, in (0,1)
    int profile_order = 3;   // 3 = cubic smoothstep ramp, 5 = quintic

    void validate(const Grid& g) const;
};

/// Smoothstep ramp of the given order on [0,1]: p(0)=0, p(1)=1.
double smoothstep(double x, int order);
double smoothstep_derivative(double x, int order);
/// sup |p'| over [0,1] (3/2 for cubic, 15/8 for quintic).
double smoothstep_max_slope(int order);

/// Temporal profile: eta ramps from 0 at t0-4r^2 to 1 at t0-r^2 over the full
/// 3r^2 gap, which makes max|eta'| = smoothstep_max_slope/(3r^2); for the
/// cubic ramp that is 1/(2 r^2), within the 2/r^2 budget.
struct TimeProfile {
    double t0 = 0.0;
    double r = 0.0;
    int profile_order = 3;

    double eta(double t) const;
    double eta_prime(double t) const;
    double max_slope() const;  // analytic sup |eta'|
};

struct CutoffPair {
    CutoffSpec spec;
    ScalarField phi;            // sampled phi = zeta^{1/(1-delta)}
    VectorField grad_phi;       // analytic chain-rule gradient, sampled
    ScalarField grad_phi_norm;  // |grad phi|, analytic, sampled
    TimeProfile eta;
    double C_theory = 0.0;      // sup|zeta'| / (1-delta)
    double C_achieved = 0.0;    // measured grid sup of r |grad phi| / phi^delta
};

/// Build phi (with its analytic gradient) and eta for the spec.
CutoffPair build_cutoff(const CutoffSpec& spec, const Grid& g);

struct CutoffCheck {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double bound = 0.0;
};

struct CutoffReport {
    std::vector<CutoffCheck> checks;
    bool all_pass = false;
};

/// Re-measure every cutoff invariant on the grid and report pass/fail plus
/// the measured constants.
CutoffReport verify_cutoff(const CutoffPair& pair, const Grid& g);

/// Minimum-image distance |x - x0| on the periodic box.
double periodic_distance(const Grid& g, const std::array<double, 3>& x,
                         const std::array<double, 3>& x0);

}  // namespace nsebox
