#pragma once

#include <vector>

#include "nsebox/cutoff.hpp"
#include "nsebox/solver.hpp"
#include "nsebox/spectral_ops.hpp"

namespace nsebox {

/// @file diagnostics.hpp
/// Geometric diagnostics of a flow snapshot: the velocity-vorticity
/// alignment angle, its supremum alpha over a ball, vorticity super-level
/// sets, the criterion functional K(s) = alpha * ||grad u||_{L2(S)}^{1/2},
/// localized enstrophy, and helicity statistics.

/// sin of the angle between u and omega per grid point, with a validity mask
/// excluding near-stagnation points (|u||omega| <= eps_reg). Invalid points
/// carry sin_theta = 0 by convention.
struct AlignmentField {
    Grid grid;
    ScalarField sin_theta;
    RegionMask validity;
};

/// eps_reg convention used when the caller passes eps_reg <= 0:
/// 1e-12 * max|u| * max|omega|.
double default_eps_reg(const VectorField& u, const VectorField& omega);

AlignmentField alignment_sine(const VectorField& u, const VectorField& omega, double eps_reg);

/// sup of sin_theta over valid points of the mask; 0 if none are valid.
double alpha_sup(const AlignmentField& af, const RegionMask& ball);

/// alpha(t) for a snapshot over a ball mask.
double alpha(const Snapshot& snap, const RegionMask& ball, double eps_reg);

/// S = { |omega| > M } intersected with the ball (strict inequality).
RegionMask superlevel_set(const VectorField& omega, double M, const RegionMask& ball);

/// K(s) = alpha * ||grad u||_{L2(S_s)}^{1/2} with the named pointwise matrix
/// norm (Frobenius default).
double criterion(const Snapshot& snap, double M, const RegionMask& ball, double eps_reg,
                 GradNorm norm = GradNorm::frobenius);

/// sum |omega|^2 phi^2 h^3.
double localized_enstrophy(const VectorField& omega, const ScalarField& phi);

struct HelicityStats {
    std::vector<double> bin_centers;        // cos(theta) histogram bins
    std::vector<double> low_dissipation;    // fraction of valid points per bin
    std::vector<double> high_dissipation;
    double dissipation_threshold = 0.0;     // |grad u|^2 at the quantile
    double corr_helicity_enstrophy = 0.0;   // Pearson corr of |u.omega| and |omega|^2
    std::size_t valid_points = 0;
};

/// Histogram of cos(theta) conditioned on |grad u|^2 above/below the given
/// quantile, plus the correlation between local helicity magnitude and
/// enstrophy density.
HelicityStats helicity_stats(const Snapshot& snap, double dissipation_quantile,
                             double eps_reg = 0.0, int bins = 21);

/// One diagnostics record per snapshot. The first six columns are the stable
/// CSV contract; the trailing three report the alpha restricted to S_s and
/// the ball-norm variant of the criterion.
struct DiagnosticsRow {
    double t = 0.0;
    double alpha = 0.0;             // sup over B(x0, 2r)
    double grad_norm_S = 0.0;       // ||grad u||_{L2(S_s)}
    double criterion = 0.0;         // alpha * grad_norm_S^{1/2}
    double local_enstrophy = 0.0;   // integral |omega|^2 phi^2
    double set_volume = 0.0;        // |S_s| h^3
    double alpha_S = 0.0;           // sup restricted to S_s
    double grad_norm_ball = 0.0;    // ||grad u||_{L2(B(x0,2r))}
    double criterion_ball = 0.0;    // alpha * grad_norm_ball^{1/2}
};

struct DiagnosticsSeries {
    std::vector<DiagnosticsRow> rows;
};

/// Evaluate the full diagnostics series of a trajectory over one cylinder.
/// Only the spatial part of the cylinder is used; every snapshot is
/// processed regardless of the cylinder's time window.
DiagnosticsSeries diagnose(const Trajectory& traj, const Cylinder& cyl, double M, double delta,
                           double eps_reg, GradNorm norm = GradNorm::frobenius,
                           int profile_order = 3);

/// Snapshot-level diagnostics row (shared by the trajectory and streaming
/// entry points).
DiagnosticsRow diagnose_snapshot(const Snapshot& snap, const CutoffPair& cutoff,
                                 const RegionMask& ball, double M, double eps_reg,
                                 GradNorm norm = GradNorm::frobenius);

}  // namespace nsebox
