#pragma once

#include <cstddef>
#include <numbers>
#include <stdexcept>

namespace nsebox {

/// Triply periodic box [0, box_length)^3 sampled on n points per axis.
/// Grid spacing is h = box_length / n; point (i,j,k) sits at (i*h, j*h, k*h).
struct Grid {
    int n = 0;
    double box_length = 2.0 * std::numbers::pi;
    double nu = 1.0;

    Grid() = default;
    explicit Grid(int n_, double box_length_ = 2.0 * std::numbers::pi, double nu_ = 1.0)
        : n(n_), box_length(box_length_), nu(nu_) {
        validate();
    }

    void validate() const {
        if (n < 4 || n % 2 != 0)
            throw std::invalid_argument("Grid: n must be an even integer >= 4");
        if (!(box_length > 0.0))
            throw std::invalid_argument("Grid: box_length must be positive");
        if (!(nu > 0.0))
            throw std::invalid_argument("Grid: nu must be positive");
    }

    double h() const { return box_length / n; }
    double cell_volume() const { return h() * h() * h(); }
    double volume() const { return box_length * box_length * box_length; }
    std::size_t npoints() const { return std::size_t(n) * n * n; }
    double coord(int i) const { return h() * i; }

    /// Physical wavenumber carried by one integer mode: 2*pi / box_length.
    double k_unit() const { return 2.0 * std::numbers::pi / box_length; }

    /// Same sampling (transforms, masks and fields are interchangeable).
    bool compatible(const Grid& o) const {
        return n == o.n && box_length == o.box_length;
    }
};

/// Signed integer mode for a full axis index in [0, n): result in [-n/2, n/2).
inline int signed_mode(int idx, int n) {
    return idx < n / 2 ? idx : idx - n;
}

/// Integer mode used for first derivatives: the Nyquist mode |k| = n/2 is
/// dropped so that odd-order spectral derivatives of real data stay real.
inline int deriv_mode(int k, int n) {
    return (k == n / 2 || k == -n / 2) ? 0 : k;
}

}  // namespace nsebox
