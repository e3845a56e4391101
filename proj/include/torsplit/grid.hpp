#pragma once

// Periodic grid and scalar-field containers. The domain is always the torus
// [0, 2*pi)^dims sampled on n points per dimension, n a power of two.
// Wavenumbers per axis are the integers -n/2 .. n/2-1 in DFT bin order.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace torsplit {

using Complex = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct GridSpec {
    int dims = 1;
    int n = 8;

    GridSpec() = default;
    GridSpec(int dims_, int n_) : dims(dims_), n(n_) { validate(); }

    void validate() const {
        if (dims < 1 || dims > 3)
            throw std::invalid_argument("GridSpec: dims must be 1, 2 or 3, got " + std::to_string(dims));
        if (n < 8 || (n & (n - 1)) != 0)
            throw std::invalid_argument("GridSpec: points per dim must be a power of two >= 8, got " +
                                        std::to_string(n));
    }

    std::size_t size() const {
        std::size_t s = 1;
        for (int d = 0; d < dims; ++d) s *= static_cast<std::size_t>(n);
        return s;
    }

    /// Domain volume (2*pi)^dims.
    double volume() const {
        double v = 1.0;
        for (int d = 0; d < dims; ++d) v *= two_pi;
        return v;
    }

    /// Grid spacing 2*pi/n, identical on every axis.
    double spacing() const { return two_pi / n; }

    bool operator==(const GridSpec&) const = default;
};

/// DFT bin index -> signed wavenumber in -n/2 .. n/2-1.
inline int wavenumber(int index, int n) { return index < n / 2 ? index : index - n; }

/// Signed wavenumber -> DFT bin index.
inline int bin_of(int k, int n) { return k >= 0 ? k : k + n; }

/// Coordinate of sample i along one axis.
inline double grid_coordinate(int i, int n) { return two_pi * static_cast<double>(i) / n; }

struct RealField {
    GridSpec grid;
    std::vector<double> values;

    RealField() = default;
    explicit RealField(const GridSpec& g) : grid(g), values(g.size(), 0.0) {}

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
};

struct SpectralField {
    GridSpec grid;
    std::vector<Complex> coeffs;

    SpectralField() = default;
    explicit SpectralField(const GridSpec& g) : grid(g), coeffs(g.size(), Complex{}) {}

    Complex& operator[](std::size_t i) { return coeffs[i]; }
    const Complex& operator[](std::size_t i) const { return coeffs[i]; }

    /// Mean-mode coefficient u_hat(0).
    Complex mean_mode() const { return coeffs.empty() ? Complex{} : coeffs[0]; }
};

namespace detail {

inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

/// Visit every mode as (flat index, signed wavevector). The loop nest is fixed
/// row-major (axis 0 outermost, last axis contiguous) so iteration order, and
/// with it floating-point accumulation order, is deterministic.
template <class F>
void for_each_mode(const GridSpec& g, F&& f) {
    const int n = g.n;
    std::array<int, 3> k{0, 0, 0};
    if (g.dims == 1) {
        for (int i0 = 0; i0 < n; ++i0) {
            k[0] = wavenumber(i0, n);
            f(static_cast<std::size_t>(i0), k);
        }
    } else if (g.dims == 2) {
        std::size_t flat = 0;
        for (int i0 = 0; i0 < n; ++i0) {
            k[0] = wavenumber(i0, n);
            for (int i1 = 0; i1 < n; ++i1, ++flat) {
                k[1] = wavenumber(i1, n);
                f(flat, k);
            }
        }
    } else {
        std::size_t flat = 0;
        for (int i0 = 0; i0 < n; ++i0) {
            k[0] = wavenumber(i0, n);
            for (int i1 = 0; i1 < n; ++i1) {
                k[1] = wavenumber(i1, n);
                for (int i2 = 0; i2 < n; ++i2, ++flat) {
                    k[2] = wavenumber(i2, n);
                    f(flat, k);
                }
            }
        }
    }
}

/// Visit every sample as (flat index, coordinates).
template <class F>
void for_each_point(const GridSpec& g, F&& f) {
    const int n = g.n;
    std::array<double, 3> x{0.0, 0.0, 0.0};
    if (g.dims == 1) {
        for (int i0 = 0; i0 < n; ++i0) {
            x[0] = grid_coordinate(i0, n);
            f(static_cast<std::size_t>(i0), x);
        }
    } else if (g.dims == 2) {
        std::size_t flat = 0;
        for (int i0 = 0; i0 < n; ++i0) {
            x[0] = grid_coordinate(i0, n);
            for (int i1 = 0; i1 < n; ++i1, ++flat) {
                x[1] = grid_coordinate(i1, n);
                f(flat, x);
            }
        }
    } else {
        std::size_t flat = 0;
        for (int i0 = 0; i0 < n; ++i0) {
            x[0] = grid_coordinate(i0, n);
            for (int i1 = 0; i1 < n; ++i1) {
                x[1] = grid_coordinate(i1, n);
                for (int i2 = 0; i2 < n; ++i2, ++flat) {
                    x[2] = grid_coordinate(i2, n);
                    f(flat, x);
                }
            }
        }
    }
}

/// Flat index of a signed wavevector (components outside dims ignored).
inline std::size_t flat_of_wavevector(const GridSpec& g, const std::array<int, 3>& k) {
    std::size_t flat = 0;
    for (int d = 0; d < g.dims; ++d) flat = flat * g.n + static_cast<std::size_t>(bin_of(k[d], g.n));
    return flat;
}

}  // namespace detail

/// Sample a scalar function of the coordinates onto the grid.
template <class F>
RealField sample_field(const GridSpec& g, F&& f) {
    RealField u(g);
    detail::for_each_point(g, [&](std::size_t i, const std::array<double, 3>& x) { u.values[i] = f(x); });
    return u;
}

// Elementwise arithmetic used by the integrators and error measurement.

inline SpectralField operator+(const SpectralField& a, const SpectralField& b) {
    detail::require_same_grid(a.grid, b.grid, "operator+");
    SpectralField r = a;
    for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] += b.coeffs[i];
    return r;
}

inline SpectralField operator-(const SpectralField& a, const SpectralField& b) {
    detail::require_same_grid(a.grid, b.grid, "operator-");
    SpectralField r = a;
    for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] -= b.coeffs[i];
    return r;
}

inline SpectralField operator*(double s, const SpectralField& a) {
    SpectralField r = a;
    for (auto& c : r.coeffs) c *= s;
    return r;
}

/// y += s * x, in place.
inline void axpy(SpectralField& y, double s, const SpectralField& x) {
    detail::require_same_grid(y.grid, x.grid, "axpy");
    for (std::size_t i = 0; i < y.coeffs.size(); ++i) y.coeffs[i] += s * x.coeffs[i];
}

inline bool all_finite(const RealField& u) {
    for (double v : u.values)
        if (!std::isfinite(v)) return false;
    return true;
}

inline bool all_finite(const SpectralField& f) {
    for (const Complex& c : f.coeffs)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

}  // namespace torsplit
