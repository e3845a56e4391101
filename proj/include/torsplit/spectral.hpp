#pragma once

// Spectral calculus on coefficient arrays: derivatives, the two-thirds
// dealiasing projection, Sobolev norms, and the band-limited random field
// generator used by tests and audits.

#include <cstdint>
#include <random>

#include "torsplit/fft.hpp"
#include "torsplit/grid.hpp"

namespace torsplit {
namespace detail {

/// k^p by repeated multiplication; exact in double for every |k|^p < 2^53.
inline double int_pow(double base, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= base;
    return r;
}

/// (i k)^l as an exact quarter-turn times a real power.
inline Complex ik_power(int k, int l) {
    if (l == 0) return Complex(1.0, 0.0);
    const double mag = int_pow(static_cast<double>(k), l);
    switch (l & 3) {
        case 0: return Complex(mag, 0.0);
        case 1: return Complex(0.0, mag);
        case 2: return Complex(-mag, 0.0);
        default: return Complex(0.0, -mag);
    }
}

/// Same with the grid's Nyquist rule: the mode k = -n/2 has no conjugate
/// partner, so odd powers zero it to keep derivatives of real fields real.
inline Complex ik_power(int k, int l, int n) {
    if ((l & 1) && k == -n / 2) return Complex(0.0, 0.0);
    return ik_power(k, l);
}

/// Per-axis factor table for (d/dx_axis)^l.
inline std::vector<Complex> axis_derivative_factors(int n, int l) {
    std::vector<Complex> t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = ik_power(wavenumber(i, n), l, n);
    return t;
}

/// Multiply coefficients by a separable product of per-axis tables.
inline void apply_axis_factors(SpectralField& f, const std::array<std::vector<Complex>, 3>& tables) {
    for_each_mode(f.grid, [&](std::size_t flat, const std::array<int, 3>& k) {
        Complex m(1.0, 0.0);
        for (int d = 0; d < f.grid.dims; ++d) m *= tables[static_cast<std::size_t>(d)][static_cast<std::size_t>(bin_of(k[d], f.grid.n))];
        f.coeffs[flat] *= m;
    });
}

/// Retained under the two-thirds rule: 3|k| <= n.
inline bool dealias_keep(int k, int n) { return 3 * std::abs(k) <= n; }

/// (1 + |k|^2)^s with a fast path for small integer s.
inline double sobolev_weight(double k2, double s) {
    if (s == 0.0) return 1.0;
    const double base = 1.0 + k2;
    const int si = static_cast<int>(s);
    if (static_cast<double>(si) == s && si >= 0 && si <= 16) return int_pow(base, si);
    return std::pow(base, s);
}

}  // namespace detail

/// Partial derivative of multi-index order (entries beyond grid.dims must be 0).
inline SpectralField spectral_derivative(const SpectralField& f, const std::array<int, 3>& order) {
    for (int d = 0; d < 3; ++d) {
        if (order[static_cast<std::size_t>(d)] < 0)
            throw std::invalid_argument("spectral_derivative: negative derivative order");
        if (d >= f.grid.dims && order[static_cast<std::size_t>(d)] != 0)
            throw std::invalid_argument("spectral_derivative: multi-index exceeds grid dims");
    }
    SpectralField r = f;
    std::array<std::vector<Complex>, 3> tables;
    for (int d = 0; d < f.grid.dims; ++d)
        tables[static_cast<std::size_t>(d)] = detail::axis_derivative_factors(f.grid.n, order[static_cast<std::size_t>(d)]);
    detail::apply_axis_factors(r, tables);
    return r;
}

/// First derivative along one axis; the (ik) building block of div and grad.
inline SpectralField axis_derivative(const SpectralField& f, int axis) {
    std::array<int, 3> order{0, 0, 0};
    order[static_cast<std::size_t>(axis)] = 1;
    return spectral_derivative(f, order);
}

/// Two-thirds rule: zero every mode with any |k_j| > n/3. Idempotent.
inline SpectralField dealias(const SpectralField& f) {
    SpectralField r = f;
    detail::for_each_mode(f.grid, [&](std::size_t flat, const std::array<int, 3>& k) {
        for (int d = 0; d < f.grid.dims; ++d) {
            if (!detail::dealias_keep(k[d], f.grid.n)) {
                r.coeffs[flat] = Complex(0.0, 0.0);
                break;
            }
        }
    });
    return r;
}

/// H^s norm via the multiplier form ((2 pi)^dims sum (1+|k|^2)^s |u_hat|^2)^{1/2};
/// s = 0 is the L^2 norm.
inline double sobolev_norm(const SpectralField& f, double s) {
    if (s < 0.0) throw std::invalid_argument("sobolev_norm: negative index");
    double sum = 0.0;
    detail::for_each_mode(f.grid, [&](std::size_t flat, const std::array<int, 3>& k) {
        double k2 = 0.0;
        for (int d = 0; d < f.grid.dims; ++d) k2 += static_cast<double>(k[d]) * k[d];
        sum += detail::sobolev_weight(k2, s) * std::norm(f.coeffs[flat]);
    });
    return std::sqrt(f.grid.volume() * sum);
}

inline double l2_norm(const SpectralField& f) { return sobolev_norm(f, 0.0); }

/// Grid-quadrature L^2 norm ((2 pi / n)^dims sum u^2)^{1/2}; Parseval partner
/// of sobolev_norm(.,0).
inline double quadrature_l2(const RealField& u) {
    double sum = 0.0;
    for (double v : u.values) sum += v * v;
    double w = 1.0;
    for (int d = 0; d < u.grid.dims; ++d) w *= u.grid.spacing();
    return std::sqrt(w * sum);
}

/// Max |u_hat(-k) - conj(u_hat(k))|; roundoff-sized iff the field represents a
/// real u.
inline double conjugate_symmetry_defect(const SpectralField& f) {
    double worst = 0.0;
    detail::for_each_mode(f.grid, [&](std::size_t flat, const std::array<int, 3>& k) {
        std::array<int, 3> neg{0, 0, 0};
        bool has_partner = true;
        for (int d = 0; d < f.grid.dims; ++d) {
            if (k[d] == -f.grid.n / 2) { has_partner = false; break; }
            neg[d] = -k[d];
        }
        if (!has_partner) return;  // Nyquist rows are self-paired mod n
        const std::size_t j = detail::flat_of_wavevector(f.grid, neg);
        worst = std::max(worst, std::abs(f.coeffs[flat] - std::conj(f.coeffs[j])));
    });
    return worst;
}

/// Deterministic band-limited random field: magnitudes (1+|k|^2)^{-decay/2}
/// for 0 < |k| <= n/4, phases from a seeded engine, conjugate symmetry by
/// construction. Canonical half-lattice order makes the draw sequence, and so
/// the field, a pure function of (grid, seed, decay).
inline RealField random_band_limited_field(const GridSpec& g, std::uint64_t seed, double decay,
                                           bool zero_mean = true) {
    if (decay <= 0.0) throw std::invalid_argument("random_band_limited_field: decay must be > 0");
    SpectralField f(g);
    std::mt19937_64 rng(seed);
    const double band2 = (static_cast<double>(g.n) / 4.0) * (static_cast<double>(g.n) / 4.0);
    detail::for_each_mode(g, [&](std::size_t flat, const std::array<int, 3>& k) {
        double k2 = 0.0;
        for (int d = 0; d < g.dims; ++d) k2 += static_cast<double>(k[d]) * k[d];
        if (k2 == 0.0 || k2 > band2) return;
        bool canonical = false;
        for (int d = 0; d < g.dims; ++d) {
            if (k[d] != 0) { canonical = k[d] > 0; break; }
        }
        if (!canonical) return;
        const double phase = two_pi * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
        const double mag = std::pow(1.0 + k2, -decay / 2.0);
        const Complex c(mag * std::cos(phase), mag * std::sin(phase));
        f.coeffs[flat] = c;
        std::array<int, 3> neg{0, 0, 0};
        for (int d = 0; d < g.dims; ++d) neg[d] = -k[d];
        f.coeffs[detail::flat_of_wavevector(g, neg)] = std::conj(c);
    });
    if (!zero_mean) f.coeffs[0] = Complex(1.0, 0.0);
    return ifft(f);
}

}  // namespace torsplit
