#pragma once

// The two sub-equation solvers. Phi_A solves u_t = A(u) exactly in Fourier
// space (multiplier exp(sigma(k) t)); Phi_B integrates the transport equation
// u_t = -div(u v(u)) with classical RK4 in substeps small enough that the
// integrator error sits far below the splitting error under measurement.

#include <limits>

#include "torsplit/errors.hpp"
#include "torsplit/operators.hpp"

namespace torsplit {

struct BFlowControl {
    double substep_cap = 0.5;         // CFL-like safety factor c in (0, 1]
    long max_substeps = 1 << 20;
    double blowup_threshold = 0.0;    // H^s guard level; <= 0 resolves to 100 ||u0||_{H^s}
    double guard_index = 4.0;

    void validate() const {
        if (!(substep_cap > 0.0) || substep_cap > 1.0)
            throw std::invalid_argument("BFlowControl: substep_cap must lie in (0, 1]");
        if (max_substeps < 1) throw std::invalid_argument("BFlowControl: max_substeps must be >= 1");
        if (guard_index < 0.0) throw std::invalid_argument("BFlowControl: guard_index must be >= 0");
    }

    /// Operative guard level; always positive once resolved against data.
    double resolve_threshold(const SpectralField& u0) const {
        if (blowup_threshold > 0.0) return blowup_threshold;
        const double h = sobolev_norm(u0, guard_index);
        return 100.0 * (h > 0.0 ? h : 1.0);
    }
};

namespace detail {

/// exp(sigma(k) t) per mode. Real symbols keep an exactly-zero imaginary part
/// so diffusive propagation never inflates a coefficient magnitude; purely
/// imaginary symbols get magnitude exp(0) = 1 exactly.
inline std::vector<Complex> a_propagator_table(const ASpec& a, const GridSpec& g, double t) {
    if (a.classification() == OperatorClass::rejected)
        throw std::invalid_argument("phi_a: operator is rejected (" + a.rejection_diagnosis() + ")");
    if (t < 0.0 && a.classification() == OperatorClass::diffusive)
        throw std::invalid_argument("phi_a: negative time with a diffusive operator is amplifying");
    const std::vector<Complex> sigma = a_symbol_table(a, g);
    std::vector<Complex> prop(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        const double mag = std::exp(sigma[i].real() * t);
        const double phase = sigma[i].imag() * t;
        if (phase == 0.0)
            prop[i] = Complex(mag, 0.0);
        else
            prop[i] = Complex(mag * std::cos(phase), mag * std::sin(phase));
    }
    return prop;
}

inline double linf(const RealField& u) {
    double m = 0.0;
    for (double v : u.values) m = std::max(m, std::abs(v));
    return m;
}

/// -div(u v(u)) with the product formed in physical space: dealias both
/// factors, multiply pointwise, dealias the product, differentiate spectrally.
/// The k = 0 coefficient of the result is exactly zero.
inline SpectralField b_rhs_impl(const SpectralField& u, const VelocityTable& vt) {
    const SpectralField ud = dealias(u);
    const RealField u_phys = ifft(ud);
    SpectralField acc(u.grid);
    for (int j = 0; j < vt.components; ++j) {
        const RealField v_phys = ifft(apply_table(ud, vt.m[static_cast<std::size_t>(j)]));
        RealField prod(u.grid);
        for (std::size_t i = 0; i < prod.values.size(); ++i) prod.values[i] = u_phys.values[i] * v_phys.values[i];
        const SpectralField dj = axis_derivative(dealias(fft(prod)), j);
        for (std::size_t i = 0; i < acc.coeffs.size(); ++i) acc.coeffs[i] += dj.coeffs[i];
    }
    for (auto& c : acc.coeffs) c = -c;
    return acc;
}

/// Max over components of ||v_j(u)||_{L^inf}, on the dealiased state the
/// integrator actually advects with.
inline double velocity_sup(const SpectralField& u, const VelocityTable& vt) {
    const SpectralField ud = dealias(u);
    double m = 0.0;
    for (int j = 0; j < vt.components; ++j) m = std::max(m, linf(ifft(apply_table(ud, vt.m[static_cast<std::size_t>(j)]))));
    return m;
}

/// Classical RK4 on u' = b_rhs(u) over n_sub equal substeps with the blow-up
/// guard checked after every substep.
inline SpectralField rk4_transport(const SpectralField& u0, const VelocityTable& vt, double t, long n_sub,
                                   double guard_index, double threshold) {
    const double tau = t / static_cast<double>(n_sub);
    SpectralField u = u0;
    SpectralField stage(u0.grid);
    for (long step = 0; step < n_sub; ++step) {
        const SpectralField k1 = b_rhs_impl(u, vt);
        stage = u;
        axpy(stage, 0.5 * tau, k1);
        const SpectralField k2 = b_rhs_impl(stage, vt);
        stage = u;
        axpy(stage, 0.5 * tau, k2);
        const SpectralField k3 = b_rhs_impl(stage, vt);
        stage = u;
        axpy(stage, tau, k3);
        const SpectralField k4 = b_rhs_impl(stage, vt);
        for (std::size_t i = 0; i < u.coeffs.size(); ++i)
            u.coeffs[i] += (tau / 6.0) * (k1.coeffs[i] + 2.0 * k2.coeffs[i] + 2.0 * k3.coeffs[i] + k4.coeffs[i]);

        const double reached = tau * static_cast<double>(step + 1);
        if (!all_finite(u))
            throw GuardTripError("transport state became non-finite at t = " + std::to_string(reached), reached,
                                 std::numeric_limits<double>::infinity(), threshold);
        const double h = sobolev_norm(u, guard_index);
        if (!(h <= threshold))
            throw GuardTripError("blow-up guard tripped: ||u||_{H^" + std::to_string(guard_index) + "} = " +
                                     std::to_string(h) + " > " + std::to_string(threshold) + " at t = " +
                                     std::to_string(reached) + " (approaching the maximal existence time)",
                                 reached, h, threshold);
    }
    return u;
}

/// Substep count from the CFL-like rule tau_max = c / (||v(u0)||_inf k_max + eps).
inline long transport_substeps(double t, const SpectralField& u0, const VelocityTable& vt,
                               const BFlowControl& ctrl) {
    const double vmax = velocity_sup(u0, vt);
    const double kmax = static_cast<double>(u0.grid.n) / 2.0;
    const double tau_max = ctrl.substep_cap / (vmax * kmax + 1e-30);
    const double raw = std::ceil(t / tau_max);
    const long n_sub = raw < 1.0 ? 1 : static_cast<long>(raw);
    if (n_sub > ctrl.max_substeps)
        throw SubstepLimitError("phi_b: " + std::to_string(n_sub) + " substeps needed, cap is " +
                                    std::to_string(ctrl.max_substeps),
                                n_sub, ctrl.max_substeps);
    return n_sub;
}

inline SpectralField phi_b_with_table(double t, const SpectralField& u0, const VelocityTable& vt,
                                      const BFlowControl& ctrl, double threshold) {
    if (t < 0.0) throw std::invalid_argument("phi_b: negative time");
    if (t == 0.0) return u0;
    const long n_sub = transport_substeps(t, u0, vt, ctrl);
    return rk4_transport(u0, vt, t, n_sub, ctrl.guard_index, threshold);
}

}  // namespace detail

/// Exact propagator of u_t = A(u): u_hat(k) -> exp(sigma(k) t) u_hat(k).
/// Negative t is permitted only for dispersive (reversible) operators.
inline SpectralField phi_a(double t, const SpectralField& u0, const ASpec& a) {
    return detail::apply_table(u0, detail::a_propagator_table(a, u0.grid, t));
}

/// B(u) = -div(u v(u)), pseudo-spectral with dealiasing.
inline SpectralField b_rhs(const SpectralField& u, const VSpec& v) {
    return detail::b_rhs_impl(u, detail::velocity_table(v, u.grid));
}

/// Transport flow Phi_B via guarded RK4 substeps.
inline SpectralField phi_b(double t, const SpectralField& u0, const VSpec& v, const BFlowControl& ctrl = {}) {
    ctrl.validate();
    const detail::VelocityTable vt = detail::velocity_table(v, u0.grid);
    return detail::phi_b_with_table(t, u0, vt, ctrl, ctrl.resolve_threshold(u0));
}

}  // namespace torsplit
