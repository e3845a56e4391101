#pragma once

// Godunov and Strang steppers, full-horizon evolution, and the certified
// fine-step reference used for error measurement.
//
//   Godunov:  u -> Phi_A(dt, Phi_B(dt, u))                 (B first, then A)
//   Strang:   u -> Phi_B(dt/2, Phi_A(dt, Phi_B(dt/2, u)))  (B-A-B)

#include "torsplit/subflows.hpp"

namespace torsplit {

enum class SplitMethod { godunov, strang };

inline const char* to_string(SplitMethod m) { return m == SplitMethod::godunov ? "godunov" : "strang"; }

struct SplitConfig {
    SplitMethod method = SplitMethod::strang;
    double dt = 0.0;
    double horizon = 0.0;
    ASpec a;
    VSpec v;
    BFlowControl bflow;
    int record_every = 1;  // 0: initial and final snapshot only

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("SplitConfig: dt must be > 0");
        if (!(horizon > 0.0)) throw std::invalid_argument("SplitConfig: horizon must be > 0");
        if (dt > horizon * (1.0 + 1e-12)) throw std::invalid_argument("SplitConfig: dt must not exceed the horizon");
        if (record_every < 0) throw std::invalid_argument("SplitConfig: record_every must be >= 0");
        bflow.validate();
    }

    /// floor(T/dt), robust to the quotient landing a few ulps under an integer.
    long step_count() const {
        long n = static_cast<long>(std::floor(horizon / dt));
        if (static_cast<double>(n + 1) * dt <= horizon * (1.0 + 1e-12)) ++n;
        return n;
    }
};

/// Per-step L2 audit of the substages; after_b2 is NaN for Godunov steps.
struct StepAudit {
    double l2_before = 0.0;
    double l2_after_b1 = 0.0;
    double l2_after_a = 0.0;
    double l2_after_b2 = std::numeric_limits<double>::quiet_NaN();
};

struct Trajectory {
    SplitMethod method = SplitMethod::strang;
    std::vector<double> times;
    std::vector<SpectralField> fields;
    // diagnostics per snapshot
    std::vector<double> mass;  // u_hat(0) times the domain volume
    std::vector<double> l2;
    std::vector<double> h4;
    std::vector<StepAudit> audits;  // one per completed step
};

namespace detail {

/// Tables and the resolved guard for one (config, grid, u0) trio, so that a
/// full evolution reuses the multiplier arrays bitwise-identically per step.
struct SplitStepper {
    SplitMethod method;
    double dt;
    BFlowControl ctrl;
    double threshold;
    std::vector<Complex> a_prop;  // exp(sigma dt)
    VelocityTable vtab;

    SplitStepper(const SplitConfig& cfg, const GridSpec& grid, const SpectralField& u0)
        : method(cfg.method),
          dt(cfg.dt),
          ctrl(cfg.bflow),
          threshold(cfg.bflow.resolve_threshold(u0)),
          a_prop(a_propagator_table(cfg.a, grid, cfg.dt)),
          vtab(velocity_table(cfg.v, grid)) {}

    SpectralField step(const SpectralField& u, StepAudit* audit) const {
        if (audit) audit->l2_before = l2_norm(u);
        if (method == SplitMethod::godunov) {
            SpectralField w = phi_b_with_table(dt, u, vtab, ctrl, threshold);
            if (audit) audit->l2_after_b1 = l2_norm(w);
            w = apply_table(w, a_prop);
            if (audit) audit->l2_after_a = l2_norm(w);
            return w;
        }
        SpectralField w = phi_b_with_table(0.5 * dt, u, vtab, ctrl, threshold);
        if (audit) audit->l2_after_b1 = l2_norm(w);
        w = apply_table(w, a_prop);
        if (audit) audit->l2_after_a = l2_norm(w);
        w = phi_b_with_table(0.5 * dt, w, vtab, ctrl, threshold);
        if (audit) audit->l2_after_b2 = l2_norm(w);
        return w;
    }
};

}  // namespace detail

/// One Godunov step Phi_A(dt, Phi_B(dt, u)).
inline SpectralField godunov_step(const SpectralField& u, double dt, const SplitConfig& cfg) {
    if (!(dt > 0.0)) throw std::invalid_argument("godunov_step: dt must be > 0");
    SplitConfig c = cfg;
    c.method = SplitMethod::godunov;
    c.dt = dt;
    return detail::SplitStepper(c, u.grid, u).step(u, nullptr);
}

/// One Strang step Phi_B(dt/2, Phi_A(dt, Phi_B(dt/2, u))).
inline SpectralField strang_step(const SpectralField& u, double dt, const SplitConfig& cfg) {
    if (!(dt > 0.0)) throw std::invalid_argument("strang_step: dt must be > 0");
    SplitConfig c = cfg;
    c.method = SplitMethod::strang;
    c.dt = dt;
    return detail::SplitStepper(c, u.grid, u).step(u, nullptr);
}

/// floor(T/dt) steps of the selected method; snapshots every record_every
/// steps plus the final state. A guard trip aborts with the partial
/// trajectory attached.
inline Trajectory evolve(const SpectralField& u0, const SplitConfig& cfg) {
    cfg.validate();
    const long n_steps = cfg.step_count();
    if (n_steps < 1) throw std::invalid_argument("evolve: floor(horizon/dt) must be >= 1");

    Trajectory traj;
    traj.method = cfg.method;
    const double volume = u0.grid.volume();
    auto record = [&](double time, const SpectralField& f) {
        traj.times.push_back(time);
        traj.fields.push_back(f);
        traj.mass.push_back(f.mean_mode().real() * volume);
        traj.l2.push_back(l2_norm(f));
        traj.h4.push_back(sobolev_norm(f, 4.0));
    };

    const detail::SplitStepper stepper(cfg, u0.grid, u0);
    SpectralField u = u0;
    record(0.0, u);
    for (long step = 0; step < n_steps; ++step) {
        StepAudit audit;
        try {
            u = stepper.step(u, &audit);
        } catch (const GuardTripError& e) {
            const double t_abs = static_cast<double>(step) * cfg.dt + e.time_reached;
            throw EvolveAbortedError("evolve aborted at step " + std::to_string(step + 1) + ": " + e.what(),
                                     std::make_shared<Trajectory>(std::move(traj)), t_abs, e.norm_value, e.threshold);
        }
        traj.audits.push_back(audit);
        const bool last = step + 1 == n_steps;
        if ((cfg.record_every > 0 && (step + 1) % cfg.record_every == 0) || last)
            record(static_cast<double>(step + 1) * cfg.dt, u);
    }
    return traj;
}

struct ReferenceSolution {
    SpectralField field;         // Strang endpoint at dt_ref
    SpectralField coarse_field;  // Strang endpoint at 2 dt_ref
    double dt_ref = 0.0;
    double certificate = 0.0;    // ||field - coarse_field||_{L2}

    double certificate_in_norm(double s) const { return sobolev_norm(field - coarse_field, s); }
};

/// Certified reference: Strang at dt_ref = dt/2^refinement together with the
/// 2 dt_ref endpoint whose distance is the self-convergence certificate. The
/// caller (the convergence study) enforces certificate <= 0.01 x the smallest
/// error to be measured.
inline ReferenceSolution reference_solution(const SpectralField& u0, const SplitConfig& cfg, int refinement) {
    if (refinement < 4) throw std::invalid_argument("reference_solution: refinement must be >= 4");
    SplitConfig fine = cfg;
    fine.method = SplitMethod::strang;
    fine.record_every = 0;
    fine.dt = cfg.dt / std::pow(2.0, refinement);
    SplitConfig coarse = fine;
    coarse.dt = 2.0 * fine.dt;

    ReferenceSolution ref;
    ref.dt_ref = fine.dt;
    ref.field = evolve(u0, fine).fields.back();
    ref.coarse_field = evolve(u0, coarse).fields.back();
    ref.certificate = l2_norm(ref.field - ref.coarse_field);
    return ref;
}

}  // namespace torsplit
