#pragma once

// Error measurement against certified references, log-log rate fitting, and
// conservation/dissipation reporting.

#include <chrono>
#include <future>
#include <utility>

#include "torsplit/splitting.hpp"

namespace torsplit {

struct FitResult {
    double rate = 0.0;
    double residual = 0.0;  // max abs deviation of the fit, natural-log space
    int points = 0;
};

/// Least-squares slope of log(error) vs log(dt). Rows with non-positive error
/// are unusable; fewer than 3 usable rows is an error.
inline FitResult fit_rate(const std::vector<std::pair<double, double>>& rows) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [dt, err] : rows)
        if (err > 0.0 && dt > 0.0) pts.emplace_back(std::log(dt), std::log(err));
    if (pts.size() < 3) throw std::invalid_argument("fit_rate: fewer than 3 usable rows");
    double sx = 0.0, sy = 0.0;
    for (const auto& [x, y] : pts) { sx += x; sy += y; }
    const double mx = sx / static_cast<double>(pts.size());
    const double my = sy / static_cast<double>(pts.size());
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    FitResult fit;
    fit.points = static_cast<int>(pts.size());
    fit.rate = sxy / sxx;
    const double intercept = my - fit.rate * mx;
    for (const auto& [x, y] : pts) fit.residual = std::max(fit.residual, std::abs(y - (fit.rate * x + intercept)));
    return fit;
}

struct RateRow {
    double dt = 0.0;
    double error = 0.0;
    bool valid = true;
    std::string note;
    double wall_seconds = 0.0;  // informational; never serialized
};

struct ConvergenceReport {
    std::string preset;
    SplitMethod method = SplitMethod::strang;
    double norm_index = 0.0;
    std::vector<RateRow> rows;  // sorted by decreasing dt
    double fitted_rate = std::numeric_limits<double>::quiet_NaN();
    double fit_residual = std::numeric_limits<double>::quiet_NaN();
    double ref_certificate = 0.0;  // in this report's norm
    double ref_dt = 0.0;
    bool exact_regime = false;

    std::vector<std::pair<double, double>> usable_rows() const {
        std::vector<std::pair<double, double>> r;
        for (const auto& row : rows)
            if (row.valid && row.error > 0.0) r.emplace_back(row.dt, row.error);
        return r;
    }
};

struct StudyPlan {
    std::string preset_id;
    GridSpec grid;
    ASpec a;
    VSpec v;
    SpectralField u0;
    double horizon = 0.0;
    double dt0 = 0.0;    // largest step; row j uses dt0 / 2^j
    int dt_count = 5;
    int refinement = 6;
    std::vector<double> norms{0.0, 2.0};
    std::vector<SplitMethod> methods{SplitMethod::strang};
    BFlowControl bflow;
    int threads = 1;

    std::vector<double> dt_list() const {
        std::vector<double> dts;
        double dt = dt0;
        for (int j = 0; j < dt_count; ++j, dt *= 0.5) dts.push_back(dt);
        return dts;
    }
};

namespace detail {

struct StudyRowResult {
    double dt = 0.0;
    bool valid = true;
    std::string note;
    double wall_seconds = 0.0;
    std::vector<double> errors;  // one per requested norm
};

inline StudyRowResult study_row(const StudyPlan& plan, SplitMethod method, double dt,
                                const ReferenceSolution& ref) {
    StudyRowResult row;
    row.dt = dt;
    const auto t0 = std::chrono::steady_clock::now();
    SplitConfig cfg;
    cfg.method = method;
    cfg.dt = dt;
    cfg.horizon = plan.horizon;
    cfg.a = plan.a;
    cfg.v = plan.v;
    cfg.bflow = plan.bflow;
    cfg.record_every = 0;
    try {
        const SpectralField endpoint = evolve(plan.u0, cfg).fields.back();
        const SpectralField diff = endpoint - ref.field;
        for (double s : plan.norms) row.errors.push_back(sobolev_norm(diff, s));
    } catch (const EvolveAbortedError& e) {
        row.valid = false;
        row.note = e.what();
        row.errors.assign(plan.norms.size(), std::numeric_limits<double>::quiet_NaN());
    } catch (const SubstepLimitError& e) {
        row.valid = false;
        row.note = e.what();
        row.errors.assign(plan.norms.size(), std::numeric_limits<double>::quiet_NaN());
    }
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

}  // namespace detail

/// One evolve per dt against a single certified reference; one report per
/// (method, norm index). Throws ReferenceNotConvergedError when the
/// certificate exceeds 0.01 x the smallest measured error (unless every error
/// is at roundoff, which is reported as the exact regime instead of a rate).
inline std::vector<ConvergenceReport> convergence_study(const StudyPlan& plan,
                                                        const ReferenceSolution* precomputed_ref = nullptr) {
    if (plan.dt_count < 3) throw std::invalid_argument("convergence_study: need at least 3 dt values");
    if (plan.norms.empty() || plan.methods.empty())
        throw std::invalid_argument("convergence_study: empty norm or method list");
    const double steps0 = plan.horizon / plan.dt0;
    if (std::abs(steps0 - std::round(steps0)) > 1e-9 || steps0 < 1.0)
        throw std::invalid_argument("convergence_study: horizon must be an integer multiple of the largest dt");

    const std::vector<double> dts = plan.dt_list();

    ReferenceSolution local_ref;
    if (!precomputed_ref) {
        SplitConfig rc;
        rc.method = SplitMethod::strang;
        rc.dt = dts.back();
        rc.horizon = plan.horizon;
        rc.a = plan.a;
        rc.v = plan.v;
        rc.bflow = plan.bflow;
        local_ref = reference_solution(plan.u0, rc, plan.refinement);
    }
    const ReferenceSolution& ref = precomputed_ref ? *precomputed_ref : local_ref;

    std::vector<ConvergenceReport> reports;
    for (SplitMethod method : plan.methods) {
        // rows are independent; run them concurrently when asked to
        std::vector<detail::StudyRowResult> rows(dts.size());
        if (plan.threads > 1) {
            std::vector<std::future<detail::StudyRowResult>> futs;
            futs.reserve(dts.size());
            for (double dt : dts)
                futs.push_back(std::async(std::launch::async, detail::study_row, std::cref(plan), method, dt,
                                          std::cref(ref)));
            for (std::size_t i = 0; i < futs.size(); ++i) rows[i] = futs[i].get();
        } else {
            for (std::size_t i = 0; i < dts.size(); ++i) rows[i] = detail::study_row(plan, method, dts[i], ref);
        }

        for (std::size_t ni = 0; ni < plan.norms.size(); ++ni) {
            ConvergenceReport rep;
            rep.preset = plan.preset_id;
            rep.method = method;
            rep.norm_index = plan.norms[ni];
            rep.ref_dt = ref.dt_ref;
            rep.ref_certificate = ref.certificate_in_norm(plan.norms[ni]);
            double min_error = std::numeric_limits<double>::infinity();
            double max_error = 0.0;
            bool any_valid = false;
            for (const auto& r : rows) {
                RateRow row;
                row.dt = r.dt;
                row.valid = r.valid;
                row.note = r.note;
                row.wall_seconds = r.wall_seconds;
                row.error = r.errors.empty() ? std::numeric_limits<double>::quiet_NaN() : r.errors[ni];
                if (row.valid) {
                    any_valid = true;
                    max_error = std::max(max_error, row.error);
                    if (row.error > 0.0) min_error = std::min(min_error, row.error);
                }
                rep.rows.push_back(std::move(row));
            }
            if (any_valid && max_error <= 1e-12) {
                rep.exact_regime = true;  // splitting is exact here; no rate to certify
                reports.push_back(std::move(rep));
                continue;
            }
            for (RateRow& row : rep.rows) {
                if (row.valid && row.error == 0.0) {
                    row.valid = false;
                    row.note = "zero error excluded from fit";
                }
            }
            if (!(rep.ref_certificate <= 0.01 * min_error))
                throw ReferenceNotConvergedError(
                    "reference not converged: certificate " + std::to_string(rep.ref_certificate) +
                        " exceeds 0.01 x smallest error " + std::to_string(min_error) + " (norm index " +
                        std::to_string(plan.norms[ni]) + ")",
                    rep.ref_certificate, 0.01 * min_error);
            const FitResult fit = fit_rate(rep.usable_rows());
            rep.fitted_rate = fit.rate;
            rep.fit_residual = fit.residual;
            reports.push_back(std::move(rep));
        }
    }
    return reports;
}

struct ConservationReport {
    std::vector<double> times;
    std::vector<double> mass;
    std::vector<double> l2;
    std::vector<double> h4;
    double mass_drift_rel = 0.0;          // relative to max(|mass_0|, ||u_0||_L2)
    double a_isometry_violation = 0.0;    // dispersive A: max relative L2 change across A-substages
    double a_growth_violation = 0.0;      // diffusive A: max relative L2 increase across A-substages
    double b_l2_change = 0.0;             // reported, not flagged: B moves L2 through div v(u) != 0
    bool mass_flag = false;
    bool a_flag = false;
};

/// Per-snapshot mass/L2/H4 columns plus flags on the A-substage behavior
/// implied by the conservative/diffusive dichotomy.
inline ConservationReport conservation_report(const Trajectory& traj, const ASpec& a, double tol = 1e-12) {
    if (traj.times.size() < 2) throw std::invalid_argument("conservation_report: need at least 2 snapshots");
    ConservationReport rep;
    rep.times = traj.times;
    rep.mass = traj.mass;
    rep.l2 = traj.l2;
    rep.h4 = traj.h4;

    const double mass_scale = std::max(std::abs(traj.mass.front()), traj.l2.front());
    for (double m : traj.mass)
        rep.mass_drift_rel = std::max(rep.mass_drift_rel, std::abs(m - traj.mass.front()) / std::max(mass_scale, 1e-300));
    rep.mass_flag = rep.mass_drift_rel > tol;

    const bool dispersive = a.classification() == OperatorClass::dispersive;
    for (const StepAudit& s : traj.audits) {
        const double before_a = s.l2_after_b1;
        const double scale = std::max(before_a, 1e-300);
        if (dispersive)
            rep.a_isometry_violation = std::max(rep.a_isometry_violation, std::abs(s.l2_after_a - before_a) / scale);
        else
            rep.a_growth_violation = std::max(rep.a_growth_violation, (s.l2_after_a - before_a) / scale);
        double b_change = std::abs(s.l2_after_b1 - s.l2_before) / std::max(s.l2_before, 1e-300);
        if (!std::isnan(s.l2_after_b2))
            b_change = std::max(b_change, std::abs(s.l2_after_b2 - s.l2_after_a) / std::max(s.l2_after_a, 1e-300));
        rep.b_l2_change = std::max(rep.b_l2_change, b_change);
    }
    rep.a_flag = dispersive ? rep.a_isometry_violation > tol : rep.a_growth_violation > tol;
    return rep;
}

}  // namespace torsplit
