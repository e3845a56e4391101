#pragma once

// Command orchestration behind the CLI: resolve the configured experiment,
// run it, write the artifacts, and map failures onto stable exit codes.
//
//   0  success
//   2  validation failure (config or input files)
//   3  blow-up guard trip
//   4  reference certificate failure

#include <filesystem>
#include <iostream>
#include <sstream>

#include "torsplit/config.hpp"
#include "torsplit/reports.hpp"
#include "torsplit/snapshot.hpp"

namespace torsplit {

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;
inline constexpr int exit_guard_trip = 3;
inline constexpr int exit_reference = 4;

struct RunOptions {
    std::string out_dir;  // overrides config when non-empty
    int threads = 1;
    std::optional<std::uint64_t> seed;  // overrides u0.seed / admit.seed
    std::ostream* log = &std::cout;
};

namespace detail {

/// Custom multiplier table file: one mode per line,
///   k1 [k2 [k3]]  re1 im1 [re2 im2 [re3 im3]]
/// (dims wavevector components, then dims complex multiplier components);
/// unlisted modes are zero.
inline VSpec load_custom_multiplier(const std::string& path, const GridSpec& g) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("custom multiplier table '" + path + "' not readable");
    auto table = std::make_shared<std::array<std::vector<Complex>, 3>>();
    for (int j = 0; j < g.dims; ++j) (*table)[static_cast<std::size_t>(j)].assign(g.size(), Complex(0.0, 0.0));
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream is(line);
        std::vector<double> nums;
        double v;
        while (is >> v) nums.push_back(v);
        if (nums.empty()) continue;
        if (nums.size() != static_cast<std::size_t>(g.dims) + 2 * static_cast<std::size_t>(g.dims))
            throw std::runtime_error("custom multiplier table '" + path + "' line " + std::to_string(line_no) +
                                     ": expected " + std::to_string(3 * g.dims) + " numbers");
        std::array<int, 3> k{0, 0, 0};
        for (int d = 0; d < g.dims; ++d) {
            k[d] = static_cast<int>(nums[static_cast<std::size_t>(d)]);
            if (k[d] < -g.n / 2 || k[d] > g.n / 2 - 1)
                throw std::runtime_error("custom multiplier table '" + path + "' line " + std::to_string(line_no) +
                                         ": wavenumber out of range");
        }
        const std::size_t flat = flat_of_wavevector(g, k);
        for (int j = 0; j < g.dims; ++j)
            (*table)[static_cast<std::size_t>(j)][flat] =
                Complex(nums[static_cast<std::size_t>(g.dims + 2 * j)], nums[static_cast<std::size_t>(g.dims + 2 * j + 1)]);
    }
    CustomVelocity cv;
    cv.grid = g;
    cv.components = table;
    return VSpec(std::move(cv));
}

inline SpectralField resolve_u0(const ExperimentConfig& cfg, const RunOptions& opt) {
    switch (cfg.u0.kind) {
        case U0Spec::Kind::named:
            return fft(named_initial_field(cfg.u0.name, cfg.grid));
        case U0Spec::Kind::random:
            return fft(random_band_limited_field(cfg.grid, opt.seed.value_or(cfg.u0.seed), cfg.u0.decay,
                                                 cfg.u0.zero_mean));
        default: {
            const Snapshot snap = read_snapshot(cfg.u0.file);
            if (!(snap.field.grid == cfg.grid))
                throw std::runtime_error("u0 snapshot '" + cfg.u0.file + "' is on a " +
                                         std::to_string(snap.field.grid.dims) + "D n=" +
                                         std::to_string(snap.field.grid.n) + " grid, config wants " +
                                         std::to_string(cfg.grid.dims) + "D n=" + std::to_string(cfg.grid.n));
            return fft(snap.field);
        }
    }
}

inline VSpec resolve_velocity(const ExperimentConfig& cfg) {
    if (!cfg.v.is_custom_file) return cfg.v.spec;
    return load_custom_multiplier(cfg.v.custom_file, cfg.grid);
}

inline std::string norm_suffix(double s) {
    std::ostringstream os;
    os << "s" << s;
    std::string out = os.str();
    for (char& c : out)
        if (c == '.') c = 'p';
    return out;
}

}  // namespace detail

inline int run_evolve(const ExperimentConfig& cfg, const RunOptions& opt) {
    namespace fs = std::filesystem;
    const std::string out_dir = opt.out_dir.empty() ? cfg.out_dir : opt.out_dir;
    fs::create_directories(out_dir);
    std::ostream& log = *opt.log;

    SplitConfig sc;
    sc.method = cfg.method;
    sc.dt = cfg.dt;
    sc.horizon = cfg.horizon;
    sc.a = cfg.a;
    sc.v = detail::resolve_velocity(cfg);
    sc.bflow = cfg.bflow;
    sc.record_every = cfg.record_every;
    const SpectralField u0 = detail::resolve_u0(cfg, opt);

    auto write_trajectory = [&](const Trajectory& traj) {
        for (std::size_t i = 0; i < traj.fields.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "snapshot_%06zu.bin", i);
            write_snapshot((fs::path(out_dir) / name).string(), ifft(traj.fields[i]), traj.times[i]);
        }
        write_diagnostics_csv((fs::path(out_dir) / "diagnostics.csv").string(), traj);
    };

    try {
        const Trajectory traj = evolve(u0, sc);
        write_trajectory(traj);
        log << "evolve: " << traj.fields.size() << " snapshots over T = " << cfg.horizon << " written to " << out_dir
            << "\n";
        return exit_ok;
    } catch (const EvolveAbortedError& e) {
        if (e.partial) write_trajectory(*e.partial);
        write_error_record((fs::path(out_dir) / "error.txt").string(), "guard_trip",
                           {{"message", e.what()},
                            {"time_reached", format_g17(e.time_reached)},
                            {"norm_value", format_g17(e.norm_value)},
                            {"threshold", format_g17(e.threshold)}});
        log << "evolve: " << e.what() << "\n";
        return exit_guard_trip;
    }
}

inline int run_study(const ExperimentConfig& cfg, const RunOptions& opt) {
    namespace fs = std::filesystem;
    const std::string out_dir = opt.out_dir.empty() ? cfg.out_dir : opt.out_dir;
    fs::create_directories(out_dir);
    std::ostream& log = *opt.log;

    StudyPlan plan;
    plan.preset_id = cfg.preset_id;
    plan.grid = cfg.grid;
    plan.a = cfg.a;
    plan.v = detail::resolve_velocity(cfg);
    plan.u0 = detail::resolve_u0(cfg, opt);
    plan.horizon = cfg.horizon;
    plan.dt0 = cfg.dt;
    plan.dt_count = cfg.study.dt_count;
    plan.refinement = cfg.study.refinement;
    plan.norms = cfg.study.norms;
    plan.methods = cfg.study.methods.empty() ? std::vector<SplitMethod>{cfg.method} : cfg.study.methods;
    plan.bflow = cfg.bflow;
    plan.threads = opt.threads;

    try {
        const std::vector<ConvergenceReport> reports = convergence_study(plan);
        std::vector<std::string> csv_names;
        for (const ConvergenceReport& rep : reports) {
            const std::string name =
                "study_" + std::string(to_string(rep.method)) + "_" + detail::norm_suffix(rep.norm_index) + ".csv";
            write_study_csv((fs::path(out_dir) / name).string(), rep);
            csv_names.push_back(name);
            log << "study " << rep.preset << " " << to_string(rep.method) << " H^" << rep.norm_index << ": ";
            if (rep.exact_regime)
                log << "exact regime (splitting error at roundoff; no rate fitted)";
            else
                log << "rate " << rep.fitted_rate << ", residual " << rep.fit_residual << ", certificate "
                    << rep.ref_certificate;
            double wall = 0.0;
            for (const RateRow& row : rep.rows) wall += row.wall_seconds;
            log << " [" << wall << " s]\n";
            for (const RateRow& row : rep.rows)
                if (!row.valid) log << "  row dt=" << row.dt << " excluded: " << row.note << "\n";
        }
        write_plot_script((fs::path(out_dir) / "plot_study.py").string(), csv_names);
        return exit_ok;
    } catch (const ReferenceNotConvergedError& e) {
        write_error_record((fs::path(out_dir) / "error.txt").string(), "reference_not_converged",
                           {{"message", e.what()},
                            {"certificate", format_g17(e.certificate)},
                            {"bound", format_g17(e.bound)}});
        log << "study: " << e.what() << "\n";
        return exit_reference;
    } catch (const EvolveAbortedError& e) {
        // the reference run itself tripped the guard
        write_error_record((fs::path(out_dir) / "error.txt").string(), "guard_trip",
                           {{"message", e.what()},
                            {"time_reached", format_g17(e.time_reached)},
                            {"norm_value", format_g17(e.norm_value)},
                            {"threshold", format_g17(e.threshold)}});
        log << "study: " << e.what() << "\n";
        return exit_guard_trip;
    }
}

inline int run_admit(const ExperimentConfig& cfg, const RunOptions& opt) {
    namespace fs = std::filesystem;
    const std::string out_dir = opt.out_dir.empty() ? cfg.out_dir : opt.out_dir;
    fs::create_directories(out_dir);
    std::ostream& log = *opt.log;

    AdmissibilityOptions aopt;
    aopt.kc = cfg.admit.kc;
    aopt.decay = cfg.admit.decay;
    const AdmissibilityReport rep = check_admissibility(cfg.a, detail::resolve_velocity(cfg), cfg.grid,
                                                        cfg.admit.trials, opt.seed.value_or(cfg.admit.seed), aopt);
    write_admissibility_csv((fs::path(out_dir) / "admissibility.csv").string(), rep, cfg.preset_id, cfg.grid);
    log << "admit " << cfg.preset_id << ": " << to_string(rep.classification)
        << (rep.ok ? " (audit passed)" : " (audit FAILED)") << ", commutativity residual "
        << rep.commutativity_residual << ", div ratio " << rep.div_ratio << ", sign max " << rep.energy_sign_max
        << ", commutator constant " << rep.commutator_constant << "\n";
    if (!rep.ok) log << "admit: " << rep.diagnosis << "\n";
    return rep.ok ? exit_ok : exit_validation;
}

/// Parse, validate, dispatch. Unknown commands and config violations exit 2.
inline int run_from_text(std::string_view config_text, std::string_view command, const RunOptions& opt) {
    std::ostream& log = *opt.log;
    const ConfigResult parsed = parse_config(config_text);
    for (const std::string& w : parsed.warnings) log << "warning: " << w << "\n";
    if (!parsed.ok()) {
        for (const ConfigDiagnostic& d : parsed.errors) {
            if (d.line > 0)
                log << "config error (line " << d.line << "): " << d.message << "\n";
            else
                log << "config error: " << d.message << "\n";
        }
        return exit_validation;
    }
    try {
        if (command == "evolve") return run_evolve(*parsed.config, opt);
        if (command == "study") return run_study(*parsed.config, opt);
        if (command == "admit") return run_admit(*parsed.config, opt);
        log << "unknown command '" << command << "' (have: evolve, study, admit)\n";
        return exit_validation;
    } catch (const std::exception& e) {
        log << command << ": " << e.what() << "\n";
        return exit_validation;
    }
}

inline int run_from_file(const std::string& config_path, std::string_view command, const RunOptions& opt) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        *opt.log << "cannot read config '" << config_path << "'\n";
        return exit_validation;
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return run_from_text(text, command, opt);
}

}  // namespace torsplit
