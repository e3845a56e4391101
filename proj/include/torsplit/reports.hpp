#pragma once

// Artifact writers: study CSVs (schema below), per-trajectory diagnostics,
// admissibility reports, plot scripts, and machine-readable error records.
// Numbers carry 17 significant digits so a re-parse recovers them bit-exactly;
// line endings are LF; the decimal separator is the C-locale dot.

#include <cstdio>
#include <fstream>

#include "torsplit/diagnostics.hpp"
#include "torsplit/operators.hpp"

namespace torsplit {

inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);  // binary keeps LF endings
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace detail

inline constexpr const char* study_csv_header = "dt,error,norm,method,preset,fit_rate,fit_residual,ref_certificate";

/// Schema: header row, then one row per dt, fit columns denormalized (the
/// same fit values repeat on every row of one study).
inline void write_study_csv(const std::string& path, const ConvergenceReport& rep) {
    std::string body(study_csv_header);
    body.push_back('\n');
    for (const RateRow& row : rep.rows) {
        body += format_g17(row.dt);
        body.push_back(',');
        body += format_g17(row.error);
        body.push_back(',');
        body += format_g17(rep.norm_index);
        body.push_back(',');
        body += to_string(rep.method);
        body.push_back(',');
        body += rep.preset;
        body.push_back(',');
        body += format_g17(rep.fitted_rate);
        body.push_back(',');
        body += format_g17(rep.fit_residual);
        body.push_back(',');
        body += format_g17(rep.ref_certificate);
        body.push_back('\n');
    }
    detail::write_text_file(path, body);
}

struct StudyCsvRow {
    double dt = 0.0;
    double error = 0.0;
    double norm = 0.0;
    std::string method;
    std::string preset;
    double fit_rate = 0.0;
    double fit_residual = 0.0;
    double ref_certificate = 0.0;
};

inline std::vector<StudyCsvRow> read_study_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != study_csv_header)
        throw std::runtime_error("'" + path + "': unexpected CSV header");
    std::vector<StudyCsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cur;
        for (char c : line) {
            if (c == ',') cells.push_back(cur), cur.clear();
            else cur.push_back(c);
        }
        cells.push_back(cur);
        if (cells.size() != 8) throw std::runtime_error("'" + path + "': malformed row '" + line + "'");
        StudyCsvRow r;
        r.dt = std::strtod(cells[0].c_str(), nullptr);
        r.error = std::strtod(cells[1].c_str(), nullptr);
        r.norm = std::strtod(cells[2].c_str(), nullptr);
        r.method = cells[3];
        r.preset = cells[4];
        r.fit_rate = std::strtod(cells[5].c_str(), nullptr);
        r.fit_residual = std::strtod(cells[6].c_str(), nullptr);
        r.ref_certificate = std::strtod(cells[7].c_str(), nullptr);
        rows.push_back(std::move(r));
    }
    return rows;
}

/// Per-snapshot diagnostics of an evolve run.
inline void write_diagnostics_csv(const std::string& path, const Trajectory& traj) {
    std::string body = "time,mass,l2,h4\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        body += format_g17(traj.times[i]);
        body.push_back(',');
        body += format_g17(traj.mass[i]);
        body.push_back(',');
        body += format_g17(traj.l2[i]);
        body.push_back(',');
        body += format_g17(traj.h4[i]);
        body.push_back('\n');
    }
    detail::write_text_file(path, body);
}

inline void write_admissibility_csv(const std::string& path, const AdmissibilityReport& rep,
                                    const std::string& preset, const GridSpec& grid) {
    std::string body = "metric,value\n";
    auto kv = [&](const std::string& k, const std::string& v) {
        body += k;
        body.push_back(',');
        body += v;
        body.push_back('\n');
    };
    kv("preset", preset);
    kv("dims", std::to_string(grid.dims));
    kv("n", std::to_string(grid.n));
    kv("classification", to_string(rep.classification));
    kv("energy_branch", rep.classification == OperatorClass::dispersive  ? "conservative"
                        : rep.classification == OperatorClass::diffusive ? "diffusive"
                                                                         : "none");
    kv("ok", rep.ok ? "true" : "false");
    kv("commutativity_residual", format_g17(rep.commutativity_residual));
    kv("div_ratio", format_g17(rep.div_ratio));
    kv("div_bound_applicable", rep.div_bound_applicable ? "true" : "false");
    kv("energy_sign_max", format_g17(rep.energy_sign_max));
    kv("commutator_constant", format_g17(rep.commutator_constant));
    kv("degenerate", rep.degenerate ? "true" : "false");
    kv("trials", std::to_string(rep.trials));
    kv("seed", std::to_string(rep.seed));
    if (!rep.diagnosis.empty()) kv("diagnosis", rep.diagnosis);
    detail::write_text_file(path, body);
}

/// Companion script for an external plotting tool; the data stays in the CSVs.
inline void write_plot_script(const std::string& path, const std::vector<std::string>& csv_names) {
    std::string body =
        "#!/usr/bin/env python3\n"
        "\"\"\"Log-log convergence plot for the study CSVs next to this script.\"\"\"\n"
        "import csv\n"
        "import os\n"
        "\n"
        "import matplotlib\n"
        "matplotlib.use(\"Agg\")\n"
        "import matplotlib.pyplot as plt\n"
        "\n"
        "HERE = os.path.dirname(os.path.abspath(__file__))\n"
        "FILES = [\n";
    for (const std::string& name : csv_names) body += "    \"" + name + "\",\n";
    body +=
        "]\n"
        "\n"
        "fig, ax = plt.subplots(figsize=(6, 4.5))\n"
        "for name in FILES:\n"
        "    with open(os.path.join(HERE, name), newline=\"\") as fh:\n"
        "        rows = list(csv.DictReader(fh))\n"
        "    dts = [float(r[\"dt\"]) for r in rows]\n"
        "    errs = [float(r[\"error\"]) for r in rows]\n"
        "    rate = float(rows[0][\"fit_rate\"]) if rows else float(\"nan\")\n"
        "    label = \"%s %s H^%s (rate %.2f)\" % (rows[0][\"preset\"], rows[0][\"method\"], rows[0][\"norm\"], rate)\n"
        "    ax.loglog(dts, errs, \"o-\", label=label)\n"
        "ax.set_xlabel(\"dt\")\n"
        "ax.set_ylabel(\"error vs certified reference\")\n"
        "ax.grid(True, which=\"both\", alpha=0.3)\n"
        "ax.legend(fontsize=8)\n"
        "fig.tight_layout()\n"
        "fig.savefig(os.path.join(HERE, \"study.png\"), dpi=150)\n"
        "print(\"wrote\", os.path.join(HERE, \"study.png\"))\n";
    detail::write_text_file(path, body);
}

/// key=value record written next to the artifacts on failure.
inline void write_error_record(const std::string& path, const std::string& code,
                               const std::vector<std::pair<std::string, std::string>>& fields) {
    std::string body = "error=" + code + "\n";
    for (const auto& [k, v] : fields) body += k + "=" + v + "\n";
    detail::write_text_file(path, body);
}

}  // namespace torsplit
