#pragma once

// Experiment configuration in a flat dotted-key grammar:
//
//   section.key = value      one per line, '#' starts a comment
//
// Validation collects every violation (with line numbers), not just the first.

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>

#include "torsplit/presets.hpp"
#include "torsplit/splitting.hpp"

namespace torsplit {

struct ConfigDiagnostic {
    int line = 0;  // 0: document-level
    std::string message;
};

struct U0Spec {
    enum class Kind { named, random, snapshot };
    Kind kind = Kind::random;  // default: band-limited random data, seed 1
    std::string name;
    std::uint64_t seed = 1;
    double decay = 6.0;
    bool zero_mean = true;
    std::string file;
};

struct StudyParams {
    int dt_count = 5;
    int refinement = 6;
    std::vector<double> norms{0.0, 2.0};
    std::vector<SplitMethod> methods;  // empty: the split.method
};

struct AdmitParams {
    int trials = 50;
    std::uint64_t seed = 1;
    double decay = 6.0;
    double kc = 2.0;
};

/// Velocity description; custom multiplier tables live in a file that is
/// loaded against the grid when the experiment runs.
struct VelocityDesc {
    VSpec spec;
    bool is_custom_file = false;
    std::string custom_file;
};

struct ExperimentConfig {
    std::string preset_id;
    GridSpec grid;
    ASpec a;
    VelocityDesc v;
    U0Spec u0;
    SplitMethod method = SplitMethod::strang;
    double dt = 0.0;
    double horizon = 0.0;
    int record_every = 1;
    BFlowControl bflow;
    StudyParams study;
    AdmitParams admit;
    std::string out_dir = "out";
};

struct ConfigResult {
    std::optional<ExperimentConfig> config;
    std::vector<ConfigDiagnostic> errors;
    std::vector<std::string> warnings;

    bool ok() const { return config.has_value() && errors.empty(); }
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
        } else
            cur.push_back(c);
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

inline bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

inline bool parse_long(const std::string& s, long& out) {
    try {
        std::size_t pos = 0;
        out = std::stol(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

/// "c*d(l1[,l2[,l3]])*fl(alpha) + ..." -> ASpec terms; "0" is the zero operator.
inline std::optional<ASpec> parse_a_expression(const std::string& text, int dims, std::string& error) {
    const std::string body = trim(text);
    if (body.empty() || body == "0") return ASpec{};

    // split into signed top-level terms
    std::vector<std::pair<double, std::string>> pieces;
    double sign = 1.0;
    std::string cur;
    int depth = 0;
    auto flush = [&](double next_sign) {
        const std::string t = trim(cur);
        if (!t.empty()) pieces.emplace_back(sign, t);
        cur.clear();
        sign = next_sign;
    };
    auto inside_exponent = [&]() {  // "1e-3" and friends are not term breaks
        const std::string t = trim(cur);
        return t.size() >= 2 && (t.back() == 'e' || t.back() == 'E') &&
               (std::isdigit(static_cast<unsigned char>(t[t.size() - 2])) || t[t.size() - 2] == '.');
    };
    for (char c : body) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (depth == 0 && (c == '+' || c == '-') && !trim(cur).empty() && !inside_exponent()) {
            flush(c == '-' ? -1.0 : 1.0);
            continue;
        }
        if (depth == 0 && (c == '+' || c == '-') && trim(cur).empty()) {
            if (c == '-') sign = -sign;
            continue;
        }
        cur.push_back(c);
    }
    flush(1.0);
    if (depth != 0) {
        error = "unbalanced parentheses in operator expression";
        return std::nullopt;
    }

    std::vector<ATerm> terms;
    for (auto& [piece_sign, piece] : pieces) {
        double coeff = piece_sign;
        std::optional<std::array<int, 3>> deriv;
        std::optional<double> frac;
        // factors split on top-level '*'
        std::vector<std::string> factors;
        std::string f;
        int d2 = 0;
        for (char c : piece) {
            if (c == '(') ++d2;
            if (c == ')') --d2;
            if (d2 == 0 && c == '*') {
                factors.push_back(trim(f));
                f.clear();
            } else
                f.push_back(c);
        }
        factors.push_back(trim(f));
        for (const std::string& factor : factors) {
            if (factor.empty()) {
                error = "empty factor in operator term '" + piece + "'";
                return std::nullopt;
            }
            double num;
            if (parse_double(factor, num)) {
                coeff *= num;
                continue;
            }
            const std::size_t open = factor.find('(');
            if (open == std::string::npos || factor.back() != ')') {
                error = "cannot parse operator factor '" + factor + "' (expected number, d(...), or fl(...))";
                return std::nullopt;
            }
            const std::string head = trim(factor.substr(0, open));
            const std::string args = factor.substr(open + 1, factor.size() - open - 2);
            if (head == "d") {
                if (deriv) {
                    error = "more than one d(...) factor in term '" + piece + "'";
                    return std::nullopt;
                }
                std::array<int, 3> l{0, 0, 0};
                std::vector<std::string> parts;
                std::string p;
                for (char c : args) {
                    if (c == ',') parts.push_back(trim(p)), p.clear();
                    else p.push_back(c);
                }
                parts.push_back(trim(p));
                if (static_cast<int>(parts.size()) != dims) {
                    error = "d(...) arity " + std::to_string(parts.size()) + " does not match dims " +
                            std::to_string(dims);
                    return std::nullopt;
                }
                for (std::size_t i = 0; i < parts.size(); ++i) {
                    long v;
                    if (!parse_long(parts[i], v) || v < 0) {
                        error = "bad derivative order '" + parts[i] + "'";
                        return std::nullopt;
                    }
                    l[i] = static_cast<int>(v);
                }
                deriv = l;
            } else if (head == "fl") {
                if (frac) {
                    error = "more than one fl(...) factor in term '" + piece + "'";
                    return std::nullopt;
                }
                double alpha;
                if (!parse_double(trim(args), alpha) || !(alpha > 0.0)) {
                    error = "bad fractional order '" + args + "' (need a real > 0)";
                    return std::nullopt;
                }
                frac = alpha;
            } else {
                error = "unknown operator factor '" + head + "'";
                return std::nullopt;
            }
        }
        ATerm t;
        t.coeff = coeff;
        if (deriv && frac)
            t.kind = MixedTerm{*frac, *deriv};
        else if (frac)
            t.kind = FractionalLaplacianTerm{*frac};
        else if (deriv)
            t.kind = DerivativeTerm{*deriv};
        else
            t.kind = DerivativeTerm{{0, 0, 0}};  // bare constant: c * identity
        terms.push_back(t);
    }
    try {
        return ASpec(dims, std::move(terms));
    } catch (const std::exception& e) {
        error = e.what();
        return std::nullopt;
    }
}

/// "burgers(a) | sqg(beta) | kernel(gaussian|exponential) | custom(path)"
inline std::optional<VelocityDesc> parse_v_expression(const std::string& text, std::string& error) {
    const std::string body = trim(text);
    const std::size_t open = body.find('(');
    if (open == std::string::npos || body.back() != ')') {
        error = "cannot parse velocity '" + body + "' (expected burgers(a), sqg(beta), kernel(name), custom(path))";
        return std::nullopt;
    }
    const std::string head = trim(body.substr(0, open));
    const std::string arg = trim(body.substr(open + 1, body.size() - open - 2));
    VelocityDesc desc;
    try {
        if (head == "burgers") {
            double a;
            if (!parse_double(arg, a)) { error = "burgers(...) needs a real coefficient"; return std::nullopt; }
            desc.spec = VSpec(BurgersVelocity{a});
        } else if (head == "sqg") {
            double beta;
            if (!parse_double(arg, beta)) { error = "sqg(...) needs a real beta"; return std::nullopt; }
            desc.spec = VSpec(SqgVelocity{beta});
        } else if (head == "kernel") {
            if (arg == "gaussian")
                desc.spec = VSpec(ConvolutionVelocity{ConvolutionVelocity::Kernel::gaussian, nullptr});
            else if (arg == "exponential")
                desc.spec = VSpec(ConvolutionVelocity{ConvolutionVelocity::Kernel::exponential, nullptr});
            else { error = "unknown kernel '" + arg + "' (have: gaussian, exponential)"; return std::nullopt; }
        } else if (head == "custom") {
            if (arg.empty()) { error = "custom(...) needs a multiplier table path"; return std::nullopt; }
            desc.is_custom_file = true;
            desc.custom_file = arg;
        } else {
            error = "unknown velocity '" + head + "'";
            return std::nullopt;
        }
    } catch (const std::exception& e) {
        error = e.what();
        return std::nullopt;
    }
    return desc;
}

struct RawDocument {
    struct Entry {
        std::string value;
        int line = 0;
        bool consumed = false;
    };
    std::map<std::string, Entry> entries;
    std::vector<ConfigDiagnostic> errors;
};

inline RawDocument scan_document(std::string_view text) {
    RawDocument doc;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            doc.errors.push_back({line_no, "expected 'section.key = value'"});
            continue;
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty() || key.find('.') == std::string::npos) {
            doc.errors.push_back({line_no, "malformed key '" + key + "' (expected section.key)"});
            continue;
        }
        if (doc.entries.count(key)) {
            doc.errors.push_back({line_no, "duplicate key '" + key + "'"});
            continue;
        }
        doc.entries[key] = {value, line_no, false};
    }
    return doc;
}

/// Typed access into a RawDocument that records every violation.
class ConfigReader {
public:
    ConfigReader(RawDocument& doc, std::vector<ConfigDiagnostic>& errors) : doc_(doc), errors_(errors) {}

    bool has(const std::string& key) {
        auto it = doc_.entries.find(key);
        if (it == doc_.entries.end()) return false;
        it->second.consumed = true;
        return true;
    }

    std::optional<std::string> get_string(const std::string& key) {
        auto it = doc_.entries.find(key);
        if (it == doc_.entries.end()) return std::nullopt;
        it->second.consumed = true;
        return it->second.value;
    }

    std::optional<double> get_double(const std::string& key) {
        auto s = get_string(key);
        if (!s) return std::nullopt;
        double v;
        if (!parse_double(*s, v)) {
            fail(key, "expected a number, got '" + *s + "'");
            return std::nullopt;
        }
        return v;
    }

    std::optional<long> get_long(const std::string& key) {
        auto s = get_string(key);
        if (!s) return std::nullopt;
        long v;
        if (!parse_long(*s, v)) {
            fail(key, "expected an integer, got '" + *s + "'");
            return std::nullopt;
        }
        return v;
    }

    std::optional<bool> get_bool(const std::string& key) {
        auto s = get_string(key);
        if (!s) return std::nullopt;
        if (*s == "true") return true;
        if (*s == "false") return false;
        fail(key, "expected true or false, got '" + *s + "'");
        return std::nullopt;
    }

    int line_of(const std::string& key) const {
        auto it = doc_.entries.find(key);
        return it == doc_.entries.end() ? 0 : it->second.line;
    }

    void fail(const std::string& key, const std::string& msg) { errors_.push_back({line_of(key), key + ": " + msg}); }

    void require_missing(const std::string& key) { errors_.push_back({0, "missing required key '" + key + "'"}); }

private:
    RawDocument& doc_;
    std::vector<ConfigDiagnostic>& errors_;
};

}  // namespace detail

inline const std::vector<std::string>& known_config_keys() {
    static const std::vector<std::string> keys = {
        "equation.preset", "equation.alpha",  "equation.beta",        "equation.kernel",
        "equation.A",      "equation.v",      "grid.dims",            "grid.n",
        "u0.kind",         "u0.name",         "u0.seed",              "u0.decay",
        "u0.zero_mean",    "u0.file",         "split.method",         "split.dt",
        "split.T",         "split.record_every", "bflow.substep_cap", "bflow.max_substeps",
        "bflow.blowup_threshold", "bflow.guard_index", "study.dt_count", "study.refinement",
        "study.norms",     "study.methods",   "admit.trials",         "admit.seed",
        "admit.decay",     "admit.kc",        "output.dir"};
    return keys;
}

inline ConfigResult parse_config(std::string_view text) {
    ConfigResult result;
    detail::RawDocument doc = detail::scan_document(text);
    std::vector<ConfigDiagnostic> errors = doc.errors;
    detail::ConfigReader rd(doc, errors);
    ExperimentConfig cfg;

    // --- equation ---------------------------------------------------------
    const auto preset = rd.get_string("equation.preset");
    if (!preset) rd.require_missing("equation.preset");
    static const std::vector<std::string> preset_names = {"kdv",  "viscous_burgers", "kawahara",
                                                          "sqg",  "aggregation",     "custom"};
    bool preset_known = false;
    if (preset) {
        preset_known = std::find(preset_names.begin(), preset_names.end(), *preset) != preset_names.end();
        if (!preset_known) rd.fail("equation.preset", "unknown preset '" + *preset + "'");
        cfg.preset_id = *preset;
    }

    int preset_dims = 0;
    if (preset_known) {
        if (*preset == "kdv" || *preset == "viscous_burgers" || *preset == "kawahara") preset_dims = 1;
        if (*preset == "sqg" || *preset == "aggregation") preset_dims = 2;
    }

    // --- grid --------------------------------------------------------------
    int dims = preset_dims;
    if (const auto d = rd.get_long("grid.dims")) {
        dims = static_cast<int>(*d);
        if (dims < 1 || dims > 3) rd.fail("grid.dims", "dims must be 1, 2 or 3");
    }
    if (dims == 0) {
        if (preset && *preset == "custom")
            errors.push_back({0, "missing required key 'grid.dims' (custom equations do not imply dims)"});
        dims = 1;
    }
    long n = 0;
    if (const auto nv = rd.get_long("grid.n")) {
        n = *nv;
        if (n < 8 || (n & (n - 1)) != 0) rd.fail("grid.n", "points per dim must be a power of two >= 8");
    } else
        rd.require_missing("grid.n");
    if (dims >= 1 && dims <= 3 && n >= 8 && (n & (n - 1)) == 0)
        cfg.grid = GridSpec(dims, static_cast<int>(n));

    // --- equation operators ------------------------------------------------
    const auto alpha = rd.get_double("equation.alpha");
    const auto beta = rd.get_double("equation.beta");
    const auto kernel = rd.get_string("equation.kernel");
    const auto a_expr = rd.get_string("equation.A");
    const auto v_expr = rd.get_string("equation.v");

    if (preset_known && *preset != "custom") {
        if (a_expr) rd.fail("equation.A", "only valid with equation.preset = custom");
        if (v_expr) rd.fail("equation.v", "only valid with equation.preset = custom");
        try {
            if (*preset == "kdv") {
                Preset p = preset_kdv();
                cfg.a = p.a;
                cfg.v.spec = p.v;
            } else if (*preset == "viscous_burgers") {
                Preset p = preset_viscous_burgers(alpha.value_or(2.0));
                cfg.a = p.a;
                cfg.v.spec = p.v;
            } else if (*preset == "kawahara") {
                Preset p = preset_kawahara();
                cfg.a = p.a;
                cfg.v.spec = p.v;
            } else if (*preset == "sqg") {
                Preset p = preset_sqg(alpha.value_or(2.0), beta.value_or(2.0));
                cfg.a = p.a;
                cfg.v.spec = p.v;
            } else {
                auto kind = ConvolutionVelocity::Kernel::gaussian;
                if (kernel) {
                    if (*kernel == "exponential")
                        kind = ConvolutionVelocity::Kernel::exponential;
                    else if (*kernel != "gaussian")
                        rd.fail("equation.kernel", "unknown kernel '" + *kernel + "' (have: gaussian, exponential)");
                }
                Preset p = preset_aggregation(alpha.value_or(2.0), kind, dims >= 2 ? dims : 2);
                cfg.a = p.a;
                cfg.v.spec = p.v;
                if (kind == ConvolutionVelocity::Kernel::exponential)
                    result.warnings.push_back(
                        "equation.kernel = exponential drives finite-time collapse without sufficient diffusion "
                        "and is expected to trip the blow-up guard");
            }
        } catch (const std::exception& e) {
            errors.push_back({rd.line_of("equation.preset"), std::string("equation: ") + e.what()});
        }
        if (preset_dims != 0 && dims != preset_dims && !(*preset == "aggregation" && dims >= 2))
            errors.push_back({rd.line_of("grid.dims") ? rd.line_of("grid.dims") : rd.line_of("equation.preset"),
                              "preset '" + *preset + "' requires dims = " + std::to_string(preset_dims)});
    } else if (preset_known) {  // custom
        if (!a_expr)
            rd.require_missing("equation.A");
        else {
            std::string err;
            auto a = detail::parse_a_expression(*a_expr, dims, err);
            if (!a)
                rd.fail("equation.A", err);
            else {
                cfg.a = *a;
                bool weak_fractional = false;
                for (const ATerm& t : cfg.a.terms()) {
                    if (const auto* f = std::get_if<FractionalLaplacianTerm>(&t.kind))
                        weak_fractional |= f->alpha < 1.0;
                    if (const auto* m = std::get_if<MixedTerm>(&t.kind)) weak_fractional |= m->alpha < 1.0;
                }
                if (weak_fractional)
                    result.warnings.push_back(
                        "equation.A uses fractional dissipation with alpha < 1; well-posedness requires alpha >= 1");
            }
        }
        if (!v_expr)
            rd.require_missing("equation.v");
        else {
            std::string err;
            auto v = detail::parse_v_expression(*v_expr, err);
            if (!v)
                rd.fail("equation.v", err);
            else
                cfg.v = *v;
        }
        if (alpha) rd.fail("equation.alpha", "only valid with a parametric preset");
        if (beta) rd.fail("equation.beta", "only valid with equation.preset = sqg");
        if (kernel) rd.fail("equation.kernel", "only valid with equation.preset = aggregation");
    }

    // velocity/grid compatibility (also covers custom expressions)
    if (!cfg.v.is_custom_file && n >= 8) {
        try {
            cfg.v.spec.require_compatible(cfg.grid);
        } catch (const std::exception& e) {
            errors.push_back({rd.line_of("grid.dims") ? rd.line_of("grid.dims") : 0, e.what()});
        }
    }

    // --- u0 ------------------------------------------------------------------
    if (const auto kind = rd.get_string("u0.kind")) {
        if (*kind == "named") {
            cfg.u0.kind = U0Spec::Kind::named;
            if (const auto name = rd.get_string("u0.name")) cfg.u0.name = *name;
            else rd.require_missing("u0.name");
            static const std::vector<std::string> names = {"sin", "two_mode", "bump"};
            if (std::find(names.begin(), names.end(), cfg.u0.name) == names.end())
                rd.fail("u0.name", "unknown named field '" + cfg.u0.name + "' (have: sin, two_mode, bump)");
            else if ((cfg.u0.name == "sin" && dims != 1) || (cfg.u0.name == "two_mode" && dims != 2))
                rd.fail("u0.name", "'" + cfg.u0.name + "' does not match dims " + std::to_string(dims));
        } else if (*kind == "random") {
            cfg.u0.kind = U0Spec::Kind::random;
            if (const auto s = rd.get_long("u0.seed")) cfg.u0.seed = static_cast<std::uint64_t>(*s);
            if (const auto d = rd.get_double("u0.decay")) {
                cfg.u0.decay = *d;
                if (!(*d > 0.0)) rd.fail("u0.decay", "must be > 0");
            }
            if (const auto z = rd.get_bool("u0.zero_mean")) cfg.u0.zero_mean = *z;
        } else if (*kind == "snapshot") {
            cfg.u0.kind = U0Spec::Kind::snapshot;
            if (const auto f = rd.get_string("u0.file")) cfg.u0.file = *f;
            else rd.require_missing("u0.file");
        } else
            rd.fail("u0.kind", "expected named, random or snapshot");
    }

    // --- split ---------------------------------------------------------------
    if (const auto m = rd.get_string("split.method")) {
        if (*m == "godunov") cfg.method = SplitMethod::godunov;
        else if (*m == "strang") cfg.method = SplitMethod::strang;
        else rd.fail("split.method", "expected godunov or strang");
    } else
        rd.require_missing("split.method");
    if (const auto dt = rd.get_double("split.dt")) {
        cfg.dt = *dt;
        if (!(*dt > 0.0)) rd.fail("split.dt", "must be > 0");
    } else
        rd.require_missing("split.dt");
    if (const auto T = rd.get_double("split.T")) {
        cfg.horizon = *T;
        if (!(*T > 0.0)) rd.fail("split.T", "must be > 0");
    } else
        rd.require_missing("split.T");
    if (cfg.dt > 0.0 && cfg.horizon > 0.0 && cfg.dt > cfg.horizon * (1.0 + 1e-12))
        errors.push_back({rd.line_of("split.dt"), "split.dt exceeds the horizon split.T"});
    if (const auto r = rd.get_long("split.record_every")) {
        cfg.record_every = static_cast<int>(*r);
        if (*r < 0) rd.fail("split.record_every", "must be >= 0 (0: endpoints only)");
    }

    // --- bflow -----------------------------------------------------------------
    if (const auto c = rd.get_double("bflow.substep_cap")) {
        cfg.bflow.substep_cap = *c;
        if (!(*c > 0.0) || *c > 1.0) rd.fail("bflow.substep_cap", "must lie in (0, 1]");
    }
    if (const auto m = rd.get_long("bflow.max_substeps")) {
        cfg.bflow.max_substeps = *m;
        if (*m < 1) rd.fail("bflow.max_substeps", "must be >= 1");
    }
    if (const auto b = rd.get_double("bflow.blowup_threshold")) cfg.bflow.blowup_threshold = *b;
    if (const auto gidx = rd.get_double("bflow.guard_index")) {
        cfg.bflow.guard_index = *gidx;
        if (*gidx < 0.0) rd.fail("bflow.guard_index", "must be >= 0");
    }

    // --- study -------------------------------------------------------------------
    if (const auto c = rd.get_long("study.dt_count")) {
        cfg.study.dt_count = static_cast<int>(*c);
        if (*c < 3) rd.fail("study.dt_count", "must be >= 3 for a rate fit");
    }
    if (const auto r = rd.get_long("study.refinement")) {
        cfg.study.refinement = static_cast<int>(*r);
        if (*r < 4) rd.fail("study.refinement", "must be >= 4");
    }
    if (const auto s = rd.get_string("study.norms")) {
        cfg.study.norms.clear();
        for (const std::string& tok : detail::split_ws(*s)) {
            double v;
            if (!detail::parse_double(tok, v) || v < 0.0) {
                rd.fail("study.norms", "expected space-separated norm indices >= 0");
                break;
            }
            cfg.study.norms.push_back(v);
        }
        if (cfg.study.norms.empty()) rd.fail("study.norms", "at least one norm index required");
    }
    if (const auto s = rd.get_string("study.methods")) {
        for (const std::string& tok : detail::split_ws(*s)) {
            if (tok == "godunov") cfg.study.methods.push_back(SplitMethod::godunov);
            else if (tok == "strang") cfg.study.methods.push_back(SplitMethod::strang);
            else rd.fail("study.methods", "expected godunov and/or strang");
        }
    }
    if (cfg.dt > 0.0 && cfg.horizon > 0.0) {
        const double steps = cfg.horizon / cfg.dt;
        if (std::abs(steps - std::round(steps)) > 1e-9)
            errors.push_back({rd.line_of("split.dt"),
                              "study requires split.T to be an integer multiple of split.dt so every run shares "
                              "the endpoint (use dt = T/2^j)"});
    }
    {
        const bool strang_study = cfg.study.methods.empty()
                                      ? cfg.method == SplitMethod::strang
                                      : std::find(cfg.study.methods.begin(), cfg.study.methods.end(),
                                                  SplitMethod::strang) != cfg.study.methods.end();
        // second-order rows and the certificate share the dt^2 asymptote, so
        // the 0.01 x rule needs 3/4^r < 0.01, i.e. refinement >= 5
        if (strang_study && cfg.study.refinement < 5)
            result.warnings.push_back(
                "study.refinement = 4 cannot certify a strang study (the certificate is 3/4^4 of the smallest "
                "second-order error, above the 0.01 gate); use study.refinement >= 5");
    }

    // --- admit ----------------------------------------------------------------------
    if (const auto t = rd.get_long("admit.trials")) {
        cfg.admit.trials = static_cast<int>(*t);
        if (*t < 1) rd.fail("admit.trials", "must be >= 1");
    }
    if (const auto s = rd.get_long("admit.seed")) cfg.admit.seed = static_cast<std::uint64_t>(*s);
    if (const auto d = rd.get_double("admit.decay")) {
        cfg.admit.decay = *d;
        if (!(*d > 0.0)) rd.fail("admit.decay", "must be > 0");
    }
    if (const auto k = rd.get_double("admit.kc")) {
        cfg.admit.kc = *k;
        if (*k < 0.0) rd.fail("admit.kc", "must be >= 0");
    }

    // --- output ----------------------------------------------------------------------
    if (const auto o = rd.get_string("output.dir")) cfg.out_dir = *o;

    // unknown keys
    for (const auto& [key, entry] : doc.entries)
        if (!entry.consumed) errors.push_back({entry.line, "unknown key '" + key + "'"});
    std::sort(errors.begin(), errors.end(),
              [](const ConfigDiagnostic& a, const ConfigDiagnostic& b) { return a.line < b.line; });

    result.errors = std::move(errors);
    if (result.errors.empty()) result.config = std::move(cfg);
    return result;
}

}  // namespace torsplit
