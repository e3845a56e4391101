#pragma once

// Fourier-multiplier realizations of the linear operator A and the velocity
// operator v, the commutator [A, B], and the numeric admissibility audit.
//
// Sign conventions: FractionalLaplacianTerm stands for -(-Laplacian)^{alpha/2}
// scaled by the coefficient, so its symbol is -|k|^alpha and the diffusive
// branch reads Re sigma <= 0. MixedTerm multiplies that by a derivative factor.

#include <algorithm>
#include <memory>
#include <sstream>
#include <variant>

#include "torsplit/spectral.hpp"

namespace torsplit {

enum class OperatorClass { dispersive, diffusive, rejected };

inline const char* to_string(OperatorClass c) {
    switch (c) {
        case OperatorClass::dispersive: return "dispersive";
        case OperatorClass::diffusive: return "diffusive";
        default: return "rejected";
    }
}

struct DerivativeTerm {
    std::array<int, 3> order{0, 0, 0};
};

struct FractionalLaplacianTerm {
    double alpha = 1.0;  // symbol -|k|^alpha, k = 0 maps to 0
};

struct MixedTerm {
    double alpha = 1.0;
    std::array<int, 3> order{0, 0, 0};
};

struct ATerm {
    double coeff = 1.0;
    std::variant<DerivativeTerm, FractionalLaplacianTerm, MixedTerm> kind;
};

namespace detail {

inline int order_sum(const std::array<int, 3>& l) { return l[0] + l[1] + l[2]; }

/// Symbol of one term at signed wavevector k. A positive grid_n applies that
/// grid's Nyquist rule to the derivative factors; grid_n = 0 evaluates the
/// pure symbol (classification scans).
inline Complex term_symbol(const ATerm& t, const std::array<int, 3>& k, int dims, int grid_n = 0) {
    double k2 = 0.0;
    for (int d = 0; d < dims; ++d) k2 += static_cast<double>(k[d]) * k[d];
    auto deriv_factor = [&](const std::array<int, 3>& order) {
        Complex m(1.0, 0.0);
        for (int d = 0; d < dims; ++d)
            m *= grid_n > 0 ? ik_power(k[d], order[static_cast<std::size_t>(d)], grid_n)
                            : ik_power(k[d], order[static_cast<std::size_t>(d)]);
        return m;
    };
    return std::visit(
        [&](const auto& kind) -> Complex {
            using T = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<T, DerivativeTerm>) {
                return t.coeff * deriv_factor(kind.order);
            } else if constexpr (std::is_same_v<T, FractionalLaplacianTerm>) {
                return Complex(-t.coeff * (k2 == 0.0 ? 0.0 : std::pow(k2, kind.alpha / 2.0)), 0.0);
            } else {
                return -t.coeff * (k2 == 0.0 ? 0.0 : std::pow(k2, kind.alpha / 2.0)) * deriv_factor(kind.order);
            }
        },
        t.kind);
}

struct ClassScan {
    OperatorClass cls;
    std::array<int, 3> witness{0, 0, 0};  // wavevector with positive real part, if rejected
    double witness_value = 0.0;
};

}  // namespace detail

/// Symbolic description of A. Classified at construction: sigma purely
/// imaginary for all k -> dispersive (conservative), Re sigma <= 0 for all
/// k -> diffusive, otherwise rejected.
class ASpec {
public:
    ASpec() = default;  // the zero operator, compatible with any grid

    ASpec(int dims, std::vector<ATerm> terms) : dims_(dims), terms_(std::move(terms)) {
        if (dims_ < 1 || dims_ > 3) throw std::invalid_argument("ASpec: dims must be 1, 2 or 3");
        for (const ATerm& t : terms_) {
            std::visit(
                [&](const auto& kind) {
                    using T = std::decay_t<decltype(kind)>;
                    if constexpr (std::is_same_v<T, FractionalLaplacianTerm>) {
                        if (kind.alpha <= 0.0) throw std::invalid_argument("ASpec: fractional alpha must be > 0");
                    } else if constexpr (std::is_same_v<T, MixedTerm>) {
                        if (kind.alpha <= 0.0) throw std::invalid_argument("ASpec: fractional alpha must be > 0");
                        check_order(kind.order);
                    } else {
                        check_order(kind.order);
                    }
                },
                t.kind);
        }
        scan_ = classify(default_scan_extent());
    }

    int dims() const { return dims_; }
    const std::vector<ATerm>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    OperatorClass classification() const { return scan_.cls; }

    /// Highest number of derivatives in A: max over terms of |l| + alpha.
    double order() const {
        double o = 0.0;
        for (const ATerm& t : terms_) {
            o = std::max(o, std::visit(
                                [](const auto& kind) -> double {
                                    using T = std::decay_t<decltype(kind)>;
                                    if constexpr (std::is_same_v<T, DerivativeTerm>)
                                        return static_cast<double>(detail::order_sum(kind.order));
                                    else if constexpr (std::is_same_v<T, FractionalLaplacianTerm>)
                                        return kind.alpha;
                                    else
                                        return kind.alpha + detail::order_sum(kind.order);
                                },
                                t.kind));
        }
        return o;
    }

    Complex symbol(const std::array<int, 3>& k) const {
        Complex s(0.0, 0.0);
        for (const ATerm& t : terms_) s += detail::term_symbol(t, k, dims_ == 0 ? 3 : dims_);
        return s;
    }

    std::string rejection_diagnosis() const {
        if (scan_.cls != OperatorClass::rejected) return {};
        std::ostringstream os;
        os << "Re sigma(k) = " << scan_.witness_value << " > 0 at k = (";
        for (int d = 0; d < dims_; ++d) os << (d ? "," : "") << scan_.witness[static_cast<std::size_t>(d)];
        os << ")";
        return os.str();
    }

    /// Re-derive the class on an explicit lattice extent (used by the symbol
    /// table builder to verify the construction-time scan on the actual grid).
    detail::ClassScan classify(int kmax) const {
        detail::ClassScan r{OperatorClass::dispersive, {0, 0, 0}, 0.0};
        if (terms_.empty()) return r;
        double max_abs_re = 0.0, max_re = 0.0, scale = 0.0;
        std::array<int, 3> worst{0, 0, 0};
        const int d = dims_;
        auto visit = [&](const std::array<int, 3>& k) {
            const Complex s = symbol(k);
            scale = std::max(scale, std::abs(s));
            max_abs_re = std::max(max_abs_re, std::abs(s.real()));
            if (s.real() > max_re) {
                max_re = s.real();
                worst = k;
            }
        };
        std::array<int, 3> k{0, 0, 0};
        for (int k0 = -kmax; k0 <= kmax; ++k0) {
            k[0] = k0;
            if (d == 1) { visit(k); continue; }
            for (int k1 = -kmax; k1 <= kmax; ++k1) {
                k[1] = k1;
                if (d == 2) { visit(k); continue; }
                for (int k2 = -kmax; k2 <= kmax; ++k2) {
                    k[2] = k2;
                    visit(k);
                }
            }
        }
        const double tol = 1e-12 * std::max(1.0, scale);
        if (max_re > tol) return {OperatorClass::rejected, worst, max_re};
        if (max_abs_re <= tol) return {OperatorClass::dispersive, {0, 0, 0}, 0.0};
        return {OperatorClass::diffusive, {0, 0, 0}, 0.0};
    }

private:
    void check_order(const std::array<int, 3>& l) const {
        for (int d = 0; d < 3; ++d) {
            if (l[static_cast<std::size_t>(d)] < 0) throw std::invalid_argument("ASpec: negative derivative order");
            if (d >= dims_ && l[static_cast<std::size_t>(d)] != 0)
                throw std::invalid_argument("ASpec: multi-index exceeds dims");
        }
    }

    int default_scan_extent() const { return dims_ == 1 ? 256 : dims_ == 2 ? 128 : 32; }

    int dims_ = 0;  // 0: zero operator, any dims
    std::vector<ATerm> terms_;
    detail::ClassScan scan_{OperatorClass::dispersive, {0, 0, 0}, 0.0};
};

// Velocity operators. All are Fourier multipliers, so the commutativity
// requirement with any ASpec holds identically.

struct BurgersVelocity {
    double a = 1.0;  // v(u) = a u, one dimension only
};

struct SqgVelocity {
    double beta = 2.0;  // v(u) = curl (-Laplacian)^{-beta/2} u, two dimensions
};

struct ConvolutionVelocity {
    enum class Kernel { gaussian, exponential, samples };
    Kernel kernel = Kernel::gaussian;  // gaussian: 1 - exp(-r^2); exponential: 1 - exp(-r)
    std::shared_ptr<const RealField> sample_field;  // for Kernel::samples
};

struct CustomVelocity {
    GridSpec grid;
    // components[j][flat] = m_j(k); only grids equal to `grid` are accepted
    std::shared_ptr<const std::array<std::vector<Complex>, 3>> components;
};

class VSpec {
public:
    VSpec() : v_(BurgersVelocity{}) {}
    VSpec(BurgersVelocity b) : v_(b) {}
    VSpec(SqgVelocity s) : v_(s) {
        if (s.beta < 1.0 || s.beta > 2.0) throw std::invalid_argument("VSpec: sqg beta must lie in [1, 2]");
    }
    VSpec(ConvolutionVelocity c) : v_(std::move(c)) {}
    VSpec(CustomVelocity c) : v_(std::move(c)) {}

    template <class T>
    const T* get_if() const { return std::get_if<T>(&v_); }

    /// Checks grid compatibility; throws with the dimensional constraint.
    void require_compatible(const GridSpec& g) const {
        if (std::holds_alternative<BurgersVelocity>(v_) && g.dims != 1)
            throw std::invalid_argument("velocity: Burgers v(u) = a u is one-dimensional only");
        if (std::holds_alternative<SqgVelocity>(v_) && g.dims != 2)
            throw std::invalid_argument("velocity: sqg velocity requires dims = 2");
        if (std::holds_alternative<ConvolutionVelocity>(v_) && g.dims < 2)
            throw std::invalid_argument("velocity: convolution kernels require dims >= 2");
        if (const auto* c = std::get_if<CustomVelocity>(&v_)) {
            if (!(c->grid == g)) throw std::invalid_argument("velocity: custom multiplier table built for another grid");
        }
    }

private:
    std::variant<BurgersVelocity, SqgVelocity, ConvolutionVelocity, CustomVelocity> v_;
};

namespace detail {

/// Kernel samples with the origin at index 0 via the torus distance; exactly
/// the midpoint-centered sampling circularly shifted back by n/2 per axis.
inline RealField periodized_kernel_samples(const ConvolutionVelocity& cv, const GridSpec& g) {
    if (cv.kernel == ConvolutionVelocity::Kernel::samples) {
        if (!cv.sample_field) throw std::invalid_argument("velocity: kernel sample field missing");
        if (!(cv.sample_field->grid == g))
            throw std::invalid_argument("velocity: kernel samples built for another grid");
        return *cv.sample_field;
    }
    return sample_field(g, [&](const std::array<double, 3>& x) {
        double r2 = 0.0;
        for (int d = 0; d < g.dims; ++d) {
            const double dd = std::min(x[static_cast<std::size_t>(d)], two_pi - x[static_cast<std::size_t>(d)]);
            r2 += dd * dd;
        }
        if (cv.kernel == ConvolutionVelocity::Kernel::gaussian) return 1.0 - std::exp(-r2);
        return 1.0 - std::exp(-std::sqrt(r2));
    });
}

struct VelocityTable {
    GridSpec grid;
    int components = 0;
    std::array<std::vector<Complex>, 3> m;  // m[j][flat]
};

inline VelocityTable velocity_table(const VSpec& v, const GridSpec& g) {
    v.require_compatible(g);
    VelocityTable t;
    t.grid = g;
    t.components = g.dims;
    for (int j = 0; j < g.dims; ++j) t.m[static_cast<std::size_t>(j)].assign(g.size(), Complex(0.0, 0.0));

    if (const auto* b = v.get_if<BurgersVelocity>()) {
        std::fill(t.m[0].begin(), t.m[0].end(), Complex(b->a, 0.0));
        return t;
    }
    if (const auto* s = v.get_if<SqgVelocity>()) {
        for_each_mode(g, [&](std::size_t flat, const std::array<int, 3>& k) {
            const double k2 = static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1];
            if (k2 == 0.0) return;
            const double gamma = std::pow(k2, -s->beta / 2.0);
            t.m[0][flat] = ik_power(k[1], 1, g.n) * (-gamma);  // -i k2 (|k|^2)^{-beta/2}
            t.m[1][flat] = ik_power(k[0], 1, g.n) * gamma;     //  i k1 (|k|^2)^{-beta/2}
        });
        return t;
    }
    if (const auto* c = v.get_if<ConvolutionVelocity>()) {
        const SpectralField phi_hat = fft(periodized_kernel_samples(*c, g));
        for_each_mode(g, [&](std::size_t flat, const std::array<int, 3>& k) {
            for (int j = 0; j < g.dims; ++j)
                t.m[static_cast<std::size_t>(j)][flat] = ik_power(k[static_cast<std::size_t>(j)], 1, g.n) * phi_hat.coeffs[flat];
        });
        return t;
    }
    const auto* cm = v.get_if<CustomVelocity>();
    if (!cm->components) throw std::invalid_argument("velocity: empty custom multiplier table");
    for (int j = 0; j < g.dims; ++j) {
        const auto& src = (*cm->components)[static_cast<std::size_t>(j)];
        if (src.size() != g.size()) throw std::invalid_argument("velocity: custom table size mismatch");
        t.m[static_cast<std::size_t>(j)] = src;
    }
    return t;
}

/// sigma(k) on the grid lattice, Nyquist-safe, plus the on-grid class check.
inline std::vector<Complex> a_symbol_table(const ASpec& a, const GridSpec& g) {
    if (a.dims() != 0 && a.dims() != g.dims)
        throw std::invalid_argument("apply_a: operator dims incompatible with grid");
    std::vector<Complex> table(g.size(), Complex(0.0, 0.0));
    if (a.is_zero()) return table;
    double max_re = 0.0, max_abs_re = 0.0, scale = 0.0;
    for_each_mode(g, [&](std::size_t flat, const std::array<int, 3>& k) {
        Complex s(0.0, 0.0);
        for (const ATerm& t : a.terms()) s += term_symbol(t, k, g.dims, g.n);
        table[flat] = s;
        scale = std::max(scale, std::abs(s));
        max_re = std::max(max_re, s.real());
        max_abs_re = std::max(max_abs_re, std::abs(s.real()));
    });
    const double tol = 1e-12 * std::max(1.0, scale);
    const OperatorClass on_grid = max_re > tol          ? OperatorClass::rejected
                                  : max_abs_re <= tol   ? OperatorClass::dispersive
                                                        : OperatorClass::diffusive;
    if (on_grid == OperatorClass::rejected && a.classification() != OperatorClass::rejected)
        throw std::logic_error("apply_a: symbol has positive real part on this grid; classification scan was too small");
    return table;
}

inline SpectralField apply_table(const SpectralField& u, const std::vector<Complex>& table) {
    SpectralField r = u;
    for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] *= table[i];
    return r;
}

/// Pointwise physical product of two dealiased spectral factors, transformed
/// back and dealiased again; alias-free for quadratic nonlinearities.
inline SpectralField dealiased_product(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a.grid, b.grid, "dealiased_product");
    const RealField ap = ifft(dealias(a));
    const RealField bp = ifft(dealias(b));
    RealField prod(a.grid);
    for (std::size_t i = 0; i < prod.values.size(); ++i) prod.values[i] = ap.values[i] * bp.values[i];
    return dealias(fft(prod));
}

}  // namespace detail

/// A applied as a Fourier multiplier: u_hat(k) -> sigma(k) u_hat(k).
inline SpectralField apply_a(const SpectralField& u, const ASpec& a) {
    return detail::apply_table(u, detail::a_symbol_table(a, u.grid));
}

/// Velocity components v_j(u)^ = m_j(k) u_hat(k); Burgers returns the one
///\-vector (a u).
inline std::vector<SpectralField> velocity(const SpectralField& u, const VSpec& v) {
    const detail::VelocityTable t = detail::velocity_table(v, u.grid);
    std::vector<SpectralField> out;
    out.reserve(static_cast<std::size_t>(t.components));
    for (int j = 0; j < t.components; ++j) out.push_back(detail::apply_table(u, t.m[static_cast<std::size_t>(j)]));
    return out;
}

/// div w computed spectrally from components.
inline SpectralField divergence(const std::vector<SpectralField>& w) {
    if (w.empty()) throw std::invalid_argument("divergence: no components");
    SpectralField r(w[0].grid);
    for (std::size_t j = 0; j < w.size(); ++j) {
        detail::require_same_grid(w[j].grid, r.grid, "divergence");
        const SpectralField dj = axis_derivative(w[j], static_cast<int>(j));
        for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] += dj.coeffs[i];
    }
    return r;
}

/// The splitting defect in closed form:
///   [A, B](f) = -div( A(f v(f)) - f A(v(f)) - A(f) v(f) ),
/// every product evaluated pseudo-spectrally with dealiasing.
inline SpectralField commutator_ab(const SpectralField& f, const ASpec& a, const VSpec& v) {
    const std::vector<Complex> sigma = detail::a_symbol_table(a, f.grid);
    const std::vector<SpectralField> vf = velocity(f, v);
    const SpectralField af = detail::apply_table(f, sigma);
    SpectralField acc(f.grid);
    for (std::size_t j = 0; j < vf.size(); ++j) {
        const SpectralField fav = detail::apply_table(detail::dealiased_product(f, vf[j]), sigma);
        const SpectralField f_av = detail::dealiased_product(f, detail::apply_table(vf[j], sigma));
        const SpectralField af_v = detail::dealiased_product(af, vf[j]);
        SpectralField inner = fav;
        for (std::size_t i = 0; i < inner.coeffs.size(); ++i)
            inner.coeffs[i] -= f_av.coeffs[i] + af_v.coeffs[i];
        const SpectralField dj = axis_derivative(inner, static_cast<int>(j));
        for (std::size_t i = 0; i < acc.coeffs.size(); ++i) acc.coeffs[i] += dj.coeffs[i];
    }
    for (auto& c : acc.coeffs) c = -c;
    return acc;
}

/// Numeric audit of the admissibility conditions over random band-limited
/// fields. Constants are empirical sample maxima, not proofs.
struct AdmissibilityReport {
    OperatorClass classification = OperatorClass::dispersive;
    bool ok = false;
    std::string diagnosis;
    double commutativity_residual = 0.0;  // max ||A(v_i u) - v_i(A u)||_L2 / ||u||_L2
    double div_ratio = 0.0;               // max ||div v(u)||_L2 / ||u||_L2
    bool div_bound_applicable = true;     // the L^p div bound is hypothesised for dims >= 2 only
    double energy_sign_max = 0.0;         // max of  int A(u) u dx / ||u||_L2^2
    double commutator_constant = 0.0;     // max ||A(fg)-fA(g)-gA(f)||_{H^kc} / (||f|| ||g||)_{H^{kc+m-1}}
    bool degenerate = false;
    int trials = 0;
    std::uint64_t seed = 0;
};

struct AdmissibilityOptions {
    double kc = 2.0;      // norm index of the commutator estimate check
    double decay = 6.0;   // sample-field regularity
    double tol = 1e-12;   // pass level for commutativity and the sign condition
};

inline AdmissibilityReport check_admissibility(const ASpec& a, const VSpec& v, const GridSpec& grid, int trials,
                                               std::uint64_t seed, const AdmissibilityOptions& opt = {}) {
    if (trials < 1) throw std::invalid_argument("check_admissibility: trials must be >= 1");
    AdmissibilityReport rep;
    rep.classification = a.classification();
    rep.trials = trials;
    rep.seed = seed;
    rep.div_bound_applicable = grid.dims >= 2;
    if (rep.classification == OperatorClass::rejected) {
        rep.ok = false;
        rep.diagnosis = "operator rejected: " + a.rejection_diagnosis();
        return rep;
    }
    v.require_compatible(grid);

    const std::vector<Complex> sigma = detail::a_symbol_table(a, grid);
    const detail::VelocityTable vt = detail::velocity_table(v, grid);
    const double m_exp = std::max(a.order(), 2.0);
    constexpr double tiny = 1e-300;

    for (int trial = 0; trial < trials; ++trial) {
        const std::uint64_t base = seed + 2 * static_cast<std::uint64_t>(trial);
        const SpectralField u = fft(random_band_limited_field(grid, base, opt.decay));
        const SpectralField g = fft(random_band_limited_field(grid, base + 1, opt.decay));
        const double u_l2 = l2_norm(u);
        if (u_l2 < tiny) {
            rep.degenerate = true;
            continue;
        }

        // (1) commutativity A(v_i(u)) = v_i(A(u)), exact for multipliers
        const SpectralField au = detail::apply_table(u, sigma);
        for (int j = 0; j < vt.components; ++j) {
            const SpectralField a_v = detail::apply_table(detail::apply_table(u, vt.m[static_cast<std::size_t>(j)]), sigma);
            const SpectralField v_a = detail::apply_table(au, vt.m[static_cast<std::size_t>(j)]);
            rep.commutativity_residual = std::max(rep.commutativity_residual, l2_norm(a_v - v_a) / u_l2);
        }

        // (2) L2 bound of div v(u)
        std::vector<SpectralField> vu;
        for (int j = 0; j < vt.components; ++j) vu.push_back(detail::apply_table(u, vt.m[static_cast<std::size_t>(j)]));
        rep.div_ratio = std::max(rep.div_ratio, l2_norm(divergence(vu)) / u_l2);

        // (4) conservative-or-diffusive sign, by grid quadrature
        const RealField up = ifft(u);
        const RealField aup = ifft(au);
        double energy = 0.0;
        for (std::size_t i = 0; i < up.values.size(); ++i) energy += aup.values[i] * up.values[i];
        double w = 1.0;
        for (int d = 0; d < grid.dims; ++d) w *= grid.spacing();
        rep.energy_sign_max = std::max(rep.energy_sign_max, energy * w / (u_l2 * u_l2));

        // (5) commutator estimate sample constant
        const SpectralField leib_fg = detail::dealiased_product(u, g);
        SpectralField defect = detail::apply_table(leib_fg, sigma);
        const SpectralField f_ag = detail::dealiased_product(u, detail::apply_table(g, sigma));
        const SpectralField g_af = detail::dealiased_product(g, au);
        for (std::size_t i = 0; i < defect.coeffs.size(); ++i) defect.coeffs[i] -= f_ag.coeffs[i] + g_af.coeffs[i];
        const double denom = sobolev_norm(u, opt.kc + m_exp - 1.0) * sobolev_norm(g, opt.kc + m_exp - 1.0);
        if (denom < tiny)
            rep.degenerate = true;
        else
            rep.commutator_constant = std::max(rep.commutator_constant, sobolev_norm(defect, opt.kc) / denom);
    }

    const bool sign_ok = rep.classification == OperatorClass::dispersive
                             ? std::abs(rep.energy_sign_max) <= opt.tol
                             : rep.energy_sign_max <= opt.tol;
    rep.ok = rep.commutativity_residual <= opt.tol && sign_ok && std::isfinite(rep.commutator_constant);
    if (!rep.ok) {
        std::ostringstream os;
        os << "audit failed:";
        if (rep.commutativity_residual > opt.tol) os << " commutativity residual " << rep.commutativity_residual;
        if (!sign_ok) os << " sign condition max " << rep.energy_sign_max;
        if (!std::isfinite(rep.commutator_constant)) os << " commutator constant not finite";
        rep.diagnosis = os.str();
    }
    return rep;
}

}  // namespace torsplit
