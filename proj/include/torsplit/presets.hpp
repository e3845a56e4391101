#pragma once

// The shipped equation catalog and named initial fields.
//
//   kdv                  u_t + (u^2)_x = u_xxx                        (1D)
//   viscous_burgers(a)   u_t + (u^2)_x = -(-dxx)^{a/2} u, a in [1,2]  (1D)
//   kawahara             u_t + (u^2)_x = -u_xxx + u_xxxxx             (1D)
//   sqg(a,b)             u_t + div(u v) = -(-Lap)^{a/2} u,
//                        v = curl(-Lap)^{-b/2} u, a,b in [1,2]        (2D)
//   aggregation(a,K)     u_t + div(u v) = -(-Lap)^{a/2} u, a in (1,2],
//                        v = grad Phi * u                             (2D/3D)

#include "torsplit/operators.hpp"

namespace torsplit {

struct Preset {
    std::string id;
    int dims = 1;
    ASpec a;
    VSpec v;
};

inline Preset preset_kdv() {
    return {"kdv", 1, ASpec(1, {ATerm{1.0, DerivativeTerm{{3, 0, 0}}}}), VSpec(BurgersVelocity{1.0})};
}

inline Preset preset_viscous_burgers(double alpha) {
    if (alpha < 1.0 || alpha > 2.0)
        throw std::invalid_argument("viscous_burgers: alpha must lie in [1, 2]; weaker dissipation is "
                                    "constructible only through an explicit operator");
    return {"viscous_burgers", 1, ASpec(1, {ATerm{1.0, FractionalLaplacianTerm{alpha}}}),
            VSpec(BurgersVelocity{1.0})};
}

inline Preset preset_kawahara() {
    return {"kawahara", 1,
            ASpec(1, {ATerm{-1.0, DerivativeTerm{{3, 0, 0}}}, ATerm{1.0, DerivativeTerm{{5, 0, 0}}}}),
            VSpec(BurgersVelocity{1.0})};
}

inline Preset preset_sqg(double alpha, double beta) {
    if (alpha < 1.0 || alpha > 2.0) throw std::invalid_argument("sqg: alpha must lie in [1, 2]");
    return {"sqg", 2, ASpec(2, {ATerm{1.0, FractionalLaplacianTerm{alpha}}}), VSpec(SqgVelocity{beta})};
}

inline Preset preset_aggregation(double alpha, ConvolutionVelocity::Kernel kernel, int dims = 2) {
    if (!(alpha > 1.0) || alpha > 2.0) throw std::invalid_argument("aggregation: alpha must lie in (1, 2]");
    if (dims < 2) throw std::invalid_argument("aggregation: dims must be >= 2");
    return {"aggregation", dims, ASpec(dims, {ATerm{1.0, FractionalLaplacianTerm{alpha}}}),
            VSpec(ConvolutionVelocity{kernel, nullptr})};
}

/// Named initial data for the harness.
///   sin       sin(x1)                      (1D)
///   two_mode  sin(x) sin(y) + cos(y)       (2D)
///   bump      prod_j exp(cos(x_j) - 1)     (any dims)
inline RealField named_initial_field(const std::string& name, const GridSpec& g) {
    if (name == "sin") {
        if (g.dims != 1) throw std::invalid_argument("u0 'sin' is one-dimensional");
        return sample_field(g, [](const std::array<double, 3>& x) { return std::sin(x[0]); });
    }
    if (name == "two_mode") {
        if (g.dims != 2) throw std::invalid_argument("u0 'two_mode' is two-dimensional");
        return sample_field(g, [](const std::array<double, 3>& x) {
            return std::sin(x[0]) * std::sin(x[1]) + std::cos(x[1]);
        });
    }
    if (name == "bump") {
        return sample_field(g, [&](const std::array<double, 3>& x) {
            double v = 1.0;
            for (int d = 0; d < g.dims; ++d) v *= std::exp(std::cos(x[static_cast<std::size_t>(d)]) - 1.0);
            return v;
        });
    }
    throw std::invalid_argument("unknown named initial field '" + name + "' (have: sin, two_mode, bump)");
}

}  // namespace torsplit
