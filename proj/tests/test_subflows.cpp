#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"
#include "torsplit/subflows.hpp"

using namespace torsplit;
using ts_test::linf_error;

TEST_CASE("phi_a single-mode oracles", "[subflows][phi_a]") {
    SECTION("KdV dispersion translates: sin x -> sin(x - t)") {
        SpectralField u0 = ts_test::spectral_sin_x(64);
        SpectralField u = phi_a(0.4, u0, preset_kdv().a);
        REQUIRE(linf_error(u, [](const std::array<double, 3>& x) { return std::sin(x[0] - 0.4); }) <= 1e-12);
    }
    SECTION("heat decay: d_xx sends sin x to e^{-1} sin x at t = 1") {
        SpectralField u0 = ts_test::spectral_sin_x(64);
        ASpec heat(1, {ATerm{1.0, DerivativeTerm{{2, 0, 0}}}});
        SpectralField u = phi_a(1.0, u0, heat);
        REQUIRE(linf_error(u, [](const std::array<double, 3>& x) { return std::exp(-1.0) * std::sin(x[0]); }) <= 1e-13);
    }
    SECTION("t = 0 is the bitwise identity") {
        SpectralField u0 = fft(random_band_limited_field(GridSpec(1, 64), 4, 3.0));
        SpectralField u = phi_a(0.0, u0, preset_kdv().a);
        REQUIRE(u.coeffs == u0.coeffs);
    }
}

TEST_CASE("phi_a semigroup property", "[subflows][phi_a][property]") {
    GridSpec g(1, 64);
    SpectralField u0 = fft(random_band_limited_field(g, 14, 3.0));
    for (const ASpec& a : {preset_kdv().a, preset_viscous_burgers(2.0).a}) {
        SpectralField once = phi_a(0.7, u0, a);
        SpectralField twice = phi_a(0.4, phi_a(0.3, u0, a), a);
        REQUIRE(l2_norm(once - twice) <= 1e-12 * std::max(1.0, l2_norm(once)));
    }
}

TEST_CASE("phi_a isometry and contraction branches", "[subflows][phi_a][property]") {
    GridSpec g(1, 64);
    SpectralField u0 = fft(random_band_limited_field(g, 6, 3.0));

    SECTION("dispersive: |u_hat(k)| preserved mode by mode") {
        SpectralField u = phi_a(0.9, u0, preset_kawahara().a);
        for (std::size_t i = 0; i < u.coeffs.size(); ++i) {
            const double before = std::abs(u0.coeffs[i]);
            REQUIRE(std::abs(std::abs(u.coeffs[i]) - before) <= 1e-14 * std::max(before, 1e-30));
        }
    }
    SECTION("diffusive: no H^s norm ever increases") {
        SpectralField u = phi_a(0.3, u0, preset_viscous_burgers(1.5).a);
        for (double s : {0.0, 1.0, 2.0, 4.0, 6.0}) REQUIRE(sobolev_norm(u, s) <= sobolev_norm(u0, s));
    }
}

TEST_CASE("phi_a rejects what it must", "[subflows][phi_a]") {
    GridSpec g(1, 32);
    SpectralField u0(g);
    ASpec rejected(1, {ATerm{1.0, DerivativeTerm{{4, 0, 0}}}});
    REQUIRE_THROWS_AS(phi_a(0.1, u0, rejected), std::invalid_argument);
    // negative time amplifies diffusive operators, but reverses dispersive ones
    REQUIRE_THROWS_AS(phi_a(-0.1, u0, preset_viscous_burgers(2.0).a), std::invalid_argument);
    REQUIRE_NOTHROW(phi_a(-0.1, u0, preset_kdv().a));
    SpectralField s = ts_test::spectral_sin_x(32);
    SpectralField back = phi_a(-0.4, phi_a(0.4, s, preset_kdv().a), preset_kdv().a);
    REQUIRE(l2_norm(back - s) <= 1e-13);
}

TEST_CASE("b_rhs values", "[subflows][b_rhs]") {
    SECTION("constants are fixed points (Burgers and convolution)") {
        GridSpec g1(1, 32);
        SpectralField c1 = fft(sample_field(g1, [](const std::array<double, 3>&) { return 2.5; }));
        REQUIRE(linf_error(b_rhs(c1, VSpec(BurgersVelocity{1.0})), [](const std::array<double, 3>&) { return 0.0; }) <=
                1e-13);
        GridSpec g2(2, 32);
        SpectralField c2 = fft(sample_field(g2, [](const std::array<double, 3>&) { return 2.5; }));
        REQUIRE(linf_error(b_rhs(c2, VSpec(ConvolutionVelocity{})), [](const std::array<double, 3>&) { return 0.0; }) <=
                1e-12);
    }
    SECTION("u = sin x, Burgers(1): -(sin^2 x)_x = -sin 2x") {
        SpectralField u = ts_test::spectral_sin_x(64);
        REQUIRE(linf_error(b_rhs(u, VSpec(BurgersVelocity{1.0})),
                           [](const std::array<double, 3>& x) { return -std::sin(2.0 * x[0]); }) <= 1e-12);
    }
    SECTION("the mean mode of b_rhs is exactly zero") {
        GridSpec g(2, 32);
        SpectralField u = fft(random_band_limited_field(g, 3, 2.0));
        SpectralField r = b_rhs(u, VSpec(SqgVelocity{1.5}));
        REQUIRE(r.mean_mode() == Complex(0.0, 0.0));
    }
}

TEST_CASE("phi_b on constants is the identity", "[subflows][phi_b]") {
    GridSpec g(1, 32);
    SpectralField c = fft(sample_field(g, [](const std::array<double, 3>&) { return 1.25; }));
    BFlowControl ctrl;
    SpectralField u = phi_b(0.7, c, VSpec(BurgersVelocity{1.0}), ctrl);
    REQUIRE(linf_error(u, [](const std::array<double, 3>&) { return 1.25; }) <= 1e-13);
}

TEST_CASE("phi_b matches the characteristics oracle", "[subflows][phi_b]") {
    GridSpec g(1, 256);
    SpectralField u0 = ts_test::spectral_sin_x(256);
    // u_t + (u^2)_x = 0 from u0 = sin x stays smooth until t = 1/2
    SpectralField u = phi_b(0.2, u0, VSpec(BurgersVelocity{1.0}));
    RealField oracle = ts_test::burgers_characteristics_oracle(g, 1.0, 0.2);
    RealField up = ifft(u);
    double worst = 0.0;
    for (std::size_t i = 0; i < up.values.size(); ++i) worst = std::max(worst, std::abs(up.values[i] - oracle.values[i]));
    REQUIRE(worst <= 1e-6);
}

TEST_CASE("phi_b substep self-convergence has RK4 order", "[subflows][phi_b]") {
    GridSpec g(1, 256);
    SpectralField u0 = ts_test::spectral_sin_x(256);
    const VSpec v(BurgersVelocity{1.0});
    const detail::VelocityTable vt = detail::velocity_table(v, g);
    const double t = 0.2;
    const double guard = 4.0, threshold = 1e9;

    SpectralField ref = detail::rk4_transport(u0, vt, t, 2048, guard, threshold);
    std::vector<std::pair<double, double>> rows;
    for (long n_sub : {16L, 32L, 64L, 128L}) {
        SpectralField u = detail::rk4_transport(u0, vt, t, n_sub, guard, threshold);
        rows.emplace_back(t / static_cast<double>(n_sub), l2_norm(u - ref));
    }
    // slope of log error vs log tau
    double slope_sum = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        slope_sum += std::log(rows[i - 1].second / rows[i].second) / std::log(rows[i - 1].first / rows[i].first);
    const double slope = slope_sum / static_cast<double>(rows.size() - 1);
    REQUIRE(slope == Catch::Approx(4.0).margin(0.3));
}

TEST_CASE("phi_b conserves the mean bitwise", "[subflows][phi_b][property]") {
    GridSpec g(1, 128);
    RealField u0p = random_band_limited_field(g, 10, 4.0, /*zero_mean=*/false);
    SpectralField u0 = fft(u0p);
    SpectralField u = phi_b(0.1, u0, VSpec(BurgersVelocity{1.0}));
    REQUIRE(u.mean_mode() == u0.mean_mode());
}

TEST_CASE("phi_b guard and substep errors", "[subflows][phi_b]") {
    GridSpec g(1, 128);
    SpectralField u0 = ts_test::spectral_sin_x(128);

    SECTION("an unreachable threshold trips with diagnostics") {
        BFlowControl ctrl;
        ctrl.blowup_threshold = 1e-6;  // below ||u0||_{H^4}
        try {
            phi_b(0.1, u0, VSpec(BurgersVelocity{1.0}), ctrl);
            FAIL("expected GuardTripError");
        } catch (const GuardTripError& e) {
            REQUIRE(e.threshold == 1e-6);
            REQUIRE(e.norm_value > e.threshold);
            REQUIRE(e.time_reached > 0.0);
        }
    }
    SECTION("inviscid Burgers past the gradient catastrophe trips the default guard") {
        // t* = 1/2 for u0 = sin x; integrating to t = 2 must not return silently
        BFlowControl ctrl;
        ctrl.max_substeps = 1 << 22;
        REQUIRE_THROWS_AS(phi_b(2.0, u0, VSpec(BurgersVelocity{1.0}), ctrl), GuardTripError);
    }
    SECTION("max_substeps is enforced") {
        BFlowControl ctrl;
        ctrl.max_substeps = 3;
        REQUIRE_THROWS_AS(phi_b(1.0, u0, VSpec(BurgersVelocity{1.0}), ctrl), SubstepLimitError);
    }
    SECTION("negative time is rejected") {
        REQUIRE_THROWS_AS(phi_b(-0.1, u0, VSpec(BurgersVelocity{1.0})), std::invalid_argument);
    }
    SECTION("t = 0 returns u0 unchanged") {
        SpectralField u = phi_b(0.0, u0, VSpec(BurgersVelocity{1.0}));
        REQUIRE(u.coeffs == u0.coeffs);
    }
    SECTION("control validation") {
        BFlowControl bad;
        bad.substep_cap = 0.0;
        REQUIRE_THROWS_AS(phi_b(0.1, u0, VSpec(BurgersVelocity{1.0}), bad), std::invalid_argument);
    }
}
