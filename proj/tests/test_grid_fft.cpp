#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"
#include "torsplit/spectral.hpp"

using namespace torsplit;
using ts_test::linf_error;

TEST_CASE("grid validation", "[grid]") {
    REQUIRE_NOTHROW(GridSpec(1, 8));
    REQUIRE_NOTHROW(GridSpec(3, 16));
    REQUIRE_THROWS_AS(GridSpec(0, 16), std::invalid_argument);
    REQUIRE_THROWS_AS(GridSpec(4, 16), std::invalid_argument);
    REQUIRE_THROWS_AS(GridSpec(1, 12), std::invalid_argument);  // not a power of two
    REQUIRE_THROWS_AS(GridSpec(1, 4), std::invalid_argument);   // too small
    REQUIRE(GridSpec(2, 32).size() == 1024);
    REQUIRE(GridSpec(2, 8).volume() == Catch::Approx(two_pi * two_pi));
}

TEST_CASE("wavenumber convention covers -n/2 .. n/2-1", "[grid]") {
    const int n = 16;
    REQUIRE(wavenumber(0, n) == 0);
    REQUIRE(wavenumber(7, n) == 7);
    REQUIRE(wavenumber(8, n) == -8);
    REQUIRE(wavenumber(15, n) == -1);
    for (int i = 0; i < n; ++i) REQUIRE(bin_of(wavenumber(i, n), n) == i);
}

TEST_CASE("transform of a constant field", "[fft]") {
    GridSpec g(1, 16);
    RealField u = sample_field(g, [](const std::array<double, 3>&) { return 1.0; });
    SpectralField f = fft(u);
    REQUIRE(std::abs(f.coeffs[0] - Complex(1.0, 0.0)) < 1e-15);
    for (std::size_t i = 1; i < f.coeffs.size(); ++i) REQUIRE(std::abs(f.coeffs[i]) < 1e-15);
}

TEST_CASE("transform of sin x pins the convention", "[fft]") {
    SpectralField f = ts_test::spectral_sin_x(16);
    // sin x = -(i/2) e^{ix} + (i/2) e^{-ix}
    REQUIRE(std::abs(f.coeffs[bin_of(1, 16)] - Complex(0.0, -0.5)) < 1e-14);
    REQUIRE(std::abs(f.coeffs[bin_of(-1, 16)] - Complex(0.0, 0.5)) < 1e-14);
    for (int k = -8; k < 8; ++k) {
        if (k == 1 || k == -1) continue;
        REQUIRE(std::abs(f.coeffs[static_cast<std::size_t>(bin_of(k, 16))]) < 1e-14);
    }
}

TEST_CASE("round trip is the identity on random band-limited fields", "[fft]") {
    for (int dims = 1; dims <= 3; ++dims) {
        GridSpec g(dims, dims == 3 ? 16 : 32);
        RealField u = random_band_limited_field(g, 42 + static_cast<std::uint64_t>(dims), 3.0);
        RealField back = ifft(fft(u));
        double worst = 0.0;
        for (std::size_t i = 0; i < u.values.size(); ++i) worst = std::max(worst, std::abs(u.values[i] - back.values[i]));
        REQUIRE(worst <= 1e-12);
    }
}

TEST_CASE("transforms reject non-finite input", "[fft]") {
    GridSpec g(1, 8);
    RealField u(g);
    u.values[3] = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(fft(u), std::invalid_argument);
    SpectralField f(g);
    f.coeffs[2] = Complex(std::numeric_limits<double>::infinity(), 0.0);
    REQUIRE_THROWS_AS(ifft(f), std::invalid_argument);
}

TEST_CASE("Parseval: quadrature L2 equals spectral L2", "[fft][norm]") {
    for (int dims = 1; dims <= 2; ++dims) {
        GridSpec g(dims, 32);
        RealField u = random_band_limited_field(g, 9, 2.5);
        const double quad = quadrature_l2(u);
        const double spec = sobolev_norm(fft(u), 0.0);
        REQUIRE(std::abs(quad - spec) <= 1e-12 * quad);
    }
}

TEST_CASE("spectral derivative single-mode oracles", "[derivative]") {
    GridSpec g(1, 16);
    SpectralField f = ts_test::spectral_sin_x(16);

    SECTION("d/dx sin = cos") {
        REQUIRE(linf_error(spectral_derivative(f, {1, 0, 0}),
                           [](const std::array<double, 3>& x) { return std::cos(x[0]); }) <= 1e-13);
    }
    SECTION("zeroth derivative is the identity") {
        SpectralField d = spectral_derivative(f, {0, 0, 0});
        REQUIRE(ts_test::linf_diff(d, f) == 0.0);
    }
    SECTION("third derivative of sin 2x: analytic factor (ik)^3, k = 2") {
        SpectralField f2 = fft(sample_field(g, [](const std::array<double, 3>& x) { return std::sin(2.0 * x[0]); }));
        REQUIRE(linf_error(spectral_derivative(f2, {3, 0, 0}),
                           [](const std::array<double, 3>& x) { return -8.0 * std::cos(2.0 * x[0]); }) <= 1e-12);
    }
    SECTION("multi-index rejects use beyond dims") {
        REQUIRE_THROWS_AS(spectral_derivative(f, {0, 1, 0}), std::invalid_argument);
        REQUIRE_THROWS_AS(spectral_derivative(f, {-1, 0, 0}), std::invalid_argument);
    }
}

TEST_CASE("derivative is linear", "[derivative]") {
    GridSpec g(1, 64);
    SpectralField f = fft(random_band_limited_field(g, 3, 3.0));
    SpectralField h = fft(random_band_limited_field(g, 4, 3.0));
    SpectralField lhs = spectral_derivative(2.5 * f + (-1.25) * h, {2, 0, 0});
    SpectralField rhs = 2.5 * spectral_derivative(f, {2, 0, 0}) + (-1.25) * spectral_derivative(h, {2, 0, 0});
    REQUIRE(ts_test::linf_diff(lhs, rhs) <= 1e-12);
}

TEST_CASE("derivative zeroes the Nyquist mode for odd orders", "[derivative]") {
    GridSpec g(1, 16);
    SpectralField f(g);
    f.coeffs[static_cast<std::size_t>(bin_of(-8, 16))] = Complex(1.0, 0.0);
    SpectralField d1 = spectral_derivative(f, {1, 0, 0});
    REQUIRE(std::abs(d1.coeffs[static_cast<std::size_t>(bin_of(-8, 16))]) == 0.0);
    SpectralField d2 = spectral_derivative(f, {2, 0, 0});
    REQUIRE(std::abs(d2.coeffs[static_cast<std::size_t>(bin_of(-8, 16))]) == 64.0);
}

TEST_CASE("dealias keeps and cuts the right modes", "[dealias]") {
    GridSpec g(1, 16);

    SECTION("sin x survives (|k| = 1 <= 5)") {
        SpectralField f(g);  // exact coefficients of sin x
        f.coeffs[static_cast<std::size_t>(bin_of(1, 16))] = Complex(0.0, -0.5);
        f.coeffs[static_cast<std::size_t>(bin_of(-1, 16))] = Complex(0.0, 0.5);
        REQUIRE(ts_test::linf_diff(dealias(f), f) == 0.0);
    }
    SECTION("mode k = 7 is cut (7 > 16/3)") {
        SpectralField f(g);
        f.coeffs[static_cast<std::size_t>(bin_of(7, 16))] = Complex(1.0, 0.0);
        f.coeffs[static_cast<std::size_t>(bin_of(-7, 16))] = Complex(1.0, 0.0);
        SpectralField d = dealias(f);
        for (const Complex& c : d.coeffs) REQUIRE(std::abs(c) == 0.0);
    }
    SECTION("sin(5x)^2 formed physically collapses to the constant 1/2") {
        RealField s5 = sample_field(g, [](const std::array<double, 3>& x) { return std::sin(5.0 * x[0]); });
        RealField prod(g);
        for (std::size_t i = 0; i < prod.values.size(); ++i) prod.values[i] = s5.values[i] * s5.values[i];
        SpectralField d = dealias(fft(prod));
        // 1/2 - cos(10x)/2: k = +-10 exceeds the cutoff (and its alias -6 does too)
        REQUIRE(linf_error(d, [](const std::array<double, 3>&) { return 0.5; }) <= 1e-14);
    }
    SECTION("projection: dealias of dealias is dealias, exactly") {
        SpectralField f = fft(random_band_limited_field(GridSpec(2, 32), 5, 2.0));
        SpectralField once = dealias(f);
        REQUIRE(ts_test::linf_diff(dealias(once), once) == 0.0);
    }
}

TEST_CASE("sobolev norm values", "[norm]") {
    SpectralField f = ts_test::spectral_sin_x(16);
    REQUIRE(sobolev_norm(f, 0.0) == Catch::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
    // hand evaluation: multiplier (1+1)^1 on k = +-1 gives sqrt(2 pi)
    REQUIRE(sobolev_norm(f, 1.0) == Catch::Approx(std::sqrt(two_pi)).epsilon(1e-12));
    SpectralField zero(GridSpec(1, 16));
    for (double s : {0.0, 1.5, 4.0}) REQUIRE(sobolev_norm(zero, s) == 0.0);
    REQUIRE_THROWS_AS(sobolev_norm(f, -1.0), std::invalid_argument);
}

TEST_CASE("sobolev norm is monotone in the index", "[norm]") {
    SpectralField f = fft(random_band_limited_field(GridSpec(2, 32), 11, 2.0));
    double prev = sobolev_norm(f, 0.0);
    for (double s : {0.5, 1.0, 2.0, 3.5, 6.0}) {
        const double cur = sobolev_norm(f, s);
        REQUIRE(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("random band-limited field contract", "[random]") {
    GridSpec g(1, 64);

    SECTION("deterministic in (grid, seed, decay), bitwise") {
        RealField a = random_band_limited_field(g, 123, 6.0);
        RealField b = random_band_limited_field(g, 123, 6.0);
        REQUIRE(a.values == b.values);
    }
    SECTION("band limit and finite H^4 norm at decay 6") {
        SpectralField f = fft(random_band_limited_field(g, 17, 6.0));
        REQUIRE(std::isfinite(sobolev_norm(f, 4.0)));
        detail::for_each_mode(g, [&](std::size_t flat, const std::array<int, 3>& k) {
            if (static_cast<double>(k[0]) * k[0] > (g.n / 4.0) * (g.n / 4.0))
                REQUIRE(std::abs(f.coeffs[flat]) <= 1e-15);  // above n/4: only FFT roundoff
        });
    }
    SECTION("different seeds give L2-distinct fields") {
        SpectralField a = fft(random_band_limited_field(g, 1, 6.0));
        SpectralField b = fft(random_band_limited_field(g, 2, 6.0));
        REQUIRE(l2_norm(a - b) > 1e-6);
    }
    SECTION("zero mean by default, conjugate symmetric, real") {
        GridSpec g2(2, 32);
        RealField u = random_band_limited_field(g2, 77, 4.0);
        SpectralField f = fft(u);
        REQUIRE(std::abs(f.mean_mode()) <= 1e-16);
        REQUIRE(conjugate_symmetry_defect(f) <= 1e-14);
        REQUIRE(all_finite(u));
    }
    SECTION("decay must be positive") {
        REQUIRE_THROWS_AS(random_band_limited_field(g, 1, 0.0), std::invalid_argument);
    }
}
