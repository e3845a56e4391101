#pragma once

// Radix-2 complex FFT and the forward/inverse transform pair used everywhere.
// Convention: u_hat(k) = N_total^{-1} sum_x u(x) e^{-i k.x}, inverse without
// scaling, so ifft(fft(u)) == u to roundoff. Grids are powers of two by
// construction, so the iterative Cooley-Tukey kernel covers every case.

#include <map>
#include <memory>
#include <mutex>

#include "torsplit/grid.hpp"

namespace torsplit {
namespace detail {

struct FftPlan {
    int n;
    std::vector<Complex> twiddle;  // exp(-2 pi i j / n), j < n/2
    std::vector<int> bitrev;

    explicit FftPlan(int n_) : n(n_), twiddle(static_cast<std::size_t>(n_ / 2)), bitrev(static_cast<std::size_t>(n_)) {
        for (int j = 0; j < n / 2; ++j) {
            const double a = -two_pi * static_cast<double>(j) / n;
            twiddle[static_cast<std::size_t>(j)] = Complex(std::cos(a), std::sin(a));
        }
        bitrev[0] = 0;
        for (int i = 1; i < n; ++i) bitrev[static_cast<std::size_t>(i)] = (bitrev[static_cast<std::size_t>(i >> 1)] >> 1) | ((i & 1) ? n >> 1 : 0);
    }
};

inline const FftPlan& fft_plan(int n) {
    static std::mutex mtx;
    static std::map<int, std::unique_ptr<FftPlan>> plans;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = plans.find(n);
    if (it == plans.end()) it = plans.emplace(n, std::make_unique<FftPlan>(n)).first;
    return *it->second;
}

/// In-place DFT of length plan.n. inverse=true conjugates the twiddles (no scaling).
inline void fft_inplace(Complex* a, const FftPlan& plan, bool inverse) {
    const int n = plan.n;
    for (int i = 0; i < n; ++i) {
        const int j = plan.bitrev[static_cast<std::size_t>(i)];
        if (j > i) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const int half = len >> 1;
        const int stride = n / len;
        for (int base = 0; base < n; base += len) {
            for (int j = 0; j < half; ++j) {
                Complex w = plan.twiddle[static_cast<std::size_t>(j * stride)];
                if (inverse) w = std::conj(w);
                const Complex t = a[base + half + j] * w;
                a[base + half + j] = a[base + j] - t;
                a[base + j] += t;
            }
        }
    }
}

/// Transform along one axis of a row-major dims-dimensional cube.
inline void fft_axis(std::vector<Complex>& data, const GridSpec& g, int axis, bool inverse) {
    const FftPlan& plan = fft_plan(g.n);
    const std::size_t n = static_cast<std::size_t>(g.n);
    const std::size_t total = g.size();
    std::size_t stride = 1;
    for (int d = g.dims - 1; d > axis; --d) stride *= n;

    if (stride == 1) {
        for (std::size_t base = 0; base < total; base += n) fft_inplace(data.data() + base, plan, inverse);
        return;
    }
    std::vector<Complex> line(n);
    const std::size_t block = stride * n;
    for (std::size_t outer = 0; outer < total; outer += block) {
        for (std::size_t inner = 0; inner < stride; ++inner) {
            const std::size_t base = outer + inner;
            for (std::size_t m = 0; m < n; ++m) line[m] = data[base + m * stride];
            fft_inplace(line.data(), plan, inverse);
            for (std::size_t m = 0; m < n; ++m) data[base + m * stride] = line[m];
        }
    }
}

}  // namespace detail

/// Forward transform; rejects non-finite input.
inline SpectralField fft(const RealField& u) {
    if (!all_finite(u)) throw std::invalid_argument("fft: non-finite input values");
    SpectralField f(u.grid);
    for (std::size_t i = 0; i < u.values.size(); ++i) f.coeffs[i] = Complex(u.values[i], 0.0);
    for (int axis = 0; axis < u.grid.dims; ++axis) detail::fft_axis(f.coeffs, u.grid, axis, false);
    const double scale = 1.0 / static_cast<double>(u.grid.size());
    for (auto& c : f.coeffs) c *= scale;
    return f;
}

/// Inverse transform; the imaginary residue of a conjugate-symmetric input is
/// roundoff and is dropped.
inline RealField ifft(const SpectralField& f) {
    if (!all_finite(f)) throw std::invalid_argument("ifft: non-finite input coefficients");
    std::vector<Complex> work = f.coeffs;
    for (int axis = 0; axis < f.grid.dims; ++axis) detail::fft_axis(work, f.grid, axis, true);
    RealField u(f.grid);
    for (std::size_t i = 0; i < work.size(); ++i) u.values[i] = work[i].real();
    return u;
}

}  // namespace torsplit
