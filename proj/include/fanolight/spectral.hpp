#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "fanolight/errors.hpp"

namespace fanolight {

using cplx = std::complex<double>;

namespace detail {

// In-place iterative radix-2 transform; sign = -1 forward, +1 inverse.
// Unnormalized; callers apply 1/n on the forward direction.
inline void fft_radix2(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    if (n == 0 || !std::has_single_bit(n))
        throw validation_error("fft: length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cplx u = a[i + j];
                const cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

}  // namespace detail

// Sampled field amplitude and lower-level coherence on a uniform periodic
// grid z_j = j L/n over [0, L).
struct PulseState {
    double length = 0.0;
    std::vector<cplx> alpha;
    std::vector<cplx> sigma21;
    double time = 0.0;

    std::size_t size() const { return alpha.size(); }
    double dz() const { return length / static_cast<double>(alpha.size()); }
    double z(std::size_t j) const { return static_cast<double>(j) * dz(); }

    void validate() const {
        if (!(length > 0.0)) throw validation_error("PulseState: domain length must be > 0");
        if (alpha.size() != sigma21.size())
            throw validation_error("PulseState: alpha and sigma21 sizes differ");
        if (alpha.empty() || !std::has_single_bit(alpha.size()))
            throw validation_error("PulseState: grid size must be a nonzero power of two");
    }
};

inline PulseState gaussian_pulse(double length, std::size_t n, double width, double center,
                                 cplx amplitude = cplx(1.0)) {
    if (!(width > 0.0)) throw validation_error("gaussian_pulse: width must be > 0");
    PulseState p;
    p.length = length;
    p.alpha.resize(n);
    p.sigma21.assign(n, cplx(0.0));
    for (std::size_t j = 0; j < n; ++j) {
        const double dzv = length / static_cast<double>(n);
        const double d = static_cast<double>(j) * dzv - center;
        p.alpha[j] = amplitude * std::exp(-d * d / (2.0 * width * width));
    }
    p.validate();
    return p;
}

// Mode decomposition in FFT order: k_m = 2 pi m / L for m in [0, n/2) and
// k_m = 2 pi (m - n)/L for the upper half. Forward transform carries 1/n so
// mode amplitudes approximate the continuous spectrum coefficients.
struct KSpaceField {
    double length = 0.0;
    std::vector<double> k;
    std::vector<cplx> alpha;
    std::vector<cplx> sigma21;
    double time = 0.0;

    std::size_t size() const { return alpha.size(); }
};

inline KSpaceField to_kspace(const PulseState& p) {
    p.validate();
    KSpaceField f;
    f.length = p.length;
    f.time = p.time;
    f.alpha = p.alpha;
    f.sigma21 = p.sigma21;
    detail::fft_radix2(f.alpha, -1);
    detail::fft_radix2(f.sigma21, -1);
    const std::size_t n = p.size();
    const double inv = 1.0 / static_cast<double>(n);
    const double dk = 2.0 * std::numbers::pi / p.length;
    f.k.resize(n);
    for (std::size_t m = 0; m < n; ++m) {
        f.alpha[m] *= inv;
        f.sigma21[m] *= inv;
        const auto signed_m = (m < n / 2) ? static_cast<double>(m)
                                          : static_cast<double>(m) - static_cast<double>(n);
        f.k[m] = dk * signed_m;
    }
    return f;
}

inline PulseState to_zspace(const KSpaceField& f) {
    PulseState p;
    p.length = f.length;
    p.time = f.time;
    p.alpha = f.alpha;
    p.sigma21 = f.sigma21;
    detail::fft_radix2(p.alpha, +1);
    detail::fft_radix2(p.sigma21, +1);
    p.validate();
    return p;
}

inline double field_energy(const std::vector<cplx>& a) {
    double s = 0.0;
    for (cplx v : a) s += std::norm(v);
    return s;
}

// Indices of the FFT-ordered modes sorted by increasing k.
inline std::vector<std::size_t> k_sorted_indices(const KSpaceField& f) {
    std::vector<std::size_t> idx(f.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&f](std::size_t a, std::size_t b) { return f.k[a] < f.k[b]; });
    return idx;
}

}  // namespace fanolight
