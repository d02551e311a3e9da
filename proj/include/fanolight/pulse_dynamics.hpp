#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "fanolight/dispersion.hpp"
#include "fanolight/spectral.hpp"

namespace fanolight {

// One spatial-frequency mode of the coupled field/spin-wave pair. sigma21 is
// the collective (sqrt(N)-scaled) coherence amplitude, which closes the
// equations in terms of n_g2 and omega_ctrl2 alone.
struct ModeState {
    double k = 0.0;
    cplx alpha;
    cplx sigma21;
};

namespace detail {

// d/dt [alpha, sigma] = A [alpha, sigma] for one k, control phase gauged real.
struct ModeMatrix {
    cplx a00, a01, a10, a11;
};

inline ModeMatrix mode_matrix(double k, const MediumParams& mp) {
    const cplx i1(0.0, 1.0);
    const double coupling = std::sqrt(mp.n_g2 * mp.omega_ctrl2);
    ModeMatrix m;
    m.a00 = -i1 * k * mp.c - mp.n_g2 * mp.response.beta1;
    m.a01 = -coupling * mp.response.beta2;
    m.a10 = -coupling * mp.response.beta2;
    m.a11 = i1 * cplx(mp.nu, 0.5 * mp.gamma_c) - mp.omega_ctrl2 * mp.response.beta1L;
    return m;
}

struct ModePropagator {
    cplx omega_p, omega_m;
    cplx wf_p, wf_m;  // field weights, 1/2 (1 +/- (k - k0')/g)
    cplx ws_p, ws_m;  // coherence weights, mirrored
    cplx cf;          // cross coupling, -(i/c) beta2 sqrt(n_g2 omega_ctrl2)/g
};

// Two-wave decomposition of the mode evolution. The diagonal weights use
// k0_tilde_prime in both rows; that choice makes the pair of waves the exact
// spectral projectors of the mode matrix for any nu, gamma_c (the variant
// with k0_tilde in the field row fails the integration oracle once the
// two-photon defect is nonzero).
inline ModePropagator mode_propagator(double k, const Wavenumbers& wn, const MediumParams& mp,
                                      cplx g) {
    if (std::abs(g) < 1e-13 * (std::abs(k) + wn_scale(wn)))
        throw singular_error("mode evolution: branch collision, sqrt((k-k1)(k-k2)) vanishes");
    ModePropagator pr;
    pr.omega_p = 0.5 * mp.c * (k - wn.k0 + g);
    pr.omega_m = 0.5 * mp.c * (k - wn.k0 - g);
    const cplx x = (k - wn.k0_tilde_prime) / g;
    pr.wf_p = 0.5 * (1.0 + x);
    pr.wf_m = 0.5 * (1.0 - x);
    pr.ws_p = 0.5 * (1.0 - x);
    pr.ws_m = 0.5 * (1.0 + x);
    pr.cf = -cplx(0.0, 1.0) / mp.c * mp.response.beta2 * std::sqrt(mp.n_g2 * mp.omega_ctrl2) / g;
    return pr;
}

}  // namespace detail

// Closed-form evolution of one mode over time t (noise-free). Exact for the
// linear system; the total is independent of the branch labelling.
inline ModeState evolve_mode_analytic(const ModeState& s, const MediumParams& mp, double t,
                                      const Wavenumbers& wn, cplx g) {
    const auto pr = detail::mode_propagator(s.k, wn, mp, g);
    const cplx ep = std::exp(-cplx(0.0, 1.0) * pr.omega_p * t);
    const cplx em = std::exp(-cplx(0.0, 1.0) * pr.omega_m * t);
    ModeState out;
    out.k = s.k;
    out.alpha = (pr.wf_p * s.alpha + pr.cf * s.sigma21) * ep +
                (pr.wf_m * s.alpha - pr.cf * s.sigma21) * em;
    out.sigma21 = (pr.ws_p * s.sigma21 + pr.cf * s.alpha) * ep +
                  (pr.ws_m * s.sigma21 - pr.cf * s.alpha) * em;
    return out;
}

inline ModeState evolve_mode_analytic(const ModeState& s, const MediumParams& mp, double t) {
    const Wavenumbers wn = wavenumbers(mp);
    return evolve_mode_analytic(s, mp, t, wn, std::sqrt((s.k - wn.k1) * (s.k - wn.k2)));
}

// Slow-branch part only: the omega_plus projector applied to the state. g must
// carry the sweep-consistent branch label.
inline ModeState evolve_mode_slow(const ModeState& s, const MediumParams& mp, double t,
                                  const Wavenumbers& wn, cplx g) {
    const auto pr = detail::mode_propagator(s.k, wn, mp, g);
    const cplx ep = std::exp(-cplx(0.0, 1.0) * pr.omega_p * t);
    ModeState out;
    out.k = s.k;
    out.alpha = (pr.wf_p * s.alpha + pr.cf * s.sigma21) * ep;
    out.sigma21 = (pr.ws_p * s.sigma21 + pr.cf * s.alpha) * ep;
    return out;
}

// Classical fixed-step 4th-order integration of the same mode equations,
// used as the independent check on the closed form. dt must resolve the
// fastest eigenfrequency: dt * max|omega| < 0.1.
inline ModeState ode_oracle(const ModeState& s, const MediumParams& mp, double t, double dt) {
    if (!(dt > 0.0)) throw validation_error("ode_oracle: dt must be > 0");
    const Wavenumbers wn = wavenumbers(mp);
    const auto f = omega_pm(s.k, wn, mp.c, std::sqrt((s.k - wn.k1) * (s.k - wn.k2)));
    const double wmax = std::max(std::abs(f.omega_plus), std::abs(f.omega_minus));
    if (dt * wmax >= 0.1)
        throw validation_error("ode_oracle: step size too large for the fastest eigenvalue");
    if (t == 0.0) return s;

    const auto m = detail::mode_matrix(s.k, mp);
    const auto deriv = [&m](cplx a, cplx g) {
        return std::pair<cplx, cplx>{m.a00 * a + m.a01 * g, m.a10 * a + m.a11 * g};
    };

    const std::size_t n = static_cast<std::size_t>(std::ceil(t / dt));
    const double h = t / static_cast<double>(n);
    cplx a = s.alpha, g = s.sigma21;
    for (std::size_t i = 0; i < n; ++i) {
        const auto [k1a, k1g] = deriv(a, g);
        const auto [k2a, k2g] = deriv(a + 0.5 * h * k1a, g + 0.5 * h * k1g);
        const auto [k3a, k3g] = deriv(a + 0.5 * h * k2a, g + 0.5 * h * k2g);
        const auto [k4a, k4g] = deriv(a + h * k3a, g + h * k3g);
        a += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        g += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
    }
    return ModeState{s.k, a, g};
}

enum class Branch { both, slow_only };

namespace detail {

inline void check_spectral_tail(const KSpaceField& f, double tail_tol) {
    const double k_nyq = std::abs(f.k[f.size() / 2]);
    double total = 0.0, tail = 0.0;
    for (std::size_t m = 0; m < f.size(); ++m) {
        const double e = std::norm(f.alpha[m]) + std::norm(f.sigma21[m]);
        total += e;
        if (std::abs(f.k[m]) >= 0.5 * k_nyq) tail += e;
    }
    if (total == 0.0) throw validation_error("propagate_pulse: empty pulse");
    if (tail > tail_tol * total)
        throw numerical_error("propagate_pulse: spectral tail energy " + std::to_string(tail / total) +
                              " of total beyond half-Nyquist; refine the z grid");
}

}  // namespace detail

// Evolve a sampled pulse by per-mode closed-form propagation. slow_only keeps
// the omega_plus components; the fast pair is strongly damped in the memory
// regime and is dropped there.
inline PulseState propagate_pulse(const PulseState& pulse, const MediumParams& mp, double t,
                                  Branch branch = Branch::both, double tail_tol = 1e-6) {
    KSpaceField f = to_kspace(pulse);
    detail::check_spectral_tail(f, tail_tol);
    const Wavenumbers wn = wavenumbers(mp);

    if (branch == Branch::both) {
        for (std::size_t m = 0; m < f.size(); ++m) {
            const cplx g = std::sqrt((f.k[m] - wn.k1) * (f.k[m] - wn.k2));
            const ModeState out =
                evolve_mode_analytic({f.k[m], f.alpha[m], f.sigma21[m]}, mp, t, wn, g);
            f.alpha[m] = out.alpha;
            f.sigma21[m] = out.sigma21;
        }
    } else {
        const auto order = k_sorted_indices(f);
        std::vector<double> ks(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) ks[i] = f.k[order[i]];
        const auto freqs = omega_pm_sweep(ks, wn, mp.c);
        for (std::size_t i = 0; i < order.size(); ++i) {
            const std::size_t m = order[i];
            const ModeState out =
                evolve_mode_slow({f.k[m], f.alpha[m], f.sigma21[m]}, mp, t, wn, freqs[i].g);
            f.alpha[m] = out.alpha;
            f.sigma21[m] = out.sigma21;
        }
    }
    f.time += t;
    return to_zspace(f);
}

}  // namespace fanolight
