#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "fanolight/exciton_fano.hpp"

namespace fanolight {

// Complex response functions of the dressed medium at one signal frequency.
// All are dimensionless multiples of pi; far from every resonance beta1,
// beta1L, beta2 -> pi and b -> 0. f is the relative mismatch response
// b conj(beta1)/|beta1|^2.
struct ResponsePoint {
    cplx beta1, beta1L, beta2, b, f;
};

namespace detail {

struct PoleFactors {
    cplx d;        // Re s - eps2 - omega - i(gamma2/2 + Im s)
    cplx c;        // prod_{k != v} (s_v* - s_k)(s_v* - s_k*)
    double im;     // Im s_v
    cplx s_conj;
};

inline std::vector<PoleFactors> pole_factors(const FanoModel& m, double omega, double gamma2) {
    const auto& ps = m.pole_set.poles;
    std::vector<PoleFactors> out(ps.size());
    for (std::size_t v = 0; v < ps.size(); ++v) {
        const cplx s = ps[v];
        out[v].s_conj = std::conj(s);
        out[v].im = std::imag(s);
        out[v].d = std::real(s) - m.epsilon2 - omega - cplx(0.0, 0.5 * gamma2 + std::imag(s));
        cplx c(1.0);
        for (std::size_t k = 0; k < ps.size(); ++k) {
            if (k == v) continue;
            c *= (out[v].s_conj - ps[k]) * (out[v].s_conj - std::conj(ps[k]));
        }
        if (std::abs(c) == 0.0)
            throw singular_error("medium_response: coincident poles, cross-pole product vanishes");
        out[v].c = c;
    }
    return out;
}

}  // namespace detail

inline cplx beta1(const FanoModel& m, double omega, double gamma2 = 0.0) {
    cplx sum(0.0);
    const auto pf = detail::pole_factors(m, omega, gamma2);
    for (std::size_t v = 0; v < pf.size(); ++v) {
        const cplx n = fano_numerator(m, pf[v].s_conj, Transition::signal);
        sum += n * n / (pf[v].im * pf[v].d * pf[v].c);
    }
    return std::numbers::pi * (1.0 - cplx(0.0, 1.0) * sum);
}

inline cplx beta1L(const FanoModel& m, double omega, double gamma2 = 0.0) {
    cplx sum(0.0);
    const auto pf = detail::pole_factors(m, omega, gamma2);
    for (std::size_t v = 0; v < pf.size(); ++v) {
        const cplx n = fano_numerator(m, pf[v].s_conj, Transition::control);
        sum += n * n / (pf[v].im * pf[v].d * pf[v].c);
    }
    return std::numbers::pi * (1.0 - cplx(0.0, 1.0) * sum);
}

inline cplx beta2(const FanoModel& m, double omega, double gamma2 = 0.0) {
    cplx sum(0.0);
    const auto pf = detail::pole_factors(m, omega, gamma2);
    for (std::size_t v = 0; v < pf.size(); ++v) {
        const cplx nl = fano_numerator(m, pf[v].s_conj, Transition::control);
        const cplx n = fano_numerator(m, pf[v].s_conj, Transition::signal);
        sum += nl * n / (pf[v].im * pf[v].d * pf[v].c);
    }
    return std::numbers::pi * (1.0 - cplx(0.0, 1.0) * sum);
}

inline cplx b_func(const FanoModel& m, double omega, double gamma2 = 0.0) {
    cplx sum(0.0);
    const auto pf = detail::pole_factors(m, omega, gamma2);
    for (std::size_t v = 0; v < pf.size(); ++v) {
        const cplx n = fano_numerator(m, pf[v].s_conj, Transition::signal);
        const cplx mm = mismatch_numerator(m, pf[v].s_conj);
        sum += n * mm / (pf[v].im * pf[v].d * pf[v].c);
    }
    return -cplx(0.0, 1.0) * std::numbers::pi * sum;
}

inline cplx f_func(cplx b, cplx beta1_val) {
    return b * std::conj(beta1_val) / std::norm(beta1_val);
}

inline cplx f_func(const FanoModel& m, double omega, double gamma2 = 0.0) {
    return f_func(b_func(m, omega, gamma2), beta1(m, omega, gamma2));
}

inline ResponsePoint evaluate_response(const FanoModel& m, double omega, double gamma2 = 0.0) {
    ResponsePoint r;
    cplx s1(0.0), sL(0.0), s2(0.0), sb(0.0);
    const auto pf = detail::pole_factors(m, omega, gamma2);
    for (std::size_t v = 0; v < pf.size(); ++v) {
        const cplx n = fano_numerator(m, pf[v].s_conj, Transition::signal);
        const cplx nl = fano_numerator(m, pf[v].s_conj, Transition::control);
        const cplx mm = mismatch_numerator(m, pf[v].s_conj);
        const cplx w = 1.0 / (pf[v].im * pf[v].d * pf[v].c);
        s1 += n * n * w;
        sL += nl * nl * w;
        s2 += nl * n * w;
        sb += n * mm * w;
    }
    const cplx i1(0.0, 1.0);
    r.beta1 = std::numbers::pi * (1.0 - i1 * s1);
    r.beta1L = std::numbers::pi * (1.0 - i1 * sL);
    r.beta2 = std::numbers::pi * (1.0 - i1 * s2);
    r.b = -i1 * std::numbers::pi * sb;
    r.f = f_func(r.b, r.beta1);
    return r;
}

// x is the detuning of the signal carrier from the lowest dressed resonance
// in units of the resonance spread: x = (omega - (e1_tilde - epsilon2))/unit.
inline double omega_from_x(const FanoModel& m, double x) {
    return m.e1_tilde - m.epsilon2 + x * m.energy_unit;
}

inline ResponsePoint response_at_x(const FanoModel& m, double x, double gamma2 = 0.0) {
    return evaluate_response(m, omega_from_x(m, x), gamma2);
}

struct FrequencyGrid {
    std::vector<double> x;
    double e1_tilde = 0.0;
    double delta_e = 1.0;
    double epsilon2 = 0.0;

    static FrequencyGrid linspace(double x_min, double x_max, std::size_t n, const FanoModel& m) {
        if (n < 2 || !(x_max > x_min))
            throw validation_error("FrequencyGrid: need x_max > x_min and at least 2 points");
        FrequencyGrid g;
        g.e1_tilde = m.e1_tilde;
        g.delta_e = m.energy_unit;
        g.epsilon2 = m.epsilon2;
        g.x.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            g.x[i] = x_min + (x_max - x_min) * static_cast<double>(i) / static_cast<double>(n - 1);
        return g;
    }

    double omega(std::size_t i) const { return e1_tilde - epsilon2 + x[i] * delta_e; }
};

struct Spectrum {
    FrequencyGrid grid;
    std::vector<ResponsePoint> points;
};

inline Spectrum sweep_response(const FanoModel& m, const FrequencyGrid& grid, double gamma2 = 0.0) {
    Spectrum s;
    s.grid = grid;
    s.points.reserve(grid.x.size());
    for (std::size_t i = 0; i < grid.x.size(); ++i)
        s.points.push_back(evaluate_response(m, grid.omega(i), gamma2));
    return s;
}

// Closed forms for two isolated resonances (widths small against their
// spacing), written directly in x with p_k = gamma_k/spacing.
inline cplx beta1_two_resonance(double x, double p1, double p2, double q1, double q2) {
    const cplx i1(0.0, 1.0);
    const cplx t1 = 0.5 * p1 * (1.0 + i1 * q1) * (1.0 + i1 * q1) / (x + i1 * p1 * (x + 0.5));
    const cplx t2 = 0.5 * p2 * (1.0 + i1 * q2) * (1.0 + i1 * q2) / (x - 1.0 - i1 * p2 * (x - 1.5));
    return std::numbers::pi * (1.0 - i1 * t1 - i1 * t2);
}

inline cplx b_two_resonance(double x, double p1, double p2, double q1, double q2,
                            double zeta1, double zeta2) {
    const cplx i1(0.0, 1.0);
    const cplx t1 = p1 * q1 * (1.0 + i1 * q1) / (x + i1 * p1 * (x + 0.5)) * zeta1;
    const cplx t2 = p2 * q2 * (1.0 + i1 * q2) / (x - 1.0 - i1 * p2 * (x - 1.5)) * zeta2;
    return std::numbers::pi * (t1 + t2);
}

}  // namespace fanolight
