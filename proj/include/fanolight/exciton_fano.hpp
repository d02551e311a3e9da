#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fanolight/complex_poly.hpp"
#include "fanolight/errors.hpp"

namespace fanolight {

// One dressed exciton level. Energies and widths share a single energy unit;
// q is the Fano asymmetry of the signal transition and zeta the relative
// mismatch of the control-transition asymmetry, q_L = q (1 + zeta).
struct Resonance {
    double e_tilde = 0.0;
    double gamma_tilde = 0.0;  // > 0
    double q = 0.0;
    double zeta = 0.0;

    double q_control() const { return q * (1.0 + zeta); }
};

enum class Transition { signal, control };

// Two bare levels coupled to the same continuum: energies, widths, level
// shifts and the complex cross-shift between them. The cross-shift is an
// input; it is not computed from a principal-value integral here.
struct BareResonancePair {
    double e1 = 0.0, e2 = 0.0;
    double gamma1 = 0.0, gamma2 = 0.0;  // >= 0
    double delta1 = 0.0, delta2 = 0.0;
    cplx delta12 = 0.0;
};

struct EffectiveLevels {
    double e1_tilde = 0.0, e2_tilde = 0.0;
    double gamma1_tilde = 0.0, gamma2_tilde = 0.0;
};

// Dressed energies and widths of two interacting levels.
//
// The energies mix the bare levels symmetrically, e_tilde_{1,2} =
// (sum -/+ sqrt(diff^2 + |d12|^2))/2, so e1_tilde <= e2_tilde always holds and
// the trace e1_tilde + e2_tilde = e1+d1+e2+d2 is exact. The widths multiply
// the bare widths by an interference factor; the (1 + x sqrt(G2/G1))^2 form is
// expanded to (sqrt(G1) + x sqrt(G2))^2 so zero bare widths stay finite. For a
// complex cross-shift the squared factor picks up an imaginary part; the width
// is its real part (exact whenever delta12 is real, which is the usual case).
inline EffectiveLevels effective_levels(const BareResonancePair& p) {
    if (p.gamma1 < 0.0 || p.gamma2 < 0.0)
        throw validation_error("effective_levels: bare widths must be >= 0");
    const double a1 = p.e1 + p.delta1;
    const double a2 = p.e2 + p.delta2;
    const double split = std::sqrt((a2 - a1) * (a2 - a1) + std::norm(p.delta12));

    EffectiveLevels out;
    out.e1_tilde = 0.5 * (a1 + a2 - split);
    out.e2_tilde = 0.5 * (a1 + a2 + split);

    const double den1 = out.e1_tilde - p.e2 - p.delta2;
    const double den2 = out.e2_tilde - p.e1 - p.delta1;
    if (den1 == 0.0 || den2 == 0.0)
        throw singular_error("effective_levels: singular configuration, vanishing denominator in width formula");

    const double w1 = den1 * den1 / (den1 * den1 + std::norm(p.delta12));
    const double w2 = den2 * den2 / (den2 * den2 + std::norm(p.delta12));
    const cplx mix1 = std::sqrt(p.gamma1) + (p.delta12 / den1) * std::sqrt(p.gamma2);
    const cplx mix2 = std::sqrt(p.gamma2) + (p.delta12 / den2) * std::sqrt(p.gamma1);
    out.gamma1_tilde = w1 * std::real(mix1 * mix1);
    out.gamma2_tilde = w2 * std::real(mix2 * mix2);
    return out;
}

struct PoleSet {
    std::vector<cplx> poles;    // ordered by real part, Im > 0
    double max_residual = 0.0;  // |P(s)| at the returned roots, scaled units
    bool near_singular = false;
};

struct PoleOptions {
    double residual_tol = 1e-10;     // on |P(s)| with energies scaled to O(1)
    double near_singular_im = 1e-6;  // Im s below this (scaled) flags the set
};

namespace detail {

struct EnergyScale {
    double center = 0.0;
    double unit = 1.0;
};

inline EnergyScale energy_scale(std::span<const Resonance> rs) {
    EnergyScale s;
    double emin = rs.front().e_tilde, emax = rs.front().e_tilde, gmax = 0.0;
    for (const auto& r : rs) {
        emin = std::min(emin, r.e_tilde);
        emax = std::max(emax, r.e_tilde);
        gmax = std::max(gmax, r.gamma_tilde);
        s.center += r.e_tilde;
    }
    s.center /= static_cast<double>(rs.size());
    s.unit = (rs.size() >= 2 && emax > emin) ? emax - emin : gmax;
    if (s.unit <= 0.0) s.unit = 1.0;
    return s;
}

// Coefficients of prod_v (s - e_v) - (i/2) sum_v g_v prod_{k != v} (s - e_k)
// in the given (already scaled) energies.
inline std::vector<cplx> pole_polynomial(const std::vector<double>& e, const std::vector<double>& g) {
    const std::size_t n = e.size();
    std::vector<cplx> full{cplx(1.0)};
    for (double ev : e) full = poly_mul(full, {cplx(-ev), cplx(1.0)});
    std::vector<cplx> width_sum(n, cplx(0.0));
    width_sum.resize(std::max<std::size_t>(n, 1), cplx(0.0));
    for (std::size_t v = 0; v < n; ++v) {
        std::vector<cplx> part{cplx(1.0)};
        for (std::size_t k = 0; k < n; ++k)
            if (k != v) part = poly_mul(part, {cplx(-e[k]), cplx(1.0)});
        for (std::size_t i = 0; i < part.size(); ++i) width_sum[i] += g[v] * part[i];
    }
    for (std::size_t i = 0; i < width_sum.size(); ++i) full[i] -= cplx(0.0, 0.5) * width_sum[i];
    return full;
}

}  // namespace detail

// Resonance poles: roots s_v of the width-dressed secular polynomial, all in
// the upper half plane. Residuals are checked in units where the resonance
// spread is 1.
inline PoleSet poles(std::span<const Resonance> rs, const PoleOptions& opt = {}) {
    if (rs.empty()) throw validation_error("poles: need at least one resonance");
    for (const auto& r : rs)
        if (!(r.gamma_tilde > 0.0))
            throw validation_error("poles: every width must be > 0 (zero-width poles sit on the real axis)");

    const auto scale = detail::energy_scale(rs);
    std::vector<double> e(rs.size()), g(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
        e[i] = (rs[i].e_tilde - scale.center) / scale.unit;
        g[i] = rs[i].gamma_tilde / scale.unit;
    }

    const auto coeffs = detail::pole_polynomial(e, g);
    auto roots = poly_roots(coeffs);

    PoleSet out;
    out.poles.reserve(roots.size());
    for (cplx r : roots) {
        const double res = std::abs(poly_eval(coeffs, r));
        out.max_residual = std::max(out.max_residual, res);
        if (res > opt.residual_tol)
            throw numerical_error("poles: root residual " + std::to_string(res) +
                                  " exceeds tolerance " + std::to_string(opt.residual_tol));
        if (!(std::imag(r) > 0.0))
            throw numerical_error("poles: root with Im s <= 0 violates the upper-half-plane model");
        if (std::imag(r) < opt.near_singular_im) out.near_singular = true;
        out.poles.push_back(scale.center + scale.unit * r);
    }
    std::sort(out.poles.begin(), out.poles.end(),
              [](cplx a, cplx b) { return std::real(a) < std::real(b); });
    return out;
}

struct PhaseShift {
    std::vector<double> partial;  // delta_v, each in (-pi/2, pi/2)
    double total = 0.0;           // arctan of the summed tangents, same branch
};

// Scattering phase shifts: tan delta_v = -(gamma_v/2)/(lambda - e_v), summed
// per the Fano composition rule tan delta = sum_v tan delta_v.
inline PhaseShift phase_shift(double lambda, std::span<const Resonance> rs) {
    if (rs.empty()) throw validation_error("phase_shift: need at least one resonance");
    PhaseShift out;
    out.partial.reserve(rs.size());
    double tan_sum = 0.0;
    for (const auto& r : rs) {
        const double d = lambda - r.e_tilde;
        if (d == 0.0)
            throw numerical_error("phase_shift: lambda coincides with a resonance energy; delta_v is at its +/-pi/2 limit");
        const double t = -0.5 * r.gamma_tilde / d;
        out.partial.push_back(std::atan(t));
        tan_sum += t;
    }
    out.total = std::atan(tan_sum);
    return out;
}

// A resonance set with its poles and the frequency bookkeeping used by the
// response functions: epsilon2 is the energy of lower level 2, energy_unit the
// scale of the dimensionless detuning x.
struct FanoModel {
    std::vector<Resonance> resonances;
    PoleSet pole_set;
    double epsilon2 = 0.0;
    double energy_unit = 1.0;
    double e1_tilde = 0.0;  // lowest dressed energy, origin of x
};

inline FanoModel make_fano_model(std::vector<Resonance> rs, double epsilon2 = 0.0,
                                 const PoleOptions& opt = {}) {
    FanoModel m;
    std::sort(rs.begin(), rs.end(), [](const Resonance& a, const Resonance& b) { return a.e_tilde < b.e_tilde; });
    m.pole_set = poles(rs, opt);
    m.epsilon2 = epsilon2;
    m.e1_tilde = rs.front().e_tilde;
    m.energy_unit = detail::energy_scale(rs).unit;
    m.resonances = std::move(rs);
    return m;
}

namespace detail {

// N(lambda) = prod_v (lambda - e_v) + 1/2 sum_j q_j g_j prod_{k != j} (lambda - e_k),
// the numerator polynomial whose real roots are the Fano windows.
template <typename Q>
cplx fano_numerator_eval(std::span<const Resonance> rs, cplx lambda, Q&& q_of) {
    cplx full(1.0);
    for (const auto& r : rs) full *= lambda - r.e_tilde;
    cplx sum(0.0);
    for (std::size_t j = 0; j < rs.size(); ++j) {
        cplx part(1.0);
        for (std::size_t k = 0; k < rs.size(); ++k)
            if (k != j) part *= lambda - rs[k].e_tilde;
        sum += q_of(rs[j]) * rs[j].gamma_tilde * part;
    }
    return full + 0.5 * sum;
}

}  // namespace detail

inline cplx fano_numerator(const FanoModel& m, cplx lambda, Transition which) {
    return detail::fano_numerator_eval(m.resonances, lambda, [which](const Resonance& r) {
        return which == Transition::signal ? r.q : r.q_control();
    });
}

// M(lambda) = sum_j q_j zeta_j g_j prod_{k != j} (lambda - e_k); the asymmetry
// mismatch polynomial, N_control = N_signal + M/2.
inline cplx mismatch_numerator(const FanoModel& m, cplx lambda) {
    cplx sum(0.0);
    const auto& rs = m.resonances;
    for (std::size_t j = 0; j < rs.size(); ++j) {
        cplx part(1.0);
        for (std::size_t k = 0; k < rs.size(); ++k)
            if (k != j) part *= lambda - rs[k].e_tilde;
        sum += rs[j].q * rs[j].zeta * rs[j].gamma_tilde * part;
    }
    return sum;
}

// Beutler-Fano profile ratio N(lambda)^2 / prod_v |lambda - s_v|^2 for real
// lambda. Non-negative, -> 1 far from all resonances.
inline double fano_profile(const FanoModel& m, double lambda, Transition which) {
    const cplx num = fano_numerator(m, lambda, which);
    double den = 1.0;
    for (cplx s : m.pole_set.poles) den *= std::norm(lambda - s);
    return std::real(num * num) / den;
}

// Real roots of the numerator polynomial ("Fano windows"). Complex root pairs
// are dropped; the result can be empty.
inline std::vector<double> fano_windows(const FanoModel& m, Transition which,
                                        double residual_tol = 1e-8) {
    const auto& rs = m.resonances;
    const auto scale = detail::energy_scale(rs);
    std::vector<cplx> coeffs{cplx(1.0)};
    for (const auto& r : rs)
        coeffs = poly_mul(coeffs, {cplx(-(r.e_tilde - scale.center) / scale.unit), cplx(1.0)});
    for (std::size_t j = 0; j < rs.size(); ++j) {
        std::vector<cplx> part{cplx(1.0)};
        for (std::size_t k = 0; k < rs.size(); ++k)
            if (k != j)
                part = poly_mul(part, {cplx(-(rs[k].e_tilde - scale.center) / scale.unit), cplx(1.0)});
        const double q = (which == Transition::signal) ? rs[j].q : rs[j].q_control();
        const double w = 0.5 * q * rs[j].gamma_tilde / scale.unit;
        for (std::size_t i = 0; i < part.size(); ++i) coeffs[i] += w * part[i];
    }

    std::vector<double> windows;
    for (cplx r : poly_roots(coeffs)) {
        if (std::abs(std::imag(r)) > 1e-8) continue;  // complex pair, no window
        const cplx polished(std::real(r), 0.0);
        if (std::abs(poly_eval(coeffs, polished)) > residual_tol)
            throw numerical_error("fano_windows: window root residual exceeds tolerance");
        windows.push_back(scale.center + scale.unit * std::real(r));
    }
    std::sort(windows.begin(), windows.end());
    return windows;
}

}  // namespace fanolight
