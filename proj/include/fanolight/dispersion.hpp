#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fanolight/errors.hpp"
#include "fanolight/medium_response.hpp"

namespace fanolight {

// Medium constants in scaled units (c = 1, rates in units of the collective
// coupling). n_g2 is N g^2, omega_ctrl2 is |Omega|^2; the response point is
// evaluated at the operating signal frequency.
struct MediumParams {
    double n_g2 = 1.0;
    double omega_ctrl2 = 0.0;
    double gamma_c = 0.0;
    double nu = 0.0;
    double gamma2 = 0.0;
    double c = 1.0;
    ResponsePoint response;

    void validate() const {
        if (!(n_g2 > 0.0)) throw validation_error("MediumParams: n_g2 must be > 0");
        if (omega_ctrl2 < 0.0) throw validation_error("MediumParams: omega_ctrl2 must be >= 0");
        if (gamma_c < 0.0) throw validation_error("MediumParams: gamma_c must be >= 0");
        if (!(c > 0.0)) throw validation_error("MediumParams: c must be > 0");
    }
};

struct Wavenumbers {
    cplx k0, k1, k2, k0_tilde, k0_tilde_prime;
};

// Characteristic wavenumbers of the coupled field/coherence system. Exact
// identities: k1 + k2 = 2 k0_tilde_prime and
// k1 - k2 = (4/c) beta2 sqrt(n_g2 omega_ctrl2).
inline Wavenumbers wavenumbers(const MediumParams& mp) {
    mp.validate();
    const cplx i1(0.0, 1.0);
    const cplx p = mp.response.beta1L * mp.omega_ctrl2;
    const cplx q = mp.response.beta1 * mp.n_g2;
    const cplx r = mp.response.beta2 * std::sqrt(mp.n_g2 * mp.omega_ctrl2);
    const cplx w(mp.nu, 0.5 * mp.gamma_c);

    Wavenumbers k;
    k.k1 = -i1 / mp.c * (p - q + 2.0 * i1 * r - i1 * w);
    k.k2 = -i1 / mp.c * (p - q - 2.0 * i1 * r - i1 * w);
    k.k0 = i1 / mp.c * (p + q - i1 * w);
    k.k0_tilde = -i1 / mp.c * (p - q + i1 * w);
    k.k0_tilde_prime = -i1 / mp.c * (p - q - i1 * w);
    return k;
}

namespace detail {

inline double wn_scale(const Wavenumbers& k) {
    return std::max({std::abs(k.k0), std::abs(k.k1), std::abs(k.k2),
                     std::abs(k.k0_tilde_prime), 1e-300});
}

}  // namespace detail

// Square root of (k - k1)(k - k2) at k = 0, with the sign fixed so that
// omega_plus(0) = (c/2)(-k0 + g) is the root of smaller modulus. This pins
// the "+" label to the slow branch in the memory regime.
inline cplx branch_sqrt_origin(const Wavenumbers& wn) {
    cplx g = std::sqrt(wn.k1 * wn.k2);
    if (std::abs(g - wn.k0) > std::abs(-g - wn.k0)) g = -g;
    return g;
}

// Continue the square root to the next k of a sweep: of the two candidates,
// keep the one nearest the previous value. Throws when the step is too coarse
// to disambiguate the branches.
inline cplx branch_sqrt_step(double k, const Wavenumbers& wn, cplx g_prev) {
    cplx g = std::sqrt((k - wn.k1) * (k - wn.k2));
    const double keep = std::abs(g - g_prev);
    const double flip = std::abs(-g - g_prev);
    if (flip < keep) g = -g;
    const double jump = std::min(keep, flip);
    const double alt = std::max(keep, flip);
    if (jump > 0.8 * alt && jump > 0.05 * (std::abs(g_prev) + std::abs(g)) + 1e-12 * detail::wn_scale(wn))
        throw numerical_error("branch continuation ambiguous; refine the k grid");
    return g;
}

// Branch-tracked square root at an isolated k, walked from the k = 0 anchor.
inline cplx branch_sqrt_at(double k, const Wavenumbers& wn, int steps = 64) {
    cplx g = branch_sqrt_origin(wn);
    if (k == 0.0) return g;
    for (int attempt = 0; attempt < 4; ++attempt) {
        try {
            cplx gw = g;
            for (int i = 1; i <= steps; ++i)
                gw = branch_sqrt_step(k * static_cast<double>(i) / steps, wn, gw);
            return gw;
        } catch (const numerical_error&) {
            steps *= 4;
            if (attempt == 3) throw;
        }
    }
    return g;  // unreachable
}

struct BranchFrequencies {
    cplx omega_plus, omega_minus;
    cplx g;  // branch-tracked sqrt((k-k1)(k-k2))
};

inline BranchFrequencies omega_pm(double k, const Wavenumbers& wn, double c, cplx g) {
    BranchFrequencies f;
    f.g = g;
    f.omega_plus = 0.5 * c * (k - wn.k0 + g);
    f.omega_minus = 0.5 * c * (k - wn.k0 - g);
    return f;
}

inline BranchFrequencies omega_pm(double k, const Wavenumbers& wn, double c) {
    return omega_pm(k, wn, c, branch_sqrt_at(k, wn));
}

// Branch-consistent frequencies along a sorted k sweep, continued outward
// from the point nearest k = 0.
inline std::vector<BranchFrequencies> omega_pm_sweep(std::span<const double> ks,
                                                     const Wavenumbers& wn, double c) {
    if (ks.empty()) return {};
    std::size_t i0 = 0;
    for (std::size_t i = 1; i < ks.size(); ++i)
        if (std::abs(ks[i]) < std::abs(ks[i0])) i0 = i;

    std::vector<cplx> g(ks.size());
    g[i0] = branch_sqrt_at(ks[i0], wn);
    for (std::size_t i = i0 + 1; i < ks.size(); ++i) g[i] = branch_sqrt_step(ks[i], wn, g[i - 1]);
    for (std::size_t i = i0; i-- > 0;) g[i] = branch_sqrt_step(ks[i], wn, g[i + 1]);

    std::vector<BranchFrequencies> out(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) out[i] = omega_pm(ks[i], wn, c, g[i]);
    return out;
}

// Small-k expansion data: branch frequencies at k = 0, group velocities and
// the per-wavenumber gain/loss slopes. chi follows the bare Im(k0'/sqrt(k1 k2))
// convention, so the complex slope of omega_plus(k) is vg_plus + i (c/2) chi_plus.
struct BranchPoint {
    cplx omega_plus0, omega_minus0;
    double vg_plus = 0.0, vg_minus = 0.0;
    double chi_plus = 0.0, chi_minus = 0.0;

    cplx slope_plus(double c) const { return cplx(vg_plus, 0.5 * c * chi_plus); }
    cplx slope_minus(double c) const { return cplx(vg_minus, 0.5 * c * chi_minus); }
};

inline BranchPoint small_k(const Wavenumbers& wn, double c) {
    const cplx g0 = branch_sqrt_origin(wn);
    if (std::abs(g0) < 1e-12 * detail::wn_scale(wn))
        throw singular_error("small_k: sqrt(k1 k2) vanishes (branch collision at k = 0)");
    const cplx ratio = wn.k0_tilde_prime / g0;
    BranchPoint bp;
    bp.omega_plus0 = 0.5 * c * (-wn.k0 + g0);
    bp.omega_minus0 = 0.5 * c * (-wn.k0 - g0);
    bp.vg_plus = 0.5 * c * (1.0 - std::real(ratio));
    bp.vg_minus = 0.5 * c * (1.0 + std::real(ratio));
    bp.chi_plus = -std::imag(ratio);
    bp.chi_minus = std::imag(ratio);
    return bp;
}

struct RegimeCheck {
    std::string name;
    double ratio = 0.0;
    double threshold = 0.1;
    bool pass = false;
};

struct ConditionReport {
    std::vector<RegimeCheck> checks;
    bool all_pass = true;

    void add(std::string name, double ratio, double threshold) {
        RegimeCheck c{std::move(name), ratio, threshold, ratio < threshold};
        all_pass = all_pass && c.pass;
        checks.push_back(std::move(c));
    }
};

struct MemoryRegime {
    BranchPoint point;
    ConditionReport regime;  // attached as warnings; values are returned regardless
};

// Memory-regime limits of the branch data, valid when the coupling dominates
// the control intensity and the two-photon defect is small. Formulas are kept
// in their printed asymptotic form; the exact route is small_k().
inline MemoryRegime memory_regime(const MediumParams& mp,
                                  std::optional<double> max_abs_zeta = std::nullopt,
                                  double threshold = 0.1) {
    mp.validate();
    if (!(mp.omega_ctrl2 > 0.0))
        throw validation_error("memory_regime: omega_ctrl2 must be > 0");

    const double g2 = mp.n_g2, o2 = mp.omega_ctrl2, c = mp.c;
    const cplx b1 = mp.response.beta1;
    const cplx bb = mp.response.b;
    const cplx f = mp.response.f;
    const double ab2 = std::norm(b1);

    MemoryRegime out;
    out.point.omega_plus0 = 0.0;
    out.point.omega_minus0 =
        g2 * (std::imag(b1) + (o2 / g2) * std::imag(bb) - mp.nu / g2) -
        cplx(0.0, 1.0) * g2 * (std::real(b1) + 0.5 * mp.gamma_c / g2 + (o2 / g2) * std::real(bb));
    out.point.vg_plus = c * (o2 / g2) *
        (1.0 + std::real(f) + 0.5 * mp.gamma_c * std::real(b1) / (o2 * ab2) -
         (mp.nu / o2) * std::imag(b1) / ab2);
    out.point.chi_plus = c * (o2 / g2) *
        (std::imag(f) - 0.5 * mp.gamma_c * std::imag(b1) / (o2 * ab2) -
         (mp.nu / o2) * std::real(b1) / ab2);
    out.point.vg_minus = c *
        (1.0 - (o2 / g2) * std::real(f) - 0.5 * mp.gamma_c * std::real(b1) / (g2 * ab2) +
         (mp.nu / o2) * std::imag(b1) / ab2);
    out.point.chi_minus = -out.point.chi_plus;

    out.regime.add("control_over_coupling", o2 / g2, threshold);
    out.regime.add("two_photon_over_control",
                   std::abs(cplx(mp.nu, 0.5 * mp.gamma_c)) / std::sqrt(o2), threshold);
    if (max_abs_zeta) out.regime.add("fano_mismatch_zeta", *max_abs_zeta, threshold);
    return out;
}

// Dimensionless validity ratios of the working regime, each compared against
// the same "much less than one" threshold.
inline ConditionReport check_conditions(const FanoModel& model, const MediumParams& mp,
                                        double pulse_duration, double threshold = 0.1) {
    mp.validate();
    if (!(pulse_duration > 0.0))
        throw validation_error("check_conditions: pulse duration must be > 0");

    ConditionReport rep;
    double zmax = 0.0;
    for (const auto& r : model.resonances) zmax = std::max(zmax, std::abs(r.zeta));
    rep.add("fano_mismatch_zeta", zmax, threshold);

    const double omega_abs = std::sqrt(mp.omega_ctrl2);
    const double w = std::abs(cplx(mp.nu, 0.5 * mp.gamma_c));
    rep.add("two_photon_over_control",
            omega_abs > 0.0 ? w / omega_abs : std::numeric_limits<double>::infinity(), threshold);
    rep.add("control_over_coupling", mp.omega_ctrl2 / mp.n_g2, threshold);

    const double eit = mp.omega_ctrl2 * std::abs(mp.response.beta1) * pulse_duration;
    rep.add("eit_inverse", eit > 0.0 ? 1.0 / eit : std::numeric_limits<double>::infinity(), threshold);

    if (model.resonances.size() == 2) {
        const double de = model.energy_unit;
        rep.add("resonance_overlap_p1", model.resonances[0].gamma_tilde / de, threshold);
        rep.add("resonance_overlap_p2", model.resonances[1].gamma_tilde / de, threshold);
    }
    return rep;
}

}  // namespace fanolight
