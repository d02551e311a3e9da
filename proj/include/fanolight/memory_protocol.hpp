#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "fanolight/pulse_dynamics.hpp"

namespace fanolight {

// Piecewise-constant control field: non-overlapping, time-ordered segments.
struct ControlSegment {
    double t_start = 0.0;
    double t_end = 0.0;
    cplx omega;

    double duration() const { return t_end - t_start; }
    bool on() const { return std::abs(omega) > 0.0; }
};

struct ControlSchedule {
    std::vector<ControlSegment> segments;

    void validate() const {
        if (segments.empty()) throw validation_error("ControlSchedule: no segments");
        for (std::size_t i = 0; i < segments.size(); ++i) {
            if (!(segments[i].t_end > segments[i].t_start))
                throw validation_error("ControlSchedule: segment must have t_end > t_start");
            if (i > 0 && segments[i].t_start < segments[i - 1].t_end - 1e-12)
                throw validation_error("ControlSchedule: segments overlap or are out of order");
        }
    }
};

struct WriteResult {
    PulseState stored;
    double eit_ratio = 0.0;  // |Omega|^2 |beta1| T, must be >> 1
    bool eit_ok = false;
};

namespace detail {

inline MediumParams with_control(const MediumParams& mp, cplx omega_ctrl) {
    MediumParams out = mp;
    out.omega_ctrl2 = std::norm(omega_ctrl);
    return out;
}

// Adiabatic-following factor of the stored coherence, the pointwise map
// alpha -> sigma21 at control switch-off.
inline cplx write_factor(const MediumParams& mp, cplx omega_ctrl) {
    const double o2 = std::norm(omega_ctrl);
    if (!(o2 > 0.0)) throw validation_error("write_stage: control amplitude must be nonzero");
    const cplx corr = 1.0 - 0.5 * mp.response.f -
                      cplx(0.5 * mp.gamma_c, -mp.nu) / (o2 * mp.response.beta1);
    return -corr * std::sqrt(mp.n_g2) / omega_ctrl;
}

// Amplitude prefactor of the retrieved slow wave.
inline cplx retrieval_prefactor(const MediumParams& mp, double o2) {
    return 1.0 - (o2 / mp.n_g2) * mp.response.f +
           cplx(0.0, 1.0) / mp.response.beta1 * cplx(mp.nu, 0.5 * mp.gamma_c) / o2;
}

}  // namespace detail

// Map the signal envelope onto the lower-level coherence at switch-off; the
// field is taken out of the medium (set to zero). The EIT figure
// |Omega|^2 |beta1| T is reported; a small value means the pulse does not fit
// the transparency window and the algebraic map is inaccurate.
inline WriteResult write_stage(const PulseState& input, const MediumParams& mp, double duration,
                               cplx omega_ctrl, double threshold = 0.1) {
    input.validate();
    const MediumParams params = detail::with_control(mp, omega_ctrl);
    const cplx factor = detail::write_factor(params, omega_ctrl);

    WriteResult out;
    out.stored = input;
    for (std::size_t j = 0; j < input.size(); ++j) {
        out.stored.sigma21[j] = factor * input.alpha[j];
        out.stored.alpha[j] = cplx(0.0);
    }
    out.eit_ratio = params.omega_ctrl2 * std::abs(params.response.beta1) * duration;
    out.eit_ok = out.eit_ratio * threshold > 1.0;
    return out;
}

// Free evolution of the stored coherence while the control is off:
// sigma21 picks up exp(i(nu + i gamma_c/2) dt).
inline void apply_storage_decay(PulseState& stored, const MediumParams& mp, double dt) {
    if (dt < 0.0) throw validation_error("apply_storage_decay: negative duration");
    const cplx factor = std::exp(cplx(0.0, 1.0) * cplx(mp.nu, 0.5 * mp.gamma_c) * dt);
    for (auto& s : stored.sigma21) s *= factor;
}

enum class Retrieval {
    exact_slow_branch,  // per-mode slow-projector evolution of the stored state
    protocol_small_k,   // small-k protocol form: prefactor x e^{k chi t} e^{-i k vg t}
};

// Switch the control back on over the stored state and return the retrieved
// field after time t. The exact route evolves each mode on the slow branch;
// the small-k route applies the memory-regime translation/gain law.
inline PulseState retrieve_stage(const PulseState& stored, const MediumParams& mp, double t,
                                 cplx omega_ctrl, Retrieval method = Retrieval::exact_slow_branch) {
    stored.validate();
    const MediumParams params = detail::with_control(mp, omega_ctrl);
    if (!(params.omega_ctrl2 > 0.0))
        throw validation_error("retrieve_stage: control amplitude must be nonzero");
    const double phase = std::arg(omega_ctrl);
    const cplx gauge_in = std::exp(cplx(0.0, phase));
    const cplx gauge_out = std::exp(cplx(0.0, -phase));

    KSpaceField f = to_kspace(stored);
    for (auto& s : f.sigma21) s *= gauge_in;  // real-control gauge

    if (method == Retrieval::exact_slow_branch) {
        const Wavenumbers wn = wavenumbers(params);
        const auto order = k_sorted_indices(f);
        std::vector<double> ks(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) ks[i] = f.k[order[i]];
        const auto freqs = omega_pm_sweep(ks, wn, params.c);
        for (std::size_t i = 0; i < order.size(); ++i) {
            const std::size_t m = order[i];
            const ModeState out =
                evolve_mode_slow({f.k[m], f.alpha[m], f.sigma21[m]}, params, t, wn, freqs[i].g);
            f.alpha[m] = out.alpha;
            f.sigma21[m] = out.sigma21;
        }
    } else {
        const auto mr = memory_regime(params);
        const cplx pref = detail::retrieval_prefactor(params, params.omega_ctrl2);
        const cplx wf = detail::write_factor(params, std::sqrt(params.omega_ctrl2));
        for (std::size_t m = 0; m < f.size(); ++m) {
            const double k = f.k[m];
            const cplx alpha0 = f.sigma21[m] / wf;  // invert the switch-off map
            const cplx gain = std::exp(cplx(k * mr.point.chi_plus * t, -k * mr.point.vg_plus * t));
            f.alpha[m] = pref * alpha0 * gain;
            f.sigma21[m] = wf * f.alpha[m];  // co-moving dark-state coherence
        }
    }

    for (auto& s : f.sigma21) s *= gauge_out;
    f.time += t;
    return to_zspace(f);
}

struct OverlapResult {
    double fidelity = 0.0;         // |<ref, cand shifted>|^2 / (|ref|^2 |cand|^2)
    double delay = 0.0;            // shift maximizing the overlap, sub-cell
    double amplitude_ratio = 0.0;  // ||cand|| / ||ref||
};

// Phase-sensitive normalized overlap of the field envelopes, maximized over a
// continuous circular shift (integer-lag correlation peak refined by a
// parabola, then evaluated exactly by spectral translation).
inline OverlapResult shifted_overlap(const PulseState& reference, const PulseState& candidate) {
    reference.validate();
    candidate.validate();
    if (reference.size() != candidate.size() || reference.length != candidate.length)
        throw validation_error("shifted_overlap: grids differ");

    const std::size_t n = reference.size();
    const double dz = reference.dz();
    const double nref2 = field_energy(reference.alpha) * dz;
    const double ncand2 = field_energy(candidate.alpha) * dz;
    if (nref2 == 0.0 || ncand2 == 0.0)
        throw validation_error("shifted_overlap: empty field");

    std::vector<cplx> ra = reference.alpha, ca = candidate.alpha;
    detail::fft_radix2(ra, -1);
    detail::fft_radix2(ca, -1);
    std::vector<cplx> cross(n);
    for (std::size_t m = 0; m < n; ++m) cross[m] = std::conj(ra[m]) * ca[m] / static_cast<double>(n);
    std::vector<cplx> lags = cross;
    detail::fft_radix2(lags, +1);  // lags[l] ~ sum_j conj(ref_j) cand_{j+l}

    std::size_t best = 0;
    for (std::size_t l = 1; l < n; ++l)
        if (std::abs(lags[l]) > std::abs(lags[best])) best = l;

    const double ym = std::norm(lags[(best + n - 1) % n]);
    const double y0 = std::norm(lags[best]);
    const double yp = std::norm(lags[(best + 1) % n]);
    double frac = 0.0;
    const double denom = ym - 2.0 * y0 + yp;
    if (denom < 0.0) frac = 0.5 * (ym - yp) / denom;
    frac = std::clamp(frac, -0.5, 0.5);
    double shift_cells = static_cast<double>(best) + frac;
    if (shift_cells > static_cast<double>(n) / 2.0) shift_cells -= static_cast<double>(n);
    const double delta = shift_cells * dz;

    // Exact overlap at the refined shift via spectral translation:
    // <ref, cand(. + delta)> dz = dz sum_j conj(ref_j) cand_{j+delta}.
    const double dk = 2.0 * std::numbers::pi / reference.length;
    cplx overlap(0.0);
    for (std::size_t m = 0; m < n; ++m) {
        const auto signed_m = (m < n / 2) ? static_cast<double>(m)
                                          : static_cast<double>(m) - static_cast<double>(n);
        overlap += cross[m] * std::exp(cplx(0.0, dk * signed_m * delta));
    }
    overlap *= dz;

    OverlapResult out;
    out.fidelity = std::min(std::norm(overlap) / (nref2 * ncand2), 1.0);
    out.delay = delta;
    out.amplitude_ratio = std::sqrt(ncand2 / nref2);
    return out;
}

struct MemoryReport {
    PulseState stored;     // coherence snapshot after switch-off
    PulseState retrieved;  // field after the retrieval window
    double fidelity = 0.0;
    double amplitude_ratio = 0.0;
    double delay = 0.0;           // measured, from shift maximization
    double expected_delay = 0.0;  // vg_plus x retrieval time
    double eit_ratio = 0.0;
    bool eit_ok = false;
    double chi_over_vg = 0.0;     // gain slope over group velocity, slow branch
    double l_absorption = 0.0;    // ~ vg/(k_char |gain slope|)
    double l_effective = 0.0;     // ~ 1/k_char, pulse length scale
    double write_duration = 0.0, storage_duration = 0.0, retrieve_duration = 0.0;
    cplx prefactor;               // retrieved-amplitude factor
};

namespace detail {

inline double rms_width(const PulseState& p) {
    double w = 0.0, z1 = 0.0, z2 = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double e = std::norm(p.alpha[j]);
        w += e;
        z1 += e * p.z(j);
        z2 += e * p.z(j) * p.z(j);
    }
    if (w == 0.0) return 0.0;
    const double mean = z1 / w;
    return std::sqrt(std::max(z2 / w - mean * mean, 0.0));
}

}  // namespace detail

// Full write -> store -> retrieve pass over a control schedule. The first
// on-segment writes, off time between it and the next on-segment stores, and
// that next on-segment retrieves.
inline MemoryReport round_trip(const PulseState& input, const ControlSchedule& schedule,
                               const MediumParams& mp,
                               Retrieval method = Retrieval::exact_slow_branch) {
    input.validate();
    if (field_energy(input.alpha) == 0.0) throw validation_error("round_trip: empty input pulse");
    schedule.validate();

    std::size_t wi = schedule.segments.size();
    for (std::size_t i = 0; i < schedule.segments.size(); ++i)
        if (schedule.segments[i].on()) { wi = i; break; }
    if (wi == schedule.segments.size())
        throw validation_error("round_trip: schedule has no write segment");
    std::size_t ri = schedule.segments.size();
    for (std::size_t i = wi + 1; i < schedule.segments.size(); ++i)
        if (schedule.segments[i].on()) { ri = i; break; }
    if (ri == schedule.segments.size())
        throw validation_error("round_trip: schedule has no retrieval segment");

    const ControlSegment& write_seg = schedule.segments[wi];
    const ControlSegment& read_seg = schedule.segments[ri];
    const double t_store = read_seg.t_start - write_seg.t_end;

    MemoryReport rep;
    rep.write_duration = write_seg.duration();
    rep.storage_duration = t_store;
    rep.retrieve_duration = read_seg.duration();

    WriteResult wr = write_stage(input, mp, write_seg.duration(), write_seg.omega);
    rep.eit_ratio = wr.eit_ratio;
    rep.eit_ok = wr.eit_ok;
    apply_storage_decay(wr.stored, mp, t_store);
    rep.stored = wr.stored;

    rep.retrieved = retrieve_stage(wr.stored, mp, read_seg.duration(), read_seg.omega, method);

    const MediumParams read_params = detail::with_control(mp, read_seg.omega);
    const BranchPoint bp = small_k(wavenumbers(read_params), read_params.c);
    rep.expected_delay = bp.vg_plus * read_seg.duration();
    rep.prefactor = detail::retrieval_prefactor(read_params, read_params.omega_ctrl2);

    const double gain_slope = std::abs(std::imag(bp.slope_plus(read_params.c)));
    rep.chi_over_vg = bp.vg_plus != 0.0 ? gain_slope / bp.vg_plus : 0.0;
    rep.l_effective = detail::rms_width(input);
    rep.l_absorption = gain_slope > 0.0 ? bp.vg_plus * rep.l_effective / gain_slope
                                        : std::numeric_limits<double>::infinity();

    const OverlapResult ov = shifted_overlap(input, rep.retrieved);
    rep.fidelity = ov.fidelity;
    rep.amplitude_ratio = ov.amplitude_ratio;
    rep.delay = ov.delay;
    return rep;
}

}  // namespace fanolight
