#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "fanolight/memory_protocol.hpp"

namespace fanolight {

using ordered_json = nlohmann::ordered_json;

// Everything a run needs, in scaled units. The unit block is mandatory in
// configuration files so emitted data is never ambiguous: energies are in the
// dressed-resonance spread, rates in the collective coupling, c = 1.
struct ScenarioConfig {
    std::string unit_energy = "delta_E_tilde";
    std::string unit_rate = "n_g2";
    double unit_c = 1.0;

    std::vector<Resonance> resonances;
    std::vector<Resonance> resonances_alt;  // optional second set for spectra
    std::optional<BareResonancePair> bare_pair;
    std::array<double, 2> pair_q{0.0, 0.0};
    std::array<double, 2> pair_zeta{0.0, 0.0};

    double epsilon2 = 0.0;
    double gamma2 = 0.0;

    double x_min = -1.0, x_max = 2.0;
    std::size_t x_points = 601;

    double k_min = -2.0, k_max = 2.0;
    std::size_t k_points = 201;

    double n_g2 = 1.0, omega_ctrl2 = 1e-4, gamma_c = 0.0, nu = 0.0;
    double operating_x = 0.5;

    std::string pulse_shape = "gaussian";
    double pulse_width = 4.0, pulse_center = 20.0;
    cplx pulse_amplitude = cplx(1.0);
    std::vector<cplx> pulse_samples;

    double domain_length = 80.0;
    std::size_t domain_points = 1024;

    ControlSchedule schedule;

    PoleOptions pole_opts;
    double window_tol = 1e-8;
    double regime_threshold = 0.1;
    double tail_tol = 1e-6;
    Retrieval retrieval = Retrieval::exact_slow_branch;
    std::size_t snapshots = 4;

    void validate() const {
        if (resonances.empty() && !bare_pair)
            throw validation_error("config: need a resonance list or a bare pair");
        if (!resonances.empty() && bare_pair)
            throw validation_error("config: give either resonances or a bare pair, not both");
        if (x_points < 2 || !(x_max > x_min))
            throw validation_error("config: frequency grid is empty or reversed");
        if (pulse_shape != "gaussian" && pulse_shape != "custom")
            throw validation_error("config: pulse shape must be gaussian or custom");
        if (pulse_shape == "custom" && pulse_samples.size() != domain_points)
            throw validation_error("config: custom pulse sample count must equal domain points");
    }
};

namespace detail {

inline cplx parse_complex(const nlohmann::json& j, const char* what) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2) return cplx(j[0].get<double>(), j[1].get<double>());
    throw validation_error(std::string("config: ") + what + " must be a number or [re, im]");
}

inline std::vector<Resonance> parse_resonances(const nlohmann::json& arr) {
    std::vector<Resonance> out;
    for (const auto& r : arr) {
        Resonance res;
        res.e_tilde = r.at("e").get<double>();
        res.gamma_tilde = r.at("gamma").get<double>();
        res.q = r.value("q", 0.0);
        res.zeta = r.value("zeta", 0.0);
        out.push_back(res);
    }
    return out;
}

}  // namespace detail

inline ScenarioConfig parse_config(const nlohmann::json& j) {
    ScenarioConfig c;
    if (!j.contains("units"))
        throw validation_error("config: mandatory units block is missing");
    const auto& u = j.at("units");
    if (!u.contains("energy") || !u.contains("rate"))
        throw validation_error("config: units block must name the energy and rate scales");
    c.unit_energy = u.at("energy").get<std::string>();
    c.unit_rate = u.at("rate").get<std::string>();
    c.unit_c = u.value("c", 1.0);

    if (j.contains("resonances")) c.resonances = detail::parse_resonances(j.at("resonances"));
    if (j.contains("resonances_alt")) c.resonances_alt = detail::parse_resonances(j.at("resonances_alt"));
    if (j.contains("bare_pair")) {
        const auto& b = j.at("bare_pair");
        BareResonancePair p;
        p.e1 = b.at("e1").get<double>();
        p.e2 = b.at("e2").get<double>();
        p.gamma1 = b.at("gamma1").get<double>();
        p.gamma2 = b.at("gamma2").get<double>();
        p.delta1 = b.value("delta1", 0.0);
        p.delta2 = b.value("delta2", 0.0);
        if (b.contains("delta12")) p.delta12 = detail::parse_complex(b.at("delta12"), "delta12");
        c.bare_pair = p;
        if (b.contains("q")) { c.pair_q = {b.at("q")[0].get<double>(), b.at("q")[1].get<double>()}; }
        if (b.contains("zeta")) { c.pair_zeta = {b.at("zeta")[0].get<double>(), b.at("zeta")[1].get<double>()}; }
    }

    c.epsilon2 = j.value("epsilon2", 0.0);
    c.gamma2 = j.value("gamma2", 0.0);

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        c.x_min = g.value("x_min", c.x_min);
        c.x_max = g.value("x_max", c.x_max);
        c.x_points = g.value("points", c.x_points);
    }
    if (j.contains("k_grid")) {
        const auto& g = j.at("k_grid");
        c.k_min = g.value("k_min", c.k_min);
        c.k_max = g.value("k_max", c.k_max);
        c.k_points = g.value("points", c.k_points);
    }
    if (j.contains("medium")) {
        const auto& m = j.at("medium");
        c.n_g2 = m.value("n_g2", c.n_g2);
        c.omega_ctrl2 = m.value("omega_ctrl2", c.omega_ctrl2);
        c.gamma_c = m.value("gamma_c", c.gamma_c);
        c.nu = m.value("nu", c.nu);
        c.operating_x = m.value("operating_x", c.operating_x);
    }
    if (j.contains("pulse")) {
        const auto& p = j.at("pulse");
        c.pulse_shape = p.value("shape", c.pulse_shape);
        c.pulse_width = p.value("width", c.pulse_width);
        c.pulse_center = p.value("center", c.pulse_center);
        if (p.contains("amplitude")) c.pulse_amplitude = detail::parse_complex(p.at("amplitude"), "amplitude");
        if (p.contains("samples"))
            for (const auto& s : p.at("samples")) c.pulse_samples.push_back(detail::parse_complex(s, "sample"));
    }
    if (j.contains("domain")) {
        const auto& d = j.at("domain");
        c.domain_length = d.value("length", c.domain_length);
        c.domain_points = d.value("points", c.domain_points);
    }
    if (j.contains("schedule")) {
        for (const auto& s : j.at("schedule")) {
            ControlSegment seg;
            seg.t_start = s.at("t_start").get<double>();
            seg.t_end = s.at("t_end").get<double>();
            seg.omega = detail::parse_complex(s.at("omega"), "omega");
            c.schedule.segments.push_back(seg);
        }
        c.schedule.validate();
    }
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        c.pole_opts.residual_tol = t.value("pole_residual", c.pole_opts.residual_tol);
        c.window_tol = t.value("window_residual", c.window_tol);
        c.regime_threshold = t.value("regime_threshold", c.regime_threshold);
        c.tail_tol = t.value("tail_energy", c.tail_tol);
    }
    if (j.contains("output")) c.snapshots = j.at("output").value("snapshots", c.snapshots);
    if (j.contains("retrieval")) {
        const std::string r = j.at("retrieval").get<std::string>();
        if (r == "exact") c.retrieval = Retrieval::exact_slow_branch;
        else if (r == "small_k") c.retrieval = Retrieval::protocol_small_k;
        else throw validation_error("config: retrieval must be exact or small_k");
    }
    c.validate();
    return c;
}

inline ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("config: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("config: JSON parse failure: ") + e.what());
    }
    try {
        return parse_config(j);
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("config: ") + e.what());
    }
}

// Built-in parameter sets. fig3 carries two close resonances with mismatched
// Fano asymmetries (and an alternate q set for spectra); ideal is the same
// geometry with the mismatch, two-photon defect and decoherence all zero.
inline ScenarioConfig preset_config(const std::string& name) {
    ScenarioConfig c;
    c.resonances = {{0.0, 0.2, 7.0, 0.1}, {1.0, 0.2, 4.0, 0.1}};
    c.resonances_alt = {{0.0, 0.2, 8.0, 0.1}, {1.0, 0.2, 6.0, 0.1}};
    c.schedule.segments = {{-5000.0, 0.0, cplx(0.01)},
                           {0.0, 50.0, cplx(0.0)},
                           {50.0, 18802.0, cplx(0.01)}};
    if (name == "fig3") return c;
    if (name == "ideal") {
        for (auto& r : c.resonances) r.zeta = 0.0;
        c.resonances_alt.clear();
        return c;
    }
    throw validation_error("unknown preset: " + name);
}

inline FanoModel model_from_config(const ScenarioConfig& c) {
    std::vector<Resonance> rs = c.resonances;
    if (c.bare_pair) {
        const EffectiveLevels lv = effective_levels(*c.bare_pair);
        rs = {{lv.e1_tilde, lv.gamma1_tilde, c.pair_q[0], c.pair_zeta[0]},
              {lv.e2_tilde, lv.gamma2_tilde, c.pair_q[1], c.pair_zeta[1]}};
    }
    return make_fano_model(std::move(rs), c.epsilon2, c.pole_opts);
}

inline MediumParams medium_from_config(const ScenarioConfig& c, const FanoModel& model) {
    MediumParams mp;
    mp.n_g2 = c.n_g2;
    mp.omega_ctrl2 = c.omega_ctrl2;
    mp.gamma_c = c.gamma_c;
    mp.nu = c.nu;
    mp.gamma2 = c.gamma2;
    mp.c = c.unit_c;
    mp.response = response_at_x(model, c.operating_x, c.gamma2);
    mp.validate();
    return mp;
}

inline PulseState pulse_from_config(const ScenarioConfig& c) {
    if (c.pulse_shape == "custom") {
        PulseState p;
        p.length = c.domain_length;
        p.alpha = c.pulse_samples;
        p.sigma21.assign(c.pulse_samples.size(), cplx(0.0));
        p.validate();
        return p;
    }
    return gaussian_pulse(c.domain_length, c.domain_points, c.pulse_width, c.pulse_center,
                          c.pulse_amplitude);
}

// ---- emission ------------------------------------------------------------

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw validation_error("cannot write output file " + p.string());
    return out;
}

inline ordered_json units_json(const ScenarioConfig& c) {
    return ordered_json{{"energy", c.unit_energy}, {"rate", c.unit_rate}, {"c", c.unit_c}};
}

inline void csv_unit_header(std::ofstream& out, const ScenarioConfig& c) {
    out << "# units: energy in " << c.unit_energy << ", rates in " << c.unit_rate
        << ", c = " << fmt17(c.unit_c) << "\n";
}

inline ordered_json resonances_json(const std::vector<Resonance>& rs) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rs)
        arr.push_back(ordered_json{{"e", r.e_tilde}, {"gamma", r.gamma_tilde}, {"q", r.q}, {"zeta", r.zeta}});
    return arr;
}

inline ordered_json report_json(const ConditionReport& rep) {
    ordered_json arr = ordered_json::array();
    for (const auto& ck : rep.checks)
        arr.push_back(ordered_json{
            {"name", ck.name}, {"ratio", ck.ratio}, {"threshold", ck.threshold}, {"pass", ck.pass}});
    return ordered_json{{"checks", arr}, {"all_pass", rep.all_pass}};
}

inline void write_pulse_csv(const std::filesystem::path& path, const ScenarioConfig& c,
                            const PulseState& p) {
    auto out = open_out(path);
    out << "# fanolight pulse snapshot, t = " << fmt17(p.time) << "\n";
    csv_unit_header(out, c);
    out << "z,re_alpha,im_alpha,re_sigma21,im_sigma21,abs2_alpha\n";
    for (std::size_t j = 0; j < p.size(); ++j) {
        out << fmt17(p.z(j)) << ',' << fmt17(p.alpha[j].real()) << ',' << fmt17(p.alpha[j].imag())
            << ',' << fmt17(p.sigma21[j].real()) << ',' << fmt17(p.sigma21[j].imag()) << ','
            << fmt17(std::norm(p.alpha[j])) << "\n";
    }
}

}  // namespace detail

// Response functions over the x grid, one CSV per resonance set plus a JSON
// sidecar. Returns the emitted paths.
inline std::vector<std::filesystem::path> cmd_spectra(const ScenarioConfig& c,
                                                      const std::filesystem::path& outdir) {
    c.validate();
    std::filesystem::create_directories(outdir);
    std::vector<std::filesystem::path> emitted;

    std::vector<std::vector<Resonance>> sets;
    sets.push_back(model_from_config(c).resonances);
    if (!c.resonances_alt.empty()) sets.push_back(c.resonances_alt);

    ordered_json meta;
    meta["units"] = detail::units_json(c);
    meta["gamma2"] = c.gamma2;
    meta["grid"] = ordered_json{{"x_min", c.x_min}, {"x_max", c.x_max}, {"points", c.x_points}};
    meta["files"] = ordered_json::array();

    for (std::size_t si = 0; si < sets.size(); ++si) {
        const FanoModel model = make_fano_model(sets[si], c.epsilon2, c.pole_opts);
        const auto grid = FrequencyGrid::linspace(c.x_min, c.x_max, c.x_points, model);
        const Spectrum spec = sweep_response(model, grid, c.gamma2);

        const auto path = outdir / ("spectra_" + std::to_string(si + 1) + ".csv");
        auto out = detail::open_out(path);
        out << "# fanolight medium response\n";
        detail::csv_unit_header(out, c);
        out << "# x = (omega - (E1_tilde - epsilon2)) / " << c.unit_energy << "\n";
        out << "x,re_beta1,im_beta1,re_beta1L,im_beta1L,re_beta2,im_beta2,re_b,im_b,re_f,im_f\n";
        for (std::size_t i = 0; i < grid.x.size(); ++i) {
            const auto& r = spec.points[i];
            out << detail::fmt17(grid.x[i]) << ',' << detail::fmt17(r.beta1.real()) << ','
                << detail::fmt17(r.beta1.imag()) << ',' << detail::fmt17(r.beta1L.real()) << ','
                << detail::fmt17(r.beta1L.imag()) << ',' << detail::fmt17(r.beta2.real()) << ','
                << detail::fmt17(r.beta2.imag()) << ',' << detail::fmt17(r.b.real()) << ','
                << detail::fmt17(r.b.imag()) << ',' << detail::fmt17(r.f.real()) << ','
                << detail::fmt17(r.f.imag()) << "\n";
        }
        emitted.push_back(path);

        ordered_json fj;
        fj["file"] = path.filename().string();
        fj["resonances"] = detail::resonances_json(model.resonances);
        ordered_json windows = ordered_json::array();
        for (double w : fano_windows(model, Transition::signal, c.window_tol)) windows.push_back(w);
        fj["fano_windows_signal"] = windows;
        meta["files"].push_back(fj);
    }

    const auto mpath = outdir / "spectra_meta.json";
    detail::open_out(mpath) << meta.dump(2) << "\n";
    emitted.push_back(mpath);
    return emitted;
}

// Two-branch dispersion over a k sweep with an eigenvalue-residual oracle
// column, plus a JSON summary of the small-k data and regime report.
inline std::vector<std::filesystem::path> cmd_dispersion(const ScenarioConfig& c,
                                                         const std::filesystem::path& outdir) {
    c.validate();
    std::filesystem::create_directories(outdir);
    const FanoModel model = model_from_config(c);
    const MediumParams mp = medium_from_config(c, model);
    const Wavenumbers wn = wavenumbers(mp);

    std::vector<double> ks(c.k_points);
    for (std::size_t i = 0; i < c.k_points; ++i)
        ks[i] = c.k_min + (c.k_max - c.k_min) * static_cast<double>(i) /
                              static_cast<double>(c.k_points - 1);
    const auto freqs = omega_pm_sweep(ks, wn, mp.c);

    const auto path = outdir / "dispersion.csv";
    auto out = detail::open_out(path);
    out << "# fanolight polariton dispersion\n";
    detail::csv_unit_header(out, c);
    out << "k,re_omega_plus,im_omega_plus,re_omega_minus,im_omega_minus,eig_residual\n";
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const auto m = detail::mode_matrix(ks[i], mp);
        Eigen::Matrix2cd a;
        a << m.a00, m.a01, m.a10, m.a11;
        const Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(a, false);
        const cplx l1 = es.eigenvalues()(0), l2 = es.eigenvalues()(1);
        const cplx f1 = -cplx(0.0, 1.0) * freqs[i].omega_plus;
        const cplx f2 = -cplx(0.0, 1.0) * freqs[i].omega_minus;
        const double scale = std::max({std::abs(l1), std::abs(l2), 1e-300});
        const double res = std::min(std::max(std::abs(f1 - l1), std::abs(f2 - l2)),
                                    std::max(std::abs(f1 - l2), std::abs(f2 - l1))) / scale;
        out << detail::fmt17(ks[i]) << ',' << detail::fmt17(freqs[i].omega_plus.real()) << ','
            << detail::fmt17(freqs[i].omega_plus.imag()) << ','
            << detail::fmt17(freqs[i].omega_minus.real()) << ','
            << detail::fmt17(freqs[i].omega_minus.imag()) << ',' << detail::fmt17(res) << "\n";
    }

    const BranchPoint bp = small_k(wn, mp.c);
    const double t_ref = c.schedule.segments.empty() ? 1.0 : c.schedule.segments.front().duration();
    ordered_json meta;
    meta["units"] = detail::units_json(c);
    meta["operating_x"] = c.operating_x;
    meta["vg_plus"] = bp.vg_plus;
    meta["vg_minus"] = bp.vg_minus;
    meta["chi_plus"] = bp.chi_plus;
    meta["chi_minus"] = bp.chi_minus;
    meta["omega_plus0"] = ordered_json{bp.omega_plus0.real(), bp.omega_plus0.imag()};
    meta["omega_minus0"] = ordered_json{bp.omega_minus0.real(), bp.omega_minus0.imag()};
    meta["chi_over_vg"] =
        bp.vg_plus != 0.0 ? std::abs(std::imag(bp.slope_plus(mp.c))) / bp.vg_plus : 0.0;
    meta["conditions"] = detail::report_json(check_conditions(model, mp, t_ref, c.regime_threshold));
    const auto mpath = outdir / "dispersion_meta.json";
    detail::open_out(mpath) << meta.dump(2) << "\n";
    return {path, mpath};
}

// Full storage/retrieval protocol: stored and retrieved snapshots, optional
// intermediate retrieval snapshots, and the memory report.
inline std::vector<std::filesystem::path> cmd_simulate(const ScenarioConfig& c,
                                                       const std::filesystem::path& outdir) {
    c.validate();
    if (c.schedule.segments.empty())
        throw validation_error("simulate: config needs a control schedule");
    std::filesystem::create_directories(outdir);

    const FanoModel model = model_from_config(c);
    MediumParams mp = medium_from_config(c, model);
    const PulseState input = pulse_from_config(c);

    const MemoryReport rep = round_trip(input, c.schedule, mp, c.retrieval);

    std::vector<std::filesystem::path> emitted;
    const auto in_path = outdir / "input.csv";
    detail::write_pulse_csv(in_path, c, input);
    emitted.push_back(in_path);
    const auto st_path = outdir / "stored.csv";
    detail::write_pulse_csv(st_path, c, rep.stored);
    emitted.push_back(st_path);

    // intermediate retrieval snapshots
    if (c.snapshots > 0) {
        std::size_t ri = 0;
        for (std::size_t i = 0; i < c.schedule.segments.size(); ++i)
            if (c.schedule.segments[i].on()) ri = i;  // last on-segment retrieves
        const auto& seg = c.schedule.segments[ri];
        for (std::size_t s = 1; s <= c.snapshots; ++s) {
            const double t = seg.duration() * static_cast<double>(s) / static_cast<double>(c.snapshots);
            const PulseState snap = retrieve_stage(rep.stored, mp, t, seg.omega, c.retrieval);
            char name[64];
            std::snprintf(name, sizeof name, "retrieve_%03zu.csv", s);
            const auto p = outdir / name;
            detail::write_pulse_csv(p, c, snap);
            emitted.push_back(p);
        }
    }

    const auto rt_path = outdir / "retrieved.csv";
    detail::write_pulse_csv(rt_path, c, rep.retrieved);
    emitted.push_back(rt_path);

    ordered_json meta;
    meta["units"] = detail::units_json(c);
    meta["fidelity"] = rep.fidelity;
    meta["amplitude_ratio"] = rep.amplitude_ratio;
    meta["delay"] = rep.delay;
    meta["expected_delay"] = rep.expected_delay;
    meta["eit_ratio"] = rep.eit_ratio;
    meta["eit_ok"] = rep.eit_ok;
    meta["chi_over_vg"] = rep.chi_over_vg;
    meta["l_absorption"] = rep.l_absorption;
    meta["l_effective"] = rep.l_effective;
    meta["write_duration"] = rep.write_duration;
    meta["storage_duration"] = rep.storage_duration;
    meta["retrieve_duration"] = rep.retrieve_duration;
    meta["prefactor"] = ordered_json{rep.prefactor.real(), rep.prefactor.imag()};
    meta["retrieval"] = c.retrieval == Retrieval::exact_slow_branch ? "exact" : "small_k";
    meta["conditions"] =
        detail::report_json(check_conditions(model, mp, rep.write_duration, c.regime_threshold));
    const auto mpath = outdir / "memory_report.json";
    detail::open_out(mpath) << meta.dump(2) << "\n";
    emitted.push_back(mpath);
    return emitted;
}

// Validity-condition report alone.
inline std::vector<std::filesystem::path> cmd_check(const ScenarioConfig& c,
                                                    const std::filesystem::path& outdir) {
    c.validate();
    std::filesystem::create_directories(outdir);
    const FanoModel model = model_from_config(c);
    const MediumParams mp = medium_from_config(c, model);
    const double t_ref = c.schedule.segments.empty() ? 1.0 : c.schedule.segments.front().duration();

    ordered_json meta;
    meta["units"] = detail::units_json(c);
    meta["operating_x"] = c.operating_x;
    meta["pulse_duration"] = t_ref;
    meta["conditions"] = detail::report_json(check_conditions(model, mp, t_ref, c.regime_threshold));
    const auto mpath = outdir / "check.json";
    detail::open_out(mpath) << meta.dump(2) << "\n";
    return {mpath};
}

}  // namespace fanolight
