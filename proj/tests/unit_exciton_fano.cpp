#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "fanolight/exciton_fano.hpp"

#include "support/testutil.hpp"

using namespace fanolight;
using fanolight::testing::Rng;
using Catch::Approx;

namespace {

FanoModel fig3_model(double q1 = 7.0, double q2 = 4.0, double zeta = 0.1, double p = 0.2) {
    return make_fano_model({{0.0, p, q1, zeta}, {1.0, p, q2, zeta}});
}

}  // namespace

TEST_CASE("effective_levels: vanishing shifts reproduce the bare pair") {
    BareResonancePair p{.e1 = 0.3, .e2 = 1.7, .gamma1 = 0.05, .gamma2 = 0.12};
    const auto lv = effective_levels(p);
    REQUIRE(lv.e1_tilde == Approx(0.3));
    REQUIRE(lv.e2_tilde == Approx(1.7));
    REQUIRE(lv.gamma1_tilde == Approx(0.05));
    REQUIRE(lv.gamma2_tilde == Approx(0.12));
}

TEST_CASE("effective_levels: degenerate energies split symmetrically by |d12|") {
    BareResonancePair p{.e1 = 2.0, .e2 = 2.0, .gamma1 = 0.1, .gamma2 = 0.1, .delta12 = cplx(0.0, 0.3)};
    const auto lv = effective_levels(p);
    REQUIRE(lv.e1_tilde == Approx(2.0 - 0.15));
    REQUIRE(lv.e2_tilde == Approx(2.0 + 0.15));
}

TEST_CASE("effective_levels: generic case against frozen re-derivation") {
    // E1=0, E2=1, G1=G2=0.2, D1=D2=0.05, D12=0.1, evaluated independently
    // with 30-digit arithmetic.
    BareResonancePair p{.e1 = 0.0, .e2 = 1.0, .gamma1 = 0.2, .gamma2 = 0.2,
                        .delta1 = 0.05, .delta2 = 0.05, .delta12 = cplx(0.1)};
    const auto lv = effective_levels(p);
    REQUIRE(lv.e1_tilde == Approx(0.047506218943955486489).epsilon(1e-14));
    REQUIRE(lv.e2_tilde == Approx(1.052493781056044514).epsilon(1e-14));
    REQUIRE(lv.gamma1_tilde == Approx(0.16049261385570242395).epsilon(1e-13));
    REQUIRE(lv.gamma2_tilde == Approx(0.23950738614429757605).epsilon(1e-13));
}

TEST_CASE("effective_levels: trace identity and ordering hold for random pairs") {
    Rng rng(7771);
    for (int trial = 0; trial < 100; ++trial) {
        BareResonancePair p;
        p.e1 = rng.uniform(-1.0, 1.0);
        p.e2 = p.e1 + rng.uniform(0.2, 2.0);
        p.gamma1 = rng.uniform(0.0, 0.3);
        p.gamma2 = rng.uniform(0.0, 0.3);
        p.delta1 = rng.uniform(-0.1, 0.1);
        p.delta2 = rng.uniform(-0.1, 0.1);
        p.delta12 = rng.uniform(-0.2, 0.2);
        const auto lv = effective_levels(p);
        const double trace = p.e1 + p.delta1 + p.e2 + p.delta2;
        REQUIRE(lv.e1_tilde + lv.e2_tilde == Approx(trace).margin(1e-14));
        REQUIRE(lv.e1_tilde <= lv.e2_tilde);
    }
}

TEST_CASE("effective_levels: singular configuration is reported") {
    // e1+d1 == e2+d2 with d12 = 0 puts a dressed level on top of a bare one.
    BareResonancePair p{.e1 = 1.0, .e2 = 1.0, .gamma1 = 0.1, .gamma2 = 0.1};
    REQUIRE_THROWS_AS(effective_levels(p), singular_error);
}

TEST_CASE("poles: single resonance is e + i gamma/2") {
    const std::vector<Resonance> rs{{1.5, 0.4, 3.0, 0.0}};
    const auto ps = poles(rs);
    REQUIRE(ps.poles.size() == 1);
    REQUIRE(std::abs(ps.poles[0] - cplx(1.5, 0.2)) < 1e-14);
    REQUIRE_FALSE(ps.near_singular);
}

TEST_CASE("poles: two-resonance quadratic against frozen roots") {
    const auto m = fig3_model();
    REQUIRE(m.pole_set.poles.size() == 2);
    REQUIRE(std::abs(m.pole_set.poles[0] - cplx(0.010102051443364380, 0.1)) < 1e-13);
    REQUIRE(std::abs(m.pole_set.poles[1] - cplx(0.989897948556635620, 0.1)) < 1e-13);
    REQUIRE(m.pole_set.max_residual < 1e-12);
}

TEST_CASE("poles: substitution residual below 1e-10 for random sets") {
    Rng rng(90210);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform(0.0, 5.0));
        std::vector<Resonance> rs;
        double e = 0.0;
        for (int i = 0; i < n; ++i) {
            e += rng.uniform(0.5, 1.5);
            rs.push_back({e, rng.uniform(0.01, 0.5), 0.0, 0.0});
        }
        const auto ps = poles(rs);
        REQUIRE(ps.poles.size() == static_cast<std::size_t>(n));
        REQUIRE(ps.max_residual < 1e-10);
        for (cplx s : ps.poles) REQUIRE(std::imag(s) > 0.0);
    }
}

TEST_CASE("poles: zero width rejected, tiny width flagged near-singular") {
    REQUIRE_THROWS_AS(poles(std::vector<Resonance>{{0.0, 0.0, 1.0, 0.0}}), validation_error);
    const std::vector<Resonance> rs{{0.0, 1e-8, 1.0, 0.0}, {1.0, 0.2, 1.0, 0.0}};
    const auto ps = poles(rs);
    REQUIRE(ps.near_singular);
    REQUIRE(std::abs(ps.poles[0].real()) < 1e-6);
}

TEST_CASE("poles: degenerate energies produce a dark real pole and fail the model check") {
    // Equal energies give prod(s-E)^2 - (i/2)(G1+G2)(s-E): one root is real.
    const std::vector<Resonance> rs{{1.0, 0.2, 0.0, 0.0}, {1.0, 0.3, 0.0, 0.0}};
    REQUIRE_THROWS_AS(poles(rs), numerical_error);
}

TEST_CASE("phase_shift: pole limits and detuned limit") {
    const std::vector<Resonance> rs{{1.0, 0.2, 0.0, 0.0}};
    REQUIRE(phase_shift(1.0 + 1e-9, rs).partial[0] == Approx(-std::numbers::pi / 2).margin(1e-6));
    REQUIRE(phase_shift(1.0 - 1e-9, rs).partial[0] == Approx(std::numbers::pi / 2).margin(1e-6));
    REQUIRE(std::abs(phase_shift(1e6, rs).total) < 1e-6);
    REQUIRE_THROWS_AS(phase_shift(1.0, rs), numerical_error);
}

TEST_CASE("phase_shift: total equals arctan(-pi/z) with z from the coupling sum") {
    const auto m = fig3_model();
    Rng rng(5150);
    for (int trial = 0; trial < 40; ++trial) {
        const double lambda = rng.uniform(-2.0, 3.0);
        bool on_pole = false;
        for (const auto& r : m.resonances) on_pole = on_pole || lambda == r.e_tilde;
        if (on_pole) continue;
        const auto ph = phase_shift(lambda, m.resonances);
        // z(lambda) = [sum |U_v|^2/(lambda - E_v)]^-1 with |U_v|^2 = gamma_v/(2 pi)
        double inv_z = 0.0;
        for (const auto& r : m.resonances)
            inv_z += r.gamma_tilde / (2.0 * std::numbers::pi) / (lambda - r.e_tilde);
        REQUIRE(ph.total == Approx(std::atan(-std::numbers::pi * inv_z)).margin(1e-12));
        // sum rule: tan(total) == sum of partial tangents
        double tan_sum = 0.0;
        for (double d : ph.partial) tan_sum += std::tan(d);
        REQUIRE(std::tan(ph.total) == Approx(tan_sum).margin(1e-10));
    }
}

TEST_CASE("fano_profile: single resonance reduces to the classic lineshape") {
    const double gamma = 0.3, q = 2.5, e0 = 1.0;
    const auto m = make_fano_model({{e0, gamma, q, 0.0}});
    for (double eps : {-30.0, -3.0, -1.0, -0.2, 0.0, 0.4, 1.0, 5.0, 40.0}) {
        const double lambda = e0 + eps * gamma / 2.0;
        const double classic = (eps + q) * (eps + q) / (eps * eps + 1.0);
        REQUIRE(fano_profile(m, lambda, Transition::signal) == Approx(classic).epsilon(1e-12));
    }
    // eps -> infinity limit
    REQUIRE(fano_profile(m, e0 + 1e7 * gamma, Transition::signal) == Approx(1.0).epsilon(1e-5));
}

TEST_CASE("fano_profile: non-negative and -> 1 with the expected 1/lambda rate") {
    const auto m = fig3_model();
    double coeff = 0.0;
    for (const auto& r : m.resonances) coeff += std::abs(r.q) * r.gamma_tilde;
    Rng rng(31337);
    for (int trial = 0; trial < 200; ++trial) {
        const double lambda = rng.uniform(-40.0, 40.0);
        const double v = fano_profile(m, lambda, Transition::signal);
        REQUIRE(v >= 0.0);
        if (std::abs(lambda) > 15.0) REQUIRE(std::abs(v - 1.0) <= 2.0 * coeff / std::abs(lambda));
    }
}

TEST_CASE("fano_profile: frozen midpoint value for the mismatched two-resonance set") {
    // lambda = 0.5 between the resonances; exact rational value 2.56 from the
    // closed pole structure (Im s = 0.1 for equal widths).
    const auto m = fig3_model();
    REQUIRE(fano_profile(m, 0.5, Transition::signal) == Approx(2.56).epsilon(1e-13));
}

TEST_CASE("fano_windows: closed forms for simple cases") {
    SECTION("single resonance window at e - q gamma/2") {
        const auto m = make_fano_model({{1.0, 0.3, 2.0, 0.0}});
        const auto w = fano_windows(m, Transition::signal);
        REQUIRE(w.size() == 1);
        REQUIRE(w[0] == Approx(1.0 - 2.0 * 0.15).epsilon(1e-12));
    }
    SECTION("q = 0 everywhere puts windows on the resonances") {
        const auto m = make_fano_model({{0.0, 0.2, 0.0, 0.0}, {1.0, 0.4, 0.0, 0.0}});
        const auto w = fano_windows(m, Transition::signal);
        REQUIRE(w.size() == 2);
        REQUIRE(w[0] == Approx(0.0).margin(1e-12));
        REQUIRE(w[1] == Approx(1.0).margin(1e-12));
    }
    SECTION("control windows use q(1+zeta)") {
        const auto m = make_fano_model({{1.0, 0.3, 2.0, 0.1}});
        const auto w = fano_windows(m, Transition::control);
        REQUIRE(w.size() == 1);
        REQUIRE(w[0] == Approx(1.0 - 2.2 * 0.15).epsilon(1e-12));
    }
}

TEST_CASE("fano_windows: frozen roots and sign-scan oracle for the mismatched sets") {
    const auto check = [](double q1, double q2, double w_lo, double w_hi) {
        const auto m = fig3_model(q1, q2);
        const auto w = fano_windows(m, Transition::signal);
        REQUIRE(w.size() == 2);
        REQUIRE(w[0] == Approx(w_lo).epsilon(1e-12));
        REQUIRE(w[1] == Approx(w_hi).epsilon(1e-12));

        // independent route: bisection on sign changes of a dense scan
        const auto num = [&m](double l) { return std::real(fano_numerator(m, l, Transition::signal)); };
        std::vector<double> scan_roots;
        const double lo = -3.0, hi = 3.0;
        const int steps = 6000;
        double prev = num(lo);
        for (int i = 1; i <= steps; ++i) {
            const double x = lo + (hi - lo) * i / steps;
            const double cur = num(x);
            if (prev == 0.0) scan_roots.push_back(lo + (hi - lo) * (i - 1) / steps);
            else if (prev * cur < 0.0) {
                double a = lo + (hi - lo) * (i - 1) / steps, b = x;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (a + b);
                    (num(a) * num(mid) <= 0.0 ? b : a) = mid;
                }
                scan_roots.push_back(0.5 * (a + b));
            }
            prev = cur;
        }
        REQUIRE(scan_roots.size() == w.size());
        for (std::size_t i = 0; i < w.size(); ++i) REQUIRE(w[i] == Approx(scan_roots[i]).margin(1e-9));
    };
    check(7.0, 4.0, -0.88815273071201050642, 0.78815273071201050642);
    check(8.0, 6.0, -1.1165151389911680013, 0.71651513899116800132);
}

TEST_CASE("fano_profile vanishes at every reported window") {
    const auto m = fig3_model();
    for (Transition tr : {Transition::signal, Transition::control})
        for (double w : fano_windows(m, tr)) REQUIRE(std::abs(fano_profile(m, w, tr)) < 1e-8);
}
