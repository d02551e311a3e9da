#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "fanolight/medium_response.hpp"

#include "support/quadrature.hpp"
#include "support/testutil.hpp"

using namespace fanolight;
using fanolight::testing::Rng;
using fanolight::testing::rel_err;
using Catch::Approx;

namespace {

FanoModel fig3_model(double q1 = 7.0, double q2 = 4.0, double zeta = 0.1, double p = 0.2) {
    return make_fano_model({{0.0, p, q1, zeta}, {1.0, p, q2, zeta}});
}

}  // namespace

TEST_CASE("response functions: frozen values for the mismatched two-resonance set") {
    // Independent 40-digit evaluation of the pole sums at gamma2 = 0.
    const auto m = fig3_model();
    struct Want {
        double x;
        cplx beta1, beta1L, beta2, b;
    };
    const Want table[] = {
        {0.5,
         {8.04247719318987069, 20.7345115136926354},
         {8.65697271623203425, 25.0887589315680888},
         {8.34407008793449084, 22.8079626650618989},
         {0.603185789489240302, 4.14690230273852707}},
        {-0.3,
         {7.2413975853144587, -52.2084258036917187},
         {9.75978099505679104, -62.7628865386408069},
         {8.40681000920100439, -57.2482334444280291},
         {2.33082484777309139, -10.0796152814726208}},
        {1.7,
         {11.8731183032053419, 13.8413835519394507},
         {13.079549998159144, 17.0076216236388671},
         {12.4617432360337424, 15.3462654830981959},
         {1.17724986565680085, 3.00976386231749032}},
    };
    for (const auto& w : table) {
        const ResponsePoint r = response_at_x(m, w.x);
        REQUIRE(rel_err(r.beta1, w.beta1) < 1e-13);
        REQUIRE(rel_err(r.beta1L, w.beta1L) < 1e-13);
        REQUIRE(rel_err(r.beta2, w.beta2) < 1e-13);
        REQUIRE(rel_err(r.b, w.b) < 1e-13);
    }
}

TEST_CASE("zero mismatch collapses the control responses onto beta1") {
    const auto m = fig3_model(7.0, 4.0, /*zeta=*/0.0);
    Rng rng(112);
    for (int i = 0; i < 25; ++i) {
        const ResponsePoint r = response_at_x(m, rng.uniform(-3.0, 4.0), rng.uniform(0.0, 0.4));
        REQUIRE(r.b == cplx(0.0, 0.0));
        REQUIRE(r.beta1L == r.beta1);
        REQUIRE(r.beta2 == r.beta1);
        REQUIRE(r.f == cplx(0.0, 0.0));
    }
}

TEST_CASE("exact small-mismatch relations") {
    const auto m = fig3_model();
    Rng rng(113);
    for (int i = 0; i < 40; ++i) {
        const double x = rng.uniform(-3.0, 4.0);
        const double g2 = rng.uniform(0.0, 0.3);
        const ResponsePoint r = response_at_x(m, x, g2);
        // f |beta1|^2 = b conj(beta1), exactly by construction
        REQUIRE(std::abs(r.f * std::norm(r.beta1) - r.b * std::conj(r.beta1)) <
                1e-14 * std::abs(r.b * std::conj(r.beta1)) + 1e-300);
        // beta2 = beta1 + b/2 is algebraically exact for these numerators
        REQUIRE(std::abs(r.beta2 - r.beta1 - 0.5 * r.b) < 1e-12);
        // beta1L - beta1 - b is the quadratic mismatch remainder
        REQUIRE(std::abs(r.beta1L - r.beta1 - r.b) < 2.0 * 0.1 * 0.1 * std::abs(r.beta1));
    }
}

TEST_CASE("f_func composition at a fixed point") {
    const auto m = fig3_model();
    const cplx b = b_func(m, omega_from_x(m, 0.5));
    const cplx b1 = beta1(m, omega_from_x(m, 0.5));
    const cplx f = f_func(m, omega_from_x(m, 0.5));
    REQUIRE(std::abs(f - b * std::conj(b1) / std::norm(b1)) < 1e-15 * std::abs(f));
    REQUIRE(std::abs(f - b / b1) < 1e-13 * std::abs(f));  // same thing, written directly
}

TEST_CASE("b = 0 gives f = 0; real beta1 gives f = b/beta1 with real denominator") {
    REQUIRE(f_func(cplx(0.0), cplx(2.0, 1.0)) == cplx(0.0, 0.0));
    const cplx f = f_func(cplx(0.3, -0.2), cplx(4.0, 0.0));
    REQUIRE(std::abs(f - cplx(0.3, -0.2) / 4.0) < 1e-16);
}

TEST_CASE("asymptotes: responses approach pi at the 1/x rate set by sum q gamma") {
    SECTION("modest asymmetry satisfies the 1% figure at |x| = 50") {
        const auto m = fig3_model(1.2, 0.8, 0.1);
        for (double x : {-50.0, 50.0}) {
            const ResponsePoint r = response_at_x(m, x);
            REQUIRE(std::abs(r.beta1 / std::numbers::pi - 1.0) < 1e-2);
            REQUIRE(std::abs(r.beta1L / std::numbers::pi - 1.0) < 1e-2);
            REQUIRE(std::abs(r.beta2 / std::numbers::pi - 1.0) < 1e-2);
            REQUIRE(std::abs(r.b) / std::numbers::pi < 1e-2);
        }
    }
    SECTION("large asymmetry needs proportionally larger |x| for the same figure") {
        const auto m = fig3_model();  // q = 7, 4
        double coeff = 0.0;           // leading 1/x coefficient, sum p (q^2 + 1)/2
        for (const auto& r : m.resonances)
            coeff += 0.5 * r.gamma_tilde * (r.q * r.q + 1.0);
        for (double x : {-2000.0, -50.0, 50.0, 2000.0}) {
            const ResponsePoint r = response_at_x(m, x);
            REQUIRE(std::abs(r.beta1 / std::numbers::pi - 1.0) < 2.0 * coeff / std::abs(x));
        }
        REQUIRE(std::abs(response_at_x(m, 2000.0).beta1 / std::numbers::pi - 1.0) < 1e-2);
    }
}

TEST_CASE("two-resonance closed forms: frozen values") {
    const cplx c1 = beta1_two_resonance(0.5, 0.2, 0.2, 7.0, 4.0);
    REQUIRE(rel_err(c1, {20.0411945142797155, 13.1080245201505166}) < 1e-14);
    const cplx cb = b_two_resonance(0.5, 0.2, 0.2, 7.0, 4.0, 0.1, 0.1);
    REQUIRE(rel_err(cb, {3.14159265358979324, 3.09826034112648575}) < 1e-14);
}

TEST_CASE("closed forms vs generic pole sums agree within the documented O(p) band") {
    // The closed forms drop O(p) pole-position corrections. Curve agreement is
    // measured in the L2 sense over the band (pointwise ratios blow up where
    // either function crosses zero near the interference windows); the bound
    // 2p is calibrated on the q = (7,4), zeta = 0.1 set and tightens linearly.
    struct BandError {
        double l2_beta1, l2_b, away_beta1;
    };
    const auto band_error = [](double p) {
        const auto m = fig3_model(7.0, 4.0, 0.1, p);
        const auto windows = fano_windows(m, Transition::signal);
        double n1 = 0.0, d1 = 0.0, nb = 0.0, db = 0.0, away = 0.0;
        for (double x = -1.0; x <= 2.0001; x += 0.01) {
            const ResponsePoint r = response_at_x(m, x);
            const cplx c1 = beta1_two_resonance(x, p, p, 7.0, 4.0);
            const cplx cb = b_two_resonance(x, p, p, 7.0, 4.0, 0.1, 0.1);
            n1 += std::norm(c1 - r.beta1);
            d1 += std::norm(r.beta1);
            nb += std::norm(cb - r.b);
            db += std::norm(r.b);
            bool near_window = false;
            for (double w : windows) near_window = near_window || std::abs(x - w) < 0.2;
            if (!near_window) away = std::max(away, rel_err(c1, r.beta1));
        }
        return BandError{std::sqrt(n1 / d1), std::sqrt(nb / db), away};
    };
    const BandError at_02 = band_error(0.2);
    const BandError at_002 = band_error(0.02);
    REQUIRE(at_02.l2_beta1 < 2.0 * 0.2);
    REQUIRE(at_02.l2_b < 2.0 * 0.2);
    REQUIRE(at_002.l2_beta1 < 2.0 * 0.02);
    REQUIRE(at_002.l2_b < 2.0 * 0.02);
    REQUIRE(at_002.l2_beta1 < at_02.l2_beta1);  // tightening with p
    REQUIRE(at_002.l2_b < at_02.l2_b);
    // pointwise beta1 agreement away from the interference windows
    REQUIRE(at_02.away_beta1 < 5.0 * 0.2);
    REQUIRE(at_002.away_beta1 < 5.0 * 0.02);
}

TEST_CASE("quadrature oracle: closed-form beta1 vs numeric lambda integration") {
    // Single resonance, unit width; oracle integrates the profile kernel over
    // [-50, 50] widths with the flat background handled analytically.
    const auto run = [](double q, double gamma2) {
        const auto m = make_fano_model({{0.0, 1.0, q, 0.0}});
        const auto profile = [&m](double l) { return fano_profile(m, l, Transition::signal); };
        double worst = 0.0;
        for (double x : {-2.0, -0.5, 0.0, 0.7, 2.0}) {
            const double omega = omega_from_x(m, x);
            const cplx closed = beta1(m, omega, gamma2);
            const cplx quad = fanolight::testing::beta1_by_quadrature(
                profile, m.epsilon2 + omega, gamma2, -50.0, 50.0, 1e-8);
            worst = std::max(worst, rel_err(quad, closed));
        }
        return worst;
    };
    const double e10 = run(10.0, 0.0);
    const double e50 = run(50.0, 0.0);
    REQUIRE(e50 < 0.05);
    REQUIRE(e50 < e10);           // relative error shrinks as q grows
    REQUIRE(run(10.0, 0.8) < 0.05);  // off-axis kernel pole, plain integration path
}

TEST_CASE("quadrature oracle also covers the two-resonance generic path") {
    const auto m = fig3_model();
    const auto profile = [&m](double l) { return fano_profile(m, l, Transition::signal); };
    const double omega = omega_from_x(m, 0.5);
    const cplx closed = beta1(m, omega, 0.0);
    const cplx quad = fanolight::testing::beta1_by_quadrature(profile, m.epsilon2 + omega, 0.0,
                                                              -50.0, 51.0, 1e-8);
    REQUIRE(rel_err(quad, closed) < 0.02);
}

TEST_CASE("coincident poles are reported") {
    FanoModel m = fig3_model();
    m.pole_set.poles[1] = m.pole_set.poles[0];
    REQUIRE_THROWS_AS(beta1(m, 0.5), singular_error);
}

TEST_CASE("epsilon2 only shifts the carrier bookkeeping") {
    const auto m0 = fig3_model();
    auto shifted = make_fano_model({{0.0, 0.2, 7.0, 0.1}, {1.0, 0.2, 4.0, 0.1}}, /*epsilon2=*/0.37);
    for (double x : {-0.5, 0.2, 1.4}) {
        REQUIRE(rel_err(response_at_x(shifted, x).beta1, response_at_x(m0, x).beta1) < 1e-14);
        REQUIRE(omega_from_x(shifted, x) == Approx(omega_from_x(m0, x) - 0.37));
    }
}

TEST_CASE("frequency grid validation and mapping") {
    const auto m = fig3_model();
    REQUIRE_THROWS_AS(FrequencyGrid::linspace(1.0, 1.0, 10, m), validation_error);
    REQUIRE_THROWS_AS(FrequencyGrid::linspace(0.0, 1.0, 1, m), validation_error);
    const auto g = FrequencyGrid::linspace(-1.0, 2.0, 4, m);
    REQUIRE(g.x.size() == 4);
    REQUIRE(g.x[0] == Approx(-1.0));
    REQUIRE(g.x[3] == Approx(2.0));
    REQUIRE(g.omega(1) == Approx(omega_from_x(m, 0.0)));
    const Spectrum s = sweep_response(m, g);
    REQUIRE(s.points.size() == 4);
    REQUIRE(rel_err(s.points[2].beta1, response_at_x(m, 1.0).beta1) < 1e-15);
}
