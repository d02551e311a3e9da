#include <catch2/catch_amalgamated.hpp>

#include "fanolight/complex_poly.hpp"

#include "support/testutil.hpp"

using namespace fanolight;
using fanolight::testing::Rng;

TEST_CASE("poly_eval matches direct expansion") {
    const std::vector<cplx> c{{1.0, 0.0}, {-2.0, 1.0}, {0.0, 0.0}, {3.0, -1.0}};
    const cplx x(0.5, -0.25);
    const cplx direct = c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x;
    REQUIRE(std::abs(poly_eval(c, x) - direct) < 1e-15);
}

TEST_CASE("roots of known factorizations are recovered") {
    SECTION("linear") {
        const auto r = poly_roots({cplx(2.0, -1.0), cplx(1.0, 1.0)});
        REQUIRE(r.size() == 1);
        REQUIRE(std::abs(r[0] - (-cplx(2.0, -1.0) / cplx(1.0, 1.0))) < 1e-14);
    }
    SECTION("quadratic with complex roots") {
        const cplx r1(0.3, 0.7), r2(-1.2, 0.1);
        const auto c = poly_from_roots({r1, r2});
        const auto roots = poly_roots(c);
        REQUIRE(roots.size() == 2);
        REQUIRE(std::abs(roots[0] - r2) < 1e-13);
        REQUIRE(std::abs(roots[1] - r1) < 1e-13);
    }
    SECTION("degree 5 via companion matrix") {
        const std::vector<cplx> want{{-2.0, 0.3}, {-0.5, -0.4}, {0.1, 0.9}, {1.0, 0.05}, {2.5, -0.6}};
        const auto roots = poly_roots(poly_from_roots(want));
        REQUIRE(roots.size() == 5);
        for (std::size_t i = 0; i < want.size(); ++i) REQUIRE(std::abs(roots[i] - want[i]) < 1e-11);
    }
}

TEST_CASE("random polynomials: residual at every root is tiny") {
    Rng rng(20240817);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform(0.0, 6.0));
        std::vector<cplx> roots_in;
        for (int i = 0; i < n; ++i) roots_in.push_back(rng.complex_in_box(-2.0, 2.0, -2.0, 2.0));
        const auto c = poly_from_roots(roots_in);
        for (cplx r : poly_roots(c)) REQUIRE(std::abs(poly_eval(c, r)) < 1e-9);
    }
}

TEST_CASE("constant polynomial is rejected") {
    REQUIRE_THROWS_AS(poly_roots({cplx(1.0)}), validation_error);
    REQUIRE_THROWS_AS(poly_roots({cplx(1.0), cplx(0.0)}), validation_error);
}
