#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "fanolight/errors.hpp"

namespace fanolight {

using cplx = std::complex<double>;

// Coefficients are stored in ascending order: p(x) = c[0] + c[1] x + ... + c[n] x^n.

inline std::vector<cplx> poly_mul(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    std::vector<cplx> out(a.size() + b.size() - 1, cplx(0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

inline cplx poly_eval(const std::vector<cplx>& c, cplx x) {
    cplx acc(0.0);
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

inline cplx poly_eval_derivative(const std::vector<cplx>& c, cplx x) {
    cplx acc(0.0);
    for (std::size_t i = c.size(); i-- > 1;) acc = acc * x + c[i] * static_cast<double>(i);
    return acc;
}

// Monic product prod_v (x - r_v).
inline std::vector<cplx> poly_from_roots(const std::vector<cplx>& roots) {
    std::vector<cplx> c{cplx(1.0)};
    for (cplx r : roots) c = poly_mul(c, {-r, cplx(1.0)});
    return c;
}

namespace detail {

inline std::vector<cplx> quadratic_roots(cplx a, cplx b, cplx c) {
    const cplx disc = std::sqrt(b * b - 4.0 * a * c);
    // Pick the sign that avoids cancellation in -b -/+ disc.
    const cplx q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc) : -0.5 * (b - disc);
    if (std::abs(q) == 0.0) return {cplx(0.0), cplx(0.0)};
    return {q / a, c / q};
}

// monic holds the n low-order coefficients of a monic degree-n polynomial.
inline std::vector<cplx> companion_roots(const std::vector<cplx>& monic) {
    const std::size_t n = monic.size();
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (std::size_t i = 0; i < n; ++i) comp(i, n - 1) = -monic[i];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw numerical_error("complex_poly: companion eigensolver did not converge");
    std::vector<cplx> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    return out;
}

}  // namespace detail

// All roots of a complex polynomial. Closed forms for degree <= 2, companion-matrix
// eigenvalues above that, followed by a few Newton polish steps on the original
// coefficients.
inline std::vector<cplx> poly_roots(std::vector<cplx> c) {
    while (c.size() > 1 && std::abs(c.back()) == 0.0) c.pop_back();
    if (c.size() < 2) throw validation_error("poly_roots: polynomial is constant");
    const std::size_t n = c.size() - 1;

    std::vector<cplx> roots;
    if (n == 1) {
        roots = {-c[0] / c[1]};
    } else if (n == 2) {
        roots = detail::quadratic_roots(c[2], c[1], c[0]);
    } else {
        std::vector<cplx> monic(c.size() - 1);
        for (std::size_t i = 0; i < n; ++i) monic[i] = c[i] / c[n];
        roots = detail::companion_roots(monic);
    }

    for (cplx& r : roots) {
        for (int it = 0; it < 3; ++it) {
            const cplx p = poly_eval(c, r);
            const cplx dp = poly_eval_derivative(c, r);
            if (std::abs(dp) == 0.0) break;
            const cplx step = p / dp;
            if (!std::isfinite(std::abs(step))) break;
            r -= step;
        }
    }
    std::sort(roots.begin(), roots.end(),
              [](cplx a, cplx b) { return std::real(a) != std::real(b) ? std::real(a) < std::real(b)
                                                                       : std::imag(a) < std::imag(b); });
    return roots;
}

}  // namespace fanolight
