#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace qtrace {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline const cplx iu{0.0, 1.0};

// Numeric configuration shared by every evaluator.  Tolerances are absolute
// unless stated otherwise; pole_margin is measured in |log t| units.
struct PrecisionCfg {
    double series_tail_tol = 1e-16;
    int max_terms = 10000;
    double quad_tol = 1e-12;
    int max_quad_nodes = 4096;
    double pole_margin = 0.05;
    int precision_digits = 15;

    void validate() const {
        if (!(series_tail_tol > 0) || !(quad_tol > 0) || !(pole_margin > 0))
            throw std::invalid_argument("PrecisionCfg: tolerances must be positive");
        if (max_terms < 8 || max_quad_nodes < 8)
            throw std::invalid_argument("PrecisionCfg: counts must be >= 8");
    }
};

struct evaluation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// |nome| outside the disc required for an infinite product.
struct nome_error : evaluation_error {
    using evaluation_error::evaluation_error;
};
// An evaluation point collided with a zero/pole lattice.
struct pole_error : evaluation_error {
    cplx location{};
    pole_error(const std::string& msg, cplx where = {}) : evaluation_error(msg), location(where) {}
};
// Tail non-decay, max_terms or max_quad_nodes exhausted.
struct convergence_error : evaluation_error {
    using evaluation_error::evaluation_error;
};
// Parameter-region precondition violated.
struct region_error : evaluation_error {
    using evaluation_error::evaluation_error;
};
struct overflow_error : evaluation_error {
    using evaluation_error::evaluation_error;
};

inline bool finite(const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline cplx ensure_finite(const cplx& z, const char* what) {
    if (!finite(z)) throw overflow_error(std::string(what) + ": non-finite result");
    return z;
}

inline double rel_err(const cplx& a, const cplx& b) {
    double scale = std::max(std::abs(a), std::abs(b));
    if (scale == 0.0) return 0.0;
    return std::abs(a - b) / scale;
}

// Lanczos approximation for the complex gamma function (g = 7, 9 terms).
inline cplx cgamma(cplx z) {
    static const double g = 7.0;
    static const double c[9] = {
        0.99999999999980993,    676.5203681218851,     -1259.1392167224028,
        771.32342877765313,     -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,   9.9843695780195716e-6, 1.5056327351493116e-7};
    if (z.real() < 0.5) {
        // reflection formula
        return pi / (std::sin(pi * z) * cgamma(1.0 - z));
    }
    z -= 1.0;
    cplx x = c[0];
    for (int i = 1; i < 9; ++i) x += c[i] / (z + cplx(double(i), 0.0));
    cplx t = z + g + 0.5;
    return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

// Deterministic compensated accumulator (Neumaier).  Summation order is
// fixed by the caller, so results are reproducible bit-for-bit.
struct KahanSum {
    cplx sum{0.0, 0.0};
    cplx comp{0.0, 0.0};
    void add(const cplx& v) {
        cplx t = sum + v;
        cplx corr;
        corr.real(std::abs(sum.real()) >= std::abs(v.real()) ? (sum.real() - t.real()) + v.real()
                                                             : (v.real() - t.real()) + sum.real());
        corr.imag(std::abs(sum.imag()) >= std::abs(v.imag()) ? (sum.imag() - t.imag()) + v.imag()
                                                             : (v.imag() - t.imag()) + sum.imag());
        comp += corr;
        sum = t;
    }
    cplx value() const { return sum + comp; }
};

}  // namespace qtrace
