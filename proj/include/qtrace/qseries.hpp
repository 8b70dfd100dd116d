#pragma once

// Complex q-series primitives: Pochhammer symbols, theta functions, the
// elliptic gamma function, the phase function Omega_a, q-combinatorics and
// the basic hypergeometric series 2phi1.
//
// All functions are templated on the complex type so the same kernels run
// in double precision (std::complex<double>) or in extended precision
// (boost::multiprecision::cpp_complex_50) when a caller asks for >= 30
// digits.  Branch convention: every power q^x is exp(x * Log q) with the
// principal Log cached in qbase, uniformly across the library.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "qtrace/scalar.hpp"

namespace qtrace {

template <class C>
double abs_d(const C& z) {
    using std::abs;
    return static_cast<double>(abs(z));
}

template <class C>
double real_d(const C& z) {
    return static_cast<double>(z.real());
}

template <class C>
struct qbase {
    C q;
    C log_q;  // principal branch, cached
};

template <class C>
qbase<C> make_qbase(const C& q) {
    using std::log;
    if (abs_d(q) == 0.0) throw nome_error("qbase: q must be non-zero");
    return qbase<C>{q, log(q)};
}

inline qbase<cplx> make_qbase(double q) { return make_qbase(cplx(q, 0.0)); }

// q^x on the shared branch.  Overflows are reported, never returned.
template <class C>
C qpow(const qbase<C>& b, const C& x) {
    using std::exp;
    C e = x * b.log_q;
    if (real_d(e) > 706.0) throw overflow_error("qpow: |q^x| overflows");
    return exp(e);
}

template <class C>
C qpow(const qbase<C>& b, double x) {
    return qpow(b, C(x));
}

// [x] = (q^x - q^-x)/(q - q^-1), defined for complex x.
template <class C>
C qnum(const qbase<C>& b, const C& x) {
    C qi = C(1) / b.q;
    C den = b.q - qi;
    if (abs_d(den) < 1e-15) throw evaluation_error("qnum: q^2 = 1");
    return (qpow(b, x) - qpow(b, -x)) / den;
}

template <class C>
C qnum(const qbase<C>& b, int n) {
    return qnum(b, C(double(n)));
}

template <class C>
C qfact(const qbase<C>& b, int n) {
    C r(1);
    for (int j = 1; j <= n; ++j) r *= qnum(b, j);
    return r;
}

// Falling factorial [x]_l = [x][x-1]...[x-l+1], complex x.
template <class C>
C qfalling(const qbase<C>& b, const C& x, int l) {
    C r(1);
    for (int j = 0; j < l; ++j) r *= qnum(b, x - C(double(j)));
    return r;
}

template <class C>
C qbinom(const qbase<C>& b, int n, int m) {
    if (m < 0 || m > n) throw std::invalid_argument("qbinom: need 0 <= m <= n");
    return qfact(b, n) / (qfact(b, m) * qfact(b, n - m));
}

// (u; q) = prod_{n>=0} (1 - u q^n).  Truncates when the running factor is
// within series_tail_tol of 1 and the geometric tail bound is below it too.
template <class C>
C poch(const C& u, const C& q, const PrecisionCfg& cfg) {
    double qa = abs_d(q);
    if (!(qa < 1.0)) throw nome_error("(u;q): |q| >= 1");
    C prod(1);
    C w = u;
    for (int n = 0; n < cfg.max_terms; ++n) {
        prod *= C(1) - w;
        w *= q;
        double wa = abs_d(w);
        if (wa < cfg.series_tail_tol && wa / (1.0 - qa) < cfg.series_tail_tol) return prod;
    }
    throw convergence_error("(u;q): no truncation within max_terms");
}

// (u; q)_m, m may be negative: (u;q)_{-m} = 1/prod_{j=1..m}(1 - u q^{-j}).
template <class C>
C poch_fin(const C& u, const C& q, int m) {
    C prod(1);
    if (m >= 0) {
        C w = u;
        for (int n = 0; n < m; ++n) {
            prod *= C(1) - w;
            w *= q;
        }
    } else {
        C qi = C(1) / q;
        C w = u * qi;
        for (int n = 0; n < -m; ++n) {
            prod /= C(1) - w;
            w *= qi;
        }
    }
    return prod;
}

// (u; q, r) = prod_{n,m>=0} (1 - u q^n r^m), evaluated as prod_m (u r^m; q).
template <class C>
C poch2(const C& u, const C& q, const C& r, const PrecisionCfg& cfg) {
    double ra = abs_d(r);
    if (!(ra < 1.0)) throw nome_error("(u;q,r): |r| >= 1");
    C prod(1);
    C w = u;
    for (int m = 0; m < cfg.max_terms; ++m) {
        prod *= poch(w, q, cfg);
        w *= r;
        double wa = abs_d(w);
        if (wa < cfg.series_tail_tol && wa / (1.0 - ra) < cfg.series_tail_tol) return prod;
    }
    throw convergence_error("(u;q,r): no truncation within max_terms");
}

// theta_0(u;q) = (u;q)(q u^{-1};q) in the fundamental annulus.  Large or
// tiny u is first reduced with theta_0(q^N v;q) = (-1)^N v^{-N} q^{-N(N-1)/2}
// theta_0(v;q); the scale is assembled in log space so reduced arguments of
// any size are handled without overflow (the quasi-periodic scale itself can
// still legitimately overflow, which is reported).
template <class C>
C log_theta0(const C& u, const C& q, const PrecisionCfg& cfg) {
    using std::log;
    if (abs_d(u) == 0.0) throw pole_error("theta0: u = 0");
    double lq = std::log(abs_d(q));
    if (!(lq < 0.0)) throw nome_error("theta0: |q| >= 1");
    long N = std::lround(std::log(abs_d(u)) / lq);
    C v = u;
    C log_scale(0);
    if (N != 0) {
        using std::exp;
        C lg = log(q);
        v = u * exp(C(double(-N)) * lg);  // v = u q^{-N}
        // theta0(q^N v) = (-1)^N v^{-N} q^{-N(N-1)/2} theta0(v)
        log_scale = C(double(N)) * C(0.0, pi) - C(double(N)) * log(v) -
                    C(double(N) * double(N - 1) / 2.0) * lg;
    }
    C val = poch(v, q, cfg) * poch(q / v, q, cfg);
    if (abs_d(val) == 0.0) throw pole_error("theta0: argument on the zero lattice u in q^Z");
    return log_scale + log(val);
}

template <class C>
C theta0(const C& u, const C& q, const PrecisionCfg& cfg) {
    using std::exp;
    if (abs_d(u) == 0.0) throw pole_error("theta0: u = 0");
    double lq = std::log(abs_d(q));
    if (!(lq < 0.0)) throw nome_error("theta0: |q| >= 1");
    long N = std::lround(std::log(abs_d(u)) / lq);
    if (N == 0) return poch(u, q, cfg) * poch(q / u, q, cfg);
    using std::log;
    C lg = log(q);
    C v = u * exp(C(double(-N)) * lg);
    C val = poch(v, q, cfg) * poch(q / v, q, cfg);
    if (abs_d(val) == 0.0) return C(0);
    C log_scale = C(double(N)) * C(0.0, pi) - C(double(N)) * log(v) -
                  C(double(N) * double(N - 1) / 2.0) * lg;
    if (real_d(log_scale) + std::log(abs_d(val)) > 706.0)
        throw overflow_error("theta0: quasi-periodic scale overflows");
    return exp(log_scale) * val;
}

// theta_0(u1;q)/theta_0(u2;q) with both arguments reduced first, so ratios
// with huge arguments stay bounded even when each factor alone would not.
template <class C>
C theta0_ratio(const C& u1, const C& u2, const C& q, const PrecisionCfg& cfg) {
    using std::exp;
    return exp(log_theta0(u1, q, cfg) - log_theta0(u2, q, cfg));
}

// Jacobi's first theta function, theta(u;q) = i e^{pi i (tau/4 - z)} (q;q) theta_0(u;q)
// with q = e^{2 pi i tau}, u = e^{2 pi i z} on principal branches.
template <class C>
C jacobi_theta(const C& u, const C& q, const PrecisionCfg& cfg) {
    using std::exp;
    using std::log;
    C tau = log(q) / C(0.0, 2.0 * pi);
    C z = log(u) / C(0.0, 2.0 * pi);
    return C(0.0, 1.0) * exp(C(0.0, pi) * (tau / C(4) - z)) * poch(q, q, cfg) *
           theta0(u, q, cfg);
}

// Elliptic gamma function Gamma(z;r,p) = (z^{-1} r p; r, p)/(z; r, p).
template <class C>
C ell_gamma(const C& z, const C& r, const C& p, const PrecisionCfg& cfg) {
    C den = poch2(z, r, p, cfg);
    if (abs_d(den) < 1e-13) throw pole_error("ell_gamma: z on the zero lattice of (z;r,p)");
    return poch2(r * p / z, r, p, cfg) / den;
}

// Phase function Omega_a(z;r,p) = Gamma(z a; r, p)/Gamma(z a^{-1}; r, p).
template <class C>
C phase_omega(const C& a, const C& z, const C& r, const C& p, const PrecisionCfg& cfg) {
    C rp = r * p;
    C den1 = poch2(z * a, r, p, cfg);
    C den2 = poch2(rp * a / z, r, p, cfg);
    if (abs_d(den1) < 1e-13) throw pole_error("phase_omega: pole of (za;r,p)");
    if (abs_d(den2) < 1e-13) throw pole_error("phase_omega: pole of (z^-1 a rp;r,p)");
    return poch2(z / a, r, p, cfg) * poch2(rp / (z * a), r, p, cfg) / (den1 * den2);
}

// 2phi1(a1,a2;b1;q,z): terminating series are summed exactly; otherwise
// |z| < 1 is required and the partial sum carries a tail check.
template <class C>
C phi21(const C& a1, const C& a2, const C& b1, const C& q, const C& z, const PrecisionCfg& cfg) {
    double qa = abs_d(q);
    if (!(qa < 1.0)) throw nome_error("2phi1: |q| >= 1");
    auto terminates_at = [&](const C& a) -> int {
        C w = a;
        for (int n = 0; n < cfg.max_terms; ++n) {
            if (abs_d(C(1) - w) < 1e-13) return n + 1;  // (a;q)_{n+1} = 0
            w *= q;
            if (abs_d(w) < 1e-13) return -1;
        }
        return -1;
    };
    int t1 = terminates_at(a1), t2 = terminates_at(a2);
    int nterm = -1;
    if (t1 > 0) nterm = t1;
    if (t2 > 0 && (nterm < 0 || t2 < nterm)) nterm = t2;
    if (nterm < 0 && !(abs_d(z) < 1.0))
        throw convergence_error("2phi1: |z| >= 1 and series does not terminate");

    C term(1);
    C sum(0);
    C w1 = a1, w2 = a2, wb = b1, wq = q;
    int small_streak = 0;
    for (int n = 0; n < cfg.max_terms; ++n) {
        sum += term;
        if (nterm > 0 && n + 1 >= nterm) return sum;
        C denb = C(1) - wb;
        C denq = C(1) - wq;
        if (abs_d(denb) < 1e-13) throw pole_error("2phi1: b1 on the pole set q^{-n}");
        term *= (C(1) - w1) * (C(1) - w2) * z / (denb * denq);
        w1 *= q;
        w2 *= q;
        wb *= q;
        wq *= q;
        double ta = abs_d(term), sa = abs_d(sum);
        if (ta < cfg.series_tail_tol * (sa + 1.0))
            ++small_streak;
        else
            small_streak = 0;
        if (small_streak >= 2) return sum;
    }
    throw convergence_error("2phi1: no convergence within max_terms");
}

// Coefficient c_k(r) of p^k in (p;r):
//   c_k = (-1)^k r^{k(k-1)/2} / ((1-r)...(1-r^k)),
// a rational expression valid on both sides of |r| = 1.
template <class C>
C qa_poch_coeff(int k, const C& r) {
    using std::exp;
    using std::log;
    C num = (k % 2 == 0) ? C(1) : C(-1);
    num *= exp(C(double(k) * double(k - 1) / 2.0) * log(r));
    C den(1);
    C w = r;
    for (int j = 1; j <= k; ++j) {
        C f = C(1) - w;
        if (abs_d(f) < 1e-13) throw pole_error("qa_poch_coeff: r is a root of unity");
        den *= f;
        w *= r;
    }
    return num / den;
}

// ---------------------------------------------------------------------------
// Theta ratio envelope (double precision only).
//
// Bracketing constants for |theta0(z q^a;q)/theta0(z q^b;q)| built from the
// extrema of |theta0| on the fundamental annulus.  The grid max/min can
// under- or overshoot the true extrema at isolated points, so callers apply
// a small slack when asserting the bracket.
struct ThetaBoundEnv {
    cplx q;
    double eps;
    double c1;  // e * max over annulus
    double c2;  // min over eps-admissible annulus / e
    PrecisionCfg cfg;

    ThetaBoundEnv(cplx q_, double eps_, const PrecisionCfg& cfg_ = {},
                  int n_rad = 48, int n_ang = 360)
        : q(q_), eps(eps_), cfg(cfg_) {
        double lq = std::log(std::abs(q));
        if (!(lq < 0.0)) throw nome_error("theta bounds: |q| >= 1");
        double hi = 0.0, lo = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= n_rad; ++i) {
            double lr = lq * double(i) / double(n_rad);  // log radius in [lq, 0]
            bool admissible = std::min(std::abs(lr), std::abs(lr - lq)) >= eps_;
            for (int j = 0; j < n_ang; ++j) {
                double th = 2.0 * pi * double(j) / double(n_ang);
                cplx u = std::exp(cplx(lr, th));
                double t = std::abs(theta0(u, q, cfg));
                hi = std::max(hi, t);
                if (admissible && t > 0) lo = std::min(lo, t);
            }
        }
        c1 = std::exp(1.0) * hi;
        c2 = lo / std::exp(1.0);
    }

    // Distance of log|u| to the lattice {n log|q|}.
    double lattice_distance(double log_abs_u) const {
        double s = -std::log(std::abs(q));
        double r = std::fmod(log_abs_u, s);
        if (r < 0) r += s;
        return std::min(r, s - r);
    }

    std::pair<double, double> bounds(cplx z, double a, double b) const {
        double lq = std::log(std::abs(q));
        double la = std::log(std::abs(z)) + a * lq;
        double lb = std::log(std::abs(z)) + b * lq;
        if (lattice_distance(la) <= eps || lattice_distance(lb) <= eps)
            throw region_error("theta bounds: eps-separation from the lattice fails");
        // envelope |q|^{(a-b)/2} |z^2 q^{a+b}|^{-(a-b)/2}
        double env = std::exp(0.5 * (a - b) * lq -
                              0.5 * (a - b) * (2.0 * std::log(std::abs(z)) + (a + b) * lq));
        return {c2 / c1 * env, c1 / c2 * env};
    }
};

inline std::pair<double, double> theta_ratio_bounds(cplx z, double a, double b, cplx q,
                                                    double eps, const PrecisionCfg& cfg = {}) {
    return ThetaBoundEnv(q, eps, cfg).bounds(z, a, b);
}

}  // namespace qtrace
