#pragma once

// The five-parameter bundle (q; lambda, omega, mu, k).  Multiplicative values
// q^{-2x} are the ground truth; the exponents are derived through the
// principal logarithm so every route consumes identical branch data.

#include "qtrace/qseries.hpp"
#include "qtrace/scalar.hpp"

namespace qtrace {

struct ParamPoint {
    qbase<cplx> qb;
    cplx Q2l, Q2w, Q2m, Q2k;          // q^{-2 lambda}, q^{-2 omega}, q^{-2 mu}, q^{-2 k}
    cplx lambda, omega, mu, k;        // derived exponents

    static ParamPoint from_multiplicative(cplx q, cplx q2l, cplx q2w, cplx q2m, cplx q2k) {
        ParamPoint p;
        p.qb = make_qbase(q);
        p.Q2l = q2l;
        p.Q2w = q2w;
        p.Q2m = q2m;
        p.Q2k = q2k;
        cplx den = 2.0 * p.qb.log_q;
        p.lambda = -std::log(q2l) / den;
        p.omega = -std::log(q2w) / den;
        p.mu = -std::log(q2m) / den;
        p.k = -std::log(q2k) / den;
        return p;
    }

    // Reference point used throughout the trace checks.
    static ParamPoint reference() {
        return from_multiplicative(0.95, 0.02, 1e-5, 2e-3, 0.15);
    }

    cplx q() const { return qb.q; }
    cplx qp(cplx e) const { return qpow(qb, e); }
    cplx qp(double e) const { return qpow(qb, cplx(e, 0.0)); }

    // round-trip invariant: qpow(q, -2x) reproduces the stored multiplicative value
    double round_trip_err() const {
        double e = rel_err(qp(-2.0 * lambda), Q2l);
        e = std::max(e, rel_err(qp(-2.0 * omega), Q2w));
        e = std::max(e, rel_err(qp(-2.0 * mu), Q2m));
        e = std::max(e, rel_err(qp(-2.0 * k), Q2k));
        return e;
    }

    // |Q2w| << |Q2m| << |Q2l| << |Q2k| << min(|q|, 1/|q|) with ratio rho_sep
    // between consecutive magnitudes.
    bool good_region(double rho_sep = 5.0) const {
        double aq = std::abs(qb.q);
        double top = std::min(aq, 1.0 / aq);
        double w = std::abs(Q2w), m = std::abs(Q2m), l = std::abs(Q2l), kk = std::abs(Q2k);
        return w > 0 && m >= rho_sep * w && l >= rho_sep * m && kk >= rho_sep * l &&
               top >= rho_sep * kk;
    }

    ParamPoint with_q2w(cplx w) const {
        return from_multiplicative(qb.q, Q2l, w, Q2m, Q2k);
    }
    // (lambda, mu) -> (-lambda, -mu): the u-symmetry reflection
    ParamPoint reflect_lambda_mu() const {
        return from_multiplicative(qb.q, 1.0 / Q2l, Q2w, 1.0 / Q2m, Q2k);
    }
    // mu -> -mu (Cor trace-fv consumes u at the reflected weight)
    ParamPoint reflect_mu() const {
        return from_multiplicative(qb.q, Q2l, Q2w, 1.0 / Q2m, Q2k);
    }
    // (q, lambda, omega) -> (1/q, -lambda, -omega): the quasi-analytic side
    ParamPoint inverted() const {
        return from_multiplicative(1.0 / qb.q, Q2l, Q2w, 1.0 / Q2m, 1.0 / Q2k);
    }
    // (lambda, omega) <-> (mu, k)
    ParamPoint swapped_pairs() const {
        return from_multiplicative(qb.q, Q2m, Q2k, Q2l, Q2w);
    }
};

}  // namespace qtrace
