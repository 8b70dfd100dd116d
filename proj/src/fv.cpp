#include "qtrace/fv.hpp"

namespace qtrace {

namespace {

// Pole lattices of the u-integrand relative to the unit circle: the theta
// denominators contribute t = q^2 nome^Z and the phase function contributes
// the one-sided families t = q^{-2} r^{-a} p^{-b} and t = q^2 r^{a+1} p^{b+1}.
std::vector<PoleLattice> fv_lattices(const ParamPoint& p) {
    cplx q2 = p.qp(2.0);
    cplx r = p.Q2w, pk = p.Q2k;
    return {{q2, {pk}, "theta0(t q^-2; Q2k) zeros"},
            {q2, {r}, "theta0(t q^-2; Q2w) zeros"},
            {1.0 / q2, {r, pk}, "Omega poles t = q^-2 r^-a p^-b", {{-400, 0}, {-400, 0}}},
            {q2 * r * pk, {r, pk}, "Omega poles t = q^2 r^{a+1} p^{b+1}", {{0, 400}, {0, 400}}}};
}

// Same structure for the |q| > 1 quasi-analytic integrands built on
// Omega_{q^{-2}}(t; r, P2) with theta denominators at t q^2.
std::vector<PoleLattice> fv_qa_lattices(const ParamPoint& p, cplx P2) {
    cplx q2 = p.qp(2.0);
    cplx r = p.Q2w;
    return {{1.0 / q2, {P2}, "theta0(t q^2; q^{2k}) zeros"},
            {1.0 / q2, {r}, "theta0(t q^2; Q2w) zeros"},
            {q2, {r, P2}, "Omega poles t = q^2 r^-a P2^-b", {{-400, 0}, {-400, 0}}},
            {r * P2 / q2, {r, P2}, "Omega poles t = q^-2 r^{a+1} P2^{b+1}", {{0, 400}, {0, 400}}}};
}

}  // namespace

cplx fv_integrand(cplx t, const ParamPoint& p, const PrecisionCfg& cfg) {
    cplx r = p.Q2w, pp = p.Q2k;
    cplx q2 = p.qp(2.0);
    cplx q2m = 1.0 / p.Q2m;  // q^{2 mu}
    cplx q2l = 1.0 / p.Q2l;  // q^{2 lambda}
    return phase_omega(q2, t, r, pp, cfg) *
           theta0(t * q2m, pp, cfg) / theta0(t / q2, pp, cfg) *
           theta0(t * q2l, r, cfg) / theta0(t / q2, r, cfg);
}

namespace {

// Residue data for the continuation of the contour form to |q| > 1.  The
// integrand v(t) has simple poles at t = q^2 (three (1 - t q^{-2}) factors
// against one) and t = q^{-2} (the (1 - t q^2) factor of the Omega
// denominator); stripping them leaves the finite parts below.
cplx fv_residue_part_q2(const ParamPoint& p, const PrecisionCfg& cfg) {
    cplx r = p.Q2w, pp = p.Q2k, rp = r * pp;
    cplx q2 = p.qp(2.0);
    cplx t = q2;
    cplx q2m = 1.0 / p.Q2m, q2l = 1.0 / p.Q2l;
    cplx n1 = poch2(t / q2 * rp, r, pp, cfg) * poch2(rp / (t * q2), r, pp, cfg);
    cplx d1 = poch2(t * q2, r, pp, cfg) * poch2(q2 * rp / t, r, pp, cfg);
    cplx n2 = theta0(t * q2m, pp, cfg) * theta0(t * q2l, r, cfg);
    cplx d2 = poch(pp * q2 / t, pp, cfg) * poch(r * q2 / t, r, cfg);
    return n1 * n2 / (d1 * d2);
}

cplx fv_residue_part_qm2(const ParamPoint& p, const PrecisionCfg& cfg) {
    cplx r = p.Q2w, pp = p.Q2k, rp = r * pp;
    cplx q2 = p.qp(2.0);
    cplx t = 1.0 / q2;
    cplx q2m = 1.0 / p.Q2m, q2l = 1.0 / p.Q2l;
    cplx n1 = poch2(t / q2, r, pp, cfg) * poch2(rp / (t * q2), r, pp, cfg);
    cplx d1 = poch2(t * q2 * r, r, pp, cfg) * poch(t * q2 * pp, pp, cfg) *
              poch2(q2 * rp / t, r, pp, cfg);
    cplx n2 = theta0(t * q2m, pp, cfg) / theta0(t / q2, pp, cfg) *
              theta0(t * q2l, r, cfg) / theta0(t / q2, r, cfg);
    return n1 * n2 / d1;
}

}  // namespace

cplx fv_contour(const ParamPoint& p, const PrecisionCfg& cfg) {
    if (!(std::abs(p.Q2k) < 1.0 && std::abs(p.Q2w) < 1.0))
        throw region_error("fv_contour: need |q^{-2k}| < 1 and |q^{-2 omega}| < 1");
    CircleContour c;
    require_clear(pole_scan(fv_lattices(p), c, cfg.pole_margin));
    cplx I = integrate_circle([&](cplx t) { return fv_integrand(t, p, cfg); }, c, cfg);
    double aq = std::abs(p.q());
    if (aq > 1.0) {
        // Continuation: t = q^2 left the unit circle and t = q^{-2} entered;
        // the deformed cycle keeps the former inside and the latter outside.
        I += -fv_residue_part_q2(p, cfg) + fv_residue_part_qm2(p, cfg);
    }
    cplx pref = p.qp(-p.lambda * p.mu - p.lambda - p.mu - 2.0);
    return ensure_finite(pref * I, "fv_contour");
}

cplx fv_series_at0(const ParamPoint& p, const PrecisionCfg& cfg) {
    cplx r = p.Q2w, pp = p.Q2k;
    cplx q4 = p.qp(4.0), q4i = 1.0 / q4;
    cplx q2l2 = p.qp(2.0) / p.Q2l;  // q^{2 lambda + 2}
    cplx ratio = p.Q2m / p.qp(2.0); // q^{-(2 mu + 2)}
    if (!(std::abs(ratio) < 1.0))
        throw convergence_error("fv_series_at0: |q^{-2mu-2}| >= 1, series diverges");
    KahanSum s;
    cplx w(1.0, 0.0), running(1.0, 0.0);
    int small_streak = 0, grow_streak = 0;
    double prev_mag = 0.0;
    cplx pn(1.0, 0.0);
    for (int n = 0; n < cfg.max_terms; ++n) {
        if (n > 0) {
            pn *= pp;
            running *= theta0_ratio(q4 * pn, pn, r, cfg);
            w *= ratio;
        }
        cplx term = w * theta0_ratio(q2l2 * pn, q4 * pn, r, cfg) * running;
        s.add(term);
        double ta = std::abs(term), sa = std::abs(s.value());
        if (n > 0 && ta < cfg.series_tail_tol * (sa + 1.0)) {
            if (++small_streak >= 2) break;
        } else {
            small_streak = 0;
        }
        if (n > 0 && ta > prev_mag && ta > cfg.series_tail_tol * (sa + 1.0)) {
            if (++grow_streak > 12)
                throw convergence_error("fv_series_at0: terms grow, outside the numerical domain");
        } else {
            grow_streak = 0;
        }
        prev_mag = ta;
        if (n + 1 == cfg.max_terms)
            throw convergence_error("fv_series_at0: no convergence within max_terms");
    }
    cplx A = poch(q4, r, cfg) * poch2(q4i, r, pp, cfg) /
             (poch(q4i, pp, cfg) * poch2(q4, r, pp, cfg)) /
             (poch(pp, pp, cfg) * poch(r, r, cfg));
    cplx rhs = -p.qp(-p.lambda - p.mu - 2.0) * A * s.value();
    return ensure_finite(theta0(p.qp(2.0 * p.mu + 2.0), pp, cfg) * p.qp(-p.lambda * p.mu) * rhs,
                         "fv_series_at0");
}

cplx fv_series_atinf(const ParamPoint& p, const PrecisionCfg& cfg) {
    cplx r = p.Q2w, pp = p.Q2k;
    cplx q4 = p.qp(4.0), q4i = 1.0 / q4;
    cplx q2lm2 = 1.0 / (p.Q2l * p.qp(2.0));  // q^{2 lambda - 2}
    cplx ratio = p.qp(2.0) / p.Q2m;          // q^{2 mu + 2}
    if (!(std::abs(ratio) < 1.0))
        throw convergence_error("fv_series_atinf: |q^{2mu+2}| >= 1, series diverges");
    KahanSum s;
    cplx w(1.0, 0.0), running(1.0, 0.0);
    int small_streak = 0, grow_streak = 0;
    double prev_mag = 0.0;
    cplx pn(1.0, 0.0);  // p^{-n}
    for (int n = 0; n < cfg.max_terms; ++n) {
        if (n > 0) {
            pn /= pp;
            running *= theta0_ratio(q4i * pn, pn, r, cfg);
            w *= ratio;
        }
        cplx term = w * theta0_ratio(q2lm2 * pn, q4i * pn, r, cfg) * running;
        s.add(term);
        double ta = std::abs(term), sa = std::abs(s.value());
        if (n > 0 && ta < cfg.series_tail_tol * (sa + 1.0)) {
            if (++small_streak >= 2) break;
        } else {
            small_streak = 0;
        }
        if (n > 0 && ta > prev_mag && ta > cfg.series_tail_tol * (sa + 1.0)) {
            if (++grow_streak > 12)
                throw convergence_error("fv_series_atinf: terms grow, outside the numerical domain");
        } else {
            grow_streak = 0;
        }
        prev_mag = ta;
        if (n + 1 == cfg.max_terms)
            throw convergence_error("fv_series_atinf: no convergence within max_terms");
    }
    cplx A = poch2(q4i * r, pp, r, cfg) / poch2(q4 * pp * r, pp, r, cfg) /
             (poch(pp, pp, cfg) * poch(r, r, cfg) * poch(q4 * pp, pp, cfg));
    cplx rhs = p.qp(-p.lambda - 2.0) * A * s.value();
    return ensure_finite(
        theta0(p.qp(2.0 * p.mu - 2.0), pp, cfg) * p.qp(-p.lambda * p.mu - p.mu) * rhs,
        "fv_series_atinf");
}

cplx fv_normalized_qa(const ParamPoint& p, const PrecisionCfg& cfg) {
    cplx r = p.Q2w;
    cplx P2 = p.qp(2.0 * p.k);  // q^{2k}
    if (!(std::abs(p.q()) > 1.0) || !(std::abs(P2) < 1.0) || !(std::abs(r) < 1.0))
        throw region_error("fv_normalized_qa: need |q| > 1, |q^{2k}| < 1, |q^{-2 omega}| < 1");
    cplx q2 = p.qp(2.0);
    cplx q2m = 1.0 / p.Q2m, q2l = 1.0 / p.Q2l;
    CircleContour c;
    require_clear(pole_scan(fv_qa_lattices(p, P2), c, cfg.pole_margin));
    cplx I = integrate_circle(
        [&](cplx t) {
            return phase_omega(1.0 / q2, t, r, P2, cfg) *
                   theta0(t * p.Q2m, P2, cfg) / theta0(t * q2, P2, cfg) *
                   theta0(t * q2l, r, cfg) / theta0(t * q2, r, cfg);
        },
        c, cfg);
    cplx pref = p.qp(-p.lambda * p.mu - p.lambda - p.mu + 2.0) * poch(1.0 / p.qp(4.0), P2, cfg) *
                poch(P2, P2, cfg) /
                (poch(p.Q2m / q2, P2, cfg) * poch(q2m * P2 / q2, P2, cfg));
    return ensure_finite(pref * I, "fv_normalized_qa");
}

cplx fv_null_rational(const ParamPoint& p, int m) {
    cplx q2 = p.qp(2.0);
    cplx pk = p.Q2k;                      // q^{-2k}
    cplx pkm = std::pow(pk, m);           // q^{-2km}
    cplx a = p.Q2m / q2 * pk;             // q^{-2 mu - 2 - 2k}
    cplx b = p.Q2m * q2 * pk;             // q^{-2 mu + 2 - 2k}
    cplx q2l = 1.0 / p.Q2l;
    cplx num = 1.0 - q2l * q2 - p.Q2m * q2 * pkm + q2l * p.Q2m * pkm;
    cplx den = 1.0 - p.Q2m / q2 * pkm;
    return poch_fin(a, pk, m) / poch_fin(b, pk, m) * num / den;
}

cplx fv_null_flip_rational(const ParamPoint& p, int m) {
    cplx q2 = p.qp(2.0);
    cplx P2 = p.qp(2.0 * p.k);            // q^{2k}
    cplx P2m = std::pow(P2, m);
    cplx q2m = 1.0 / p.Q2m;               // q^{2 mu}
    cplx a = q2m * q2 * P2;               // q^{2 mu + 2 + 2k}
    cplx b = q2m / q2 * P2;               // q^{2 mu - 2 + 2k}
    cplx q2l = 1.0 / p.Q2l;
    cplx num = q2m / q2 * P2m - q2l * q2m * P2m - 1.0 + q2l / q2;
    cplx den = 1.0 - q2m * q2 * P2m;
    return poch_fin(a, P2, m) / poch_fin(b, P2, m) * num / den;
}

std::pair<cplx, cplx> residue_Im(const ParamPoint& p, int m, const PrecisionCfg& cfg) {
    cplx pk = p.Q2k;
    if (!(std::abs(p.q()) < 1.0 && std::abs(pk) < 1.0))
        throw region_error("residue_Im: need |q| < 1 and |q^{-2k}| < 1");
    double conv = (2.0 * (p.mu + 1.0) / p.k).real();
    if (!(conv > double(m)))
        throw region_error("residue_Im: need Re(2(mu+1)/k) > m");
    cplx q2 = p.qp(2.0);
    cplx q2m = 1.0 / p.Q2m, q2l = 1.0 / p.Q2l;
    CircleContour c;
    // poles: theta0(t q^-2; p) zeros at t = q^2 p^Z and the Pochhammer family
    // t = q^{-2} p^{-j}, j >= 0
    require_clear(pole_scan({{q2, {pk}, "theta0(t q^-2; q^-2k) zeros"},
                             {1.0 / q2, {pk}, "(t q^2;q^-2k) zeros", {{-400, 0}}}},
                            c, cfg.pole_margin));
    cplx lhs = integrate_circle(
        [&](cplx t) {
            return poch(t / q2, pk, cfg) / poch(t * q2, pk, cfg) *
                   theta0(t * q2m, pk, cfg) / theta0(t / q2, pk, cfg) *
                   (1.0 - t * q2l) / (1.0 - t / q2) * std::pow(t, m);
        },
        c, cfg);
    cplx norm = -std::pow(q2, m) * poch(q2 * q2m, pk, cfg) * poch(p.Q2m * q2 * pk, pk, cfg) /
                (poch(pk, pk, cfg) * poch(p.qp(4.0), pk, cfg));
    cplx rhs = norm * fv_null_rational(p, m);
    return {lhs, rhs};
}

std::pair<cplx, cplx> residue_Ipm(const ParamPoint& p, int m, const PrecisionCfg& cfg) {
    cplx P2 = p.qp(2.0 * p.k);
    if (!(std::abs(p.q()) < 1.0 && std::abs(P2) < 1.0))
        throw region_error("residue_Ipm: need |q| < 1 and |q^{2k}| < 1");
    double conv = (2.0 * (p.mu + 1.0) / p.k).real();
    if (!(conv > double(m)))
        throw region_error("residue_Ipm: need Re(2(mu+1)/k) > m");
    cplx q2 = p.qp(2.0);
    cplx q2m = 1.0 / p.Q2m, q2l = 1.0 / p.Q2l;
    // integrand with the common (t q^2; P2)/theta0(t q^2; P2) pair cancelled
    auto base = [&](cplx t) {
        return theta0(t * p.Q2m, P2, cfg) /
               (poch(P2 / (t * q2), P2, cfg) * poch(t / q2, P2, cfg)) * std::pow(t, m);
    };
    CircleContour c;
    // poles: t = q^2 P2^{-j} (j >= 0) from (t q^-2; P2) and t = q^-2 P2^j
    // (j >= 0) from the cancelled theta/(1 - t q^2) pair
    require_clear(pole_scan({{q2, {P2}, "(t q^-2; q^2k) zeros", {{-400, 0}}},
                             {1.0 / q2, {P2}, "(P2/(t q^2); q^2k) zeros", {{0, 400}}}},
                            c, cfg.pole_margin));
    cplx circle = integrate_circle(
        [&](cplx t) { return base(t) * (1.0 - t * q2l) / (1.0 - t * q2); }, c, cfg);
    // Res_{t=q^2}[f/t]: strip (1 - t q^{-2}) out of (t q^{-2}; P2)
    cplx tq = q2;
    cplx res_q2 = -(theta0(tq * p.Q2m, P2, cfg) /
                    (poch(P2 / (tq * q2), P2, cfg) * poch(tq * P2 / q2, P2, cfg)) *
                    std::pow(tq, m) * (1.0 - tq * q2l) / (1.0 - tq * q2));
    // Res_{t=q^{-2}}[f/t]: strip 1/(1 - t q^2)
    cplx tm = 1.0 / q2;
    cplx res_qm2 = -(base(tm) * (1.0 - tm * q2l));
    cplx lhs = circle - res_q2 + res_qm2;
    // sign fixed by the residue computation itself: the quadrature over the
    // modified contour and the residue series agree to machine precision
    cplx norm = std::pow(1.0 / q2, m) * poch(p.Q2m / q2, P2, cfg) * poch(q2m / q2 * P2, P2, cfg) /
                (poch(1.0 / p.qp(4.0), P2, cfg) * poch(P2, P2, cfg));
    cplx rhs = norm * fv_null_flip_rational(p, m);
    return {lhs, rhs};
}

cplx phase_f(cplx t, const ParamPoint& p, const PrecisionCfg& cfg) {
    cplx r = p.Q2w, pk = p.Q2k, rp = r * pk;
    cplx q2 = p.qp(2.0);
    cplx q2l = 1.0 / p.Q2l;
    return poch2(t / q2 * r, r, pk, cfg) * poch2(rp / (t * q2), r, pk, cfg) /
           (poch2(t * q2 * r, r, pk, cfg) * poch2(q2 * rp / t, r, pk, cfg)) *
           poch(t * q2l * r, r, cfg) * poch(r / (t * q2l), r, cfg) /
           (poch(t / q2 * r, r, cfg) * poch(q2 * r / t, r, cfg));
}

cplx phase_f_qa(cplx t, const ParamPoint& p, const PrecisionCfg& cfg) {
    cplx r = p.Q2w;
    cplx P2 = p.qp(2.0 * p.k);
    cplx q2 = p.qp(2.0);
    cplx q2l = 1.0 / p.Q2l;
    return poch2(t * q2 * r * P2, r, P2, cfg) * poch2(q2 * r / t, r, P2, cfg) /
           (poch2(t / q2 * r * P2, r, P2, cfg) * poch2(r / (t * q2), r, P2, cfg)) *
           poch(t * q2l * r, r, cfg) * poch(r / (t * q2l), r, cfg) /
           (poch(t / q2 * r, r, cfg) * poch(q2 * r / t, r, cfg));
}

}  // namespace qtrace
