#include "qtrace/trace.hpp"

namespace qtrace {

namespace {

// Common prefactor block q^{lm - l + 2} (q^-4;r) / [theta0(q^2l;r)(q^{2l-2}r;r)(q^{-2l-2};r)]
cplx lambda_block(const ParamPoint& p, const PrecisionCfg& cfg) {
    cplx r = p.Q2w;
    cplx q2 = p.qp(2.0);
    cplx q2l = 1.0 / p.Q2l;
    return p.qp(p.lambda * p.mu - p.lambda + 2.0) * poch(1.0 / p.qp(4.0), r, cfg) /
           (theta0(q2l, r, cfg) * poch(q2l / q2 * r, r, cfg) * poch(p.Q2l / q2, r, cfg));
}

// ((r q^2; r, pnome)/(r q^-2; r, pnome))^2
cplx omega_double_block(const ParamPoint& p, cplx pnome, const PrecisionCfg& cfg) {
    cplx r = p.Q2w;
    cplx q2 = p.qp(2.0);
    cplx ratio = poch2(r * q2, r, pnome, cfg) / poch2(r / q2, r, pnome, cfg);
    return ratio * ratio;
}

std::vector<PoleLattice> trace_lattices(const ParamPoint& p) {
    cplx q2 = p.qp(2.0);
    cplx r = p.Q2w, pk = p.Q2k;
    return {{q2, {pk}, "theta0(t q^-2; Q2k) zeros"},
            {q2, {r}, "theta0(t q^-2; Q2w) zeros"},
            {1.0 / q2, {r, pk}, "Omega poles t = q^-2 r^-a p^-b", {{-400, 0}, {-400, 0}}},
            {q2 * r * pk, {r, pk}, "Omega poles t = q^2 r^{a+1} p^{b+1}", {{0, 400}, {0, 400}}}};
}

}  // namespace

cplx trace_integral(const ParamPoint& p, const PrecisionCfg& cfg, bool check_region) {
    if (check_region && !p.good_region())
        throw region_error("trace_integral: parameters outside the good region");
    cplx r = p.Q2w, pk = p.Q2k;
    cplx q2 = p.qp(2.0);
    cplx q2l = 1.0 / p.Q2l;
    CircleContour c;
    require_clear(pole_scan(trace_lattices(p), c, cfg.pole_margin));
    cplx I = integrate_circle(
        [&](cplx t) {
            return phase_omega(q2, t, r, pk, cfg) *
                   theta0(t * p.Q2m, pk, cfg) / theta0(t / q2, pk, cfg) *
                   theta0(t * q2l, r, cfg) / theta0(t / q2, r, cfg);
        },
        c, cfg);
    cplx mu_block = poch(pk, pk, cfg) * poch(p.qp(4.0) * pk, pk, cfg) /
                    (poch(p.Q2m * q2, pk, cfg) * poch(q2 / p.Q2m * pk, pk, cfg));
    return ensure_finite(lambda_block(p, cfg) * mu_block * omega_double_block(p, pk, cfg) * I,
                         "trace_integral");
}

cplx trace_via_fv(const ParamPoint& p, const PrecisionCfg& cfg) {
    cplx r = p.Q2w, pk = p.Q2k;
    cplx q2 = p.qp(2.0);
    cplx q2l = 1.0 / p.Q2l;
    cplx mu_block = poch(pk, pk, cfg) * poch(p.qp(4.0) * pk, pk, cfg) /
                    (poch(p.Q2m * q2, pk, cfg) * poch(q2 / p.Q2m * pk, pk, cfg));
    cplx pref = p.qp(-p.mu + 4.0) * poch(1.0 / p.qp(4.0), r, cfg) /
                (theta0(q2l, r, cfg) * poch(q2l / q2 * r, r, cfg) * poch(p.Q2l / q2, r, cfg)) *
                omega_double_block(p, pk, cfg) * mu_block;
    return ensure_finite(pref * fv_contour(p.reflect_mu(), cfg), "trace_via_fv");
}

cplx trace_series(const ParamPoint& p, const PrecisionCfg& cfg) {
    cplx r = p.Q2w, pk = p.Q2k;
    cplx q2 = p.qp(2.0), q4 = p.qp(4.0), q4i = 1.0 / q4;
    cplx q2lm2 = 1.0 / (p.Q2l * q2);     // q^{2 lambda - 2}
    cplx ratio = p.Q2m * q2;             // q^{-2 mu + 2}
    if (!(std::abs(ratio) < 1.0))
        throw convergence_error("trace_series: |q^{-2mu+2}| >= 1, series diverges");
    KahanSum s;
    cplx w(1.0, 0.0), running(1.0, 0.0), pn(1.0, 0.0);
    int small_streak = 0, grow_streak = 0;
    double prev = 0.0;
    for (int n = 0; n < cfg.max_terms; ++n) {
        if (n > 0) {
            pn /= pk;  // q^{2kn}
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
        // the theta-ratio product eventually grows super-geometrically; the
        // expansion is asymptotic and only usable while terms still decay
        if (n > 0 && ta > prev && ta > cfg.series_tail_tol * (sa + 1.0)) {
            if (++grow_streak > 12)
                throw convergence_error(
                    "trace_series: terms grow, parameters outside the series' numerical domain");
        } else {
            grow_streak = 0;
        }
        prev = ta;
        if (n + 1 == cfg.max_terms)
            throw convergence_error("trace_series: no convergence within max_terms");
    }
    cplx pref = poch(q4i, r, cfg) / poch(r, r, cfg) * omega_double_block(p, pk, cfg) *
                poch2(q4i * r, r, pk, cfg) / poch2(q4 * r * pk, pk, r, cfg) *
                p.qp(p.lambda * p.mu - p.lambda + 2.0) /
                (theta0(1.0 / p.Q2l, r, cfg) * poch(r / (p.Q2l * q2), r, cfg) *
                 poch(p.Q2l / q2, r, cfg)) *
                poch(p.Q2m / q2, pk, cfg) / poch(p.Q2m * q2, pk, cfg);
    return ensure_finite(pref * s.value(), "trace_series");
}

namespace {

// (u; q) with exact-zero snapping: a factor within 1e-12 of zero is a
// lattice zero hit exactly by construction (the Jackson cycle points sit on
// the collapsed side of the theta lattice), and the product is returned as
// an exact zero instead of rounding noise.
cplx poch_snap(cplx u, cplx q, const PrecisionCfg& cfg) {
    double qa = std::abs(q);
    if (!(qa < 1.0)) throw nome_error("(u;q): |q| >= 1");
    cplx prod(1.0, 0.0);
    cplx w = u;
    for (int n = 0; n < cfg.max_terms; ++n) {
        cplx f = 1.0 - w;
        if (std::abs(f) < 1e-12) return cplx(0.0, 0.0);
        prod *= f;
        w *= q;
        double wa = std::abs(w);
        if (wa < cfg.series_tail_tol && wa / (1.0 - qa) < cfg.series_tail_tol) return prod;
    }
    throw convergence_error("(u;q): no truncation within max_terms");
}

// Jackson integrand of the trace cycle with the theta0(t q^2; pnome) /
// (t q^2; r, pnome) pair pre-cancelled, so the lattice points t = q^{-2} *
// period^n are regular: the n-side where the original numerator vanishes
// collapses to exact zeros of a finite product.
cplx jackson_reduced(cplx t, cplx log_t, const ParamPoint& p, cplx a, cplx pnome,
                     const PrecisionCfg& cfg) {
    cplx r = p.Q2w, rp = r * pnome;
    cplx q2 = p.qp(2.0);
    cplx q2l = 1.0 / p.Q2l;
    cplx collapse = poch_snap(pnome / (t * q2), pnome, cfg);
    if (collapse == cplx(0.0, 0.0)) return collapse;
    cplx ta = std::exp(a * log_t);
    return ta * poch2(t / q2, r, pnome, cfg) * poch2(rp / (t * q2), r, pnome, cfg) /
           poch2(q2 * rp / t, r, pnome, cfg) *
           collapse / poch2(t * q2 * r, r, pnome, cfg) /
           theta0(t / q2, pnome, cfg) *
           theta0(t * q2l, r, cfg) / theta0(t / q2, r, cfg);
}

}  // namespace

cplx trace_jackson(const ParamPoint& p, const PrecisionCfg& cfg) {
    cplx pk = p.Q2k;
    cplx a = -(p.mu + 1.0) / p.k;
    cplx log_s = -2.0 * p.qb.log_q;          // log of the base q^{-2}
    cplx log_p = -2.0 * p.k * p.qb.log_q;    // log of the period q^{-2k}
    JacksonCycle cyc{p.qp(-2.0), pk, -6, 2};
    cplx J = jackson_sum(
        [&](cplx t, int n) {
            return jackson_reduced(t, log_s + double(n) * log_p, p, a, pk, cfg);
        },
        cyc, cfg);
    return ensure_finite(const_D_jackson(p, cfg) * J, "trace_jackson");
}

cplx xi_ff(const ParamPoint& p, const PrecisionCfg& cfg) {
    cplx kappa = p.k + 2.0;
    cplx pkap = p.Q2k / p.qp(4.0);           // q^{-2 kappa}
    cplx a = -2.0 * (p.mu + 1.0) / kappa;
    cplx log_s = -2.0 * p.qb.log_q;
    cplx log_P = 2.0 * kappa * p.qb.log_q;   // period q^{2 kappa}
    JacksonCycle cyc{p.qp(-2.0), 1.0 / pkap, -2, 6};
    cplx J = jackson_sum(
        [&](cplx t, int n) {
            return jackson_reduced(t, log_s + double(n) * log_P, p, a, pkap, cfg);
        },
        cyc, cfg);
    return ensure_finite(const_C_ff(p, cfg) * J, "xi_ff");
}

cplx trace_eval(TraceMethod m, const ParamPoint& p, const PrecisionCfg& cfg) {
    switch (m) {
        case TraceMethod::Integral: return trace_integral(p, cfg);
        case TraceMethod::FVRelation: return trace_via_fv(p, cfg);
        case TraceMethod::Series: return trace_series(p, cfg);
        case TraceMethod::Jackson: return trace_jackson(p, cfg);
    }
    throw std::invalid_argument("trace_eval: unknown method");
}

cplx const_C_mu1(const qbase<cplx>& qb, cplx mu, cplx k, const PrecisionCfg& cfg) {
    cplx kappa = k + 2.0;
    cplx p2kap = qpow(qb, -2.0 * kappa);
    cplx q2 = qpow(qb, cplx(2.0));
    return -(1.0 + q2) * qpow(qb, -2.0 * mu - 3.0) * qpow(qb, (4.0 * mu + 4.0) / kappa) *
           poch(p2kap, p2kap, cfg) / poch(qpow(qb, -4.0 * mu - 4.0), p2kap, cfg) *
           poch(qpow(qb, -4.0 * mu), p2kap, cfg) / poch(qpow(qb, cplx(4.0)), p2kap, cfg);
}

cplx const_C_ff(const ParamPoint& p, const PrecisionCfg& cfg) {
    cplx r = p.Q2w;
    cplx q2 = p.qp(2.0);
    cplx q2l = 1.0 / p.Q2l;
    cplx pkap = p.Q2k / p.qp(4.0);  // q^{-2 kappa}, kappa = k + 2
    cplx qm1 = 1.0 / p.q();
    cplx ratio = poch2(r * q2, r, pkap, cfg) / poch2(r / q2, r, pkap, cfg);
    return 1.0 / (p.q() - qm1) * p.qp(2.0 * p.lambda * p.mu - 2.0 * p.mu - 2.0) *
           poch(1.0 / p.qp(4.0), r, cfg) /
           (theta0(q2l, r, cfg) * poch(q2l / q2 * r, r, cfg) * poch(p.Q2l / q2, r, cfg)) *
           ratio * ratio;
}

cplx const_D_jackson(const ParamPoint& p, const PrecisionCfg& cfg) {
    cplx r = p.Q2w, pk = p.Q2k;
    cplx q2 = p.qp(2.0);
    cplx q2l = 1.0 / p.Q2l;
    return poch(p.qp(4.0) * pk, pk, cfg) * poch(1.0 / p.qp(4.0), r, cfg) / poch(pk, pk, cfg) *
           omega_double_block(p, pk, cfg) *
           p.qp(p.lambda * p.mu - p.lambda + 2.0 - (2.0 * p.mu + 2.0) / p.k) /
           (theta0(q2l, r, cfg) * poch(q2l / q2 * r, r, cfg) * poch(p.Q2l / q2, r, cfg)) *
           poch(p.Q2m / q2, pk, cfg) / poch(p.Q2m * q2, pk, cfg);
}

cplx weyl_denominator(const qbase<cplx>& qb, cplx lambda, cplx q2l, cplx q2w,
                      const PrecisionCfg& cfg) {
    if (!(std::abs(q2w) < 1.0)) throw nome_error("weyl_denominator: |q^{-2 omega}| >= 1");
    if (std::abs(q2l - 1.0) < 1e-13) return cplx(0.0, 0.0);  // theta0(1) = 0
    return qpow(qb, lambda) * poch(q2w, q2w, cfg) * theta0(q2l, q2w, cfg);
}

cplx trace_qa(const ParamPoint& p, const PrecisionCfg& cfg) {
    cplx r = p.Q2w;
    cplx P2 = p.qp(2.0 * p.k);
    if (!(std::abs(p.q()) > 1.0) || !(std::abs(P2) < 1.0) || !(std::abs(r) < 1.0))
        throw region_error("trace_qa: need |q| > 1, |q^{2k}| < 1, |q^{-2 omega}| < 1");
    cplx q2 = p.qp(2.0);
    cplx q2l = 1.0 / p.Q2l, q2m = 1.0 / p.Q2m;
    CircleContour c;
    require_clear(pole_scan({{1.0 / q2, {P2}, "theta0(t q^2; q^{2k}) zeros"},
                             {1.0 / q2, {r}, "theta0(t q^2; Q2w) zeros"},
                             {q2, {r, P2}, "Omega poles", {{-400, 0}, {-400, 0}}},
                             {r * P2 / q2, {r, P2}, "Omega poles", {{0, 400}, {0, 400}}}},
                            c, cfg.pole_margin));
    cplx I = integrate_circle(
        [&](cplx t) {
            return phase_omega(1.0 / q2, t, r, P2, cfg) *
                   theta0(t * q2m, P2, cfg) / theta0(t * q2, P2, cfg) *
                   theta0(t * q2l, r, cfg) / theta0(t * q2, r, cfg);
        },
        c, cfg);
    cplx ratio = poch2(r / q2 * P2, r, P2, cfg) / poch2(r * q2 * P2, r, P2, cfg);
    cplx pref = p.qp(p.lambda * p.mu - p.lambda + 2.0) * poch(1.0 / p.qp(4.0), r, cfg) /
                (theta0(q2l, r, cfg) * poch(q2l / q2 * r, r, cfg) * poch(p.Q2l / q2, r, cfg)) *
                (1.0 / (1.0 - p.qp(4.0))) *
                poch(1.0 / p.qp(4.0), P2, cfg) * poch(P2, P2, cfg) /
                (poch(q2m / q2, P2, cfg) * poch(p.Q2m / q2 * P2, P2, cfg)) *
                ratio * ratio;
    return ensure_finite(pref * I, "trace_qa");
}

cplx normalized_trace(const ParamPoint& p, const PrecisionCfg& cfg) {
    cplx delta = weyl_denominator(p.qb, p.lambda, p.Q2l, p.Q2w, cfg);
    return ensure_finite(delta * trace_qa(p.inverted(), cfg), "normalized_trace");
}

double symmetry_residual(const ParamPoint& p, const PrecisionCfg& cfg) {
    cplx t1 = normalized_trace(p, cfg);
    cplx t2 = normalized_trace(p.swapped_pairs(), cfg);
    return rel_err(t1, t2);
}

cplx trig_m1(const ParamPoint& p) {
    cplx q2 = p.qp(2.0);
    cplx num = 1.0 - p.Q2m * q2 - p.Q2l * q2 + p.Q2m * p.Q2l;
    cplx den = (1.0 - p.Q2m * q2) * (1.0 - p.Q2l / q2);
    if (std::abs(1.0 - p.Q2l) < 1e-13 || std::abs(den) < 1e-13)
        throw pole_error("trig_m1: parameter on the pole set");
    return p.qp(p.lambda * p.mu - p.lambda) / (1.0 - p.Q2l) * num / den;
}

double trig_limit_residual(const ParamPoint& p, const PrecisionCfg& cfg, cplx* extrapolated) {
    const double w1 = 1e-6, w2 = 1e-8;
    cplx t1 = trace_integral(p.with_q2w(w1), cfg, false);
    cplx t2 = trace_integral(p.with_q2w(w2), cfg, false);
    cplx ext = (w1 * t2 - w2 * t1) / (w1 - w2);
    if (extrapolated) *extrapolated = ext;
    return rel_err(ext, trig_m1(p));
}

cplx classical_rhs(const ClassicalParams& c, const PrecisionCfg& cfg) {
    cplx r = std::exp(-2.0 * c.Omega);
    if (!(std::abs(r) < 1.0)) throw region_error("classical_rhs: need |e^{-2 Omega}| < 1");
    if (!(c.k.real() < 0.0)) throw region_error("classical_rhs: need Re k < 0");
    if (std::abs(c.Omega.imag()) < 1e-9)
        throw region_error("classical_rhs: Im Omega = 0 puts theta zeros on the base segment");
    cplx e2L = std::exp(2.0 * c.Lambda);
    // clearance of the theta-zero lattices from the unit contour
    double lr = std::log(std::abs(r));
    for (int n = -12; n <= 12; ++n) {
        double d1 = std::abs(n * lr - 2.0 * c.Lambda.real());  // zeros of theta0(t e^{2L}; r)
        if (d1 < cfg.pole_margin)
            throw pole_error("classical_rhs: theta0(t e^{2L}; r) zero near |t| = 1");
        if (n != 0 && std::abs(n * lr) < cfg.pole_margin)
            throw pole_error("classical_rhs: theta0(t; r) zero near |t| = 1");
    }
    cplx exp_a = -(c.mu + 1.0) / c.k;  // power of (1 - t)
    cplx exp_b = (c.mu - 1.0) / c.k;   // power of (1 - 1/t)
    cplx two_over_k = 2.0 / c.k;
    cplx I = integrate_circle_endpoint(
        [&](cplx t, cplx omt) {
            cplx omti = -omt / t;  // 1 - 1/t
            cplx pa = std::exp(exp_a * std::log(omt));
            cplx pb = std::exp(exp_b * std::log(omti));
            cplx h = omt * poch(t * r, r, cfg) * poch(r / t, r, cfg);  // theta0(t;r)
            cplx hp = pow_poch(t * r, r, two_over_k, cfg) * pow_poch(r / t, r, two_over_k, cfg);
            return pa * pb * theta0(t * e2L, r, cfg) / (h * hp);
        },
        cfg);
    cplx pref = std::exp((c.mu + 1.0) * c.Lambda) * pow_poch(r, r, (c.k + 4.0) / c.k, cfg) /
                std::pow(theta0(e2L, r, cfg), 2) * cgamma((c.mu - 1.0) / c.k) *
                cgamma((c.k - c.mu - 1.0) / c.k) / cgamma(-2.0 / c.k);
    return ensure_finite(pref * I, "classical_rhs");
}

ParamPoint classical_point(const ClassicalParams& c, double eps) {
    // q = e^{-eps} keeps every nome inside the unit disc for Re k < 0.
    cplx q = std::exp(cplx(-eps, 0.0));
    return ParamPoint::from_multiplicative(q, std::exp(-2.0 * c.Lambda), std::exp(-2.0 * c.Omega),
                                           std::exp(2.0 * eps * c.mu), std::exp(2.0 * eps * c.k));
}

double classical_limit_residual(const ClassicalParams& c, const std::vector<double>& eps_list,
                                const PrecisionCfg& cfg, std::vector<double>* per_eps,
                                cplx* extrapolated) {
    cplx rhs = classical_rhs(c, cfg);
    std::vector<cplx> vals;
    for (double e : eps_list) vals.push_back(trace_integral(classical_point(c, e), cfg, false));
    if (per_eps) {
        per_eps->clear();
        for (const cplx& v : vals) per_eps->push_back(rel_err(v, rhs));
    }
    // Lagrange extrapolation to eps = 0 through all supplied nodes.
    cplx ext(0.0, 0.0);
    for (size_t i = 0; i < vals.size(); ++i) {
        double w = 1.0;
        for (size_t j = 0; j < vals.size(); ++j) {
            if (j == i) continue;
            w *= -eps_list[j] / (eps_list[i] - eps_list[j]);
        }
        ext += w * vals[i];
    }
    if (extrapolated) *extrapolated = ext;
    return rel_err(ext, rhs);
}

}  // namespace qtrace
