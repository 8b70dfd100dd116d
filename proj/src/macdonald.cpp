#include "qtrace/macdonald.hpp"

#include <map>

#include <boost/multiprecision/cpp_complex.hpp>

namespace qtrace {

DottedWeight dotted_action(WeylWord w, cplx mu, cplx k) {
    if (w.l == 0) return {mu, k, 0.0};
    cplx kp2 = k + 2.0;
    cplx l(double(w.l / 2), 0.0);
    if (w.l % 2 == 0) {
        if (w.i == 0) return {mu + 2.0 * l * kp2, k, -l * (mu + 1.0) - l * l * kp2};
        return {mu - 2.0 * l * kp2, k, l * (mu + 1.0) - l * l * kp2};
    }
    cplx l1 = l + 1.0;
    if (w.i == 0) return {-mu - 2.0 + 2.0 * l1 * kp2, k, l1 * (mu + 1.0) - l1 * l1 * kp2};
    return {-mu - 2.0 - 2.0 * l * kp2, k, -l * (mu + 1.0) - l * l * kp2};
}

DottedWeight dotted_action_generators(WeylWord w, cplx mu, cplx k) {
    // rightmost letter acts first; the word alternates starting from s_i on
    // the left: w^l_i = s_i s_{1-i} s_i ...
    DottedWeight acc{mu, k, 0.0};
    for (int pos = w.l - 1; pos >= 0; --pos) {
        int letter = (pos % 2 == 0) ? w.i : 1 - w.i;
        if (letter == 1) {
            acc = {-acc.mu - 2.0, acc.k, acc.delta};
        } else {
            acc = {-acc.mu - 2.0 + 2.0 * (acc.k + 2.0), acc.k,
                   acc.delta + (acc.mu + 1.0) - (acc.k + 2.0)};
        }
    }
    return acc;
}

namespace {

template <class C>
C dyn_weyl_scalar_t(WeylWord w, const C& mu, const C& k, const qbase<C>& qb) {
    if (w.l == 0) return C(1);
    C c = qpow(qb, C(-2) * k - C(4));  // q^{-2k-4}
    C ci = C(1) / c;
    auto finite_ratio = [&](const C& ua, const C& ub, int n) {
        C den = poch_fin(ub, c, n);
        if (abs_d(den) < 1e-13) throw pole_error("dyn_weyl_scalar: denominator vanishes");
        return poch_fin(ua, c, n) / den;
    };
    auto ipow = [](C b, int n) {
        C r(1);
        for (int j = 0; j < n; ++j) r *= b;
        return r;
    };
    int l = w.l / 2;
    C q2m = qpow(qb, C(2) * mu);
    C q4 = qpow(qb, C(4));
    if (w.l % 2 == 1) {
        C pref = -qpow(qb, C(-4.0 * double(l) - 2.0));
        if (w.i == 1) {
            C shift = ipow(ci, 2 * l);
            return pref * finite_ratio(q2m * q4 * shift, q2m * shift, w.l);
        }
        C shift = ipow(ci, 2 * l + 1);
        return pref * finite_ratio(shift / q2m, shift / (q2m * q4), w.l);
    }
    C pref = qpow(qb, C(-4.0 * double(l)));
    if (w.i == 1) {
        C shift = ipow(ci, 2 * l);
        return pref * finite_ratio(shift / q2m, shift / (q2m * q4), w.l);
    }
    C shift = ipow(ci, 2 * l - 1);
    return pref * finite_ratio(q2m * q4 * shift, q2m * shift, w.l);
}

}  // namespace

cplx dyn_weyl_scalar(WeylWord w, cplx mu, cplx k, const qbase<cplx>& qb) {
    return dyn_weyl_scalar_t<cplx>(w, mu, k, qb);
}

cplx dyn_weyl_generator(int i, cplx mu, cplx k, const qbase<cplx>& qb) {
    return dyn_weyl_scalar({i, 1}, mu, k, qb);
}

// ---------------------------------------------------------------------------
// Templated evaluation kernel: every series of the Macdonald checks (the two
// u-expansions, the dressed-trace BGG sum, the hypergeometric theta sums)
// runs through this type, so the whole chain switches to extended precision
// when the configuration asks for more than double digits.

namespace {

template <class C>
struct MacKernel {
    qbase<C> qb;
    C q2l;     // q^{2 lambda}
    C lambda;  // derived exponent
    C r;       // q^{-2 omega}
    C omega;   // derived exponent
    PrecisionCfg cfg;
    mutable std::map<std::pair<double, int>, C> u_cache;

    C qp(const C& e) const { return qpow(qb, e); }
    C qp(double e) const { return qpow(qb, C(e)); }

    MacKernel neg_lambda() const {
        MacKernel n = *this;
        n.q2l = C(1) / q2l;
        n.lambda = -lambda;
        n.u_cache.clear();
        return n;
    }

    // -- Felder-Varchenko value by the regime-appropriate series expansion --

    C u_at0(const C& mu_u, const C& p) const {
        C q4 = qp(4.0), q4i = C(1) / q4;
        C q2l2 = q2l * qp(2.0);
        C ratio = qp(C(-2) * mu_u - C(2));
        if (!(abs_d(ratio) < 1.0)) throw convergence_error("u_at0: |q^{-2mu-2}| >= 1");
        C sum(0), w(1), running(1), pn(1);
        int small_streak = 0;
        for (int n = 0; n < cfg.max_terms; ++n) {
            if (n > 0) {
                pn *= p;
                running *= theta0_ratio(q4 * pn, pn, r, cfg);
                w *= ratio;
            }
            C term = w * theta0_ratio(q2l2 * pn, q4 * pn, r, cfg) * running;
            sum += term;
            if (n > 0 && abs_d(term) < cfg.series_tail_tol * (abs_d(sum) + 1.0)) {
                if (++small_streak >= 2) break;
            } else {
                small_streak = 0;
            }
            if (n + 1 == cfg.max_terms) throw convergence_error("u_at0: no convergence");
        }
        C A = poch(q4, r, cfg) * poch2(q4i, r, p, cfg) /
              (poch(q4i, p, cfg) * poch2(q4, r, p, cfg)) /
              (poch(p, p, cfg) * poch(r, r, cfg));
        C rhs = -qp(-lambda - mu_u - C(2)) * A * sum;
        return theta0(qp(C(2) * mu_u + C(2)), p, cfg) * qp(-lambda * mu_u) * rhs;
    }

    C u_atinf(const C& mu_u, const C& p) const {
        C q4 = qp(4.0), q4i = C(1) / q4;
        C q2lm2 = q2l / qp(2.0);
        C ratio = qp(C(2) * mu_u + C(2));
        if (!(abs_d(ratio) < 1.0)) throw convergence_error("u_atinf: |q^{2mu+2}| >= 1");
        C sum(0), w(1), running(1), pn(1);
        int small_streak = 0;
        for (int n = 0; n < cfg.max_terms; ++n) {
            if (n > 0) {
                pn /= p;
                running *= theta0_ratio(q4i * pn, pn, r, cfg);
                w *= ratio;
            }
            C term = w * theta0_ratio(q2lm2 * pn, q4i * pn, r, cfg) * running;
            sum += term;
            if (n > 0 && abs_d(term) < cfg.series_tail_tol * (abs_d(sum) + 1.0)) {
                if (++small_streak >= 2) break;
            } else {
                small_streak = 0;
            }
            if (n + 1 == cfg.max_terms) throw convergence_error("u_atinf: no convergence");
        }
        C A = poch2(q4i * r, p, r, cfg) / poch2(q4 * p * r, p, r, cfg) /
              (poch(p, p, cfg) * poch(r, r, cfg) * poch(q4 * p, p, cfg));
        C rhs = qp(-lambda - C(2)) * A * sum;
        return theta0(qp(C(2) * mu_u - C(2)), p, cfg) * qp(-lambda * mu_u - mu_u) * rhs;
    }

    C u_series_auto(const C& mu_u, int kappa) const {
        C p = qp(-2.0 * double(kappa));
        if (abs_d(qp(C(-2) * mu_u - C(2))) < 1.0) return u_at0(mu_u, p);
        return u_atinf(mu_u, p);
    }

    // u by the unit-circle integral with the residue corrections that realize
    // its analytic continuation to |q| > 1 (the working regime here).  The
    // series expansions above are asymptotic at moderate |q^{-2 omega}| and
    // detach from the continuation, so every value consumed by the Macdonald
    // identities comes through this route.
    C u_contour(const C& mu_u, int kappa) const {
        auto key = std::make_pair(static_cast<double>(mu_u.real()), kappa);
        auto it = u_cache.find(key);
        if (it != u_cache.end()) return it->second;
        using std::exp;
        C p = qp(-2.0 * double(kappa));
        C q2 = qp(2.0);
        C q2mu = qp(C(2) * mu_u);
        auto v = [&](const C& t) -> C {
            return phase_omega(q2, t, r, p, cfg) *
                   theta0(t * q2mu, p, cfg) / theta0(t / q2, p, cfg) *
                   theta0(t * q2l, r, cfg) / theta0(t / q2, r, cfg);
        };
        int n = 64;
        std::vector<C> ring(n);
        auto node = [&](int j, int count) {
            double th = 2.0 * pi * double(j) / double(count);
            return exp(C(0.0, 1.0) * C(th));
        };
        C total(0);
        for (int j = 0; j < n; ++j) total += v(node(j, n));
        C prev = total / C(double(n));
        C I = prev;
        bool settled = false;
        while (2 * n <= cfg.max_quad_nodes) {
            n *= 2;
            for (int j = 1; j < n; j += 2) total += v(node(j, n));
            I = total / C(double(n));
            if (abs_d(I - prev) < cfg.quad_tol * std::max(1.0, abs_d(I))) {
                settled = true;
                break;
            }
            prev = I;
        }
        if (!settled) throw convergence_error("u_contour: not stable within max_quad_nodes");
        if (abs_d(qb.q) > 1.0) {
            C rp = r * p;
            // residue at t = q^2 (left the circle going to |q| > 1)
            {
                C t = q2;
                C n1 = poch2(t / q2 * rp, r, p, cfg) * poch2(rp / (t * q2), r, p, cfg);
                C d1 = poch2(t * q2, r, p, cfg) * poch2(q2 * rp / t, r, p, cfg);
                C n2 = theta0(t * q2mu, p, cfg) * theta0(t * q2l, r, cfg);
                C d2 = poch(p * q2 / t, p, cfg) * poch(r * q2 / t, r, cfg);
                I -= n1 * n2 / (d1 * d2);
            }
            // residue at t = q^{-2} (entered the circle)
            {
                C t = C(1) / q2;
                C n1 = poch2(t / q2, r, p, cfg) * poch2(rp / (t * q2), r, p, cfg);
                C d1 = poch2(t * q2 * r, r, p, cfg) * poch(t * q2 * p, p, cfg) *
                       poch2(q2 * rp / t, r, p, cfg);
                C n2 = theta0(t * q2mu, p, cfg) / theta0(t / q2, p, cfg) *
                       theta0(t * q2l, r, cfg) / theta0(t / q2, r, cfg);
                I += n1 * n2 / d1;
            }
        }
        C val = qp(-lambda * mu_u - lambda - mu_u - C(2)) * I;
        u_cache.emplace(key, val);
        return val;
    }

    C u_auto(const C& mu_u, int kappa) const { return u_contour(mu_u, kappa); }

    // -- Cor trace-fv at a (possibly shifted, integral) weight --

    C trace_via_u(const C& mu_T, int ktil) const {
        C K = qp(-2.0 * double(ktil));
        C q2 = qp(2.0);
        C q2mT = qp(C(2) * mu_T);
        C d1 = poch(q2 / q2mT, K, cfg);
        C d2 = poch(q2mT * q2 * K, K, cfg);
        if (abs_d(d1) < 1e-13 || abs_d(d2) < 1e-13)
            throw pole_error("trace_via_u: vanishing Pochhammer in the prefactor");
        C ratio = poch2(r * q2, r, K, cfg) / poch2(r / q2, r, K, cfg);
        C pref = qp(-mu_T + C(4)) * poch(C(1) / qp(4.0), r, cfg) /
                 (theta0(q2l, r, cfg) * poch(q2l / q2 * r, r, cfg) *
                  poch(C(1) / (q2l * q2), r, cfg)) *
                 ratio * ratio * poch(K, K, cfg) * poch(qp(4.0) * K, K, cfg) / (d1 * d2);
        return pref * u_auto(-mu_T, ktil);
    }

    // -- chi^0 prefactor of the BGG trace sum --

    C chi0(int mu, int k) const {
        int kt = k + 4;
        C K = qp(-2.0 * double(kt));
        C q2 = qp(2.0);
        C ratio = poch2(r * q2, r, K, cfg) / poch2(r / q2, r, K, cfg);
        return qp(-double(mu) + 2.0) * poch(C(1) / qp(4.0), r, cfg) /
               (theta0(q2l, r, cfg) * poch(q2l / q2 * r, r, cfg) *
                poch(C(1) / (q2l * q2), r, cfg)) *
               ratio * ratio * poch(K, K, cfg) * poch(qp(4.0) * K, K, cfg) /
               (poch(qp(2.0 * double(mu) + 6.0) * K, K, cfg) *
                poch(qp(-2.0 * double(mu) - 2.0), K, cfg));
    }

    // -- chi_{mu,k,2}, route (a) --

    C chi_a(int mu, int k, int Jmax) const {
        int kt = k + 4;
        C sum(0);
        double scale = 0.0, edge = 0.0;
        for (int j = -Jmax; j <= Jmax; ++j) {
            C arg(double(mu + 2 + 2 * j * kt));
            C weight = qp(C(-2.0 * double(j)) * (omega + C(2)) * C(double(mu + 2 + j * kt)));
            C term = weight * (u_auto(-arg, kt) - u_auto(arg, kt));
            sum += term;
            double ta = abs_d(term);
            scale = std::max(scale, ta);
            if (std::abs(j) == Jmax) edge = std::max(edge, ta);
        }
        // u carries quadrature precision, so certify the bilateral tail at
        // that scale rather than at the raw series tolerance
        double edge_tol = std::max(1e3 * cfg.series_tail_tol, 1e3 * cfg.quad_tol);
        if (Jmax > 0 && !(edge <= edge_tol * scale + 1e-280))
            throw convergence_error("chi_a: |j| = Jmax terms not negligible, raise Jmax");
        return chi0(mu, k) * sum;
    }

    // -- chi_{mu,k,2}, route (b): alternating BGG sum of dressed traces --

    C chi_b(int mu, int k, int Jmax) const {
        int kt = k + 4;
        C mu1(double(mu + 1)), k2(double(k + 2));
        C sum = trace_via_u(C(double(mu + 2)), kt);  // identity word
        int Amax = 2 * Jmax + 1;
        for (int a = 1; a <= Amax; ++a) {
            for (int i = 0; i <= 1; ++i) {
                WeylWord w{i, a};
                DottedWeight dwt = dotted_action(w, cplx(double(mu + 1), 0.0),
                                                 cplx(double(k + 2), 0.0));
                C A = dyn_weyl_scalar_t<C>(w, mu1, k2, qb);
                C sgn = (a % 2 == 0) ? C(1) : C(-1);
                sum += sgn * A * qp(C(2) * omega * C(dwt.delta.real())) *
                       trace_via_u(C(dwt.mu.real() + 1.0), kt);
            }
        }
        return sum;
    }

    // -- hypergeometric theta functions and the elliptic polynomial --

    C Q_norm(int mu, int kappa) const {
        C K = qp(-2.0 * double(kappa));
        C pk = poch(K, K, cfg);
        return C(0, -2) * qp(2.0 * double(mu) - 2.0) * pk * pk * theta0(qp(4.0), K, cfg) /
               (theta0(qp(2.0 * double(mu) - 2.0), K, cfg) *
                theta0(qp(2.0 * double(mu) + 2.0), K, cfg));
    }

    C delta_tilde(int mu, int kappa, int Jmax) const {
        C sum(0);
        for (int n = -Jmax; n <= Jmax; ++n) {
            C j(double(mu + 2 * kappa * n));
            C weight = qp(-(omega + C(2)) * j * j / C(2.0 * double(kappa)));
            sum += weight * u_auto(j, kappa);
        }
        return qp(2.0 * double(mu) * double(mu) / double(kappa)) * Q_norm(mu, kappa) * sum;
    }

    C theta_block() const {
        C q2 = qp(2.0);
        return theta0(q2l / q2, r, cfg) * theta0(q2l, r, cfg) * theta0(q2l * q2, r, cfg);
    }

    C jtilde_raw(int mu, int kappa, int Jmax) const {
        MacKernel neg = neg_lambda();
        C delta = delta_tilde(mu + 2, kappa, Jmax) - neg.delta_tilde(mu + 2, kappa, Jmax);
        double m2 = double(mu + 2) * double(mu + 2);
        C p3 = poch(r, r, cfg);
        C pref = C(0, 1) *
                 qp(C(-m2 / double(kappa)) + omega * C(m2 / (2.0 * double(kappa))) +
                    C(3) * lambda) /
                 (p3 * p3 * p3);
        return pref * delta / theta_block();
    }

    C jtilde_trans(int mu, int kappa, int Jmax) const {
        C K = qp(-2.0 * double(kappa));
        MacKernel neg = neg_lambda();
        C sum(0);
        for (int j = -Jmax; j <= Jmax; ++j) {
            C arg(double(mu + 2 + 2 * kappa * j));
            C weight = qp(C(-2.0 * double(j)) * (C(double(kappa * j)) + C(double(mu + 2))) *
                          (omega + C(2)));
            sum += weight * (u_auto(arg, kappa) - neg.u_auto(arg, kappa));
        }
        C pk = poch(K, K, cfg);
        C p3 = poch(r, r, cfg);
        C pref = C(2) * qp(2.0 * double(mu) + 2.0) * qp(C(3) * lambda) * pk * pk *
                 theta0(qp(4.0), K, cfg) /
                 (theta0(qp(2.0 * double(mu) + 2.0), K, cfg) *
                  theta0(qp(2.0 * double(mu) + 6.0), K, cfg) * p3 * p3 * p3 * theta_block());
        return pref * sum;
    }

    // -- affine/elliptic relation: right-hand side --

    C fvconj_rhs(int mu, int k, int Jmax, const C& f) const {
        int kt = k + 4;
        C K = qp(-2.0 * double(kt));
        C q2 = qp(2.0), q4 = qp(4.0);
        C p3 = poch(r, r, cfg);
        C ratio = poch2(r * q2, r, K, cfg) / poch2(r / q2, r, K, cfg);
        // the chi^0/Jtilde^0 reduction carries the leading 2 of Jtilde^0, so
        // the relation closes (J_{0,0,2} = 1 identically) with the 1/2 below
        C factor = poch(C(1) / q4, r, cfg) * p3 * p3 * p3 /
                   (poch(C(1) / q4, K, cfg) * poch(K, K, cfg)) * ratio * ratio *
                   qp(double(mu) + 4.0) * poch(qp(-2.0 * double(mu) - 6.0), K, cfg) *
                   poch(qp(2.0 * double(mu) + 2.0) * K, K, cfg) / C(2);
        return jtilde_trans(mu, kt, Jmax) / f * factor;
    }

    // -- normalizer f(q, q^{-2 omega}) extracted from chi_{0,0,2} --

    C ek_denominator() const {
        // q^lambda (q^{-2 lambda + 2}; r)(q^{2 lambda + 2} r; r)
        C q2 = qp(2.0);
        return qp(lambda) * poch(q2 / q2l, r, cfg) * poch(q2l * q2 * r, r, cfg);
    }
};

using mpc = boost::multiprecision::cpp_complex_50;

template <class C>
MacKernel<C> make_kernel(const MacParams& mp, const PrecisionCfg& cfg) {
    MacKernel<C> k;
    k.qb = make_qbase(C(mp.qb.q.real(), mp.qb.q.imag()));
    k.q2l = C(1) / C(mp.Q2l.real(), mp.Q2l.imag());
    k.lambda = C(mp.lambda.real(), mp.lambda.imag());
    k.r = C(mp.Q2w.real(), mp.Q2w.imag());
    k.omega = C(mp.omega.real(), mp.omega.imag());
    k.cfg = cfg;
    if (cfg.precision_digits > 16) k.cfg.series_tail_tol = std::min(cfg.series_tail_tol, 1e-34);
    return k;
}

template <class C>
cplx to_cplx(const C& z) {
    return cplx(static_cast<double>(z.real()), static_cast<double>(z.imag()));
}

// Dispatch helper: run the callable on a double kernel or on an extended
// precision kernel according to the configured digit count.
template <class Fn>
cplx with_kernel(const MacParams& mp, const PrecisionCfg& cfg, Fn&& fn) {
    if (cfg.precision_digits > 16) {
        auto k = make_kernel<mpc>(mp, cfg);
        return ensure_finite(to_cplx(fn(k)), "macdonald");
    }
    auto k = make_kernel<cplx>(mp, cfg);
    return ensure_finite(fn(k), "macdonald");
}

}  // namespace

cplx chi0(IntegrableWeight w, const MacParams& mp, const PrecisionCfg& cfg) {
    return with_kernel(mp, cfg, [&](auto& k) { return k.chi0(w.mu, w.k); });
}

cplx chi_route_a(IntegrableWeight w, const MacParams& mp, int Jmax, const PrecisionCfg& cfg) {
    return with_kernel(mp, cfg, [&](auto& k) { return k.chi_a(w.mu, w.k, Jmax); });
}

cplx chi_route_b(IntegrableWeight w, const MacParams& mp, int Jmax, const PrecisionCfg& cfg) {
    return with_kernel(mp, cfg, [&](auto& k) { return k.chi_b(w.mu, w.k, Jmax); });
}

ChiRoutes chi_bgg(IntegrableWeight w, const MacParams& mp, int Jmax, const PrecisionCfg& cfg) {
    return {chi_route_a(w, mp, Jmax, cfg), chi_route_b(w, mp, Jmax, cfg)};
}

cplx hyp_theta_tilde(int mu, int kappa, const MacParams& mp, int Jmax, const PrecisionCfg& cfg) {
    return with_kernel(mp, cfg, [&](auto& k) { return k.delta_tilde(mu, kappa, Jmax); });
}

cplx hyp_theta_delta(int mu, int kappa, const MacParams& mp, int Jmax, const PrecisionCfg& cfg) {
    return with_kernel(mp, cfg, [&](auto& k) {
        auto neg = k.neg_lambda();
        return k.delta_tilde(mu, kappa, Jmax) - neg.delta_tilde(mu, kappa, Jmax);
    });
}

cplx elliptic_macdonald(int mu, int kappa, const MacParams& mp, int Jmax, const PrecisionCfg& cfg,
                        int layout) {
    return with_kernel(mp, cfg, [&](auto& k) {
        return layout == 0 ? k.jtilde_trans(mu, kappa, Jmax) : k.jtilde_raw(mu, kappa, Jmax);
    });
}

FExtract extract_f(const MacParams& mp, const std::vector<cplx>& q2l_list, int Jmax,
                   const PrecisionCfg& cfg) {
    if (q2l_list.size() < 3)
        throw std::invalid_argument("extract_f: need at least 3 lambda values");
    std::vector<cplx> fs;
    for (cplx q2l : q2l_list) {
        MacParams m = mp.with_lambda(q2l);
        cplx f = with_kernel(m, cfg, [&](auto& k) {
            return k.chi_a(0, 0, Jmax) / k.ek_denominator();
        });
        fs.push_back(f);
    }
    cplx mean(0.0, 0.0);
    for (cplx f : fs) mean += f;
    mean /= double(fs.size());
    double spread = 0.0;
    for (cplx f : fs) spread = std::max(spread, std::abs(f - mean) / std::abs(mean));
    return {mean, spread};
}

cplx affine_macdonald(IntegrableWeight w, const MacParams& mp, int Jmax, const PrecisionCfg& cfg) {
    return with_kernel(mp, cfg, [&](auto& k) {
        return k.chi_a(w.mu, w.k, Jmax) / k.chi_a(0, 0, Jmax);
    });
}

double fvconj_residual(IntegrableWeight w, const MacParams& mp, int Jmax, const PrecisionCfg& cfg,
                       cplx* lhs_out, cplx* rhs_out) {
    std::vector<cplx> lams = {mp.Q2l, mp.Q2l * 0.8, mp.Q2l * 1.21};
    cplx f = extract_f(mp, lams, Jmax, cfg).f;
    cplx lhs = affine_macdonald(w, mp, Jmax, cfg);
    cplx rhs = with_kernel(mp, cfg, [&](auto& k) {
        using CK = std::decay_t<decltype(k.qb.q)>;
        return k.fvconj_rhs(w.mu, w.k, Jmax, CK(f.real(), f.imag()));
    });
    if (lhs_out) *lhs_out = lhs;
    if (rhs_out) *rhs_out = rhs;
    return rel_err(lhs, rhs);
}

}  // namespace qtrace
