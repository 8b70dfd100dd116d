#include "qtrace/verify.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <sstream>

#include <json.hpp>

#include "qtrace/fock.hpp"
#include "qtrace/fv.hpp"
#include "qtrace/macdonald.hpp"
#include "qtrace/trace.hpp"
#include "qtrace/uqsl2.hpp"

namespace qtrace {

namespace {

// Seeded generator with a pinned bits-to-double conversion, so reports are
// reproducible independent of the standard library's distributions.
struct Rng {
    std::mt19937_64 g;
    explicit Rng(std::uint64_t seed) : g(seed) {}
    double unit() { return double(g() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * unit(); }
    double log_uniform(double a, double b) {
        return std::exp(uniform(std::log(a), std::log(b)));
    }
    cplx phase() {
        double th = uniform(0.0, 2.0 * pi);
        return std::exp(cplx(0.0, th));
    }
    cplx annulus(double rlo, double rhi) { return log_uniform(rlo, rhi) * phase(); }
};

struct SuiteBuilder {
    VerificationReport rep;
    double tol_override;

    void finish(VerificationCase c) {
        if (tol_override > 0) c.tol = tol_override;
        c.abs_err = std::abs(c.lhs - c.rhs);
        c.rel_err = qtrace::rel_err(c.lhs, c.rhs);
        double err = (std::abs(c.rhs) < 1.0) ? c.abs_err : c.rel_err;
        c.pass = c.error.empty() && err <= c.tol;
        rep.cases.push_back(std::move(c));
    }

    void value_case(const std::string& name, const std::string& params, const std::string& rl,
                    const std::string& rr, cplx lhs, cplx rhs, double tol) {
        VerificationCase c;
        c.name = name;
        c.params = params;
        c.route_lhs = rl;
        c.route_rhs = rr;
        c.lhs = lhs;
        c.rhs = rhs;
        c.tol = tol;
        finish(std::move(c));
    }

    // Worst-point error of a property checked over many sampled points.
    void property_case(const std::string& name, const std::string& params, const std::string& rl,
                       const std::string& rr, double worst_err, double tol) {
        value_case(name, params, rl, rr, cplx(worst_err, 0.0), cplx(0.0, 0.0), tol);
    }

    void error_case(const std::string& name, const std::string& params, const std::string& what) {
        VerificationCase c;
        c.name = name;
        c.params = params;
        c.error = what;
        c.tol = 0.0;
        finish(std::move(c));
    }

    template <class Fn>
    void guarded(const std::string& name, const std::string& params, Fn&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            error_case(name, params, e.what());
        }
    }
};

std::string fmt_pp(const ParamPoint& p) {
    std::ostringstream os;
    os.precision(6);
    os << "q=" << p.q().real();
    if (p.q().imag() != 0) os << "+" << p.q().imag() << "i";
    os << " Q2l=" << std::abs(p.Q2l) << " Q2w=" << std::abs(p.Q2w) << " Q2m=" << std::abs(p.Q2m)
       << " Q2k=" << std::abs(p.Q2k);
    return os.str();
}

std::string fmt_d(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

// ---------------------------------------------------------------------------
// qcore suite: theta transformation laws, phase-function identities, elliptic
// gamma symmetry, Pochhammer splice, theta-ratio bounds, quasi-analytic
// Pochhammer coefficients (acceptance criteria 1-3).

void suite_qcore(SuiteBuilder& b, Rng& rng, const PrecisionCfg& cfg) {
    const int npts = 100;
    double w_qu = 0, w_qiu = 0, w_inv = 0;
    b.guarded("qcore.theta0_transformations", "100 seeded points", [&] {
        for (int i = 0; i < npts; ++i) {
            cplx q = rng.annulus(0.08, 0.75);
            cplx u = rng.annulus(0.3, 3.0);
            cplx t0 = theta0(u, q, cfg);
            w_qu = std::max(w_qu, rel_err(theta0(q * u, q, cfg), -t0 / u));
            w_qiu = std::max(w_qiu, rel_err(theta0(u / q, q, cfg), -u / q * t0));
            w_inv = std::max(w_inv, rel_err(theta0(1.0 / u, q, cfg), -t0 / u));
        }
        b.property_case("qcore.theta0_shift_up", "100 seeded points", "theta0(qu)",
                        "-u^-1 theta0(u)", w_qu, 1e-11);
        b.property_case("qcore.theta0_shift_down", "100 seeded points", "theta0(u/q)",
                        "-u q^-1 theta0(u)", w_qiu, 1e-11);
        b.property_case("qcore.theta0_inversion", "100 seeded points", "theta0(1/u)",
                        "-u^-1 theta0(u)", w_inv, 1e-11);
    });

    b.guarded("qcore.phase_transformations", "100 seeded points", [&] {
        double w1 = 0, w2 = 0, w3 = 0;
        for (int i = 0; i < npts; ++i) {
            cplx r = rng.annulus(0.05, 0.4);
            cplx p = rng.annulus(0.05, 0.4);
            cplx a = rng.annulus(0.6, 1.6);
            cplx z = rng.annulus(0.5, 2.0);
            cplx om = phase_omega(a, z, r, p, cfg);
            cplx rhs1 = phase_omega(a, 1.0 / z, r, p, cfg) * theta0(a / z, p, cfg) *
                        theta0(z / a, r, cfg) /
                        (theta0(1.0 / (z * a), p, cfg) * theta0(z * a, r, cfg));
            w1 = std::max(w1, rel_err(om, rhs1));
            cplx lhs2 = phase_omega(a, p * z, r, p, cfg);
            cplx rhs2 = theta0(z * a, r, cfg) / theta0(z / a, r, cfg) * om;
            w2 = std::max(w2, rel_err(lhs2, rhs2));
            cplx lhs3 = phase_omega(a, z / p, r, p, cfg);
            cplx rhs3 = theta0(z / (a * p), r, cfg) / theta0(z * a / p, r, cfg) * om;
            w3 = std::max(w3, rel_err(lhs3, rhs3));
        }
        b.property_case("qcore.phase_inversion", "100 seeded points", "Omega_a(z)",
                        "Omega_a(1/z) theta ratio", w1, 1e-11);
        b.property_case("qcore.phase_shift_up", "100 seeded points", "Omega_a(pz)",
                        "theta ratio Omega_a(z)", w2, 1e-11);
        b.property_case("qcore.phase_shift_down", "100 seeded points", "Omega_a(z/p)",
                        "theta ratio Omega_a(z)", w3, 1e-11);
    });

    b.guarded("qcore.gamma_symmetry", "100 seeded points", [&] {
        double wg = 0, wo = 0, winv = 0;
        for (int i = 0; i < npts; ++i) {
            cplx r = rng.annulus(0.05, 0.4);
            cplx p = rng.annulus(0.05, 0.4);
            cplx z = rng.annulus(0.5, 2.0);
            cplx a = rng.annulus(0.6, 1.6);
            wg = std::max(wg, rel_err(ell_gamma(z, r, p, cfg), ell_gamma(z, p, r, cfg)));
            wo = std::max(wo, rel_err(phase_omega(a, z, r, p, cfg),
                                      ell_gamma(z * a, r, p, cfg) /
                                          ell_gamma(z / a, r, p, cfg)));
            winv = std::max(winv, rel_err(ell_gamma(z, r, p, cfg) *
                                              ell_gamma(r * p / z, r, p, cfg),
                                          cplx(1.0, 0.0)));
        }
        b.property_case("qcore.gamma_nome_symmetry", "100 seeded points", "Gamma(z;r,p)",
                        "Gamma(z;p,r)", wg, 1e-11);
        b.property_case("qcore.phase_as_gamma_ratio", "100 seeded points", "Omega_a(z;r,p)",
                        "Gamma(za)/Gamma(z/a)", wo, 1e-11);
        b.property_case("qcore.gamma_reflection", "100 seeded points",
                        "Gamma(z) Gamma(rp/z)", "1", winv, 1e-11);
    });

    b.guarded("qcore.poch_splice", "100 seeded points, m in 0..10", [&] {
        double w = 0;
        for (int i = 0; i < npts; ++i) {
            cplx q = rng.annulus(0.08, 0.75);
            cplx u = rng.annulus(0.2, 2.0);
            int m = int(rng.uniform(0.0, 10.999));
            cplx lhs = poch_fin(u, q, m) * poch(u * std::pow(q, m), q, cfg);
            w = std::max(w, rel_err(lhs, poch(u, q, cfg)));
        }
        b.property_case("qcore.poch_splice", "100 seeded points", "(u;q)_m (u q^m;q)", "(u;q)",
                        w, 1e-11);
    });

    b.guarded("qcore.theta_ratio_bounds", "100 admissible points, 2% slack", [&] {
        cplx q(0.35, 0.1);
        double eps = 0.08;
        ThetaBoundEnv env(q, eps, cfg);
        int checked = 0;
        double worst = 0.0;  // worst margin violation (0 = all bracketed)
        while (checked < 100) {
            cplx z = rng.annulus(0.5, 2.0);
            double a = rng.uniform(-2.0, 2.0), bb = rng.uniform(-2.0, 2.0);
            double lq = std::log(std::abs(q));
            double la = std::log(std::abs(z)) + a * lq, lb = std::log(std::abs(z)) + bb * lq;
            if (env.lattice_distance(la) <= eps || env.lattice_distance(lb) <= eps) continue;
            auto [lo, hi] = env.bounds(z, a, bb);
            cplx za = z * std::pow(q, a), zb = z * std::pow(q, bb);
            double ratio = std::abs(theta0(za, q, cfg) / theta0(zb, q, cfg));
            if (ratio < lo * 0.98) worst = std::max(worst, lo * 0.98 / ratio - 1.0);
            if (ratio > hi * 1.02) worst = std::max(worst, ratio / (hi * 1.02) - 1.0);
            ++checked;
        }
        b.property_case("qcore.theta_ratio_bracketing", "q=0.35+0.1i eps=0.08 100 points",
                        "|theta0(zq^a)/theta0(zq^b)|", "sampled envelope", worst, 1e-12);
    });

    b.guarded("qcore.qa_poch_coeffs", "p=0.05, k<=20", [&] {
        cplx p(0.05, 0.0);
        cplx r_in(0.5, 0.0), r_out(2.0, 0.0);
        cplx s_in(0.0, 0.0), s_out(0.0, 0.0);
        cplx pk(1.0, 0.0);
        for (int k = 0; k <= 20; ++k) {
            s_in += qa_poch_coeff(k, r_in) * pk;
            s_out += qa_poch_coeff(k, r_out) * pk;
            pk *= p;
        }
        b.value_case("qcore.qa_poch_inside", "r=0.5 p=0.05", "sum c_k p^k", "(p;r)", s_in,
                     poch(p, r_in, cfg), 1e-10);
        b.value_case("qcore.qa_poch_outside", "r=2 p=0.05", "sum c_k p^k",
                     "1/(r^-1 p; r^-1)", s_out, 1.0 / poch(p / r_out, 1.0 / r_out, cfg), 1e-10);
    });
}

// ---------------------------------------------------------------------------
// fv suite: null integrals and cross-method agreement (criteria 4-5).

ParamPoint random_null_point(Rng& rng, int m_needed) {
    for (int tries = 0; tries < 200; ++tries) {
        double q = rng.uniform(0.93, 0.96);
        ParamPoint p = ParamPoint::from_multiplicative(
            q, rng.log_uniform(0.012, 0.04), rng.log_uniform(3e-6, 3e-5),
            rng.log_uniform(1e-3, 4e-3), rng.log_uniform(0.1, 0.2));
        if ((2.0 * (p.mu + 1.0) / p.k).real() > double(m_needed) + 0.5) return p;
    }
    throw region_error("could not sample an admissible fv-null point");
}

ParamPoint random_null_flip_point(Rng& rng, int m_needed) {
    for (int tries = 0; tries < 200; ++tries) {
        double q = rng.uniform(0.93, 0.96);
        ParamPoint p = ParamPoint::from_multiplicative(
            q, rng.log_uniform(0.012, 0.04), rng.log_uniform(3e-6, 3e-5),
            1.0 / rng.log_uniform(0.01, 0.1),  // |Q2m| > 1 so mu > 0
            1.0 / rng.log_uniform(0.1, 0.2));  // |Q2k| > 1 so |q^{2k}| < 1
        if ((2.0 * (p.mu + 1.0) / p.k).real() > double(m_needed) + 0.5) return p;
    }
    throw region_error("could not sample an admissible fv-null-flip point");
}

void suite_fv(SuiteBuilder& b, Rng& rng, const PrecisionCfg& cfg) {
    for (int m = 0; m <= 2; ++m) {
        for (int i = 0; i < 5; ++i) {
            std::string name = "fv.residue_Im.m" + std::to_string(m) + "." + std::to_string(i);
            b.guarded(name, "", [&] {
                ParamPoint p = random_null_point(rng, m);
                auto [lhs, rhs] = residue_Im(p, m, cfg);
                b.value_case(name, fmt_pp(p), "contour I_m", "closed form", lhs, rhs, 1e-10);
            });
        }
    }
    for (int m = 0; m <= 2; ++m) {
        for (int i = 0; i < 5; ++i) {
            std::string name = "fv.residue_Ipm.m" + std::to_string(m) + "." + std::to_string(i);
            b.guarded(name, "", [&] {
                ParamPoint p = random_null_flip_point(rng, m);
                auto [lhs, rhs] = residue_Ipm(p, m, cfg);
                b.value_case(name, fmt_pp(p), "modified contour I'_m", "closed form", lhs, rhs,
                             1e-10);
            });
        }
    }

    // contour vs series at 0 (small |Q2m|)
    {
        ParamPoint base = ParamPoint::reference();
        std::vector<ParamPoint> pts = {
            base, base.with_q2w(3e-5),
            ParamPoint::from_multiplicative(0.95, 0.025, 1e-5, 1.5e-3, 0.12)};
        int i = 0;
        for (const auto& p : pts) {
            std::string name = "fv.cross_method_at0." + std::to_string(i++);
            b.guarded(name, fmt_pp(p), [&] {
                b.value_case(name, fmt_pp(p), "contour", "series at 0", fv_contour(p, cfg),
                             fv_series_at0(p, cfg), 1e-9);
            });
        }
    }
    // contour vs series at infinity (large |Q2m|)
    {
        ParamPoint p = ParamPoint::from_multiplicative(0.95, 0.02, 1e-5, 500.0, 0.15);
        b.guarded("fv.cross_method_atinf", fmt_pp(p), [&] {
            b.value_case("fv.cross_method_atinf", fmt_pp(p), "contour", "series at infinity",
                         fv_contour(p, cfg), fv_series_atinf(p, cfg), 1e-9);
        });
    }
    // u-symmetry at 20 seeded points
    b.guarded("fv.u_symmetry", "20 seeded points", [&] {
        double w = 0;
        for (int i = 0; i < 20; ++i) {
            double q = rng.uniform(0.93, 0.96);
            ParamPoint p = ParamPoint::from_multiplicative(
                q, rng.log_uniform(0.012, 0.04), rng.log_uniform(3e-6, 3e-5),
                rng.log_uniform(1e-3, 4e-3), rng.log_uniform(0.1, 0.2));
            w = std::max(w, rel_err(fv_contour(p, cfg), fv_contour(p.reflect_lambda_mu(), cfg)));
        }
        b.property_case("fv.u_symmetry", "20 seeded points", "u(lambda,mu)", "u(-lambda,-mu)", w,
                        1e-10);
    });
}

// ---------------------------------------------------------------------------
// trace suite: four-method agreement on a grid around P*, constant identity
// (criterion 6).

void suite_trace(SuiteBuilder& b, const SuiteOptions& opt, const PrecisionCfg& cfg) {
    int n = std::max(1, opt.grid_n);
    std::vector<double> l_grid, m_grid;
    for (int i = 0; i < n; ++i) {
        double s = (n == 1) ? 1.0 : 0.8 + 0.45 * double(i) / double(n - 1);
        l_grid.push_back(0.02 * s);
        m_grid.push_back(2e-3 * s);
    }
    for (size_t a = 0; a < l_grid.size(); ++a)
        for (size_t c = 0; c < m_grid.size(); ++c) {
            ParamPoint p =
                ParamPoint::from_multiplicative(0.95, l_grid[a], 1e-5, m_grid[c], 0.15);
            std::string name =
                "trace.four_methods." + std::to_string(a) + "." + std::to_string(c);
            b.guarded(name, fmt_pp(p), [&] {
                cplx v[4] = {trace_integral(p, cfg), trace_via_fv(p, cfg), trace_series(p, cfg),
                             trace_jackson(p, cfg)};
                double worst = 0;
                for (int x = 0; x < 4; ++x)
                    for (int y = x + 1; y < 4; ++y) worst = std::max(worst, rel_err(v[x], v[y]));
                b.property_case(name, fmt_pp(p), "integral/fv/series/jackson",
                                "pairwise agreement", worst, 1e-9);
            });
        }

    ParamPoint p = ParamPoint::reference();
    b.guarded("trace.constant_identity", fmt_pp(p), [&] {
        // D(lambda, mu) = C_{(mu-1)/2,1}^{-1} C(lambda, (mu-1)/2) at k -> k-2
        ParamPoint pxi = ParamPoint::from_multiplicative(
            p.q(), p.Q2l, p.Q2w, p.qp(-p.mu + 1.0), p.Q2k * p.qp(4.0));
        cplx lhs = const_D_jackson(p, cfg);
        cplx rhs = const_C_ff(pxi, cfg) / const_C_mu1(p.qb, (p.mu - 1.0) / 2.0, p.k - 2.0, cfg);
        b.value_case("trace.constant_identity", fmt_pp(p), "D(lambda,mu)",
                     "C_{(mu-1)/2,1}^-1 C(lambda,(mu-1)/2)", lhs, rhs, 1e-12);
    });
    b.guarded("trace.xi_relation", fmt_pp(p), [&] {
        ParamPoint pxi = ParamPoint::from_multiplicative(
            p.q(), p.Q2l, p.Q2w, p.qp(-p.mu + 1.0), p.Q2k * p.qp(4.0));
        cplx lhs = trace_jackson(p, cfg);
        cplx rhs = xi_ff(pxi, cfg) / const_C_mu1(p.qb, (p.mu - 1.0) / 2.0, p.k - 2.0, cfg);
        b.value_case("trace.xi_relation", fmt_pp(p), "T^{w0}(mu,k)",
                     "C^-1 Xi((mu-1)/2, k-2)", lhs, rhs, 1e-9);
    });
}

// ---------------------------------------------------------------------------
// symmetry suite (criterion 7).

void suite_symmetry(SuiteBuilder& b, Rng& rng, const PrecisionCfg& cfg) {
    for (int i = 0; i < 10; ++i) {
        std::string name = "symmetry.residual." + std::to_string(i);
        b.guarded(name, "", [&] {
            ParamPoint p = ParamPoint::from_multiplicative(
                rng.uniform(0.93, 0.96), rng.log_uniform(0.01, 0.08),
                rng.log_uniform(0.05, 0.25), rng.log_uniform(0.01, 0.08),
                rng.log_uniform(0.05, 0.25));
            double res = symmetry_residual(p, cfg);
            b.property_case(name, fmt_pp(p), "Ttilde(lambda,omega,mu,k)",
                            "Ttilde(mu,k,lambda,omega)", res, 1e-9);
        });
    }
    b.guarded("symmetry.fixed_point", "", [&] {
        ParamPoint p = ParamPoint::from_multiplicative(0.95, 0.03, 0.1, 0.03, 0.1);
        b.property_case("symmetry.fixed_point", fmt_pp(p), "residual at lambda=mu, omega=k",
                        "0", symmetry_residual(p, cfg), 1e-15);
    });
}

// ---------------------------------------------------------------------------
// trig suite (criterion 8).

void suite_trig(SuiteBuilder& b, Rng& rng, const PrecisionCfg& cfg) {
    ParamPoint p = ParamPoint::reference();
    b.guarded("trig.limit_extrapolation", fmt_pp(p), [&] {
        cplx ext;
        double res = trig_limit_residual(p, cfg, &ext);
        b.property_case("trig.limit_extrapolation", fmt_pp(p),
                        "trace_integral extrapolated in Q2w", "trig closed form", res, 1e-8);
    });
    b.guarded("trig.m1_matches_closed_trace", fmt_pp(p), [&] {
        cplx lhs = trig_m1(p);
        cplx rhs = closed_trace(p.mu - 1.0, 1, p.lambda, p.qb);
        b.value_case("trig.m1_matches_closed_trace", fmt_pp(p), "trig_m1",
                     "closed_trace(mu-1, m=1)", lhs, rhs, 1e-12);
    });
    for (int m = 0; m <= 3; ++m) {
        for (int i = 0; i < 5; ++i) {
            std::string name =
                "trig.oracle.m" + std::to_string(m) + "." + std::to_string(i);
            b.guarded(name, "", [&] {
                double q = rng.uniform(0.5, 0.85);
                qbase<cplx> qb = make_qbase(cplx(q, 0.0));
                cplx mu(rng.uniform(1.2, 3.5), rng.uniform(-0.2, 0.2));
                // convergence of the Verma trace demands |q^{-2l}| < |q|^{2m}
                double q2l = rng.log_uniform(0.02, 0.3) * std::pow(q, 2.0 * m);
                cplx lambda = -std::log(cplx(q2l, 0.0)) / (2.0 * qb.log_q);
                cplx lhs = closed_trace(mu, m, lambda, qb);
                cplx rhs = brute_trace(mu, m, lambda, qb, 0, cfg);
                b.value_case(name, "q=" + fmt_d(q) + " Q2l=" + fmt_d(q2l), "closed form",
                             "truncated Verma oracle", lhs, rhs, 1e-12);
            });
        }
    }
}

// ---------------------------------------------------------------------------
// classical suite (criterion 9).

void suite_classical(SuiteBuilder& b, Rng& rng, const PrecisionCfg& cfg) {
    ClassicalParams cp;
    b.guarded("classical.limit_pinned", "Lambda=-0.4+0.1i Omega=1+0.3i mu=0.5 k=-5", [&] {
        // Pinned eps list; the limit is first-order with large coefficients
        // (per-eps residuals 0.45/0.27/0.15), so three-point extrapolation
        // lands near 9e-3. Kept at the stated tolerance; the extended case
        // below shows one smaller node reaches it.
        std::vector<double> per;
        double res = classical_limit_residual(cp, {0.2, 0.1, 0.05}, cfg, &per);
        b.property_case("classical.limit_pinned", "eps in {0.2,0.1,0.05}",
                        "trace extrapolated in eps", "classical closed form", res, 1e-3);
        bool mono = per.size() == 3 && per[0] > per[1] && per[1] > per[2];
        b.property_case("classical.residuals_decrease",
                        "per-eps residuals " + fmt_d(per[0]) + "," + fmt_d(per[1]) + "," +
                            fmt_d(per[2]),
                        "residual ordering", "monotone", mono ? 0.0 : 1.0, 0.5);
    });
    b.guarded("classical.limit_extended", "eps in {0.2,0.1,0.05,0.025}", [&] {
        double res = classical_limit_residual(cp, {0.2, 0.1, 0.05, 0.025}, cfg);
        b.property_case("classical.limit_extended", "one extra eps beyond the pinned list",
                        "trace extrapolated in eps", "classical closed form", res, 1e-3);
    });
    for (int i = 0; i < 10; ++i) {
        std::string name = "classical.beta_integral." + std::to_string(i);
        b.guarded(name, "", [&] {
            cplx a(rng.uniform(0.2, 2.0), rng.uniform(-0.3, 0.3));
            cplx bb(rng.uniform(0.2, 2.0), rng.uniform(-0.3, 0.3));
            cplx lhs = pochhammer_loop_integral(a, bb, [](double) { return cplx(1.0, 0.0); }, cfg);
            cplx rhs = (1.0 - std::exp(2.0 * pi * iu * a)) * (1.0 - std::exp(2.0 * pi * iu * bb)) *
                       cgamma(a) * cgamma(bb) / cgamma(a + bb);
            b.value_case(name, "alpha,beta random", "Pochhammer loop, g=1",
                         "monodromy x Beta(alpha,beta)", lhs, rhs, 1e-10);
        });
    }
}

// ---------------------------------------------------------------------------
// fock suite (criterion 10).

void suite_fock(SuiteBuilder& b, Rng& rng, const PrecisionCfg& cfg) {
    for (int i = 0; i < 20; ++i) {
        std::string name = "fock.oracle." + std::to_string(i);
        b.guarded(name, "", [&] {
            ExpFactorList f;
            int nf = int(rng.uniform(0.0, 3.999));
            for (int j = 0; j < nf; ++j)
                f.xy.push_back({rng.annulus(0.05, 0.5), rng.annulus(0.05, 0.5)});
            f.c = rng.annulus(0.5, 2.0);
            double w = rng.log_uniform(0.05, 0.3);
            f.z = std::log(cplx(w, 0.0)) / f.c;  // |e^{zc}| = w
            auto res = heis_trace_brute(f, {40}, cfg);
            if (!res.tail_ok) throw convergence_error("fock: truncation too small");
            b.value_case(name, "Nf=" + std::to_string(nf) + " |e^zc|=" + fmt_d(w),
                         "closed form", "level-40 oracle", heis_trace_closed(f), res.value, 1e-8);
        });
    }
}

// ---------------------------------------------------------------------------
// macdonald suite (criterion 11).

void suite_macdonald(SuiteBuilder& b, const PrecisionCfg& cfg) {
    MacParams mp = MacParams::from_multiplicative(1.25, 0.5, 0.3);
    const int Jmax = 3;

    for (IntegrableWeight w : {IntegrableWeight{0, 0}, IntegrableWeight{1, 2}}) {
        std::string name =
            "macdonald.chi_routes." + std::to_string(w.mu) + "." + std::to_string(w.k);
        b.guarded(name, "", [&] {
            ChiRoutes r = chi_bgg(w, mp, Jmax, cfg);
            b.value_case(name, "q=1.25 Q2l=0.5 Q2w=0.3", "BGG route (b)", "direct route (a)",
                         r.bgg, r.direct, 1e-8);
        });
    }

    b.guarded("macdonald.extract_f_spread", "", [&] {
        FExtract fe = extract_f(mp, {cplx(0.4, 0.0), cplx(0.5, 0.0), cplx(0.65, 0.0)}, Jmax, cfg);
        b.property_case("macdonald.extract_f_spread", "3 lambda values",
                        "chi_{0,0,2}/EK denominator", "lambda-independence", fe.spread, 1e-8);
    });
    b.guarded("macdonald.extract_f_unit_term", "", [&] {
        MacParams small = mp.with_q2w(cplx(1e-6, 0.0));
        FExtract fe =
            extract_f(small, {cplx(0.4, 0.0), cplx(0.5, 0.0), cplx(0.65, 0.0)}, 2, cfg);
        b.value_case("macdonald.extract_f_unit_term", "Q2w=1e-6", "f(q, Q2w->0)", "1", fe.f,
                     cplx(1.0, 0.0), 1e-5);
    });

    for (IntegrableWeight w :
         {IntegrableWeight{0, 0}, IntegrableWeight{1, 2}, IntegrableWeight{2, 2}}) {
        std::string name =
            "macdonald.fvconj." + std::to_string(w.mu) + "." + std::to_string(w.k);
        b.guarded(name, "", [&] {
            cplx lhs, rhs;
            double res = fvconj_residual(w, mp, Jmax, cfg, &lhs, &rhs);
            b.property_case(name, "q=1.25 Q2l=0.5 Q2w=0.3", "J_{mu,k,2}",
                            "renormalized Jtilde_{mu,k+4}", res, 1e-7);
        });
    }

    for (IntegrableWeight w :
         {IntegrableWeight{0, 0}, IntegrableWeight{1, 2}, IntegrableWeight{2, 2}}) {
        std::string name =
            "macdonald.weyl_symmetry." + std::to_string(w.mu) + "." + std::to_string(w.k);
        b.guarded(name, "", [&] {
            cplx j1 = affine_macdonald(w, mp, Jmax, cfg);
            cplx j2 = affine_macdonald(w, mp.neg_lambda(), Jmax, cfg);
            b.value_case(name, "q=1.25 Q2l=0.5 Q2w=0.3", "J(lambda)", "J(-lambda)", j1, j2,
                         1e-8);
        });
    }

    b.guarded("macdonald.layout_crosscheck", "", [&] {
        cplx a = elliptic_macdonald(1, 6, mp, Jmax, cfg, 0);
        cplx bb = elliptic_macdonald(1, 6, mp, Jmax, cfg, 1);
        b.value_case("macdonald.layout_crosscheck", "mu=1 kappa=6", "re-indexed layout",
                     "raw hypergeometric-theta layout", a, bb, 1e-9);
    });
}

}  // namespace

std::vector<std::string> suite_names() {
    return {"qcore", "fv", "trace", "symmetry", "trig", "classical", "fock", "macdonald", "all"};
}

VerificationReport run_suite(const std::string& name, const SuiteOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    SuiteBuilder b;
    b.tol_override = opt.tol_override;
    b.rep.suite = name;
    {
        std::ostringstream cfgs;
        cfgs << "seed=" << opt.seed << " tol_override=" << opt.tol_override
             << " grid_n=" << opt.grid_n << " quad_tol=" << opt.cfg.quad_tol
             << " series_tail_tol=" << opt.cfg.series_tail_tol
             << " pole_margin=" << opt.cfg.pole_margin
             << " precision_digits=" << opt.cfg.precision_digits
             << " version=" << artifact_version;
        b.rep.config_echo = cfgs.str();
    }
    Rng rng(opt.seed);
    const PrecisionCfg& cfg = opt.cfg;
    bool known = false;
    auto want = [&](const char* s) {
        bool w = (name == s || name == "all");
        if (name == s) known = true;
        return w;
    };
    if (want("qcore")) suite_qcore(b, rng, cfg);
    if (want("fv")) suite_fv(b, rng, cfg);
    if (want("trace")) suite_trace(b, opt, cfg);
    if (want("symmetry")) suite_symmetry(b, rng, cfg);
    if (want("trig")) suite_trig(b, rng, cfg);
    if (want("classical")) suite_classical(b, rng, cfg);
    if (want("fock")) suite_fock(b, rng, cfg);
    if (want("macdonald")) suite_macdonald(b, cfg);
    if (!known && name != "all") throw std::invalid_argument("unknown suite: " + name);

    std::sort(b.rep.cases.begin(), b.rep.cases.end(),
              [](const VerificationCase& x, const VerificationCase& y) { return x.name < y.name; });
    b.rep.total = int(b.rep.cases.size());
    for (const auto& c : b.rep.cases) (c.pass ? b.rep.passed : b.rep.failed)++;
    b.rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                        .count();
    return b.rep;
}

std::string report_to_json(const VerificationReport& rep) {
    nlohmann::ordered_json j;
    j["suite"] = rep.suite;
    j["artifact_version"] = artifact_version;
    j["config"] = rep.config_echo;
    j["counts"] = {{"total", rep.total}, {"passed", rep.passed}, {"failed", rep.failed}};
    j["cases"] = nlohmann::ordered_json::array();
    for (const auto& c : rep.cases) {
        nlohmann::ordered_json cj;
        cj["name"] = c.name;
        cj["params"] = c.params;
        cj["route_lhs"] = c.route_lhs;
        cj["route_rhs"] = c.route_rhs;
        cj["lhs"] = {c.lhs.real(), c.lhs.imag()};
        cj["rhs"] = {c.rhs.real(), c.rhs.imag()};
        cj["abs_err"] = c.abs_err;
        cj["rel_err"] = c.rel_err;
        cj["tol"] = c.tol;
        cj["pass"] = c.pass;
        if (!c.error.empty()) cj["error"] = c.error;
        j["cases"].push_back(cj);
    }
    j["wall_ms"] = rep.wall_ms;
    return j.dump(2);
}

}  // namespace qtrace
