#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qtrace/fv.hpp"

using namespace qtrace;

namespace {
const PrecisionCfg cfg{};
bool close(cplx a, cplx b, double tol) { return rel_err(a, b) <= tol; }
const ParamPoint pstar = ParamPoint::reference();
}  // namespace

TEST_CASE("ParamPoint invariants") {
    CHECK(pstar.round_trip_err() < 1e-13);
    CHECK(pstar.good_region());
    CHECK_FALSE(pstar.good_region(50.0));
    ParamPoint r = pstar.reflect_lambda_mu();
    CHECK(rel_err(r.lambda, -pstar.lambda) < 1e-12);
    CHECK(rel_err(r.mu, -pstar.mu) < 1e-12);
    ParamPoint inv = pstar.inverted();
    CHECK(rel_err(inv.lambda, -pstar.lambda) < 1e-12);
    CHECK(rel_err(inv.omega, -pstar.omega) < 1e-12);
    CHECK(rel_err(inv.mu, pstar.mu) < 1e-12);
    CHECK(rel_err(inv.k, pstar.k) < 1e-12);
}

TEST_CASE("fv contour vs series at 0") {
    cplx a = fv_contour(pstar, cfg);
    cplx b = fv_series_at0(pstar, cfg);
    CHECK(close(a, b, 1e-10));
}

TEST_CASE("fv series truncation stability") {
    PrecisionCfg loose = cfg;
    loose.series_tail_tol = 1e-10;  // earlier truncation
    cplx a = fv_series_at0(pstar, loose);
    cplx b = fv_series_at0(pstar, cfg);
    CHECK(close(a, b, 1e-9));
}

TEST_CASE("fv contour vs series at infinity") {
    ParamPoint p = ParamPoint::from_multiplicative(0.95, 0.02, 1e-5, 500.0, 0.15);
    CHECK(close(fv_contour(p, cfg), fv_series_atinf(p, cfg), 1e-10));
}

TEST_CASE("u-symmetry") {
    CHECK(close(fv_contour(pstar, cfg), fv_contour(pstar.reflect_lambda_mu(), cfg), 1e-10));
    // the at-0 series point maps to an at-infinity series point
    ParamPoint refl = pstar.reflect_lambda_mu();
    CHECK(close(fv_series_at0(pstar, cfg), fv_series_atinf(refl, cfg), 1e-10));
}

TEST_CASE("node doubling stability") {
    PrecisionCfg tight = cfg;
    tight.quad_tol = 1e-14;
    CHECK(close(fv_contour(pstar, cfg), fv_contour(pstar, tight), 1e-12));
}

TEST_CASE("contour continuation to |q| > 1 matches the series") {
    // |q| > 1 with both nomes still inside the disc
    ParamPoint p = ParamPoint::from_multiplicative(cplx(1.0 / 0.95, 0.0), 0.02, 1e-4, 2e-3, 0.15);
    CHECK(std::abs(p.q()) > 1.0);
    cplx a = fv_contour(p, cfg);
    cplx b = fv_series_at0(p, cfg);
    CHECK(close(a, b, 1e-9));
}

TEST_CASE("null integral I_m against its closed form") {
    for (int m = 0; m <= 2; ++m) {
        auto [lhs, rhs] = residue_Im(pstar, m, cfg);
        CHECK(close(lhs, rhs, 1e-10));
    }
    // precondition: Re(2(mu+1)/k) > m fails for large m
    CHECK_THROWS_AS(residue_Im(pstar, 50, cfg), region_error);
}

TEST_CASE("null integral I'_m with modified contour") {
    ParamPoint p = ParamPoint::from_multiplicative(0.95, 0.02, 1e-5, 25.0, 1.0 / 0.15);
    for (int m = 0; m <= 2; ++m) {
        auto [lhs, rhs] = residue_Ipm(p, m, cfg);
        CHECK(close(lhs, rhs, 1e-10));
    }
    CHECK_THROWS_AS(residue_Ipm(p, 50, cfg), region_error);
}

TEST_CASE("rational residue identity across the continuation") {
    // q^{2m} R_m + q^4 q^{-2m} R'_m = 0 identically
    for (int m : {0, 1, 2}) {
        for (double qv : {0.9, 0.95}) {
            ParamPoint p = ParamPoint::from_multiplicative(qv, cplx(0.03, 0.01),
                                                           cplx(1e-4, 0.0), cplx(4e-3, 1e-3),
                                                           cplx(0.2, 0.05));
            cplx lhs = std::pow(p.qp(2.0), m) * fv_null_rational(p, m);
            cplx rhs = -p.qp(4.0) * std::pow(p.qp(-2.0), m) * fv_null_flip_rational(p, m);
            CHECK(rel_err(lhs, rhs) < 1e-12);
        }
    }
}

TEST_CASE("integrand factorization against the phase function") {
    // v(t) = (tq^-2;p)/(tq^2;p) theta0(t q^{2mu};p)/theta0(tq^-2;p)
    //        (1 - tq^{2l})/(1 - tq^-2) f(t)
    cplx t(0.83, 0.42);
    cplx q2 = pstar.qp(2.0);
    cplx pk = pstar.Q2k;
    cplx lhs = fv_integrand(t, pstar, cfg);
    cplx rhs = poch(t / q2, pk, cfg) / poch(t * q2, pk, cfg) *
               theta0(t / pstar.Q2m, pk, cfg) / theta0(t / q2, pk, cfg) *
               (1.0 - t / pstar.Q2l) / (1.0 - t / q2) * phase_f(t, pstar, cfg);
    CHECK(close(lhs, rhs, 1e-12));
}

TEST_CASE("phase f tends to 1 as Q2w -> 0") {
    ParamPoint p = pstar.with_q2w(cplx(1e-12, 0.0));
    CHECK(std::abs(phase_f(cplx(0.9, 0.1), p, cfg) - 1.0) < 1e-10);
}

TEST_CASE("first-order phase coefficients match the continued closed form") {
    // fit f(t) = 1 + Q2w f_1(t) + ... and split f_1 into Fourier modes in t
    ParamPoint base = ParamPoint::from_multiplicative(0.95, 0.02, 1e-5, 2e-3, 0.15);
    cplx q2 = base.qp(2.0);
    cplx pk = base.Q2k;
    cplx q2l = 1.0 / base.Q2l;
    auto f1_at = [&](cplx t) {
        const double h = 1e-6;
        cplx fa = phase_f(t, base.with_q2w(cplx(h, 0.0)), cfg);
        cplx fb = phase_f(t, base.with_q2w(cplx(2.0 * h, 0.0)), cfg);
        // two-point solve of f = 1 + w f1 + w^2 f2
        return (4.0 * (fa - 1.0) - (fb - 1.0)) / (2.0 * h);
    };
    // Fourier split over 8 points on |t| = 1
    cplx c_p1(0.0, 0.0), c_m1(0.0, 0.0), c_0(0.0, 0.0);
    const int N = 8;
    for (int j = 0; j < N; ++j) {
        cplx t = std::exp(cplx(0.0, 2.0 * pi * j / N));
        cplx v = f1_at(t);
        c_p1 += v / t;
        c_m1 += v * t;
        c_0 += v;
    }
    c_p1 /= double(N);
    c_m1 /= double(N);
    c_0 /= double(N);
    // closed forms, written from the quasi-analytically continued product
    // (evaluated at q^{2k} = 1/Q2k, the same rational function)
    cplx P2 = 1.0 / pk;
    cplx f11 = (q2 - 1.0 / q2) * (-P2) / (1.0 - P2) - q2l + 1.0 / q2;
    cplx f1m1 = (q2 - 1.0 / q2) * pk / (1.0 - pk) - 1.0 / q2l + q2;
    CHECK(rel_err(c_p1, f11) < 1e-6);
    CHECK(rel_err(c_m1, f1m1) < 1e-6);
    CHECK(std::abs(c_0) < 1e-6);
    // and the two closed-form layouts agree exactly
    cplx f11_direct = (q2 - 1.0 / q2) / (1.0 - pk) - q2l + 1.0 / q2;
    CHECK(rel_err(f11, f11_direct) < 1e-14);
}

TEST_CASE("qa phase continuation consistency at first order") {
    // phase_f_qa evaluated in its own regime |q^{2k}| < 1 has the same
    // first-order rational coefficients
    ParamPoint p = ParamPoint::from_multiplicative(0.95, 0.02, 1e-5, 25.0, 1.0 / 0.15);
    cplx q2 = p.qp(2.0);
    cplx P2 = p.qp(2.0 * p.k);
    cplx q2l = 1.0 / p.Q2l;
    auto f1_at = [&](cplx t) {
        const double h = 1e-6;
        cplx fa = phase_f_qa(t, p.with_q2w(cplx(h, 0.0)), cfg);
        cplx fb = phase_f_qa(t, p.with_q2w(cplx(2.0 * h, 0.0)), cfg);
        return (4.0 * (fa - 1.0) - (fb - 1.0)) / (2.0 * h);
    };
    cplx c_p1(0.0, 0.0);
    const int N = 8;
    for (int j = 0; j < N; ++j) {
        cplx t = std::exp(cplx(0.0, 2.0 * pi * j / N));
        c_p1 += f1_at(t) / t;
    }
    c_p1 /= double(N);
    cplx f11 = (1.0 / q2 - q2) * P2 / (1.0 - P2) - q2l + 1.0 / q2;
    CHECK(rel_err(c_p1, f11) < 1e-6);
}

TEST_CASE("fv normalized qa is stable and region-checked") {
    ParamPoint p = ParamPoint::from_multiplicative(cplx(1.0 / 0.95, 0.0), 0.02, 1e-4, 25.0,
                                                   1.0 / 0.15);
    cplx v = fv_normalized_qa(p, cfg);
    CHECK(finite(v));
    PrecisionCfg tight = cfg;
    tight.quad_tol = 1e-14;
    CHECK(close(v, fv_normalized_qa(p, tight), 1e-11));
    CHECK_THROWS_AS(fv_normalized_qa(pstar, cfg), region_error);
}

TEST_CASE("series n = 0 term gives the leading small-Q2m behaviour") {
    ParamPoint p = ParamPoint::from_multiplicative(0.95, 0.02, 1e-5, 1e-10, 0.15);
    cplx r = p.Q2w, pk = p.Q2k;
    cplx q4 = p.qp(4.0);
    cplx A = poch(q4, r, cfg) * poch2(1.0 / q4, r, pk, cfg) /
             (poch(1.0 / q4, pk, cfg) * poch2(q4, r, pk, cfg)) /
             (poch(pk, pk, cfg) * poch(r, r, cfg));
    cplx n0 = theta0(p.qp(2.0 * p.mu + 2.0), pk, cfg) * p.qp(-p.lambda * p.mu) *
              (-p.qp(-p.lambda - p.mu - 2.0)) * A *
              theta0_ratio(p.qp(2.0) / p.Q2l, q4, r, cfg);
    CHECK(close(fv_series_at0(p, cfg), n0, 1e-9));
}

TEST_CASE("residue correction vanishes when the pole factor is absent") {
    // lambda = 1 makes (1 - t q^{2 lambda}) cancel (1 - t q^2): the t = q^{-2}
    // correction of the modified contour is an exact zero
    auto qb = make_qbase(cplx(0.95, 0.0));
    ParamPoint p = ParamPoint::from_multiplicative(0.95, qpow(qb, cplx(-2.0)), 1e-5, 25.0,
                                                   1.0 / 0.15);
    cplx q2 = p.qp(2.0);
    cplx h = (1.0 - (1.0 / q2) * (1.0 / p.Q2l));  // (1 - t q^{2 lambda}) at t = q^{-2}
    CHECK(std::abs(h) < 1e-15);
    auto [lhs, rhs] = residue_Ipm(p, 0, cfg);
    CHECK(close(lhs, rhs, 1e-10));
}
