#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qtrace/qseries.hpp"

using namespace qtrace;

namespace {
const PrecisionCfg cfg{};

bool close(cplx a, cplx b, double tol = 1e-13) { return rel_err(a, b) <= tol; }
}  // namespace

TEST_CASE("qpow basics") {
    auto qb = make_qbase(cplx(0.95, 0.0));
    CHECK(close(qpow(qb, cplx(0.0)), cplx(1.0)));
    CHECK(close(qpow(qb, cplx(1.0)), cplx(0.95)));
    CHECK(close(qpow(qb, cplx(2.0)), cplx(0.9025)));
    CHECK_THROWS_AS(qpow(qb, cplx(-1e9, 0.0)), overflow_error);
}

TEST_CASE("q-numbers") {
    auto qb = make_qbase(cplx(0.8, 0.1));
    cplx q = qb.q;
    CHECK(close(qnum(qb, 1), cplx(1.0)));
    CHECK(close(qnum(qb, 2), q + 1.0 / q));
    CHECK(close(qbinom(qb, 2, 1), qnum(qb, 2)));
    // [n]! and falling factorial consistency: [n]_n = [n]!
    CHECK(close(qfalling(qb, cplx(4.0), 4), qfact(qb, 4)));
    CHECK_THROWS_AS(qnum(make_qbase(cplx(1.0, 0.0)), 2), evaluation_error);
}

TEST_CASE("pochhammer products") {
    cplx q(0.1, 0.0), u(0.5, 0.0);
    CHECK(close(poch(cplx(0.0, 0.0), q, cfg), cplx(1.0)));
    CHECK(close(poch_fin(q, q, 0), cplx(1.0)));
    // log-sum form exp(-sum_m u^m / (m (1-q^m))) as an independent oracle
    cplx logsum(0.0, 0.0);
    for (int m = 1; m < 200; ++m)
        logsum += std::pow(u, m) / (double(m) * (1.0 - std::pow(q, m)));
    CHECK(close(poch(u, q, cfg), std::exp(-logsum), 1e-14));
    // (u;q)_m (u q^m; q) = (u;q)
    for (int m = 0; m <= 10; ++m) {
        cplx lhs = poch_fin(u, q, m) * poch(u * std::pow(q, m), q, cfg);
        CHECK(close(lhs, poch(u, q, cfg), 1e-13));
    }
    CHECK_THROWS_AS(poch(u, cplx(1.2, 0.0), cfg), nome_error);
}

TEST_CASE("theta0 zeros and reduction") {
    cplx q(0.2, 0.0);
    CHECK(std::abs(theta0(cplx(1.0, 0.0), q, cfg)) < 1e-14);
    CHECK(std::abs(theta0(q, q, cfg)) < 1e-14);
    cplx u(0.3, 0.2);
    cplx t0 = theta0(u, q, cfg);
    CHECK(close(theta0(1.0 / u, q, cfg), -t0 / u, 1e-13));
    // reduction handles far-out arguments: theta0(q^N u) via quasi-periodicity
    cplx big = u * std::pow(q, -9);
    cplx expect = t0;
    for (int n = 0; n < 9; ++n) {
        cplx v = u * std::pow(q, -(n + 1));
        expect = -v * expect;  // theta0(q^{-1} w) = -w q^{-1} theta0(w), w = q v
    }
    CHECK(close(theta0(big, q, cfg), expect, 1e-12));
    CHECK(close(theta0_ratio(big, u, q, cfg), expect / t0, 1e-12));
}

TEST_CASE("jacobi theta against the additive product form") {
    cplx q(0.15, 0.05), u(0.7, 0.3);
    cplx tau = std::log(q) / (2.0 * pi * iu);
    cplx zeta = std::log(u) / (2.0 * iu);  // u = e^{2 i zeta}
    cplx prod = 2.0 * std::exp(pi * iu * tau / 4.0) * std::sin(zeta);
    for (int n = 1; n < 200; ++n) {
        cplx qn = std::pow(q, n);
        prod *= (1.0 - qn * u) * (1.0 - qn / u) * (1.0 - qn);
    }
    CHECK(close(jacobi_theta(u, q, cfg), prod, 1e-13));
}

TEST_CASE("elliptic gamma") {
    cplx r(0.2, 0.05), p(0.15, -0.1);
    cplx z = std::sqrt(r * p);
    CHECK(close(ell_gamma(z, r, p, cfg), cplx(1.0), 1e-13));
    cplx w(0.8, 0.4);
    CHECK(close(ell_gamma(w, r, p, cfg), ell_gamma(w, p, r, cfg), 1e-13));
    CHECK(close(ell_gamma(w, r, p, cfg) * ell_gamma(r * p / w, r, p, cfg), cplx(1.0), 1e-13));
    CHECK_THROWS_AS(ell_gamma(cplx(1.0, 0.0), r, p, cfg), pole_error);
}

TEST_CASE("phase function") {
    cplx r(0.2, 0.0), p(0.1, 0.0), z(0.6, 0.3);
    CHECK(close(phase_omega(cplx(1.0, 0.0), z, r, p, cfg), cplx(1.0)));
    cplx a(1.3, 0.2);
    CHECK(close(phase_omega(1.0 / a, z, r, p, cfg), 1.0 / phase_omega(a, z, r, p, cfg), 1e-13));
    // Omega_a(pz) = theta0(za;r)/theta0(z/a;r) Omega_a(z)
    cplx lhs = phase_omega(a, p * z, r, p, cfg);
    cplx rhs = theta0(z * a, r, cfg) / theta0(z / a, r, cfg) * phase_omega(a, z, r, p, cfg);
    CHECK(close(lhs, rhs, 1e-12));
}

TEST_CASE("2phi1") {
    cplx q(0.3, 0.0);
    cplx a1(0.4, 0.1), a2(-0.2, 0.3), b1(0.7, 0.0);
    CHECK(close(phi21(a1, a2, b1, q, cplx(0.0, 0.0), cfg), cplx(1.0)));
    // q-binomial theorem: 2phi1(b, a; b; q, z) = (az;q)/(z;q)
    cplx a(0.5, 0.2), z(0.4, -0.1);
    CHECK(close(phi21(b1, a, b1, q, z, cfg), poch(a * z, q, cfg) / poch(z, q, cfg), 1e-13));
    // direct 200-term summation oracle
    cplx direct(0.0, 0.0), num1(1.0, 0.0), num2(1.0, 0.0), den1(1.0, 0.0), den2(1.0, 0.0);
    for (int n = 0; n < 200; ++n) {
        direct += num1 * num2 / (den1 * den2) * std::pow(z, n);
        num1 *= 1.0 - a1 * std::pow(q, n);
        num2 *= 1.0 - a2 * std::pow(q, n);
        den1 *= 1.0 - b1 * std::pow(q, n);
        den2 *= 1.0 - std::pow(q, n + 1);
    }
    CHECK(close(phi21(a1, a2, b1, q, z, cfg), direct, 1e-13));
    CHECK_THROWS_AS(phi21(a1, a2, b1, q, cplx(1.5, 0.0), cfg), convergence_error);
    // terminating series with |z| > 1 is fine: a1 = q^{-3}
    cplx term = phi21(std::pow(q, -3), a2, b1, q, cplx(2.0, 0.0), cfg);
    CHECK(finite(term));
}

TEST_CASE("theta ratio bounds bracket the ratio") {
    cplx q(0.35, 0.1);
    double eps = 0.08;
    ThetaBoundEnv env(q, eps, cfg);
    std::mt19937_64 g(11);
    auto uni = [&](double a, double b) {
        return a + (b - a) * double(g() >> 11) * 0x1.0p-53;
    };
    int checked = 0;
    while (checked < 100) {
        cplx z = std::exp(cplx(uni(-0.6, 0.6), uni(0.0, 2.0 * pi)));
        double a = uni(-2.0, 2.0), bb = uni(-2.0, 2.0);
        double lq = std::log(std::abs(q));
        if (env.lattice_distance(std::log(std::abs(z)) + a * lq) <= eps) continue;
        if (env.lattice_distance(std::log(std::abs(z)) + bb * lq) <= eps) continue;
        auto [lo, hi] = env.bounds(z, a, bb);
        double ratio = std::abs(theta0(z * std::pow(q, a), q, cfg) /
                                theta0(z * std::pow(q, bb), q, cfg));
        CHECK(ratio >= lo * 0.98);
        CHECK(ratio <= hi * 1.02);
        ++checked;
    }
    CHECK(close(env.bounds(cplx(0.7, 0.31), 1.3, 1.3).first * env.c1 / env.c2, cplx(1.0), 1e-12));
    CHECK_THROWS_AS(env.bounds(cplx(1.0, 0.0), 0.0, 1.0), region_error);
}

TEST_CASE("quasi-analytic pochhammer coefficients") {
    CHECK(close(qa_poch_coeff(0, cplx(0.5, 0.0)), cplx(1.0)));
    cplx r(0.37, 0.11);
    CHECK(close(qa_poch_coeff(1, r), -1.0 / (1.0 - r), 1e-14));
    // |r| < 1: partial sums match (p; r)
    cplx p(0.05, 0.0);
    cplx sum(0.0, 0.0);
    for (int k = 0; k <= 20; ++k) sum += qa_poch_coeff(k, r) * std::pow(p, k);
    CHECK(close(sum, poch(p, r, cfg), 1e-12));
    // |r| > 1: partial sums match 1/(r^{-1} p; r^{-1})
    cplx r2(2.0, 0.3);
    cplx sum2(0.0, 0.0);
    for (int k = 0; k <= 20; ++k) sum2 += qa_poch_coeff(k, r2) * std::pow(p, k);
    CHECK(close(sum2, 1.0 / poch(p / r2, 1.0 / r2, cfg), 1e-12));
}
