#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qtrace/uqsl2.hpp"

using namespace qtrace;

namespace {
const PrecisionCfg cfg{};
bool close(cplx a, cplx b, double tol) { return rel_err(a, b) <= tol; }
}  // namespace

TEST_CASE("intertwiner coefficients") {
    auto qb = make_qbase(cplx(0.7, 0.0));
    cplx mu(2.3, 0.1);
    for (int m = 0; m <= 3; ++m) {
        auto ic = intertwiner_coeffs(mu, m, qb);
        REQUIRE(ic.closed_form.size() == size_t(m + 1));
        CHECK(close(ic.closed_form[0], cplx(1.0), 1e-14));
        for (int j = 0; j <= m; ++j) CHECK(close(ic.closed_form[j], ic.solved[j], 1e-13));
    }
    // c_1 = -q^mu [m]/[mu]
    int m = 2;
    auto ic = intertwiner_coeffs(mu, m, qb);
    CHECK(close(ic.closed_form[1], -qpow(qb, mu) * qnum(qb, m) / qnum(qb, mu), 1e-13));
    // closed form satisfies the annihilation recurrence exactly
    for (int j = 0; j + 1 <= m; ++j) {
        cplx resid = ic.closed_form[j] * qpow(qb, mu - 2.0 * double(j)) * qnum(qb, m - j) +
                     ic.closed_form[j + 1] * qnum(qb, mu - double(j)) * qnum(qb, j + 1);
        CHECK(std::abs(resid) < 1e-13);
    }
}

TEST_CASE("m = 0 trace is the geometric series") {
    auto qb = make_qbase(cplx(0.8, 0.0));
    cplx mu(1.7, 0.0);
    cplx lambda(3.0, 0.0);  // q^{-2 lambda} = 0.8^{-6}... need |q^{-2l}| < 1: lambda < 0
    lambda = cplx(-3.0, 0.0);
    cplx q2l = qpow(qb, -2.0 * lambda);
    REQUIRE(std::abs(q2l) < 1.0);
    cplx expect = qpow(qb, lambda * mu) / (1.0 - q2l);
    CHECK(close(brute_trace(mu, 0, lambda, qb, 0, cfg), expect, 1e-12));
    CHECK(close(closed_trace(mu, 0, lambda, qb), expect, 1e-14));
}

TEST_CASE("closed trace equals the truncated oracle") {
    auto qb = make_qbase(cplx(0.6, 0.0));
    for (int m = 0; m <= 3; ++m) {
        cplx mu(2.1 + 0.3 * m, 0.15);
        // convergence demands |q^{-2 lambda}| < |q|^{2m}
        cplx q2l = 0.1 * qpow(qb, cplx(2.0 * m));
        cplx lambda = -std::log(q2l) / (2.0 * qb.log_q);
        cplx a = closed_trace(mu, m, lambda, qb);
        cplx b = brute_trace(mu, m, lambda, qb, 0, cfg);
        CHECK(close(a, b, 1e-12));
    }
    // outside the convergence region the oracle reports divergence
    CHECK_THROWS_AS(brute_trace(cplx(2.0, 0.0), 3, cplx(-2.0, 0.0), qb, 0, cfg),
                    convergence_error);
}

TEST_CASE("truncation rule adapts near the tail") {
    auto qb = make_qbase(cplx(0.9, 0.0));
    cplx mu(1.9, 0.0), lambda(-8.0, 0.0);  // |q^{-2l}| = 0.9^{16} ~ 0.185
    cplx a = brute_trace(mu, 2, lambda, qb, 0, cfg);
    cplx b = brute_trace(mu, 2, lambda, qb, 400, cfg);
    CHECK(close(a, b, 1e-13));
    CHECK_THROWS_AS(brute_trace(mu, 1, cplx(2.0, 0.0), qb, 0, cfg), convergence_error);
}
