#include "qtrace/uqsl2.hpp"

namespace qtrace {

IntertwinerCoeffs intertwiner_coeffs(cplx mu, int m, const qbase<cplx>& qb) {
    IntertwinerCoeffs out;
    out.closed_form.resize(m + 1);
    out.solved.resize(m + 1);
    for (int j = 0; j <= m; ++j) {
        cplx denom = qfalling(qb, mu, j) * qfalling(qb, cplx(double(j)), j);
        if (std::abs(denom) < 1e-13)
            throw pole_error("intertwiner_coeffs: [mu]_j vanishes (degenerate weight)");
        cplx sign = (j % 2 == 0) ? 1.0 : -1.0;
        out.closed_form[j] = sign * qpow(qb, mu * double(j) - double(j) * double(j - 1)) *
                             qfalling(qb, cplx(double(m)), j) / denom;
    }
    // Independent route: c_j q^{mu-2j} [m-j] + c_{j+1} [mu-j][j+1] = 0, c_0 = 1.
    out.solved[0] = 1.0;
    for (int j = 0; j + 1 <= m; ++j) {
        cplx den = qnum(qb, mu - double(j)) * qnum(qb, j + 1);
        if (std::abs(den) < 1e-13)
            throw pole_error("intertwiner_coeffs: singular annihilation system");
        out.solved[j + 1] =
            -out.solved[j] * qpow(qb, mu - 2.0 * double(j)) * qnum(qb, m - j) / den;
    }
    return out;
}

cplx brute_trace(cplx mu, int m, cplx lambda, const qbase<cplx>& qb, int N,
                 const PrecisionCfg& cfg) {
    cplx q2l = qpow(qb, -2.0 * lambda);
    // the l = m stratum contributes q^{(-2 lambda - 2m) n} to the n-sum, so
    // the trace over the Verma basis converges iff |q^{-2 lambda}| < |q|^{2m}
    double ratio = std::abs(q2l) * std::pow(std::abs(qb.q), -2.0 * m);
    if (!(ratio < 1.0))
        throw convergence_error("brute_trace: |q^{-2 lambda - 2m}| >= 1, trace diverges");
    if (N <= 0) {
        N = int(std::ceil(std::log(cfg.series_tail_tol * (1.0 - ratio)) / std::log(ratio))) + m + 5;
        N = std::min(N, cfg.max_terms);
    }
    IntertwinerCoeffs ic = intertwiner_coeffs(mu, m, qb);
    // diagonal coefficient of f^n v (x) w_0 in Delta(f^n) Phi(v_mu):
    //   sum_l  [prod_{i=n-l+1}^{n} (1-q^{-2i}) / prod_{i=1}^{l} (1-q^{-2i})]
    //          * c_l * [m+l]_l    with f^l w_{2l} = [m+l]_l w_0
    cplx qm2 = qpow(qb, -2.0);
    std::vector<cplx> fl(m + 1);  // [m+l]_l
    for (int l = 0; l <= m; ++l) fl[l] = qfalling(qb, cplx(double(m + l)), l);
    KahanSum s;
    cplx w = qpow(qb, lambda * mu);
    cplx step = qpow(qb, -2.0 * lambda);
    for (int n = 0; n <= N; ++n) {
        cplx diag(0.0, 0.0);
        for (int l = 0; l <= std::min(n, m); ++l) {
            cplx num(1.0, 0.0), den(1.0, 0.0);
            for (int i = n - l + 1; i <= n; ++i) num *= 1.0 - std::pow(qm2, i);
            for (int i = 1; i <= l; ++i) den *= 1.0 - std::pow(qm2, i);
            diag += num / den * ic.solved[l] * fl[l];
        }
        s.add(w * diag);
        w *= step;
    }
    return s.value();
}

cplx closed_trace(cplx mu, int m, cplx lambda, const qbase<cplx>& qb) {
    cplx q2l = qpow(qb, -2.0 * lambda);
    cplx q2m = qpow(qb, -2.0 * mu);
    cplx q2 = qpow(qb, cplx(2.0));
    cplx qm1 = 1.0 / qb.q;
    KahanSum s;
    for (int l = 0; l <= m; ++l) {
        cplx num = qfalling(qb, cplx(double(m)), l) * qfalling(qb, cplx(double(m + l)), l) /
                   qfalling(qb, cplx(double(l)), l);
        cplx den(1.0, 0.0);
        for (int i = 0; i <= l - 1; ++i) den *= 1.0 - q2m * std::pow(q2, i);
        for (int i = 0; i <= l; ++i) den *= 1.0 - q2l / std::pow(q2, i);
        if (std::abs(den) < 1e-13) throw pole_error("closed_trace: denominator vanishes");
        cplx sign = (l % 2 == 0) ? 1.0 : -1.0;
        s.add(sign * std::pow(q2l, l) * qpow(qb, -double(l) * double(l - 1) / 2.0) *
              std::pow(qb.q - qm1, l) * num / den);
    }
    return qpow(qb, lambda * mu) * s.value();
}

}  // namespace qtrace
