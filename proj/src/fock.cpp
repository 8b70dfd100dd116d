#include "qtrace/fock.hpp"

namespace qtrace {

cplx heis_trace_closed(const ExpFactorList& f) {
    cplx ezc = std::exp(f.z * f.c);
    if (!(std::abs(ezc) < 1.0)) throw convergence_error("heis_trace_closed: |e^{zc}| >= 1");
    cplx g = 1.0 / (1.0 - ezc);
    cplx expo(0.0, 0.0);
    int n = int(f.xy.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx xy = f.c * f.xy[i].first * f.xy[j].second;
            expo += (i > j) ? xy * g : xy * ezc * g;
        }
    return g * std::exp(expo);
}

namespace {

using Mat = std::vector<cplx>;  // row-major (L+1)x(L+1)

Mat matmul(const Mat& a, const Mat& b, int n) {
    Mat c(size_t(n) * n, cplx(0.0, 0.0));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            cplx aik = a[size_t(i) * n + k];
            if (aik == cplx(0.0, 0.0)) continue;
            for (int j = 0; j < n; ++j) c[size_t(i) * n + j] += aik * b[size_t(k) * n + j];
        }
    return c;
}

}  // namespace

FockTraceResult heis_trace_brute(const ExpFactorList& f, FockTrunc t, const PrecisionCfg& cfg) {
    int L = t.level;
    int n = L + 1;
    cplx ezc = std::exp(f.z * f.c);
    if (!(std::abs(ezc) < 1.0)) throw convergence_error("heis_trace_brute: |e^{zc}| >= 1");
    // b_- |m> = |m+1>, b_+ |m> = c m |m-1>: both nilpotent on the truncation,
    // so the exponentials below are exact.
    //   exp(x b_-)_{m+j, m} = x^j / j!
    //   exp(y b_+)_{m-j, m} = C(m, j) (y c)^j
    auto exp_lower = [&](cplx x) {
        Mat e(size_t(n) * n, cplx(0.0, 0.0));
        for (int m = 0; m < n; ++m) {
            cplx v(1.0, 0.0);
            for (int j = 0; m + j < n; ++j) {
                e[size_t(m + j) * n + m] = v;
                v *= x / double(j + 1);
            }
        }
        return e;
    };
    auto exp_upper = [&](cplx y) {
        Mat e(size_t(n) * n, cplx(0.0, 0.0));
        cplx yc = y * f.c;
        for (int m = 0; m < n; ++m) {
            cplx v(1.0, 0.0);
            for (int j = 0; j <= m; ++j) {
                e[size_t(m - j) * n + m] = v;
                v *= yc * double(m - j) / double(j + 1);
            }
        }
        return e;
    };
    Mat prod;
    bool first = true;
    for (const auto& [x, y] : f.xy) {
        Mat step = matmul(exp_lower(x), exp_upper(y), n);
        prod = first ? step : matmul(prod, step, n);
        first = false;
    }
    KahanSum s;
    cplx w(1.0, 0.0);
    double diag_scale = 0.0;
    for (int m = 0; m < n; ++m) {
        cplx d = first ? cplx(1.0, 0.0) : prod[size_t(m) * n + m];
        diag_scale = std::max(diag_scale, std::abs(d));
        s.add(d * w);
        w *= ezc;
    }
    bool tail_ok = std::abs(w) * diag_scale < cfg.series_tail_tol * (std::abs(s.value()) + 1.0) ||
                   std::abs(w) * diag_scale < 1e-12;
    return {s.value(), tail_ok};
}

}  // namespace qtrace
