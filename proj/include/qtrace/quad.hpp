#pragma once

// Integration engines: adaptive trapezoid quadrature on circles (spectral on
// annulus-analytic integrands), pole-lattice scanning, two-sided Jackson
// sums, tanh-sinh quadrature on (0,1) for endpoint-singular integrands, and
// the monodromy-factor form of the Pochhammer loop integral.

#include <string>
#include <vector>

#include "qtrace/qseries.hpp"
#include "qtrace/scalar.hpp"

namespace qtrace {

struct CircleContour {
    double radius = 1.0;
    int min_nodes = 32;
};

// (1/N) sum_j f(rho e^{2 pi i j / N}) with node doubling until stable.
template <class F>
cplx integrate_circle(F&& f, const CircleContour& c, const PrecisionCfg& cfg) {
    int n = std::max(16, c.min_nodes);
    auto eval_ring = [&](int count, int stride_offset, int stride) {
        KahanSum s;
        for (int j = stride_offset; j < count; j += stride) {
            double th = 2.0 * pi * double(j) / double(count);
            s.add(f(c.radius * std::exp(cplx(0.0, th))));
        }
        return s.value();
    };
    cplx total = eval_ring(n, 0, 1);
    cplx prev = total / double(n);
    while (2 * n <= cfg.max_quad_nodes) {
        n *= 2;
        total += eval_ring(n, 1, 2);
        cplx cur = total / double(n);
        if (std::abs(cur - prev) < cfg.quad_tol * std::max(1.0, std::abs(cur)))
            return ensure_finite(cur, "integrate_circle");
        prev = cur;
    }
    throw convergence_error("integrate_circle: not stable within max_quad_nodes");
}

// Pole lattice c * q1^{n1} * ... * qm^{nm} with inclusive exponent windows;
// theta-function lattices run over all of Z while double-Pochhammer lattices
// are one-sided in each nome.
struct PoleLattice {
    cplx center;
    std::vector<cplx> nomes;
    std::string tag;
    std::vector<std::pair<int, int>> ranges;  // per-nome [lo, hi]; empty = all of Z

    std::pair<int, int> range_of(size_t i) const {
        if (i < ranges.size()) return ranges[i];
        return {-400, 400};
    }
};

struct PoleHit {
    cplx location;
    std::string tag;
    double log_distance;
};

struct PoleReport {
    std::vector<PoleHit> near;  // every lattice point within 3*margin of the contour
    double margin = 0.0;
    bool ok = true;
    PoleHit nearest{cplx{}, "", std::numeric_limits<double>::infinity()};
};

namespace detail {
inline void scan_lattice(const PoleLattice& lat, double log_rho, double margin,
                         PoleReport& rep) {
    // Enumerate exponent windows large enough that any point within 3*margin
    // of the contour is visited.
    std::vector<double> lsteps;
    for (const cplx& nm : lat.nomes) {
        double l = std::log(std::abs(nm));
        if (std::abs(l) < 1e-12) throw nome_error("pole_scan: |nome| = 1");
        lsteps.push_back(l);
    }
    double base = std::log(std::abs(lat.center)) - log_rho;
    auto record = [&](double d, cplx loc) {
        if (d < 3.0 * margin) {
            PoleHit h{loc, lat.tag, d};
            rep.near.push_back(h);
            if (d < rep.nearest.log_distance) rep.nearest = h;
            if (d < margin) rep.ok = false;
        }
    };
    auto clamp_window = [&](double offset, double step, std::pair<int, int> rg) {
        int w = std::min(int((std::abs(offset) + 3.0 * margin + 1.0) / std::abs(step)) + 1, 400);
        return std::pair<int, int>{std::max(-w, rg.first), std::min(w, rg.second)};
    };
    if (lat.nomes.empty()) {
        record(std::abs(base), lat.center);
        return;
    }
    if (lat.nomes.size() == 1) {
        auto [lo, hi] = clamp_window(base, lsteps[0], lat.range_of(0));
        for (int n = lo; n <= hi; ++n)
            record(std::abs(base + n * lsteps[0]), lat.center * std::pow(lat.nomes[0], n));
        return;
    }
    // two nomes is the largest family used here
    auto [lo0, hi0] = clamp_window(base, lsteps[0], lat.range_of(0));
    for (int n0 = lo0; n0 <= hi0; ++n0) {
        double rem = base + n0 * lsteps[0];
        auto [lo1, hi1] = clamp_window(rem, lsteps[1], lat.range_of(1));
        for (int n1 = lo1; n1 <= hi1; ++n1)
            record(std::abs(rem + n1 * lsteps[1]),
                   lat.center * std::pow(lat.nomes[0], n0) * std::pow(lat.nomes[1], n1));
    }
}
}  // namespace detail

inline PoleReport pole_scan(const std::vector<PoleLattice>& lattices, const CircleContour& c,
                            double margin) {
    PoleReport rep;
    rep.margin = margin;
    double log_rho = std::log(c.radius);
    for (const auto& lat : lattices) detail::scan_lattice(lat, log_rho, margin, rep);
    return rep;
}

inline void require_clear(const PoleReport& rep) {
    if (!rep.ok)
        throw pole_error("pole within margin of contour: " + rep.nearest.tag +
                             " at log-distance " + std::to_string(rep.nearest.log_distance),
                         rep.nearest.location);
}

// Bilateral Jackson cycle: points t_n = base * period^n, n in Z.
struct JacksonCycle {
    cplx base;
    cplx period;
    int n_min = -2;
    int n_max = 2;
};

// Two-sided sum over the cycle; f receives (t_n, n) so quasi-meromorphic
// integrands can fix their t^a branch from the index.  The window grows
// symmetrically until both tails certify, then the final pass re-sums in
// ascending n for a deterministic result.
template <class F>
cplx jackson_sum(F&& f, const JacksonCycle& cyc, const PrecisionCfg& cfg) {
    if (std::abs(std::log(std::abs(cyc.period))) < 1e-12)
        throw nome_error("jackson_sum: |period| = 1");
    auto point = [&](int n) { return cyc.base * std::pow(cyc.period, n); };
    int lo = cyc.n_min, hi = cyc.n_max;
    std::vector<cplx> vals;
    double scale = 0.0;
    auto value_at = [&](int n) {
        cplx v = f(point(n), n);
        if (!finite(v)) throw overflow_error("jackson_sum: non-finite term");
        return v;
    };
    for (int n = lo; n <= hi; ++n) {
        vals.push_back(value_at(n));
        scale = std::max(scale, std::abs(vals.back()));
    }
    auto tail_ok = [&](int side) {  // side: -1 low end, +1 high end
        size_t k = (side < 0) ? 0 : vals.size() - 1;
        size_t k2 = (side < 0) ? 1 : vals.size() - 2;
        double tol = cfg.series_tail_tol * (scale + 1e-300);
        return std::abs(vals[k]) <= tol && std::abs(vals[k2]) <= tol;
    };
    const int cap = 512;
    int grow_guard_lo = 0, grow_guard_hi = 0;
    while (!tail_ok(-1)) {
        if (int(vals.size()) > cap) throw convergence_error("jackson_sum: low tail does not decay");
        --lo;
        cplx v = value_at(lo);
        if (std::abs(v) > std::abs(vals.front()) && std::abs(v) > cfg.series_tail_tol * scale) {
            if (++grow_guard_lo > 12)
                throw convergence_error("jackson_sum: low tail grows (outside convergence region)");
        } else {
            grow_guard_lo = 0;
        }
        vals.insert(vals.begin(), v);
        scale = std::max(scale, std::abs(v));
    }
    while (!tail_ok(+1)) {
        if (int(vals.size()) > cap) throw convergence_error("jackson_sum: high tail does not decay");
        ++hi;
        cplx v = value_at(hi);
        if (std::abs(v) > std::abs(vals.back()) && std::abs(v) > cfg.series_tail_tol * scale) {
            if (++grow_guard_hi > 12)
                throw convergence_error("jackson_sum: high tail grows (outside convergence region)");
        } else {
            grow_guard_hi = 0;
        }
        vals.push_back(v);
        scale = std::max(scale, std::abs(v));
    }
    KahanSum s;
    for (const cplx& v : vals) s.add(v);
    return s.value();
}

// tanh-sinh quadrature on (0,1).  The integrand receives (x, 1-x) with both
// endpoint distances computed stably, and may be algebraically singular at
// either end.
template <class F>
cplx integrate_01_de(F&& f, const PrecisionCfg& cfg) {
    const double umax = 5.4;
    double h = 0.25;
    auto node = [&](double u, cplx& acc_w, double& x, double& xc) {
        double s = 0.5 * pi * std::sinh(u);
        x = 1.0 / (1.0 + std::exp(-2.0 * s));
        xc = 1.0 / (1.0 + std::exp(2.0 * s));
        double sech = 1.0 / std::cosh(s);
        acc_w = 0.5 * pi * std::cosh(u) * 0.25 * sech * sech * 2.0;  // dx/du
    };
    auto pass = [&](double step, bool odd_only) {
        KahanSum s;
        int kmax = int(umax / step);
        for (int k = -kmax; k <= kmax; ++k) {
            if (odd_only && (k % 2 == 0)) continue;
            double x, xc;
            cplx w;
            node(k * step, w, x, xc);
            if (x <= 0.0 || xc <= 0.0) continue;
            cplx v = f(x, xc) * w;
            if (finite(v)) s.add(v);
        }
        return s.value();
    };
    cplx total = pass(h, false);
    cplx prev = total * h;
    for (int level = 0; level < 9; ++level) {
        h *= 0.5;
        total += pass(h, true);
        cplx cur = total * h;
        if (std::abs(cur - prev) < cfg.quad_tol * std::max(1.0, std::abs(cur)) && level >= 1)
            return ensure_finite(cur, "integrate_01_de");
        prev = cur;
    }
    throw convergence_error("integrate_01_de: not stable within level budget");
}

// Pochhammer loop around 0 and 1 reduced to its monodromy-factor line form:
//   (1 - e^{2 pi i a})(1 - e^{2 pi i b}) Int_0^1 t^{a-1} (1-t)^{b-1} g(t) dt.
// g must be single-valued and analytic on a neighbourhood of [0,1]; the
// endpoint powers demand Re a > 0, Re b > 0.
template <class G>
cplx pochhammer_loop_integral(cplx alpha, cplx beta, G&& g, const PrecisionCfg& cfg) {
    if (!(alpha.real() > 0.0) || !(beta.real() > 0.0))
        throw region_error("pochhammer_loop_integral: need Re alpha > 0 and Re beta > 0");
    cplx line = integrate_01_de(
        [&](double x, double xc) {
            cplx tp = std::exp((alpha - 1.0) * std::log(x));
            cplx op = std::exp((beta - 1.0) * std::log(xc));
            return tp * op * g(x);
        },
        cfg);
    cplx ma = 1.0 - std::exp(2.0 * pi * iu * alpha);
    cplx mb = 1.0 - std::exp(2.0 * pi * iu * beta);
    return ma * mb * line;
}

// (1/2 pi i) Int_{|t|=1} F(t) dt / t for integrands with an integrable
// algebraic singularity at t = 1 (and nowhere else on the circle).  F
// receives (t, 1-t) with 1-t computed stably near the singular point.
template <class F>
cplx integrate_circle_endpoint(F&& f, const PrecisionCfg& cfg) {
    return integrate_01_de(
        [&](double x, double xc) {
            // t = e^{2 pi i x}; 1 - t = -2 i sin(pi x) e^{i pi x},
            // with sin(pi x) = sin(pi (1-x)) used near x = 1.
            cplx t = std::exp(cplx(0.0, 2.0 * pi * x));
            double sx = (x <= 0.5) ? std::sin(pi * x) : std::sin(pi * xc);
            cplx omt = -2.0 * iu * sx * std::exp(cplx(0.0, pi * x));
            return f(t, omt);
        },
        cfg);
}

// Continuous-branch power of an infinite product: exp(e * sum_n Log(1 - u r^n)).
// Each factor stays inside the unit disc around 1 after the first few, so the
// per-factor principal logs assemble a branch that is single-valued in u.
template <class C>
C pow_poch(const C& u, const C& r, const C& expo, const PrecisionCfg& cfg) {
    using std::exp;
    using std::log;
    double ra = abs_d(r);
    if (!(ra < 1.0)) throw nome_error("pow_poch: |r| >= 1");
    C acc(0);
    C w = u;
    for (int n = 0; n < cfg.max_terms; ++n) {
        C fac = C(1) - w;
        if (abs_d(fac) < 1e-13) throw pole_error("pow_poch: factor vanishes");
        acc += log(fac);
        w *= r;
        double wa = abs_d(w);
        if (wa < cfg.series_tail_tol && wa / (1.0 - ra) < cfg.series_tail_tol)
            return exp(expo * acc);
    }
    throw convergence_error("pow_poch: no truncation within max_terms");
}

}  // namespace qtrace
