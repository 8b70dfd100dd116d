#pragma once

// The trace function T^{w0}(q, lambda, omega, mu, k) by four routes
// (contour integral, Felder-Varchenko relation, explicit series, Jackson
// sum), the normalized trace and its (lambda,omega) <-> (mu,k) symmetry,
// the trigonometric limit, and the classical limit.

#include <vector>

#include "qtrace/fv.hpp"
#include "qtrace/params.hpp"

namespace qtrace {

enum class TraceMethod { Integral, FVRelation, Series, Jackson };

cplx trace_integral(const ParamPoint& p, const PrecisionCfg& cfg, bool check_region = true);
cplx trace_via_fv(const ParamPoint& p, const PrecisionCfg& cfg);
cplx trace_series(const ParamPoint& p, const PrecisionCfg& cfg);
cplx trace_jackson(const ParamPoint& p, const PrecisionCfg& cfg);
cplx trace_eval(TraceMethod m, const ParamPoint& p, const PrecisionCfg& cfg);

// Xi(q, lambda, omega, mu, k): trace of the free-field Jackson intertwiner,
// with kappa = k + 2 and cycle period q^{2 kappa}.  It satisfies
// T^{w0}(mu, k) = C_{(mu-1)/2,1}^{-1} Xi((mu-1)/2, k-2).
cplx xi_ff(const ParamPoint& p, const PrecisionCfg& cfg);

// Normalizing constants (kappa = k + 2 throughout).
cplx const_C_mu1(const qbase<cplx>& qb, cplx mu, cplx k, const PrecisionCfg& cfg);
cplx const_C_ff(const ParamPoint& p, const PrecisionCfg& cfg);
cplx const_D_jackson(const ParamPoint& p, const PrecisionCfg& cfg);

// Weyl denominator delta_q(lambda, omega) = q^lambda (q^{-2w};q^{-2w}) theta0(q^{-2l};q^{-2w}).
cplx weyl_denominator(const qbase<cplx>& qb, cplx lambda, cplx q2l, cplx q2w,
                      const PrecisionCfg& cfg);

// Quasi-analytic continuation of T^{w0} to |q| > 1, |q^{-2w}| < 1, |q^{2k}| < 1,
// evaluated at the ParamPoint's own variables.
cplx trace_qa(const ParamPoint& p, const PrecisionCfg& cfg);

// Normalized trace entering the swap symmetry, for a base point in the
// |q| < 1 regime: delta_q(lambda,omega) * T^{w0}(1/q, -lambda, -omega, mu, k).
cplx normalized_trace(const ParamPoint& p, const PrecisionCfg& cfg);
double symmetry_residual(const ParamPoint& p, const PrecisionCfg& cfg);

// m = 1 trigonometric trace and the q^{-2 omega} -> 0 limit check.
cplx trig_m1(const ParamPoint& p);
double trig_limit_residual(const ParamPoint& p, const PrecisionCfg& cfg,
                           cplx* extrapolated = nullptr);

struct ClassicalParams {
    cplx Lambda{-0.4, 0.1};
    cplx Omega{1.0, 0.3};
    cplx mu{0.5, 0.0};
    cplx k{-5.0, 0.0};
};

cplx classical_rhs(const ClassicalParams& c, const PrecisionCfg& cfg);

// Trace evaluated at q = e^{-eps}, lambda = Lambda/log q, ... for each eps in
// the list, extrapolated to eps -> 0 and compared against classical_rhs.
// Returns the relative residual of the extrapolant; per-eps residuals are
// exposed for the monotonicity check.
double classical_limit_residual(const ClassicalParams& c, const std::vector<double>& eps_list,
                                const PrecisionCfg& cfg, std::vector<double>* per_eps = nullptr,
                                cplx* extrapolated = nullptr);

ParamPoint classical_point(const ClassicalParams& c, double eps);

}  // namespace qtrace
