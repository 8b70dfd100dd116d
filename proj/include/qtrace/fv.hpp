#pragma once

// The Felder-Varchenko function u(q, lambda, omega, mu, k) for the
// three-dimensional representation: contour quadrature (with the residue
// corrections that realize its analytic continuation to |q| > 1), series
// expansions around 0 and infinity in q^{-2 mu}, the quasi-analytic
// continuation of the normalized function, and the null-integral evaluators.

#include <utility>

#include "qtrace/params.hpp"
#include "qtrace/quad.hpp"

namespace qtrace {

// Integrand of u on |t| = 1 (without the q^{-lambda mu - lambda - mu - 2} prefactor).
cplx fv_integrand(cplx t, const ParamPoint& p, const PrecisionCfg& cfg);

cplx fv_contour(const ParamPoint& p, const PrecisionCfg& cfg);
cplx fv_series_at0(const ParamPoint& p, const PrecisionCfg& cfg);
cplx fv_series_atinf(const ParamPoint& p, const PrecisionCfg& cfg);

// Continuation of [(q^{-2k};q^{-2k})(q^4;q^{-2k}) / ((q^{2mu+2};q^{-2k})(q^{-2mu+2-2k};q^{-2k}))] u
// to |q| > 1, |q^{-2 omega}| < 1, |q^{2k}| < 1.
cplx fv_normalized_qa(const ParamPoint& p, const PrecisionCfg& cfg);

// I_m over |t| = 1 against its closed form: (quadrature, closed form).
std::pair<cplx, cplx> residue_Im(const ParamPoint& p, int m, const PrecisionCfg& cfg);
// I'_m over the modified contour (unit circle corrected by the residues at
// t = q^2 and t = q^{-2}) against its closed form.
std::pair<cplx, cplx> residue_Ipm(const ParamPoint& p, int m, const PrecisionCfg& cfg);

// The slowly-varying factor f(t) splitting the u-integrand, and its
// quasi-analytic continuation to |q^{2k}| < 1.
cplx phase_f(cplx t, const ParamPoint& p, const PrecisionCfg& cfg);
cplx phase_f_qa(cplx t, const ParamPoint& p, const PrecisionCfg& cfg);

// Rational residue combinations underlying the continuation: the closed
// forms of I_m and I'_m stripped of their shared Pochhammer normalizers.
// q^{2m} * fv_null_rational + q^4 q^{-2m} * fv_null_flip_rational = 0
// holds identically in all parameters.
cplx fv_null_rational(const ParamPoint& p, int m);
cplx fv_null_flip_rational(const ParamPoint& p, int m);

}  // namespace qtrace
