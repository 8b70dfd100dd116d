#pragma once

// Finite-dimensional trigonometric machinery for U_q(sl2): intertwiner
// coefficients on the highest weight vector, a truncated-Verma brute-force
// trace oracle, and the closed-form trigonometric trace.

#include <vector>

#include "qtrace/params.hpp"

namespace qtrace {

struct IntertwinerCoeffs {
    std::vector<cplx> closed_form;  // c_j = (-1)^j q^{mu j - j(j-1)} [m]_j / ([mu]_j [j]_j)
    std::vector<cplx> solved;       // from the Delta(e)-annihilation recurrence, c_0 = 1
};

IntertwinerCoeffs intertwiner_coeffs(cplx mu, int m, const qbase<cplx>& qb);

// Tr over the basis {f^j v_mu, j <= N} of Phi^{w0,trig} q^{2 lambda rho};
// N <= 0 derives the truncation from the geometric-tail rule.
cplx brute_trace(cplx mu, int m, cplx lambda, const qbase<cplx>& qb, int N,
                 const PrecisionCfg& cfg);

// Closed-form trigonometric trace (finite sum over l = 0..m).
cplx closed_trace(cplx mu, int m, cplx lambda, const qbase<cplx>& qb);

}  // namespace qtrace
