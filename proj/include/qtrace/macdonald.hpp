#pragma once

// Affine and elliptic Macdonald polynomials for the 3-dimensional
// representation: affine Weyl dotted action, dynamical Weyl scalars, the BGG
// trace sum chi_{mu,k,2} by two routes, hypergeometric theta functions and
// the elliptic Macdonald polynomial in two summation layouts, extraction of
// the normalizer f(q, q^{-2 omega}), and the residual of the identity
// relating the affine and elliptic polynomials.
//
// Working regime: |q| > 1 with q^{-2 omega} and q^{-2 ktilde} inside the
// unit disc, so all integer-weight nomes are admissible.

#include <vector>

#include "qtrace/params.hpp"

namespace qtrace {

struct IntegrableWeight {
    int mu = 0;
    int k = 0;
    int ktilde() const { return k + 4; }
    bool valid() const { return k >= mu && mu >= 0; }
};

// w^l_i: the length-l alternating word s_i s_{1-i} s_i ... (i is the index of
// the leftmost reflection); l = 0 is the identity regardless of i.
struct WeylWord {
    int i = 0;
    int l = 0;
};

struct DottedWeight {
    cplx mu;     // rho-coefficient
    cplx k;      // Lambda_0-coefficient (unchanged by the dotted action)
    cplx delta;  // delta-coefficient picked up by the action
};

// Closed-form dotted action of w^l_i on mu rho + k Lambda_0.
DottedWeight dotted_action(WeylWord w, cplx mu, cplx k);
// Oracle: the same action assembled by iterating the s_0, s_1 generators.
DottedWeight dotted_action_generators(WeylWord w, cplx mu, cplx k);

// Scalar of the dynamical Weyl operator on L_2[0] at weight mu rho + k Lambda_0.
cplx dyn_weyl_scalar(WeylWord w, cplx mu, cplx k, const qbase<cplx>& qb);
// Rank-one generator scalar A_{s_i} at the given weight, for the cocycle check.
cplx dyn_weyl_generator(int i, cplx mu, cplx k, const qbase<cplx>& qb);

// Evaluation point for the Macdonald suite: q and the multiplicative
// lambda/omega data (mu, k enter as integers through the weights).
struct MacParams {
    qbase<cplx> qb;
    cplx Q2l, Q2w;
    cplx lambda, omega;

    static MacParams from_multiplicative(cplx q, cplx q2l, cplx q2w) {
        MacParams m;
        m.qb = make_qbase(q);
        m.Q2l = q2l;
        m.Q2w = q2w;
        cplx den = 2.0 * m.qb.log_q;
        m.lambda = -std::log(q2l) / den;
        m.omega = -std::log(q2w) / den;
        return m;
    }
    MacParams with_lambda(cplx q2l) const { return from_multiplicative(qb.q, q2l, Q2w); }
    MacParams with_q2w(cplx q2w) const { return from_multiplicative(qb.q, Q2l, q2w); }
    MacParams neg_lambda() const { return from_multiplicative(qb.q, 1.0 / Q2l, Q2w); }
};

// chi^0_{mu,k}: the prefactor pulled out of the BGG trace sum.
cplx chi0(IntegrableWeight w, const MacParams& mp, const PrecisionCfg& cfg);

struct ChiRoutes {
    cplx direct;  // route (a): chi^0 * sum_j of Felder-Varchenko values
    cplx bgg;     // route (b): alternating Weyl-word sum of dressed traces
};
ChiRoutes chi_bgg(IntegrableWeight w, const MacParams& mp, int Jmax, const PrecisionCfg& cfg);
cplx chi_route_a(IntegrableWeight w, const MacParams& mp, int Jmax, const PrecisionCfg& cfg);
cplx chi_route_b(IntegrableWeight w, const MacParams& mp, int Jmax, const PrecisionCfg& cfg);

// Non-symmetric hypergeometric theta function Delta~_{mu,kappa} and the
// antisymmetrized Delta_{mu,kappa} = Delta~(lambda) - Delta~(-lambda).
cplx hyp_theta_tilde(int mu, int kappa, const MacParams& mp, int Jmax, const PrecisionCfg& cfg);
cplx hyp_theta_delta(int mu, int kappa, const MacParams& mp, int Jmax, const PrecisionCfg& cfg);

// Elliptic Macdonald polynomial J~_{mu,kappa}; layout 0 sums the re-indexed
// form, layout 1 assembles the raw hypergeometric-theta definition.
cplx elliptic_macdonald(int mu, int kappa, const MacParams& mp, int Jmax,
                        const PrecisionCfg& cfg, int layout = 0);

struct FExtract {
    cplx f;         // mean over the lambda list
    double spread;  // max relative deviation from the mean
};
FExtract extract_f(const MacParams& mp, const std::vector<cplx>& q2l_list, int Jmax,
                   const PrecisionCfg& cfg);

cplx affine_macdonald(IntegrableWeight w, const MacParams& mp, int Jmax, const PrecisionCfg& cfg);

// |J - (J~/f) * explicit factor| / |J| at the given weight; f is extracted at
// the same (q, q^{-2 omega}).
double fvconj_residual(IntegrableWeight w, const MacParams& mp, int Jmax, const PrecisionCfg& cfg,
                       cplx* lhs = nullptr, cplx* rhs = nullptr);

}  // namespace qtrace
