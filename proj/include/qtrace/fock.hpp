#pragma once

// Heisenberg-algebra trace: the closed form for
// Tr[prod_i exp(x_i b_-) exp(y_i b_+) exp(z b_- b_+)] with [b_+, b_-] = c,
// against a truncated Fock-space oracle built from exact ladder matrices.

#include <utility>
#include <vector>

#include "qtrace/scalar.hpp"

namespace qtrace {

struct ExpFactorList {
    std::vector<std::pair<cplx, cplx>> xy;  // (x_i, y_i), i = 1..N_f in product order
    cplx c{1.0, 0.0};                       // commutator scale [b_+, b_-] = c
    cplx z{0.0, 0.0};                       // weight exponent; needs |e^{zc}| < 1
};

struct FockTrunc {
    int level = 40;
};

cplx heis_trace_closed(const ExpFactorList& f);

struct FockTraceResult {
    cplx value;
    bool tail_ok;  // diagonal weight |e^{zc}|^L passed the truncation check
};

FockTraceResult heis_trace_brute(const ExpFactorList& f, FockTrunc t, const PrecisionCfg& cfg);

}  // namespace qtrace
