#ifndef QCD_ORACLE_HPP
#define QCD_ORACLE_HPP

#include <stdexcept>

#include "qcd/filtration.hpp"

namespace qcd {

struct ComplexTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BettiTriple {
    int b0 = 0, b1 = 0, b2 = 0;
    bool operator==(const BettiTriple&) const = default;
};

/**
 * Exact Betti numbers over Z2 of the subcomplex at filtration value <= eps,
 * by dense Gaussian elimination on the boundary matrices:
 * b_q = dim ker d_q - rank d_{q+1}. Deliberately naive; this is the trusted
 * reference the persistence reduction is checked against. Recomputes from
 * scratch on every call.
 *
 * Throws ComplexTooLarge when the restricted complex exceeds max_simplices.
 */
BettiTriple betti_at(const Filtration& f, double eps, int max_simplices = 20000);

}  // namespace qcd

#endif
