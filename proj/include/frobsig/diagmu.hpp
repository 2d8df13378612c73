#pragma once
#include <string>
#include <vector>

#include "frobsig/gf.hpp"
#include "frobsig/groupscheme.hpp"

namespace frobsig {

// Multiplicity of the weight-class module M_chi (the span of the monomials of
// weight chi, as a module over the invariant ring) inside the e-th Frobenius
// pushforward of the invariant ring.  One residue per diagonal factor.
struct WeightClassCount {
  std::vector<long long> cls;
  long long count = 0;
};

// Exact combinatorial counts for a diagonalizable action, covering factors
// whose order is divisible by p.  For each box exponent a in [0,p^e)^d the
// generated block decomposes as the direct sum of M_chi over the solution
// coset of p^e * chi = -W.a per factor (empty when gcd(p^e, n) does not
// divide W.a); counts accumulate per class, all classes reported (zeros
// included) in odometer order.  Raises ResourceCapError when the counts
// cannot fit 64-bit arithmetic.
std::vector<WeightClassCount> veronese_summand_counts(const DiagPart& diag, long long p,
                                                      int dimension, unsigned e,
                                                      long long enumeration_cap = 10000000);

// The two counting strategies behind the dispatcher, exposed so tests can
// confirm they agree wherever both apply: direct enumeration of the exponent
// box, and per-coordinate residue convolution over the weight classes.
std::vector<WeightClassCount> veronese_counts_enumerated(const DiagPart& diag, long long p,
                                                         int dimension, unsigned e);
std::vector<WeightClassCount> veronese_counts_convolved(const DiagPart& diag, long long p,
                                                        int dimension, unsigned e);

// Comparison report between the combinatorial counts and the equivariant
// pipeline run on a constant-group realization of the same action.
struct RealizationCheck {
  bool agree = false;
  std::vector<std::string> lines;  // per (e, class): both counts side by side
};

// Realizes a single-factor diagonal action of coprime order as the constant
// cyclic subgroup generated by diag(zeta^{w_1}, ..., zeta^{w_d}) for a fixed
// primitive n-th root of unity zeta in F, then compares the equivariant
// summand counts of the pushforward against veronese_summand_counts for
// every e in [1, e_max].  The class-chi module matches the simple on which
// the generator acts by zeta^{-chi}.  Throws ConfigError("field lacks n-th
// roots") when n does not divide q-1 (or p divides n), and ConfigError for
// multi-factor diagonal parts.
RealizationCheck crosscheck_constant_realization(const Field& F, int dimension,
                                                 const DiagPart& diag, unsigned e_max,
                                                 long long slice_cap = 100000);

}  // namespace frobsig
