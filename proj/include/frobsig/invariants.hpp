#pragma once
#include <string>
#include <vector>

#include "frobsig/groupscheme.hpp"
#include "frobsig/modrep.hpp"
#include "frobsig/polyring.hpp"

namespace frobsig {

// Basis of the degree-n invariants (S_n)^G: the kernel of the stacked
// systems (rho_n(g) - I) over the constant generators, intersected with the
// zero-weight monomial span of the diagonalizable part.
std::vector<Polynomial> invariant_basis(const GroupSchemeDescriptor& D,
                                        const ConstantGroup& C, int n);

// Averaging projector onto the invariants: mean over the constant group
// followed by discarding terms of nonzero diagonalizable weight.  Defined
// exactly when the scheme is linearly reductive (the group order is then
// invertible); throws ConfigError("not linearly reductive") otherwise.
// Idempotent, and the identity on invariants.
Polynomial reynolds(const GroupSchemeDescriptor& D, const ConstantGroup& C,
                    const Polynomial& f);

// ------------------------------------------------------- generator search

struct InvariantGenerator {
  int degree = 0;
  Polynomial poly;
};

struct InvariantRingData {
  int degree_bound = 0;
  std::vector<InvariantGenerator> generators;  // greedy-minimal up to the bound
  std::vector<int> hilbert;                    // hilbert[n] = dim (S_n)^G, n <= bound
  std::string note;                            // completeness caveat
};

// Greedy generator search: for n = 1..degree_bound the new generators are a
// complement of the span of degree-n products of previously chosen
// generators inside (S_n)^G.  Degrees above the bound are not examined, so
// generation beyond it is explicitly not certified (see the note field).
InvariantRingData generators_up_to(const GroupSchemeDescriptor& D,
                                   const ConstantGroup& C, int degree_bound);

// --------------------------------------------- rank bookkeeping per degree

// Two independent computations of the same homomorphism counts, plus the
// composition-multiplicity rank identity they must satisfy degreewise.
struct HilbertCompareRow {
  int degree = 0;
  long long slice_dim = 0;                 // dim of the zero-weight slice B_n
  std::vector<int> hom_dims;               // per label: dim Hom(P_i, B_n)
  std::vector<int> tensor_invariant_dims;  // per label: dim (P_i^dual ⊗ B_n)^G
  bool agree = false;
};

struct HilbertCompareReport {
  std::vector<std::string> labels;
  std::vector<int> simple_dims;  // dim V_i per label
  std::vector<int> end_dims;     // dim End(V_i) per label
  std::vector<HilbertCompareRow> rows;  // degrees 0..n_max
  bool all_agree = true;
};

// For every degree n <= n_max: computes dim Hom(P_i, B_n) by the hom-space
// solver and dim (P_i^dual ⊗ B_n)^G by a stacked invariance kernel (two
// independent linear systems), checks they agree, and checks the rank
// accounting sum_i dim V_i * dim Hom(P_i, B_n) / dim End(V_i) = dim B_n.
// B_n is the zero-weight slice of S_n (all of S_n when there is no
// diagonalizable part).
HilbertCompareReport hilbert_function_compare(const GroupSchemeDescriptor& D,
                                              const ConstantGroup& C, int n_max);

}  // namespace frobsig
