#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "frobsig/gf.hpp"
#include "frobsig/groupscheme.hpp"

namespace frobsig {

// Finite-dimensional module over the constant group: one action matrix per
// group generator (diagonalizable factors never enter here; they are handled
// as weight bookkeeping by the graded layer).
struct KGModule {
  Field F;
  int dim = 0;
  std::vector<FieldMatrix> action;  // indexed like ConstantGroup generators
};

KGModule trivial_module(const Field& F, const ConstantGroup& C);
KGModule regular_module(const ConstantGroup& C);
KGModule direct_sum(const KGModule& A, const KGModule& B);
KGModule dual_module(const KGModule& M, const ConstantGroup& C);

// Action of an arbitrary group element (via its generator word).
FieldMatrix element_action(const KGModule& M, const ConstantGroup& C, int element);

// Basis of Hom_G(M, N) as matrices (N.dim x M.dim) with X rho_M(g) = rho_N(g) X.
std::vector<FieldMatrix> hom_space(const ConstantGroup& C, const KGModule& M,
                                   const KGModule& N);

// ---------------------------------------------------------------- radicals

// A spanned matrix algebra with a faithful representation on k^n.  Must
// contain the identity matrix in its span.
struct MatAlgebra {
  Field F;
  int n = 0;
  std::vector<FieldMatrix> basis;
};

// Jacobson radical via the iterated characteristic-coefficient forms
// e_{p^j}(xy) = 0 with inverse-Frobenius linearization, certified afterwards
// (two-sided ideal, nilpotent, semisimple quotient).  Returns a basis.
std::vector<FieldMatrix> algebra_radical(const MatAlgebra& A);

// Exhaustive oracle: an element lies in the radical iff the two-sided ideal it
// generates is nilpotent.  Enumerates all q^dim elements; capped.
std::vector<FieldMatrix> algebra_radical_exhaustive(const MatAlgebra& A,
                                                    uint64_t element_cap = 200000);

// Radical of the group algebra kG in element-basis coordinates (|G| x 1 each).
std::vector<FieldMatrix> group_algebra_radical(const ConstantGroup& C);

// ------------------------------------------------- End(P)/rad as a field

struct QuotientField {
  Field F;
  int sdim = 0;                       // dim_k of End(P)/rad
  std::vector<FieldMatrix> rad;       // radical basis (endo matrices)
  std::vector<FieldMatrix> lift;      // complement basis (endo matrices)

  std::vector<FE> coords(const FieldMatrix& endo) const;  // class mod rad
  std::vector<FE> mul(const std::vector<FE>& a, const std::vector<FE>& b) const;
  std::vector<FE> one() const;
  std::vector<FE> inv(const std::vector<FE>& a) const;
  bool is_zero(const std::vector<FE>& a) const;
};

// Builds End(P)/rad and verifies it is a (commutative) field; if not, P has a
// nontrivial idempotent and the call raises std::runtime_error with message
// "P not indecomposable".
QuotientField make_end_quotient(const ConstantGroup& C, const KGModule& P);

// Indices of a maximal linearly independent subset of same-shape matrices
// (deterministic first-found pivots).
std::vector<int> independent_matrix_subset(const Field& F,
                                           const std::vector<FieldMatrix>& list);

// Row-echelon rank of a matrix with entries in End(P)/rad, with the pivot
// positions of the original matrix.
struct QuotientRank {
  int rank = 0;
  std::vector<int> pivot_rows, pivot_cols;
};
QuotientRank rank_over_quotient_field(const QuotientField& E,
                                      std::vector<std::vector<std::vector<FE>>> B);

// ------------------------------------------------------- simples / covers

struct SimpleProjectiveDatum {
  std::string label;
  KGModule simple;
  KGModule projective_cover;
  int end_dim = 1;          // dim_k End_G(simple)
  int mult_in_regular = 1;  // multiplicity of the cover inside kG
  FieldMatrix incl;         // |G| x dim(cover): split mono into the regular module
  FieldMatrix proj;         // dim(cover) x |G|: retraction (proj * incl = id)
};

// Wedderburn data of kG by iterated splitting of the regular module.
// Throws ResourceCapError("decomposition incomplete...") when peeling stalls.
std::vector<SimpleProjectiveDatum> simples_and_projective_covers(const ConstantGroup& C);

// ------------------------------------------------------------ multiplicity

// Multiplicity of the indecomposable P as a direct summand of M: the rank
// over End(P)/rad of the composition pairing Hom(P,M) x Hom(M,P) -> End(P).
int summand_multiplicity(const ConstantGroup& C, const KGModule& P, const KGModule& M);

// Same, but also returns maps realizing the split embedding P^mult -> M.
struct SplitPairs {
  int multiplicity = 0;
  std::vector<FieldMatrix> ins;   // each M.dim x P.dim
  std::vector<FieldMatrix> outs;  // each P.dim x M.dim
};
SplitPairs summand_split_pairs(const ConstantGroup& C, const KGModule& P,
                               const KGModule& M);

// ------------------------------------------------------------- decompose

struct DecompPart {
  std::string label;
  KGModule rep;
  int count = 0;
};
struct Decomposition {
  std::vector<DecompPart> parts;
  bool complete = false;
  std::string note;
};

// Full decomposition when kG is semisimple or the group is a cyclic p-group
// (Jordan type); otherwise best-effort peeling with a verification pass.
// Parts are matched against `refs` by isomorphism where possible.
Decomposition decompose_module(const ConstantGroup& C, const KGModule& M,
                               const std::vector<std::pair<std::string, KGModule>>& refs);

// Peeled summand of a module with explicit split maps.
struct Peeled {
  KGModule mod;
  FieldMatrix incl;  // M.dim x mod.dim
  FieldMatrix proj;  // mod.dim x M.dim
};

// Iterated Fitting splitting; complete=false when a part cannot be certified
// indecomposable (its End/rad is not a field).
struct PeelResult {
  std::vector<Peeled> parts;
  bool complete = true;
};
PeelResult peel_with_maps(const ConstantGroup& C, const KGModule& M);

// True iff M and N are isomorphic (both must be indecomposable).
bool indecomposable_iso(const ConstantGroup& C, const KGModule& M, const KGModule& N);

}  // namespace frobsig
