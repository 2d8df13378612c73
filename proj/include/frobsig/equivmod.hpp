#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "frobsig/gf.hpp"
#include "frobsig/groupscheme.hpp"
#include "frobsig/modrep.hpp"
#include "frobsig/polyring.hpp"
#include "frobsig/rational.hpp"

namespace frobsig {

using PolyMatrix = std::vector<std::vector<Polynomial>>;  // [row][col]

// Finitely generated free graded module over the polynomial ring with an
// equivariant structure: one polynomial action matrix per constant-group
// generator (g . gen_j = sum_i action[g][i][j] * gen_i), and a weight vector
// per generator for the diagonalizable part.  Generator degrees are rational
// because Frobenius pushforwards divide degrees by p^e.
struct GradedEquivariantModule {
  Field F;
  int dimension = 0;                                // ambient variable count
  std::vector<Rational> gen_degree;                 // one per generator
  std::vector<std::vector<long long>> gen_weight;   // per generator (may be empty rows)
  std::vector<PolyMatrix> action;                   // per constant-group generator

  int rank() const { return int(gen_degree.size()); }
};

PolyMatrix identity_polymatrix(const Field& F, int n);
PolyMatrix polymatrix_mul(const Field& F, const PolyMatrix& A, const PolyMatrix& B);

// The semilinear composition rule: the action of g*h is A_g . (g applied to
// the entries of A_h), where g acts on entries through its variable matrix.
PolyMatrix compose_action(const Field& F, const PolyMatrix& Ag,
                          const FieldMatrix& g_vars, const PolyMatrix& Ah);

// Polynomial action matrix of an arbitrary element of the constant group.
PolyMatrix action_of_element(const GradedEquivariantModule& M, const ConstantGroup& C,
                             const std::vector<FieldMatrix>& varmats, int element);

// The ring itself as a rank-1 module (trivial equivariant structure).
GradedEquivariantModule ring_module(const Field& F, int dimension, int n_constant_gens,
                                    int n_diag_factors);

// Free module on the constant-group module P, generated in a single degree
// with a single weight: P tensor S, shifted.
GradedEquivariantModule standard_module(const Field& F, int dimension, const KGModule& P,
                                        const Rational& degree,
                                        const std::vector<long long>& weight);

GradedEquivariantModule module_direct_sum(const GradedEquivariantModule& A,
                                          const GradedEquivariantModule& B);

// Contragredient module: generators of degree -d_j and weight -w_j, action
// B_g = g applied entrywise to the transpose of A_{g^{-1}}.
GradedEquivariantModule dual_graded_module(const GradedEquivariantModule& M,
                                           const ConstantGroup& C,
                                           const std::vector<FieldMatrix>& varmats,
                                           const DiagPart& diag);

// e-fold Frobenius pushforward.  New generators are indexed by pairs
// (box exponent r in [0,p^e)^dimension, original generator), ordered
// generator-major with r ascending lexicographically; the new degree is
// (|r| + old degree) / p^e, and coefficients pass through the inverse
// Frobenius.  Weights transform by the inverse of p^e modulo each factor
// order, so every factor order must be coprime to p; otherwise this throws
// ConfigError("non-etale group scheme").  Ranks beyond a built-in cap of
// 4000 raise ResourceCapError (the action matrices are stored densely).
GradedEquivariantModule frobenius_pushforward(const GradedEquivariantModule& M,
                                              const GroupSchemeDescriptor& D,
                                              unsigned e);

// ------------------------------------------------------------------ slices

// Basis of the degree-delta graded piece: pairs (monomial, generator index),
// generator-major, monomials ascending lex.  Optionally restricted to a
// single weight class of the diagonalizable part.
struct SliceBasis {
  Rational degree;
  std::vector<std::pair<Exponent, int>> elems;
  int dim() const { return int(elems.size()); }
};

struct SliceModule {
  SliceBasis basis;
  KGModule mod;  // constant-group action restricted to the slice
};

SliceModule slice_module(const GradedEquivariantModule& M,
                         const std::vector<FieldMatrix>& varmats, const DiagPart& diag,
                         const Rational& delta,
                         const std::vector<long long>* weight_filter,
                         long long slice_cap);

// --------------------------------------------------------------- hom spaces

// Basis of the space of degree-`shift` equivariant module maps src -> dst,
// returned as polynomial matrices H (dst.rank x src.rank) with
// f(gen_j) = sum_i H[i][j] gen_i.  Respects diagonalizable weights.
std::vector<PolyMatrix> graded_hom(const GradedEquivariantModule& src,
                                   const GradedEquivariantModule& dst,
                                   const Rational& shift,
                                   const std::vector<FieldMatrix>& varmats,
                                   const DiagPart& diag, long long slot_cap);

// A graded map is invertible iff its degree-0 scalar part is; checks shapes,
// degree compatibility, and the constant-coefficient matrix rank.
bool map_invertible(const GradedEquivariantModule& src, const GradedEquivariantModule& dst,
                    const PolyMatrix& H);

// ------------------------------------------------------- summand counting

// Multiplicity of the standard module (P tensor S, generated in degree delta
// with weight chi) as a direct summand of M, for each candidate delta: the
// rank over End(P)/rad of the composition pairing between slice-level hom
// spaces.  P must come with split maps into the regular module when it is a
// regular-module summand (projective covers; simple modules in the coprime
// case); the trivial module is handled by fixed-point computations instead.
struct ShiftCount {
  Rational shift;
  int count = 0;
};

struct SummandQuery {
  KGModule P;
  std::optional<FieldMatrix> incl;  // |G| x dimP, split mono into regular module
  std::optional<FieldMatrix> proj;  // dimP x |G|
  std::vector<long long> weight;    // diagonalizable character (may be empty)
};

std::vector<ShiftCount> summand_counts(const GradedEquivariantModule& M,
                                       const ConstantGroup& C,
                                       const std::vector<FieldMatrix>& varmats,
                                       const DiagPart& diag, const SummandQuery& query,
                                       long long slice_cap);

// One explicit split copy of the standard module inside M: an embedding
// matrix (M.rank x dim P) and a retraction (dim P x M.rank) whose composite
// is verified to be the exact identity, both verified equivariant.  Returns
// nothing when no shift carries a copy.
struct RealizedSummand {
  Rational shift;
  PolyMatrix embed;
  PolyMatrix retract;
};
std::optional<RealizedSummand> realize_summand(const GradedEquivariantModule& M,
                                               const ConstantGroup& C,
                                               const std::vector<FieldMatrix>& varmats,
                                               const DiagPart& diag,
                                               const SummandQuery& query,
                                               long long slice_cap);

// The span of the generators with the induced action (constant coefficients
// of the action matrices): M tensored down to the residue field.
KGModule generator_module(const GradedEquivariantModule& M);

// Internal consistency checks: every action entry homogeneous of the degree
// difference, every term weight-compatible, and generator-pair relations on
// sampled columns; throws InternalCheckError on violation.
void verify_module_structure(const GradedEquivariantModule& M, const ConstantGroup& C,
                             const std::vector<FieldMatrix>& varmats,
                             const DiagPart& diag);

}  // namespace frobsig
