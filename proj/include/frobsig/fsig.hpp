#pragma once
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "frobsig/equivmod.hpp"
#include "frobsig/gf.hpp"
#include "frobsig/groupscheme.hpp"
#include "frobsig/modrep.hpp"
#include "frobsig/rational.hpp"

namespace frobsig {

// ------------------------------------------------------------ theta vectors

// Finitely supported real combination of indecomposable labels, with the
// minimal generator count of each label's module for the norm.
struct ThetaTerm {
  std::string label;
  double coeff = 0;
  int u_value = 1;
};

struct ThetaVector {
  std::vector<ThetaTerm> terms;
};

// Normalized counts at level e: coefficient = count / p^{d e}.
ThetaVector theta_vector(const std::vector<std::pair<std::string, long long>>& counts,
                         const std::vector<int>& u_values, unsigned p, int dimension,
                         unsigned e);

// sum over terms of |coeff| * u_value.
double theta_norm(const ThetaVector& v);

// -------------------------------------------------------------- predictions

// Asymptotic summand density per label: coefficient of the label's standard
// module in the limit of [^e L^G] / p^{de}.
struct PredictedLabel {
  std::string label;
  int module_rank = 1;  // generators of the standard module (u-value)
  int simple_dim = 1;
  int end_dim = 1;
  Rational coefficient;  // L_rank * simple_dim / (group_algebra_dim * end_dim)
};

struct Prediction {
  long long group_algebra_dim = 0;
  bool linearly_reductive = false;
  unsigned e0 = 0;  // infinitesimal depth of the diagonalizable part
  long long L_rank = 1;
  std::vector<PredictedLabel> labels;
  Rational s_value;  // 1/group_algebra_dim if linearly reductive, else 0
};

// Predicted limit coefficients for a rank-L_rank free starting module.
// Labels are: constant-part cover labels, diagonalizable weight classes
// ("w=(c,...)"), or both joined with '|' for product descriptors; in the
// modular constant case the plain free line ("free", density 0) is included.
// Throws NotSmallError with the witness when the action is not small.
Prediction predict(const GroupSchemeDescriptor& D, long long L_rank);

// -------------------------------------------------------------- measurement

// Exact per-e counts for one label, against its predicted density.
struct LabelSeries {
  std::string label;
  int module_rank = 1;
  Rational predicted;
  std::vector<long long> counts;                        // per measured e
  std::vector<Rational> deviations;                     // |count/p^{de} - predicted|
  std::vector<std::vector<ShiftCount>> shift_breakdown; // per e; empty on the
                                                        // diagonalizable path
  bool trend_nonincreasing = true;  // deviations never grow along the window
  double normalized_at(size_t idx, long long scale) const {
    return double(counts[idx]) / double(scale);
  }
};

struct FSigReport {
  std::string pipeline;  // "constant", "diagonalizable", or "mixed"
  bool small = false;
  bool smallness_exact = true;  // false: certified factorwise only
  bool linearly_reductive = false;
  unsigned e0 = 0;
  long long group_algebra_dim = 0;
  std::vector<unsigned> e_values;   // 1..e_max
  std::vector<long long> scales;    // p^{de} per measured e
  std::vector<bool> complete;       // per e: sum of count*rank equals p^{de}*L_rank
  std::vector<LabelSeries> series;  // deterministic label order
  std::vector<ThetaVector> theta;   // per e, normalized counts
  Rational s_value;
  double wall_ms = 0;
  long long max_rank = 0;  // largest pushforward rank constructed
};

// Runs the applicable pipeline for e = 1..e_max on the free module chosen by
// module_choice ("S" for the ring itself, "cover:<label>" for the standard
// module on that projective cover) and compares against predict().
// Dispatch: constant-only descriptors use the equivariant pushforward
// pipeline, diagonalizable-only ones the weight-class counter, and products
// (with etale diagonalizable part) the weight-blockwise equivariant path.
// Throws NotSmallError when the action is not small, ConfigError on an
// unsupported module choice.
FSigReport measure(const GroupSchemeDescriptor& D, unsigned e_max, long long slice_cap,
                   const std::string& module_choice = "S");

// --------------------------------------------------- regular-module search

// One indecomposable piece of the found copy of the regular module.
struct RegularPiece {
  std::string label;         // cover label, or "P?" if unmatched
  int dim = 0;
  std::vector<int> degrees;  // ambient degree blocks the embedding touches
};

// A verified split copy of the regular module kG inside the direct sum of
// the degree slices S_0 .. S_r: retract * embed is the identity and both
// maps are equivariant (checked; violations raise InternalCheckError).
struct RegularSummand {
  int degree_cap = 0;               // the r that was searched
  std::vector<int> block_degrees;   // 0..r
  std::vector<int> block_offsets;   // start coordinate of each block
  FieldMatrix embed;                // (dim of the sum) x |G|
  FieldMatrix retract;              // |G| x (dim of the sum)
  std::vector<RegularPiece> pieces;
};

// Greedy search for a split equivariant copy of the regular module inside
// S_0 + ... + S_r.  Returns nothing when some indecomposable piece cannot be
// placed within the window ("not found up to r" is a valid outcome).
// Constant part only: throws ConfigError on diagonalizable factors.
std::optional<RegularSummand> find_regular_summand(const GroupSchemeDescriptor& D,
                                                   const ConstantGroup& C, int r);

}  // namespace frobsig
