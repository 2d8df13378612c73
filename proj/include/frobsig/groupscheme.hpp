#pragma once
#include <string>
#include <vector>

#include "frobsig/gf.hpp"

namespace frobsig {

// Diagonalizable factor mu_{n_1} x ... x mu_{n_r} acting diagonally on the
// variables with weight matrix W: row i gives the weights of x_i, one column
// per factor, reduced mod n_j.
struct DiagPart {
  std::vector<long long> orders;                 // n_j >= 1
  std::vector<std::vector<long long>> weights;   // d rows, r cols

  bool trivial() const {
    for (auto n : orders)
      if (n > 1) return false;
    return true;
  }
  int factors() const { return int(orders.size()); }
};

// A finite group scheme presented as (constant subgroup generated by matrices)
// x (diagonalizable part).  The two factors must commute, which for this shape
// means each constant generator is block-diagonal with respect to the
// simultaneous weight decomposition of the variables.
struct GroupSchemeDescriptor {
  Field F;
  int dimension = 0;                             // number of variables d
  std::vector<FieldMatrix> constant_generators;  // d x d, invertible
  DiagPart diag;

  bool has_constant() const { return !constant_generators.empty(); }
  bool has_diag() const { return !diag.trivial(); }
};

// Throws ConfigError on malformed descriptors; reduces weights mod orders.
void validate_descriptor(GroupSchemeDescriptor& D);

// The enumerated constant part (always contains at least the identity).
struct ConstantGroup {
  Field F;
  int dim = 0;
  std::vector<FieldMatrix> elements;        // canonically sorted, distinct
  int identity_index = -1;
  std::vector<int> gen_index;               // location of each generator
  std::vector<std::vector<int>> words;      // generator word per element
  std::vector<std::vector<int>> mult;       // mult[i][j] = index of e_i * e_j
  std::vector<int> inverse;

  long long order() const { return (long long)elements.size(); }
  int mul(int i, int j) const { return mult[i][j]; }
};

// BFS closure of the generated matrix group, capped.  Deterministic: the
// element list is sorted by packed matrix entries.
ConstantGroup enumerate_elements(const Field& F, int dim,
                                 const std::vector<FieldMatrix>& gens,
                                 size_t element_cap = 200);

long long scheme_order(const GroupSchemeDescriptor& D, const ConstantGroup& C);

// Linear reductivity: the diagonalizable part always is; the constant part is
// iff p does not divide its order.
bool is_linearly_reductive(const GroupSchemeDescriptor& D, const ConstantGroup& C);

struct SmallnessReport {
  bool small = false;
  bool exact = true;       // false = certified factorwise only (mixed case)
  std::string witness;     // populated when small == false
};

SmallnessReport is_small(const GroupSchemeDescriptor& D, const ConstantGroup& C);

// Largest s with p^s dividing some n_j: the infinitesimal depth of the
// diagonalizable part (0 when etale).
unsigned infinitesimal_e0(const GroupSchemeDescriptor& D);

// True iff p divides no n_j (the whole diagonalizable part is etale).
bool diag_is_etale(const GroupSchemeDescriptor& D);

}  // namespace frobsig
