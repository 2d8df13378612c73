#pragma once
#include <map>
#include <string>
#include <vector>

#include "frobsig/gf.hpp"
#include "frobsig/groupscheme.hpp"

namespace frobsig {

using Exponent = std::vector<int>;  // one entry per variable, >= 0

inline int total_degree(const Exponent& e) {
  int s = 0;
  for (int x : e) s += x;
  return s;
}

// Sparse multivariate polynomial: exponent vector -> nonzero coefficient.
// The map keeps lexicographic key order, which makes iteration deterministic.
struct Polynomial {
  std::map<Exponent, FE> terms;

  bool is_zero() const { return terms.empty(); }
  int degree() const;  // max total degree, -1 for 0

  static Polynomial zero() { return {}; }
  static Polynomial constant(const Field& F, FE c);
  static Polynomial monomial(const Field& F, Exponent e, FE c);
};

Polynomial poly_add(const Field& F, const Polynomial& a, const Polynomial& b);
Polynomial poly_scale(const Field& F, const Polynomial& a, FE c);
Polynomial poly_mul(const Field& F, const Polynomial& a, const Polynomial& b);
bool poly_equal(const Polynomial& a, const Polynomial& b);
bool poly_homogeneous_of(const Polynomial& a, int deg);
std::string poly_str(const Field& F, const Polynomial& a);

// g acts by substitution on variables: g . x_j = sum_i g_{ij} x_i (column j of
// the generator matrix is the image of x_j).
Polynomial act_on_polynomial(const Field& F, const FieldMatrix& g, const Polynomial& f);

// All monomials of the given total degree in d variables, ascending lex order.
std::vector<Exponent> monomials_of_degree(int d, int n);

// Degree-n slice of the polynomial ring as a representation of the constant
// group generators, with diagonalizable weights per basis monomial.
struct GradedPiece {
  int degree = 0;
  std::vector<Exponent> basis;                    // ascending lex
  std::vector<FieldMatrix> action;                // one matrix per constant generator
  std::vector<std::vector<long long>> weights;    // per basis monomial, per factor
};

GradedPiece degree_module(const Field& F, int dimension,
                          const std::vector<FieldMatrix>& constant_generators,
                          const DiagPart& diag, int n);

// W^T a mod n_j: the character of the diagonalizable part on x^a.
std::vector<long long> monomial_weight(const DiagPart& diag, const Exponent& a);

// Expresses a polynomial in the monomial basis of its (homogeneous) degree.
FieldMatrix poly_coords(const Field& F, const Polynomial& f,
                        const std::vector<Exponent>& basis);

}  // namespace frobsig
