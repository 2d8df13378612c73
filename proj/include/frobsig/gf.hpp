#pragma once
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "frobsig/errors.hpp"

namespace frobsig {

// Explicit description of F_{p^m}: the modulus polynomial is part of the data
// so that element coordinates are reproducible across runs and machines.
struct FieldSpec {
  uint32_t p = 2;
  uint32_t m = 1;
  std::vector<uint32_t> modulus;  // ascending coefficients, size m+1, monic

  bool operator==(const FieldSpec& o) const {
    return p == o.p && m == o.m && modulus == o.modulus;
  }
};

// Field element: coordinates packed base-p into one word (q <= 2^16).
struct FE {
  uint32_t v = 0;
  bool operator==(const FE& o) const { return v == o.v; }
  bool operator!=(const FE& o) const { return v != o.v; }
  bool operator<(const FE& o) const { return v < o.v; }
};

namespace detail { struct FieldCtx; }

class Field {
 public:
  Field() = default;  // invalid until assigned
  explicit Field(const FieldSpec& spec);

  bool valid() const { return ctx_ != nullptr; }
  uint32_t p() const;
  uint32_t m() const;
  uint32_t q() const;
  const FieldSpec& spec() const;

  FE zero() const { return FE{0}; }
  FE one() const { return from_int(1); }
  FE from_int(long long n) const;                     // prime-subfield embedding
  FE from_coords(const std::vector<uint32_t>& c) const;
  std::vector<uint32_t> coords(FE x) const;           // m digits, ascending powers

  bool is_zero(FE x) const { return x.v == 0; }
  FE add(FE a, FE b) const;
  FE sub(FE a, FE b) const;
  FE neg(FE a) const;
  FE mul(FE a, FE b) const;
  FE inv(FE a) const;
  FE div(FE a, FE b) const { return mul(a, inv(b)); }
  FE pow(FE a, unsigned long long n) const;
  FE frobenius(FE a, unsigned e) const;      // a^(p^e)
  FE inv_frobenius(FE a, unsigned e) const;  // unique root: result^(p^e) == a

  std::vector<FE> all_elements() const;  // 0,1,...,q-1 in packed order
  std::string to_string(FE x) const;

  bool same(const Field& o) const { return ctx_ == o.ctx_; }
  bool operator==(const Field& o) const;

 private:
  std::shared_ptr<const detail::FieldCtx> ctx_;
};

// Dense matrix over a Field.  Row-major.
class FieldMatrix {
 public:
  FieldMatrix() : rows_(0), cols_(0) {}
  FieldMatrix(const Field& F, int rows, int cols)
      : F_(F), rows_(rows), cols_(cols), a_(size_t(rows) * cols, FE{0}) {}

  static FieldMatrix identity(const Field& F, int n);

  const Field& field() const { return F_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  FE& at(int i, int j) { return a_[size_t(i) * cols_ + j]; }
  const FE& at(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

  FieldMatrix mul(const FieldMatrix& o) const;
  FieldMatrix add(const FieldMatrix& o) const;
  FieldMatrix sub(const FieldMatrix& o) const;
  FieldMatrix scale(FE c) const;
  FieldMatrix transpose() const;
  FieldMatrix pow(unsigned long long n) const;  // square, n>=0
  FieldMatrix kron(const FieldMatrix& o) const;
  bool is_zero() const;
  bool is_identity() const;
  bool equals(const FieldMatrix& o) const;

  // Stable key for canonical ordering / dedup of same-shape matrices.
  std::vector<uint32_t> packed() const;

  std::string to_string() const;

 private:
  Field F_;
  int rows_, cols_;
  std::vector<FE> a_;
};

// Result of Gaussian elimination.  An inconsistent right-hand side is a
// distinguished outcome (solvable == false), not a failure.
struct LinSolveResult {
  int rank = 0;
  FieldMatrix kernel;                   // cols form a kernel basis (may be 0 cols)
  bool solvable = true;                 // meaningful only when rhs was given
  std::optional<FieldMatrix> solution;  // one solution per rhs column
};

// Eliminates with the deterministic pivot rule: columns left to right, first
// nonzero row in index order.
LinSolveResult rank_kernel_solve(const FieldMatrix& A, const FieldMatrix* rhs = nullptr);

int rank_of(const FieldMatrix& A);
std::optional<FieldMatrix> inverse_of(const FieldMatrix& A);

// Indices of the pivot columns under the deterministic elimination order.
std::vector<int> pivot_columns(const FieldMatrix& A);

// Column space basis (the pivot columns of A), deterministic.
FieldMatrix column_space(const FieldMatrix& A);

// Horizontal / vertical concatenation helpers.
FieldMatrix hcat(const FieldMatrix& A, const FieldMatrix& B);
FieldMatrix vcat(const FieldMatrix& A, const FieldMatrix& B);

// Characteristic polynomial, monic, ascending coefficients (size n+1).
// Exact over the field; Hessenberg reduction.
std::vector<FE> char_poly(const FieldMatrix& A);

}  // namespace frobsig
