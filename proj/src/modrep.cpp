#include "frobsig/modrep.hpp"

#include <algorithm>
#include <map>

#include "frobsig/errors.hpp"

namespace frobsig {

namespace {

// ---------------------------------------------------------------- helpers

FieldMatrix flat(const FieldMatrix& M) {
  FieldMatrix v(M.field(), M.rows() * M.cols(), 1);
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) v.at(i * M.cols() + j, 0) = M.at(i, j);
  return v;
}

FieldMatrix flats_of(const Field& F, const std::vector<FieldMatrix>& list, int n2) {
  FieldMatrix A(F, n2, int(list.size()));
  for (size_t k = 0; k < list.size(); ++k) {
    FieldMatrix v = flat(list[k]);
    for (int i = 0; i < n2; ++i) A.at(i, int(k)) = v.at(i, 0);
  }
  return A;
}

std::vector<FieldMatrix> select(const std::vector<FieldMatrix>& list,
                                const std::vector<int>& idx) {
  std::vector<FieldMatrix> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(list[size_t(i)]);
  return out;
}

// Independent subset of same-shape matrices (first-found pivots).
std::vector<int> independent_subset(const Field& F, const std::vector<FieldMatrix>& list) {
  if (list.empty()) return {};
  int n2 = list[0].rows() * list[0].cols();
  return pivot_columns(flats_of(F, list, n2));
}

// Coordinates of `target` in the span of `basis`, if it lies there.
std::optional<std::vector<FE>> span_coords(const Field& F,
                                           const std::vector<FieldMatrix>& basis,
                                           const FieldMatrix& target) {
  int n2 = target.rows() * target.cols();
  FieldMatrix A = flats_of(F, basis, n2);
  FieldMatrix b = flat(target);
  auto res = rank_kernel_solve(A, &b);
  if (!res.solvable) return std::nullopt;
  std::vector<FE> c(basis.size(), F.zero());
  for (size_t k = 0; k < basis.size(); ++k) c[k] = res.solution->at(int(k), 0);
  return c;
}

bool in_span(const Field& F, const std::vector<FieldMatrix>& basis,
             const FieldMatrix& target) {
  if (target.is_zero()) return true;
  if (basis.empty()) return false;
  return span_coords(F, basis, target).has_value();
}

// Close a list of matrices into an algebra span (independent basis).
std::vector<FieldMatrix> close_span(const Field& F, std::vector<FieldMatrix> basis) {
  basis = select(basis, independent_subset(F, basis));
  for (;;) {
    std::vector<FieldMatrix> cand = basis;
    for (const auto& a : basis)
      for (const auto& b : basis) cand.push_back(a.mul(b));
    auto idx = independent_subset(F, cand);
    if (idx.size() == basis.size()) return basis;
    basis = select(cand, idx);
  }
}

uint64_t ipow_u64(uint64_t b, unsigned e) {
  uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

// k-th elementary-symmetric coefficient of the eigenvalues: the
// characteristic polynomial is sum_k (-1)^k e_k t^{n-k}.
FE char_coeff(const Field& F, const FieldMatrix& M, uint64_t k) {
  auto cp = char_poly(M);
  int n = M.rows();
  FE c = cp[size_t(n) - size_t(k)];
  if (k % 2 == 1) c = F.neg(c);
  return c;
}

// One radical-chain pass: intersect the current subspace with the kernels of
// the semilinearized coefficient forms for j = 0 .. floor(log_p n).
std::vector<FieldMatrix> radical_chain(const Field& F, int nrep,
                                       std::vector<FieldMatrix> cur) {
  unsigned p = F.p();
  unsigned l = 0;
  while (ipow_u64(p, l + 1) <= uint64_t(nrep)) ++l;
  for (unsigned j = 0; j <= l; ++j) {
    if (cur.empty()) break;
    uint64_t k = ipow_u64(p, j);
    int s = int(cur.size());
    FieldMatrix C(F, s, s);
    for (int y = 0; y < s; ++y)
      for (int x = 0; x < s; ++x)
        C.at(y, x) = F.inv_frobenius(char_coeff(F, cur[x].mul(cur[y]), k), j);

    // The coefficient form must be additive on the current subspace after the
    // inverse-Frobenius twist; spot-check that before trusting the kernel.
    int checks = std::min(s, 3);
    for (int a = 0; a < checks; ++a)
      for (int b = a + 1; b < checks; ++b)
        for (int y = 0; y < checks; ++y) {
          FE raw = F.inv_frobenius(
              char_coeff(F, cur[a].add(cur[b]).mul(cur[y]), k), j);
          if (raw != F.add(C.at(y, a), C.at(y, b)))
            throw InternalCheckError("radical chain: coefficient form not additive");
        }
    for (auto lam : F.all_elements()) {
      if (F.is_zero(lam) || lam == F.one()) continue;
      FE raw = F.inv_frobenius(char_coeff(F, cur[0].scale(lam).mul(cur[0]), k), j);
      if (raw != F.mul(lam, C.at(0, 0)))
        throw InternalCheckError("radical chain: coefficient form not semilinear");
      break;  // one sample scalar suffices
    }

    auto res = rank_kernel_solve(C);
    std::vector<FieldMatrix> next;
    for (int t = 0; t < res.kernel.cols(); ++t) {
      FieldMatrix M(F, cur[0].rows(), cur[0].cols());
      for (int x = 0; x < s; ++x) {
        FE c = res.kernel.at(x, t);
        if (!F.is_zero(c)) M = M.add(cur[x].scale(c));
      }
      next.push_back(std::move(M));
    }
    cur = std::move(next);
  }
  return cur;
}

// Nilpotency of the subspace spanned by `rad` (as a multiplicatively closed
// chain I, I^2, ... inside n x n matrices).
bool subspace_nilpotent(const Field& F, int nrep, const std::vector<FieldMatrix>& rad) {
  std::vector<FieldMatrix> cur = rad;
  for (int iter = 0; iter <= nrep + 1; ++iter) {
    if (cur.empty()) return true;
    std::vector<FieldMatrix> prods;
    for (const auto& a : cur)
      for (const auto& r : rad) prods.push_back(a.mul(r));
    auto next = select(prods, independent_subset(F, prods));
    if (!next.empty() && next.size() >= cur.size()) return false;
    cur = std::move(next);
  }
  return cur.empty();
}

// Exhaustive radical membership for one element: the two-sided ideal it
// generates must be nilpotent.
bool generates_nilpotent_ideal(const Field& F, int nrep,
                               const std::vector<FieldMatrix>& alg,
                               const FieldMatrix& z) {
  if (z.is_zero()) return true;
  std::vector<FieldMatrix> seeds;
  for (const auto& a : alg)
    for (const auto& b : alg) seeds.push_back(a.mul(z).mul(b));
  auto ideal = select(seeds, independent_subset(F, seeds));
  return subspace_nilpotent(F, nrep, ideal);
}

struct QuotientAlgebra {
  std::vector<FieldMatrix> comp;  // complement representatives
  std::vector<FieldMatrix> regular;  // regular representation on the quotient
};

// Quotient of span(alg) by span(rad), with its regular representation.
QuotientAlgebra quotient_algebra(const Field& F, const std::vector<FieldMatrix>& alg,
                                 const std::vector<FieldMatrix>& rad) {
  int n2 = alg[0].rows() * alg[0].cols();
  FieldMatrix radF = flats_of(F, rad, n2);
  FieldMatrix big = rad.empty() ? flats_of(F, alg, n2) : hcat(radF, flats_of(F, alg, n2));
  auto piv = pivot_columns(big);
  QuotientAlgebra Q;
  int off = int(rad.size());
  for (int c : piv)
    if (c >= off) Q.comp.push_back(alg[size_t(c - off)]);
  int sq = int(Q.comp.size());
  if (sq + int(rad.size()) != int(alg.size()))
    throw InternalCheckError("quotient algebra: dimension mismatch");

  FieldMatrix solver = rad.empty() ? flats_of(F, Q.comp, n2)
                                   : hcat(radF, flats_of(F, Q.comp, n2));
  auto coords_mod = [&](const FieldMatrix& X) {
    FieldMatrix b = flat(X);
    auto res = rank_kernel_solve(solver, &b);
    if (!res.solvable)
      throw InternalCheckError("quotient algebra: element outside span");
    std::vector<FE> c(size_t(sq), F.zero());
    for (int k = 0; k < sq; ++k) c[size_t(k)] = res.solution->at(off + k, 0);
    return c;
  };

  for (int i = 0; i < sq; ++i) {
    FieldMatrix L(F, sq, sq);
    for (int j = 0; j < sq; ++j) {
      auto c = coords_mod(Q.comp[size_t(i)].mul(Q.comp[size_t(j)]));
      for (int k = 0; k < sq; ++k) L.at(k, j) = c[size_t(k)];
    }
    Q.regular.push_back(std::move(L));
  }
  return Q;
}

void certify_radical(const Field& F, int nrep, const std::vector<FieldMatrix>& alg,
                     const std::vector<FieldMatrix>& rad) {
  for (const auto& a : alg)
    for (const auto& r : rad)
      if (!in_span(F, rad, a.mul(r)) || !in_span(F, rad, r.mul(a)))
        throw InternalCheckError("radical certification: not a two-sided ideal");
  if (!subspace_nilpotent(F, nrep, rad))
    throw InternalCheckError("radical certification: not nilpotent");

  // Semisimplicity of the quotient: exhaustively when small, else re-chain.
  auto Q = quotient_algebra(F, alg, rad);
  int sq = int(Q.comp.size());
  if (sq == 0) return;
  uint64_t count = 1;
  bool small = true;
  for (int i = 0; i < sq && small; ++i) {
    count *= F.q();
    if (count > 4096) small = false;
  }
  if (small) {
    std::vector<uint32_t> digits(size_t(sq), 0);
    for (;;) {
      FieldMatrix z(F, sq, sq);
      bool nonzero = false;
      for (int i = 0; i < sq; ++i)
        if (digits[size_t(i)]) {
          z = z.add(Q.regular[size_t(i)].scale(FE{digits[size_t(i)]}));
          nonzero = true;
        }
      if (nonzero && generates_nilpotent_ideal(F, sq, Q.regular, z))
        throw InternalCheckError("radical certification: quotient not semisimple");
      int pos = 0;
      while (pos < sq) {
        // odometer over packed element codes
        uint32_t nextv = digits[size_t(pos)] + 1;
        if (nextv < F.q()) { digits[size_t(pos)] = nextv; break; }
        digits[size_t(pos)] = 0;
        ++pos;
      }
      if (pos == sq) break;
    }
  } else {
    auto qrad = radical_chain(F, sq, close_span(F, Q.regular));
    if (!qrad.empty())
      throw InternalCheckError("radical certification: quotient has radical");
  }
}

}  // namespace

// ----------------------------------------------------------- constructors

KGModule trivial_module(const Field& F, const ConstantGroup& C) {
  KGModule M{F, 1, {}};
  for (size_t i = 0; i < C.gen_index.size(); ++i)
    M.action.push_back(FieldMatrix::identity(F, 1));
  return M;
}

KGModule regular_module(const ConstantGroup& C) {
  int n = int(C.order());
  KGModule M{C.F, n, {}};
  for (int g : C.gen_index) {
    FieldMatrix L(C.F, n, n);
    for (int j = 0; j < n; ++j) L.at(C.mul(g, j), j) = C.F.one();
    M.action.push_back(std::move(L));
  }
  return M;
}

KGModule direct_sum(const KGModule& A, const KGModule& B) {
  if (A.action.size() != B.action.size())
    throw InternalCheckError("direct_sum: generator count mismatch");
  KGModule M{A.F, A.dim + B.dim, {}};
  for (size_t g = 0; g < A.action.size(); ++g) {
    FieldMatrix T(A.F, M.dim, M.dim);
    for (int i = 0; i < A.dim; ++i)
      for (int j = 0; j < A.dim; ++j) T.at(i, j) = A.action[g].at(i, j);
    for (int i = 0; i < B.dim; ++i)
      for (int j = 0; j < B.dim; ++j) T.at(A.dim + i, A.dim + j) = B.action[g].at(i, j);
    M.action.push_back(std::move(T));
  }
  return M;
}

KGModule dual_module(const KGModule& M, const ConstantGroup& C) {
  KGModule D{M.F, M.dim, {}};
  for (size_t gi = 0; gi < M.action.size(); ++gi) {
    int g = C.gen_index[gi];
    int ginv = C.inverse[size_t(g)];
    D.action.push_back(element_action(M, C, ginv).transpose());
  }
  return D;
}

FieldMatrix element_action(const KGModule& M, const ConstantGroup& C, int element) {
  FieldMatrix A = FieldMatrix::identity(M.F, M.dim);
  for (int gi : C.words[size_t(element)]) A = A.mul(M.action[size_t(gi)]);
  return A;
}

// ------------------------------------------------------------- hom spaces

std::vector<FieldMatrix> hom_space(const ConstantGroup& C, const KGModule& M,
                                   const KGModule& N) {
  (void)C;
  const Field& F = M.F;
  int nm = N.dim * M.dim;
  int ngen = int(M.action.size());
  FieldMatrix A(F, ngen * nm, nm);
  for (int g = 0; g < ngen; ++g) {
    const FieldMatrix& rM = M.action[size_t(g)];
    const FieldMatrix& rN = N.action[size_t(g)];
    // equation (i,j): sum_k X[i][k] rM[k][j] - rN[i][k] X[k][j] = 0
    for (int i = 0; i < N.dim; ++i)
      for (int j = 0; j < M.dim; ++j) {
        int row = g * nm + i * M.dim + j;
        for (int k = 0; k < M.dim; ++k)
          A.at(row, i * M.dim + k) = F.add(A.at(row, i * M.dim + k), rM.at(k, j));
        for (int k = 0; k < N.dim; ++k)
          A.at(row, k * M.dim + j) = F.sub(A.at(row, k * M.dim + j), rN.at(i, k));
      }
  }
  auto res = rank_kernel_solve(A);
  std::vector<FieldMatrix> basis;
  for (int t = 0; t < res.kernel.cols(); ++t) {
    FieldMatrix X(F, N.dim, M.dim);
    for (int i = 0; i < N.dim; ++i)
      for (int j = 0; j < M.dim; ++j) X.at(i, j) = res.kernel.at(i * M.dim + j, t);
    basis.push_back(std::move(X));
  }
  return basis;
}

// ---------------------------------------------------------------- radical

std::vector<FieldMatrix> algebra_radical(const MatAlgebra& A) {
  auto closed = close_span(A.F, A.basis);
  if (!in_span(A.F, closed, FieldMatrix::identity(A.F, A.n)))
    throw InternalCheckError("algebra_radical: identity not in span");
  auto rad = radical_chain(A.F, A.n, closed);
  certify_radical(A.F, A.n, closed, rad);
  return rad;
}

std::vector<FieldMatrix> algebra_radical_exhaustive(const MatAlgebra& A,
                                                    uint64_t element_cap) {
  auto closed = close_span(A.F, A.basis);
  int s = int(closed.size());
  uint64_t total = 1;
  for (int i = 0; i < s; ++i) {
    total *= A.F.q();
    if (total > element_cap)
      throw ResourceCapError("exhaustive radical: element count exceeds cap");
  }
  std::vector<FieldMatrix> members;
  std::vector<uint32_t> digits(size_t(s), 0);
  for (;;) {
    FieldMatrix z(A.F, A.n, A.n);
    bool nonzero = false;
    for (int i = 0; i < s; ++i)
      if (digits[size_t(i)]) {
        z = z.add(closed[size_t(i)].scale(FE{digits[size_t(i)]}));
        nonzero = true;
      }
    if (nonzero && generates_nilpotent_ideal(A.F, A.n, closed, z))
      members.push_back(std::move(z));
    int pos = 0;
    while (pos < s) {
      uint32_t nextv = digits[size_t(pos)] + 1;
      if (nextv < A.F.q()) { digits[size_t(pos)] = nextv; break; }
      digits[size_t(pos)] = 0;
      ++pos;
    }
    if (pos == s) break;
  }
  if (members.empty()) return {};
  return select(members, independent_subset(A.F, members));
}

std::vector<FieldMatrix> group_algebra_radical(const ConstantGroup& C) {
  int n = int(C.order());
  std::vector<FieldMatrix> basis;
  for (int h = 0; h < n; ++h) {
    FieldMatrix L(C.F, n, n);
    for (int j = 0; j < n; ++j) L.at(C.mul(h, j), j) = C.F.one();
    basis.push_back(std::move(L));
  }
  auto rad = algebra_radical(MatAlgebra{C.F, n, basis});
  std::vector<FieldMatrix> coords;
  for (const auto& z : rad) {
    FieldMatrix v(C.F, n, 1);
    for (int i = 0; i < n; ++i) v.at(i, 0) = z.at(i, C.identity_index);
    coords.push_back(std::move(v));
  }
  return coords;
}

// ---------------------------------------------------------- End(P) / rad

std::vector<FE> QuotientField::coords(const FieldMatrix& endo) const {
  std::vector<FieldMatrix> all = rad;
  for (const auto& l : lift) all.push_back(l);
  auto c = span_coords(F, all, endo);
  if (!c) throw InternalCheckError("endomorphism outside End(P)");
  std::vector<FE> out(size_t(sdim), F.zero());
  for (int k = 0; k < sdim; ++k) out[size_t(k)] = (*c)[rad.size() + size_t(k)];
  return out;
}

std::vector<FE> QuotientField::mul(const std::vector<FE>& a,
                                   const std::vector<FE>& b) const {
  FieldMatrix A(F, lift[0].rows(), lift[0].cols());
  FieldMatrix B = A;
  for (int k = 0; k < sdim; ++k) {
    if (!F.is_zero(a[size_t(k)])) A = A.add(lift[size_t(k)].scale(a[size_t(k)]));
    if (!F.is_zero(b[size_t(k)])) B = B.add(lift[size_t(k)].scale(b[size_t(k)]));
  }
  return coords(A.mul(B));
}

std::vector<FE> QuotientField::one() const {
  return coords(FieldMatrix::identity(F, lift[0].rows()));
}

bool QuotientField::is_zero(const std::vector<FE>& a) const {
  for (auto& x : a)
    if (!F.is_zero(x)) return false;
  return true;
}

std::vector<FE> QuotientField::inv(const std::vector<FE>& a) const {
  // solve (left multiplication by a) x = 1 inside the quotient
  FieldMatrix L(F, sdim, sdim);
  for (int j = 0; j < sdim; ++j) {
    std::vector<FE> ej(size_t(sdim), F.zero());
    ej[size_t(j)] = F.one();
    auto col = mul(a, ej);
    for (int i = 0; i < sdim; ++i) L.at(i, j) = col[size_t(i)];
  }
  FieldMatrix rhs(F, sdim, 1);
  auto e1 = one();
  for (int i = 0; i < sdim; ++i) rhs.at(i, 0) = e1[size_t(i)];
  auto res = rank_kernel_solve(L, &rhs);
  if (!res.solvable) throw InternalCheckError("quotient field: non-invertible element");
  std::vector<FE> out(size_t(sdim), F.zero());
  for (int i = 0; i < sdim; ++i) out[size_t(i)] = res.solution->at(i, 0);
  return out;
}

QuotientField make_end_quotient(const ConstantGroup& C, const KGModule& P) {
  const Field& F = P.F;
  auto E = hom_space(C, P, P);
  auto rad = algebra_radical(MatAlgebra{F, P.dim, E});

  QuotientField Q;
  Q.F = F;
  Q.rad = rad;
  int n2 = P.dim * P.dim;
  FieldMatrix big = rad.empty() ? flats_of(F, E, n2)
                                : hcat(flats_of(F, rad, n2), flats_of(F, E, n2));
  auto piv = pivot_columns(big);
  int off = int(rad.size());
  for (int c : piv)
    if (c >= off) Q.lift.push_back(E[size_t(c - off)]);
  Q.sdim = int(Q.lift.size());

  // field check: commutative and exactly one Frobenius-fixed line
  for (int i = 0; i < Q.sdim; ++i)
    for (int j = i + 1; j < Q.sdim; ++j) {
      std::vector<FE> ei(size_t(Q.sdim), F.zero()), ej(size_t(Q.sdim), F.zero());
      ei[size_t(i)] = F.one();
      ej[size_t(j)] = F.one();
      if (Q.mul(ei, ej) != Q.mul(ej, ei))
        throw std::runtime_error("P not indecomposable");
    }
  FieldMatrix Phi(F, Q.sdim, Q.sdim);
  for (int j = 0; j < Q.sdim; ++j) {
    auto c = Q.coords(Q.lift[size_t(j)].pow(F.q()));
    for (int i = 0; i < Q.sdim; ++i) Phi.at(i, j) = c[size_t(i)];
  }
  auto res = rank_kernel_solve(Phi.sub(FieldMatrix::identity(F, Q.sdim)));
  if (res.kernel.cols() != 1) throw std::runtime_error("P not indecomposable");
  return Q;
}

// ------------------------------------------------------------ peeling

namespace {

struct PeelCtx {
  const ConstantGroup* C;
  std::vector<Peeled> parts;
  bool complete = true;
};

// conjugated module rho'(g) = U^{-1} rho(g) U
KGModule conjugated(const KGModule& M, const FieldMatrix& U, const FieldMatrix& Uinv) {
  KGModule R{M.F, M.dim, {}};
  for (const auto& A : M.action) R.action.push_back(Uinv.mul(A).mul(U));
  return R;
}

KGModule block_of(const KGModule& M, int lo, int hi) {
  KGModule R{M.F, hi - lo, {}};
  for (const auto& A : M.action) {
    FieldMatrix B(M.F, hi - lo, hi - lo);
    for (int i = lo; i < hi; ++i)
      for (int j = lo; j < hi; ++j) B.at(i - lo, j - lo) = A.at(i, j);
    R.action.push_back(std::move(B));
  }
  return R;
}

bool off_blocks_zero(const KGModule& M, int k) {
  for (const auto& A : M.action) {
    for (int i = 0; i < k; ++i)
      for (int j = k; j < M.dim; ++j)
        if (!M.F.is_zero(A.at(i, j))) return false;
    for (int i = k; i < M.dim; ++i)
      for (int j = 0; j < k; ++j)
        if (!M.F.is_zero(A.at(i, j))) return false;
  }
  return true;
}

void peel_rec(PeelCtx& ctx, const KGModule& M, const FieldMatrix& incl,
              const FieldMatrix& proj) {
  const Field& F = M.F;
  if (M.dim == 0) return;
  if (M.dim == 1) {
    ctx.parts.push_back(Peeled{M, incl, proj});
    return;
  }
  auto E = hom_space(*ctx.C, M, M);

  // candidate endomorphisms whose stable kernel/image split M
  std::vector<FieldMatrix> cand;
  for (const auto& f : E) cand.push_back(f);
  for (size_t i = 0; i < E.size(); ++i)
    for (size_t j = i + 1; j < E.size(); ++j) cand.push_back(E[i].add(E[j]));
  for (size_t i = 0; i < E.size(); ++i)
    for (size_t j = 0; j < E.size(); ++j) cand.push_back(E[i].mul(E[j]));
  FieldMatrix I = FieldMatrix::identity(F, M.dim);
  for (const auto& f : E)
    for (auto lam : F.all_elements()) {
      if (F.is_zero(lam)) continue;
      cand.push_back(f.add(I.scale(lam)));
      if (cand.size() > 4096) break;
    }

  unsigned s = 0;
  while ((1u << s) < unsigned(M.dim)) ++s;
  for (const auto& f : cand) {
    FieldMatrix fN = f.pow(1ull << s);  // stabilized Fitting power
    int r = rank_of(fN);
    if (r == 0 || r == M.dim) continue;
    auto ker = rank_kernel_solve(fN).kernel;
    FieldMatrix im = column_space(fN);
    FieldMatrix U = hcat(ker, im);
    auto Uinv = inverse_of(U);
    if (!Uinv)
      throw InternalCheckError("peeling: stable kernel and image do not split");
    KGModule T = conjugated(M, U, *Uinv);
    int k = ker.cols();
    if (!off_blocks_zero(T, k))
      throw InternalCheckError("peeling: Fitting blocks not invariant");

    FieldMatrix U1(F, M.dim, k), U2(F, M.dim, M.dim - k);
    for (int i = 0; i < M.dim; ++i) {
      for (int j = 0; j < k; ++j) U1.at(i, j) = U.at(i, j);
      for (int j = k; j < M.dim; ++j) U2.at(i, j - k) = U.at(i, j);
    }
    FieldMatrix V1(F, k, M.dim), V2(F, M.dim - k, M.dim);
    for (int j = 0; j < M.dim; ++j) {
      for (int i = 0; i < k; ++i) V1.at(i, j) = Uinv->at(i, j);
      for (int i = k; i < M.dim; ++i) V2.at(i - k, j) = Uinv->at(i, j);
    }
    peel_rec(ctx, block_of(T, 0, k), incl.mul(U1), V1.mul(proj));
    peel_rec(ctx, block_of(T, k, M.dim), incl.mul(U2), V2.mul(proj));
    return;
  }

  // no split found: certify indecomposability via the End quotient
  try {
    make_end_quotient(*ctx.C, M);
  } catch (const std::runtime_error&) {
    ctx.complete = false;
  }
  ctx.parts.push_back(Peeled{M, incl, proj});
}

}  // namespace

PeelResult peel_with_maps(const ConstantGroup& C, const KGModule& M) {
  PeelCtx ctx;
  ctx.C = &C;
  FieldMatrix I = FieldMatrix::identity(M.F, M.dim);
  peel_rec(ctx, M, I, I);
  // verify the split maps: proj * incl = id on each part
  for (const auto& part : ctx.parts)
    if (!part.proj.mul(part.incl).is_identity())
      throw InternalCheckError("peeling: retraction check failed");
  return PeelResult{std::move(ctx.parts), ctx.complete};
}

// ---------------------------------------------------------- multiplicity

std::vector<int> independent_matrix_subset(const Field& F,
                                           const std::vector<FieldMatrix>& list) {
  return independent_subset(F, list);
}

QuotientRank rank_over_quotient_field(const QuotientField& E,
                                      std::vector<std::vector<std::vector<FE>>> B) {
  QuotientRank out;
  if (B.empty() || B[0].empty()) return out;
  const Field& F = E.F;
  int rows = int(B.size()), cols = int(B[0].size());
  std::vector<char> used(size_t(rows), 0);
  // take the multiplier by value: it aliases an entry of the row being changed
  auto row_axpy = [&](int dst, int src, std::vector<FE> c) {
    for (int j = 0; j < cols; ++j) {
      auto t = E.mul(c, B[size_t(src)][size_t(j)]);
      for (int k = 0; k < E.sdim; ++k)
        B[size_t(dst)][size_t(j)][size_t(k)] =
            F.sub(B[size_t(dst)][size_t(j)][size_t(k)], t[size_t(k)]);
    }
  };
  for (int c = 0; c < cols; ++c) {
    int pr = -1;
    for (int r = 0; r < rows; ++r)
      if (!used[size_t(r)] && !E.is_zero(B[size_t(r)][size_t(c)])) { pr = r; break; }
    if (pr < 0) continue;
    used[size_t(pr)] = 1;
    out.pivot_rows.push_back(pr);
    out.pivot_cols.push_back(c);
    ++out.rank;
    auto piv_inv = E.inv(B[size_t(pr)][size_t(c)]);
    for (int j = 0; j < cols; ++j)
      B[size_t(pr)][size_t(j)] = E.mul(piv_inv, B[size_t(pr)][size_t(j)]);
    for (int r = 0; r < rows; ++r) {
      if (r == pr || used[size_t(r)]) continue;
      if (E.is_zero(B[size_t(r)][size_t(c)])) continue;
      row_axpy(r, pr, B[size_t(r)][size_t(c)]);
    }
  }
  return out;
}

SplitPairs summand_split_pairs(const ConstantGroup& C, const KGModule& P,
                               const KGModule& M) {
  auto E = make_end_quotient(C, P);
  auto HPM = hom_space(C, P, M);
  auto HMP = hom_space(C, M, P);
  SplitPairs out;
  if (HPM.empty() || HMP.empty()) return out;
  std::vector<std::vector<std::vector<FE>>> B(
      HMP.size(), std::vector<std::vector<FE>>(HPM.size()));
  for (size_t t = 0; t < HMP.size(); ++t)
    for (size_t s = 0; s < HPM.size(); ++s)
      B[t][s] = E.coords(HMP[t].mul(HPM[s]));
  auto r = rank_over_quotient_field(E, std::move(B));
  out.multiplicity = r.rank;
  for (int i = 0; i < r.rank; ++i) {
    out.ins.push_back(HPM[size_t(r.pivot_cols[size_t(i)])]);
    out.outs.push_back(HMP[size_t(r.pivot_rows[size_t(i)])]);
  }
  return out;
}

int summand_multiplicity(const ConstantGroup& C, const KGModule& P,
                         const KGModule& M) {
  return summand_split_pairs(C, P, M).multiplicity;
}

bool indecomposable_iso(const ConstantGroup& C, const KGModule& M, const KGModule& N) {
  if (M.dim != N.dim) return false;
  return summand_multiplicity(C, M, N) >= 1;
}

// ------------------------------------------------- simples and covers

std::vector<SimpleProjectiveDatum> simples_and_projective_covers(const ConstantGroup& C) {
  const Field& F = C.F;
  KGModule R = regular_module(C);
  auto pr = peel_with_maps(C, R);
  if (!pr.complete)
    throw ResourceCapError(
        "decomposition incomplete: a regular-module summand could not be certified "
        "indecomposable");

  // group into isomorphism classes
  std::vector<std::vector<int>> classes;
  for (size_t i = 0; i < pr.parts.size(); ++i) {
    bool placed = false;
    for (auto& cl : classes)
      if (indecomposable_iso(C, pr.parts[size_t(cl[0])].mod, pr.parts[i].mod)) {
        cl.push_back(int(i));
        placed = true;
        break;
      }
    if (!placed) classes.push_back({int(i)});
  }

  auto radcols = group_algebra_radical(C);

  std::vector<SimpleProjectiveDatum> data;
  for (const auto& cl : classes) {
    const Peeled& rep = pr.parts[size_t(cl[0])];
    const KGModule& P = rep.mod;

    // rad(kG) . P: columns of the images of radical elements
    std::vector<FieldMatrix> elem_act;
    for (int h = 0; h < int(C.order()); ++h)
      elem_act.push_back(element_action(P, C, h));
    FieldMatrix cols(F, P.dim, 0);
    for (const auto& z : radcols) {
      FieldMatrix act(F, P.dim, P.dim);
      for (int h = 0; h < int(C.order()); ++h)
        if (!F.is_zero(z.at(h, 0))) act = act.add(elem_act[size_t(h)].scale(z.at(h, 0)));
      cols = cols.cols() ? hcat(cols, act) : act;
    }
    FieldMatrix radP = cols.cols() ? column_space(cols) : FieldMatrix(F, P.dim, 0);
    int rP = radP.cols();

    // complete to a basis with standard vectors, quotient action = lower block
    FieldMatrix U(F, P.dim, P.dim);
    if (rP) {
      FieldMatrix big = hcat(radP, FieldMatrix::identity(F, P.dim));
      auto piv = pivot_columns(big);
      if (int(piv.size()) != P.dim)
        throw InternalCheckError("radical subspace completion failed");
      for (int j = 0; j < P.dim; ++j) {
        int c = piv[size_t(j)];
        for (int i = 0; i < P.dim; ++i)
          U.at(i, j) = c < rP ? radP.at(i, c) : (i == c - rP ? F.one() : F.zero());
      }
    } else {
      U = FieldMatrix::identity(F, P.dim);
    }
    auto Uinv = inverse_of(U);
    if (!Uinv) throw InternalCheckError("radical subspace completion not invertible");

    KGModule V{F, P.dim - rP, {}};
    for (const auto& A : P.action) {
      FieldMatrix T = Uinv->mul(A).mul(U);
      for (int i = rP; i < P.dim; ++i)
        for (int j = 0; j < rP; ++j)
          if (!F.is_zero(T.at(i, j)))
            throw InternalCheckError("radical subspace not invariant");
      FieldMatrix B(F, V.dim, V.dim);
      for (int i = rP; i < P.dim; ++i)
        for (int j = rP; j < P.dim; ++j) B.at(i - rP, j - rP) = T.at(i, j);
      V.action.push_back(std::move(B));
    }

    SimpleProjectiveDatum d;
    d.simple = V;
    d.projective_cover = P;
    d.end_dim = int(hom_space(C, V, V).size());
    d.mult_in_regular = int(cl.size());
    d.incl = rep.incl;
    d.proj = rep.proj;
    data.push_back(std::move(d));
  }

  // consistency: dim Hom(P_i, V_j) = delta_ij * end_dim_j, and dims add up
  long long total = 0;
  for (const auto& d : data) total += (long long)d.mult_in_regular * d.projective_cover.dim;
  if (total != C.order())
    throw InternalCheckError("projective covers do not fill the regular module");
  for (size_t i = 0; i < data.size(); ++i)
    for (size_t j = 0; j < data.size(); ++j) {
      int h = int(hom_space(C, data[i].projective_cover, data[j].simple).size());
      int expect = (i == j) ? data[j].end_dim : 0;
      if (h != expect)
        throw InternalCheckError("cover-to-simple hom dimension check failed");
    }

  // canonical order and labels: trivial first, then by simple dim, cover dim
  auto is_trivial = [&](const KGModule& V) {
    if (V.dim != 1) return false;
    for (const auto& A : V.action)
      if (!A.is_identity()) return false;
    return true;
  };
  std::stable_sort(data.begin(), data.end(),
                   [&](const SimpleProjectiveDatum& a, const SimpleProjectiveDatum& b) {
                     int ta = is_trivial(a.simple) ? 0 : 1;
                     int tb = is_trivial(b.simple) ? 0 : 1;
                     if (ta != tb) return ta < tb;
                     if (a.simple.dim != b.simple.dim) return a.simple.dim < b.simple.dim;
                     return a.projective_cover.dim < b.projective_cover.dim;
                   });
  int chi = 0;
  std::map<int, int> seen_dim;
  for (auto& d : data) {
    if (is_trivial(d.simple)) {
      d.label = "triv";
    } else if (d.simple.dim == 1) {
      if (C.order() == 2) {
        d.label = "sgn";
      } else {
        ++chi;
        d.label = "chi" + std::to_string(chi);
      }
    } else {
      int k = seen_dim[d.simple.dim]++;
      d.label = "V" + std::to_string(d.simple.dim);
      if (k) d.label += std::string(1, char('a' + k));
    }
  }
  return data;
}

// -------------------------------------------------------------- decompose

namespace {

// Isomorphism test that degrades to "no match" when the left module cannot be
// certified indecomposable (possible on incomplete peels).
bool safe_iso(const ConstantGroup& C, const KGModule& M, const KGModule& N) {
  try {
    return indecomposable_iso(C, M, N);
  } catch (const InternalCheckError&) {
    throw;
  } catch (const std::runtime_error& e) {
    if (std::string(e.what()) == "P not indecomposable") return false;
    throw;
  }
}

std::string match_label(const ConstantGroup& C, const KGModule& M,
                        const std::vector<std::pair<std::string, KGModule>>& refs,
                        const std::string& fallback) {
  for (const auto& r : refs)
    if (r.second.dim == M.dim && safe_iso(C, M, r.second)) return r.first;
  return fallback;
}

}  // namespace

Decomposition decompose_module(const ConstantGroup& C, const KGModule& M,
                               const std::vector<std::pair<std::string, KGModule>>& refs) {
  const Field& F = M.F;
  Decomposition out;
  if (M.dim == 0) {
    out.complete = true;
    return out;
  }

  long long n = C.order();
  bool semisimple = (n % F.p()) != 0;

  if (semisimple) {
    auto data = simples_and_projective_covers(C);
    long long check = 0;
    for (const auto& d : data) {
      int h = int(hom_space(C, d.simple, M).size());
      if (h % d.end_dim)
        throw InternalCheckError("semisimple multiplicity not divisible by End dim");
      int mult = h / d.end_dim;
      check += (long long)mult * d.simple.dim;
      if (mult)
        out.parts.push_back(DecompPart{
            match_label(C, d.simple, refs, d.label), d.simple, mult});
    }
    if (check != M.dim)
      throw InternalCheckError("semisimple decomposition does not fill the module");
    out.complete = true;
    return out;
  }

  // cyclic p-group: Jordan type of a generator determines everything
  bool ppower = true;
  {
    long long t = n;
    while (t % F.p() == 0) t /= F.p();
    ppower = (t == 1);
  }
  int cyc = -1;
  if (ppower) {
    for (int h = 0; h < int(n) && cyc < 0; ++h) {
      int ord = 1, cur = h;
      while (cur != C.identity_index) {
        cur = C.mul(cur, h);
        ++ord;
      }
      if (ord == int(n)) cyc = h;
    }
  }
  if (ppower && cyc >= 0) {
    FieldMatrix sig = element_action(M, C, cyc);
    FieldMatrix N = sig.sub(FieldMatrix::identity(F, M.dim));
    std::vector<int> r{M.dim};
    FieldMatrix Nk = N;
    while (true) {
      int rk = rank_of(Nk);
      r.push_back(rk);
      if (rk == 0) break;
      Nk = Nk.mul(N);
    }
    auto rank_at = [&](size_t k) { return k < r.size() ? r[k] : 0; };
    // discrete logs of the generators with respect to the chosen cycle
    std::vector<int> logs;
    for (int g : C.gen_index) {
      int t = 0, cur = C.identity_index;
      while (cur != g) {
        cur = C.mul(cur, cyc);
        ++t;
        if (t > int(n)) throw InternalCheckError("generator outside cyclic group");
      }
      logs.push_back(t);
    }
    long long check = 0;
    for (size_t k = 1; k < r.size(); ++k) {
      int b = rank_at(k - 1) - 2 * rank_at(k) + rank_at(k + 1);
      if (b < 0) throw InternalCheckError("negative Jordan block count");
      if (!b) continue;
      check += (long long)k * b;
      FieldMatrix J(F, int(k), int(k));
      for (int i = 0; i < int(k); ++i) {
        J.at(i, i) = F.one();
        if (i + 1 < int(k)) J.at(i, i + 1) = F.one();
      }
      KGModule Jk{F, int(k), {}};
      for (int t : logs) Jk.action.push_back(J.pow(unsigned(t)));
      out.parts.push_back(DecompPart{
          match_label(C, Jk, refs, "J" + std::to_string(k)), Jk, b});
    }
    if (check != M.dim) throw InternalCheckError("Jordan type does not fill the module");
    out.complete = true;
    return out;
  }

  // general case: best-effort peeling
  auto pr = peel_with_maps(C, M);
  out.complete = pr.complete;
  if (!pr.complete) out.note = "decomposition incomplete";
  std::vector<std::pair<KGModule, int>> classes;
  for (const auto& part : pr.parts) {
    bool placed = false;
    for (auto& cl : classes)
      if (cl.first.dim == part.mod.dim && safe_iso(C, cl.first, part.mod)) {
        ++cl.second;
        placed = true;
        break;
      }
    if (!placed) classes.push_back({part.mod, 1});
  }
  int anon = 0;
  for (auto& cl : classes) {
    ++anon;
    std::string fb = "X" + std::to_string(cl.first.dim) + "_" + std::to_string(anon);
    out.parts.push_back(DecompPart{match_label(C, cl.first, refs, fb), cl.first, cl.second});
  }
  return out;
}

}  // namespace frobsig
