#include "frobsig/invariants.hpp"

#include <utility>

#include "frobsig/errors.hpp"

namespace frobsig {
namespace {

bool zero_weight(const std::vector<long long>& w) {
  for (long long x : w)
    if (x != 0) return false;
  return true;
}

// Kernel of the stacked invariance conditions: (A_g - I) c = 0 for every
// generator action A_g, plus c_j = 0 on coordinates excluded by the mask.
FieldMatrix invariance_kernel(const Field& F, const std::vector<FieldMatrix>& action,
                              const std::vector<char>& keep, int N) {
  int excluded = 0;
  for (char k : keep)
    if (!k) ++excluded;
  int rows = int(action.size()) * N + excluded;
  if (rows == 0) return FieldMatrix::identity(F, N);
  auto A = FieldMatrix(F, rows, N);
  int r0 = 0;
  for (const auto& M : action) {
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        A.at(r0 + i, j) = i == j ? F.sub(M.at(i, j), F.one()) : M.at(i, j);
    r0 += N;
  }
  for (int j = 0; j < N; ++j)
    if (!keep[j]) A.at(r0++, j) = F.one();
  return rank_kernel_solve(A).kernel;
}

// Restriction of a degree slice to its zero-weight monomials as a module
// over the constant group.  The constant action must preserve the weight
// decomposition (descriptor validation enforces commuting factors); any
// leakage out of the slice is an internal bug.
struct ZeroWeightSlice {
  std::vector<Exponent> basis;
  KGModule mod;
};

ZeroWeightSlice zero_weight_slice(const Field& F, const GradedPiece& P) {
  std::vector<int> pick;
  for (int j = 0; j < int(P.basis.size()); ++j)
    if (P.weights.empty() || zero_weight(P.weights[j])) pick.push_back(j);
  ZeroWeightSlice S;
  S.mod.F = F;
  S.mod.dim = int(pick.size());
  for (int j : pick) S.basis.push_back(P.basis[j]);
  std::vector<char> inside(P.basis.size(), 0);
  for (int j : pick) inside[size_t(j)] = 1;
  for (const auto& A : P.action) {
    auto R = FieldMatrix(F, S.mod.dim, S.mod.dim);
    for (int b = 0; b < S.mod.dim; ++b) {
      for (int i = 0; i < int(P.basis.size()); ++i) {
        FE c = A.at(i, pick[size_t(b)]);
        if (c == F.zero()) continue;
        if (!inside[size_t(i)])
          throw InternalCheckError(
              "zero_weight_slice: constant action leaves the weight class");
      }
      for (int a = 0; a < S.mod.dim; ++a)
        R.at(a, b) = A.at(pick[size_t(a)], pick[size_t(b)]);
    }
    S.mod.action.push_back(std::move(R));
  }
  return S;
}

}  // namespace

std::vector<Polynomial> invariant_basis(const GroupSchemeDescriptor& D,
                                        const ConstantGroup& C, int n) {
  (void)C;  // invariance under the generators already implies it groupwide
  const Field& F = D.F;
  GradedPiece P = degree_module(F, D.dimension, D.constant_generators, D.diag, n);
  int N = int(P.basis.size());
  std::vector<char> keep(size_t(N), 1);
  if (!P.weights.empty())
    for (int j = 0; j < N; ++j) keep[size_t(j)] = zero_weight(P.weights[j]) ? 1 : 0;
  FieldMatrix K = invariance_kernel(F, P.action, keep, N);
  std::vector<Polynomial> out;
  for (int c = 0; c < K.cols(); ++c) {
    Polynomial f;
    for (int j = 0; j < N; ++j)
      if (!(K.at(j, c) == F.zero())) f.terms[P.basis[j]] = K.at(j, c);
    out.push_back(std::move(f));
  }
  return out;
}

Polynomial reynolds(const GroupSchemeDescriptor& D, const ConstantGroup& C,
                    const Polynomial& f) {
  if (!is_linearly_reductive(D, C)) throw ConfigError("not linearly reductive");
  const Field& F = D.F;
  Polynomial acc = Polynomial::zero();
  for (const auto& g : C.elements) acc = poly_add(F, acc, act_on_polynomial(F, g, f));
  acc = poly_scale(F, acc, F.inv(F.from_int(C.order())));
  if (!D.has_diag()) return acc;
  Polynomial out;
  for (const auto& [e, c] : acc.terms)
    if (zero_weight(monomial_weight(D.diag, e))) out.terms[e] = c;
  return out;
}

InvariantRingData generators_up_to(const GroupSchemeDescriptor& D,
                                   const ConstantGroup& C, int degree_bound) {
  const Field& F = D.F;
  InvariantRingData R;
  R.degree_bound = degree_bound;
  R.note = "generation beyond the degree bound is not certified";
  R.hilbert.assign(size_t(degree_bound) + 1, 0);
  R.hilbert[0] = 1;
  // Degree-n piece of the generated subalgebra.  Once degree n has been
  // processed it equals the full invariant space (S_n)^G, so the lower
  // pieces can be reused as the invariant bases themselves.
  std::vector<std::vector<Polynomial>> piece(size_t(degree_bound) + 1);
  piece[0] = {Polynomial::constant(F, F.one())};
  for (int n = 1; n <= degree_bound; ++n) {
    std::vector<Polynomial> inv = invariant_basis(D, C, n);
    R.hilbert[size_t(n)] = int(inv.size());
    std::vector<Polynomial> products;
    for (const auto& g : R.generators)
      for (const auto& h : piece[size_t(n - g.degree)])
        products.push_back(poly_mul(F, g.poly, h));
    std::vector<Exponent> mons = monomials_of_degree(D.dimension, n);
    int N = int(mons.size());
    auto M = FieldMatrix(F, N, int(products.size() + inv.size()));
    for (int c = 0; c < int(products.size()); ++c) {
      FieldMatrix col = poly_coords(F, products[size_t(c)], mons);
      for (int i = 0; i < N; ++i) M.at(i, c) = col.at(i, 0);
    }
    for (int c = 0; c < int(inv.size()); ++c) {
      FieldMatrix col = poly_coords(F, inv[size_t(c)], mons);
      for (int i = 0; i < N; ++i) M.at(i, int(products.size()) + c) = col.at(i, 0);
    }
    for (int pc : pivot_columns(M))
      if (pc >= int(products.size()))
        R.generators.push_back({n, inv[size_t(pc) - products.size()]});
    piece[size_t(n)] = std::move(inv);
  }
  return R;
}

HilbertCompareReport hilbert_function_compare(const GroupSchemeDescriptor& D,
                                              const ConstantGroup& C, int n_max) {
  const Field& F = D.F;
  HilbertCompareReport rep;
  std::vector<SimpleProjectiveDatum> data = simples_and_projective_covers(C);
  std::vector<KGModule> duals;
  for (const auto& d : data) {
    rep.labels.push_back(d.label);
    rep.simple_dims.push_back(d.simple.dim);
    rep.end_dims.push_back(d.end_dim);
    duals.push_back(dual_module(d.projective_cover, C));
  }
  for (int n = 0; n <= n_max; ++n) {
    GradedPiece P = degree_module(F, D.dimension, D.constant_generators, D.diag, n);
    ZeroWeightSlice B = zero_weight_slice(F, P);
    HilbertCompareRow row;
    row.degree = n;
    row.slice_dim = B.mod.dim;
    long long weighted = 0;
    bool ok = true;
    for (size_t i = 0; i < data.size(); ++i) {
      int hom = int(hom_space(C, data[i].projective_cover, B.mod).size());
      // Independent path: invariants of P_i^dual tensor B_n by kernel solve.
      std::vector<FieldMatrix> taction;
      for (size_t g = 0; g < C.gen_index.size(); ++g)
        taction.push_back(duals[i].action[g].kron(B.mod.action[g]));
      int tdim = duals[i].dim * B.mod.dim;
      std::vector<char> keep(size_t(tdim), 1);
      int tinv = invariance_kernel(F, taction, keep, tdim).cols();
      row.hom_dims.push_back(hom);
      row.tensor_invariant_dims.push_back(tinv);
      if (hom != tinv || hom % data[i].end_dim != 0) ok = false;
      weighted += (long long)data[i].simple.dim * hom / data[i].end_dim;
    }
    row.agree = ok && weighted == row.slice_dim;
    rep.all_agree = rep.all_agree && row.agree;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace frobsig
