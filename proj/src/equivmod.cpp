#include "frobsig/equivmod.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <utility>

#include "frobsig/errors.hpp"

namespace frobsig {
namespace {

// Dense action matrices make pushforward cost quadratic in the rank; this cap
// keeps a single module comfortably inside desk-scale memory.
constexpr long long kPushforwardRankCap = 4000;

Exponent padded(const Exponent& e, int d) {
  Exponent out = e;
  if (int(out.size()) < d) out.resize(size_t(d), 0);
  return out;
}

Exponent zero_exponent(int d) { return Exponent(size_t(d), 0); }

// Inverse of a modulo n; gcd(a, n) > 1 means the diagonalizable part has a
// p-part and the weight transform is undefined.
long long inv_mod_or_throw(long long a, long long n) {
  if (n == 1) return 0;
  long long t = 0, nt = 1, r = n, nr = ((a % n) + n) % n;
  while (nr != 0) {
    long long q = r / nr;
    long long tmp = t - q * nt;
    t = nt;
    nt = tmp;
    tmp = r - q * nr;
    r = nr;
    nr = tmp;
  }
  if (r != 1) throw ConfigError("non-etale group scheme");
  return ((t % n) + n) % n;
}

// Normalizes a generator weight row to one reduced entry per factor (empty
// rows mean the zero character).
std::vector<long long> reduce_weight(const DiagPart& diag, std::vector<long long> w) {
  if (w.empty()) w.assign(size_t(diag.factors()), 0);
  if (int(w.size()) != diag.factors())
    throw InternalCheckError("weight row length does not match the factor count");
  for (int l = 0; l < diag.factors(); ++l) {
    long long n = diag.orders[size_t(l)];
    w[size_t(l)] = ((w[size_t(l)] % n) + n) % n;
  }
  return w;
}

std::vector<long long> negate_weight(const DiagPart& diag, const std::vector<long long>& w) {
  auto r = reduce_weight(diag, w);
  for (int l = 0; l < diag.factors(); ++l) {
    long long n = diag.orders[size_t(l)];
    r[size_t(l)] = (n - r[size_t(l)]) % n;
  }
  return r;
}

FE constant_coeff(const Field& F, const Polynomial& a) {
  for (const auto& [e, c] : a.terms)
    if (total_degree(e) == 0) return c;
  return F.zero();
}

PolyMatrix acted_polymatrix(const Field& F, const FieldMatrix& g_vars, const PolyMatrix& A) {
  PolyMatrix out(A.size());
  for (size_t i = 0; i < A.size(); ++i) {
    out[i].resize(A[i].size());
    for (size_t j = 0; j < A[i].size(); ++j)
      out[i][j] = act_on_polynomial(F, g_vars, A[i][j]);
  }
  return out;
}

bool polymatrix_equal(const PolyMatrix& A, const PolyMatrix& B) {
  if (A.size() != B.size()) return false;
  for (size_t i = 0; i < A.size(); ++i) {
    if (A[i].size() != B[i].size()) return false;
    for (size_t j = 0; j < A[i].size(); ++j)
      if (!poly_equal(A[i][j], B[i][j])) return false;
  }
  return true;
}

// Left-multiplication of a polynomial matrix by a scalar matrix.
PolyMatrix constmat_polymul(const Field& F, const FieldMatrix& S, const PolyMatrix& A) {
  PolyMatrix out(size_t(S.rows()), std::vector<Polynomial>(A.empty() ? 0 : A[0].size()));
  for (int i = 0; i < S.rows(); ++i)
    for (size_t k = 0; k < A.size(); ++k) {
      FE c = S.at(i, int(k));
      if (F.is_zero(c)) continue;
      for (size_t j = 0; j < A[k].size(); ++j)
        out[size_t(i)][j] = poly_add(F, out[size_t(i)][j], poly_scale(F, A[k][j], c));
    }
  return out;
}

void check_module_group_sizes(const GradedEquivariantModule& M, const ConstantGroup& C,
                              const std::vector<FieldMatrix>& varmats) {
  if (M.action.size() != C.gen_index.size() || varmats.size() != M.action.size())
    throw InternalCheckError("module action count does not match the group presentation");
}

}  // namespace

PolyMatrix identity_polymatrix(const Field& F, int n) {
  auto I = PolyMatrix(size_t(n), std::vector<Polynomial>(size_t(n)));
  for (int i = 0; i < n; ++i) I[size_t(i)][size_t(i)] = Polynomial::constant(F, F.one());
  return I;
}

PolyMatrix polymatrix_mul(const Field& F, const PolyMatrix& A, const PolyMatrix& B) {
  size_t n = A.size();
  size_t m = A.empty() ? 0 : A[0].size();
  size_t k = B.empty() ? 0 : B[0].size();
  if (B.size() != m) throw InternalCheckError("polynomial matrix shape mismatch");
  PolyMatrix R(n, std::vector<Polynomial>(k));
  for (size_t i = 0; i < n; ++i)
    for (size_t t = 0; t < m; ++t) {
      if (A[i][t].is_zero()) continue;
      for (size_t j = 0; j < k; ++j) {
        if (B[t][j].is_zero()) continue;
        R[i][j] = poly_add(F, R[i][j], poly_mul(F, A[i][t], B[t][j]));
      }
    }
  return R;
}

PolyMatrix compose_action(const Field& F, const PolyMatrix& Ag,
                          const FieldMatrix& g_vars, const PolyMatrix& Ah) {
  return polymatrix_mul(F, Ag, acted_polymatrix(F, g_vars, Ah));
}

PolyMatrix action_of_element(const GradedEquivariantModule& M, const ConstantGroup& C,
                             const std::vector<FieldMatrix>& varmats, int element) {
  check_module_group_sizes(M, C, varmats);
  const auto& word = C.words.at(size_t(element));
  if (word.empty()) return identity_polymatrix(M.F, M.rank());
  PolyMatrix A = M.action.at(size_t(word[0]));
  FieldMatrix V = varmats.at(size_t(word[0]));
  for (size_t k = 1; k < word.size(); ++k) {
    A = compose_action(M.F, A, V, M.action.at(size_t(word[k])));
    V = V.mul(varmats.at(size_t(word[k])));
  }
  return A;
}

GradedEquivariantModule ring_module(const Field& F, int dimension, int n_constant_gens,
                                    int n_diag_factors) {
  GradedEquivariantModule M;
  M.F = F;
  M.dimension = dimension;
  M.gen_degree = {Rational(0)};
  M.gen_weight = {std::vector<long long>(size_t(n_diag_factors), 0)};
  M.action.assign(size_t(n_constant_gens), identity_polymatrix(F, 1));
  return M;
}

GradedEquivariantModule standard_module(const Field& F, int dimension, const KGModule& P,
                                        const Rational& degree,
                                        const std::vector<long long>& weight) {
  GradedEquivariantModule M;
  M.F = F;
  M.dimension = dimension;
  M.gen_degree.assign(size_t(P.dim), degree);
  M.gen_weight.assign(size_t(P.dim), weight);
  for (const auto& rho : P.action) {
    PolyMatrix A(size_t(P.dim), std::vector<Polynomial>(size_t(P.dim)));
    for (int i = 0; i < P.dim; ++i)
      for (int j = 0; j < P.dim; ++j)
        A[size_t(i)][size_t(j)] = Polynomial::constant(F, rho.at(i, j));
    M.action.push_back(std::move(A));
  }
  return M;
}

GradedEquivariantModule module_direct_sum(const GradedEquivariantModule& A,
                                          const GradedEquivariantModule& B) {
  if (A.dimension != B.dimension || A.action.size() != B.action.size())
    throw InternalCheckError("direct sum of incompatible modules");
  GradedEquivariantModule M;
  M.F = A.F;
  M.dimension = A.dimension;
  M.gen_degree = A.gen_degree;
  M.gen_degree.insert(M.gen_degree.end(), B.gen_degree.begin(), B.gen_degree.end());
  M.gen_weight = A.gen_weight;
  M.gen_weight.insert(M.gen_weight.end(), B.gen_weight.begin(), B.gen_weight.end());
  int na = A.rank(), nb = B.rank();
  for (size_t t = 0; t < A.action.size(); ++t) {
    PolyMatrix blk(size_t(na + nb), std::vector<Polynomial>(size_t(na + nb)));
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < na; ++j) blk[size_t(i)][size_t(j)] = A.action[t][size_t(i)][size_t(j)];
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j)
        blk[size_t(na + i)][size_t(na + j)] = B.action[t][size_t(i)][size_t(j)];
    M.action.push_back(std::move(blk));
  }
  return M;
}

GradedEquivariantModule dual_graded_module(const GradedEquivariantModule& M,
                                           const ConstantGroup& C,
                                           const std::vector<FieldMatrix>& varmats,
                                           const DiagPart& diag) {
  check_module_group_sizes(M, C, varmats);
  GradedEquivariantModule D;
  D.F = M.F;
  D.dimension = M.dimension;
  int n = M.rank();
  for (int j = 0; j < n; ++j) {
    D.gen_degree.push_back(-M.gen_degree[size_t(j)]);
    D.gen_weight.push_back(negate_weight(diag, M.gen_weight[size_t(j)]));
  }
  for (size_t t = 0; t < M.action.size(); ++t) {
    int ginv = C.inverse.at(size_t(C.gen_index.at(t)));
    PolyMatrix Ainv = action_of_element(M, C, varmats, ginv);
    auto B = PolyMatrix(size_t(n), std::vector<Polynomial>(size_t(n)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        B[size_t(i)][size_t(j)] =
            act_on_polynomial(M.F, varmats[t], Ainv[size_t(j)][size_t(i)]);
    D.action.push_back(std::move(B));
  }
  return D;
}

GradedEquivariantModule frobenius_pushforward(const GradedEquivariantModule& M,
                                              const GroupSchemeDescriptor& D,
                                              unsigned e) {
  if (e == 0) return M;
  const Field& F = M.F;
  int d = M.dimension;
  if (d != D.dimension || !F.same(D.F))
    throw InternalCheckError("pushforward: descriptor does not match the module");
  if (M.action.size() != D.constant_generators.size())
    throw InternalCheckError("pushforward: generator count mismatch");
  auto chk = [](long long v) {
    if (v > kPushforwardRankCap)
      throw ResourceCapError("pushforward rank exceeds the dense-representation cap");
    return v;
  };
  long long pe = 1;
  for (unsigned k = 0; k < e; ++k) pe = chk(pe * (long long)F.p());
  long long box = 1;
  for (int k = 0; k < d; ++k) box = chk(box * pe);
  long long nrank = chk(box * M.rank());

  const DiagPart& dg = D.diag;
  int nf = dg.factors();
  auto peinv = std::vector<long long>(size_t(nf));
  for (int l = 0; l < nf; ++l) peinv[size_t(l)] = inv_mod_or_throw(pe, dg.orders[size_t(l)]);

  // Box exponents in ascending lex order; the mixed-radix index with the
  // leftmost coordinate most significant recovers the position.
  std::vector<Exponent> boxes;
  boxes.reserve(size_t(box));
  Exponent r(size_t(d), 0);
  for (long long i = 0; i < box; ++i) {
    boxes.push_back(r);
    for (int k = d - 1; k >= 0; --k) {
      if (++r[size_t(k)] < int(pe)) break;
      r[size_t(k)] = 0;
    }
  }
  auto box_index = [&](const Exponent& b) {
    long long idx = 0;
    for (int k = 0; k < d; ++k) idx = idx * pe + b[size_t(k)];
    return idx;
  };

  GradedEquivariantModule N;
  N.F = F;
  N.dimension = d;
  N.gen_degree.reserve(size_t(nrank));
  N.gen_weight.reserve(size_t(nrank));
  for (int j = 0; j < M.rank(); ++j) {
    auto wj = reduce_weight(dg, M.gen_weight[size_t(j)]);
    for (const auto& rr : boxes) {
      N.gen_degree.push_back((M.gen_degree[size_t(j)] + Rational(total_degree(rr))) /
                             Rational(pe));
      std::vector<long long> w(size_t(nf), 0);
      for (int l = 0; l < nf; ++l) {
        long long n = dg.orders[size_t(l)];
        long long acc = wj[size_t(l)];
        for (int k = 0; k < d; ++k)
          acc += dg.weights[size_t(k)][size_t(l)] * rr[size_t(k)];
        w[size_t(l)] = (peinv[size_t(l)] * (acc % n)) % n;
      }
      N.gen_weight.push_back(std::move(w));
    }
  }

  for (size_t t = 0; t < M.action.size(); ++t) {
    const FieldMatrix& V = D.constant_generators[t];
    auto A = PolyMatrix(size_t(nrank), std::vector<Polynomial>(size_t(nrank)));
    for (long long bi = 0; bi < box; ++bi) {
      Polynomial pm =
          act_on_polynomial(F, V, Polynomial::monomial(F, boxes[size_t(bi)], F.one()));
      for (int j = 0; j < M.rank(); ++j) {
        long long col = (long long)j * box + bi;
        for (int i = 0; i < M.rank(); ++i) {
          const Polynomial& a = M.action[t][size_t(i)][size_t(j)];
          if (a.is_zero()) continue;
          Polynomial q = poly_mul(F, pm, a);
          for (const auto& [bexp, c] : q.terms) {
            Exponent b = padded(bexp, d);
            Exponent u(size_t(d), 0), r2(size_t(d), 0);
            for (int k = 0; k < d; ++k) {
              u[size_t(k)] = b[size_t(k)] / int(pe);
              r2[size_t(k)] = b[size_t(k)] % int(pe);
            }
            long long row = (long long)i * box + box_index(r2);
            A[size_t(row)][size_t(col)] =
                poly_add(F, A[size_t(row)][size_t(col)],
                         Polynomial::monomial(F, std::move(u), F.inv_frobenius(c, e)));
          }
        }
      }
    }
    N.action.push_back(std::move(A));
  }
  if ((long long)N.gen_degree.size() != nrank)
    throw InternalCheckError("pushforward generator count mismatch");
  return N;
}

// ------------------------------------------------------------------ slices

SliceModule slice_module(const GradedEquivariantModule& M,
                         const std::vector<FieldMatrix>& varmats, const DiagPart& diag,
                         const Rational& delta,
                         const std::vector<long long>* weight_filter,
                         long long slice_cap) {
  const Field& F = M.F;
  int d = M.dimension;
  SliceModule S;
  S.basis.degree = delta;
  std::vector<long long> filt;
  if (weight_filter) filt = reduce_weight(diag, *weight_filter);
  std::map<std::pair<int, Exponent>, int> index;
  for (int j = 0; j < M.rank(); ++j) {
    Rational t = delta - M.gen_degree[size_t(j)];
    if (t < Rational(0) || !t.is_integer()) continue;
    auto wj = reduce_weight(diag, M.gen_weight[size_t(j)]);
    for (const auto& mu : monomials_of_degree(d, int(t.as_integer()))) {
      if (weight_filter) {
        auto wm = monomial_weight(diag, mu);
        bool ok = true;
        for (int l = 0; l < diag.factors(); ++l)
          if ((wm[size_t(l)] + wj[size_t(l)]) % diag.orders[size_t(l)] != filt[size_t(l)]) {
            ok = false;
            break;
          }
        if (!ok) continue;
      }
      if ((long long)S.basis.elems.size() >= slice_cap)
        throw ResourceCapError("slice dimension exceeds cap");
      index[{j, mu}] = int(S.basis.elems.size());
      S.basis.elems.push_back({mu, j});
    }
  }
  int sd = S.basis.dim();
  S.mod.F = F;
  S.mod.dim = sd;
  for (size_t t = 0; t < M.action.size(); ++t) {
    FieldMatrix R(F, sd, sd);
    for (int cidx = 0; cidx < sd; ++cidx) {
      const auto& [mu, j] = S.basis.elems[size_t(cidx)];
      Polynomial pm = act_on_polynomial(F, varmats[t], Polynomial::monomial(F, mu, F.one()));
      for (int i = 0; i < M.rank(); ++i) {
        const Polynomial& a = M.action[t][size_t(i)][size_t(j)];
        if (a.is_zero()) continue;
        Polynomial q = poly_mul(F, pm, a);
        for (const auto& [nu, c] : q.terms) {
          auto it = index.find({i, padded(nu, d)});
          if (it == index.end())
            throw InternalCheckError("slice action escaped the slice basis");
          R.at(it->second, cidx) = F.add(R.at(it->second, cidx), c);
        }
      }
    }
    S.mod.action.push_back(std::move(R));
  }
  return S;
}

// --------------------------------------------------------------- hom spaces

std::vector<PolyMatrix> graded_hom(const GradedEquivariantModule& src,
                                   const GradedEquivariantModule& dst,
                                   const Rational& shift,
                                   const std::vector<FieldMatrix>& varmats,
                                   const DiagPart& diag, long long slot_cap) {
  const Field& F = src.F;
  if (src.dimension != dst.dimension || src.action.size() != dst.action.size())
    throw InternalCheckError("hom solver: incompatible modules");
  int d = src.dimension;
  bool use_w = diag.factors() > 0;
  struct Slot {
    int i, j;
    Exponent nu;
  };
  std::vector<Slot> slots;
  for (int j = 0; j < src.rank(); ++j) {
    auto wsrc = reduce_weight(diag, src.gen_weight[size_t(j)]);
    for (int i = 0; i < dst.rank(); ++i) {
      Rational t = src.gen_degree[size_t(j)] + shift - dst.gen_degree[size_t(i)];
      if (t < Rational(0) || !t.is_integer()) continue;
      auto wdst = reduce_weight(diag, dst.gen_weight[size_t(i)]);
      for (const auto& nu : monomials_of_degree(d, int(t.as_integer()))) {
        if (use_w) {
          auto wm = monomial_weight(diag, nu);
          bool ok = true;
          for (int l = 0; l < diag.factors(); ++l)
            if ((wm[size_t(l)] + wdst[size_t(l)]) % diag.orders[size_t(l)] !=
                wsrc[size_t(l)]) {
              ok = false;
              break;
            }
          if (!ok) continue;
        }
        if ((long long)slots.size() >= slot_cap)
          throw ResourceCapError("hom solver unknown count exceeds cap");
        slots.push_back({i, j, nu});
      }
    }
  }
  if (slots.empty()) return {};

  // Linear conditions: for every constant generator g, H A_g - A_g (g.H) = 0
  // entrywise; rows are indexed by occurring (generator, entry, monomial).
  std::map<std::tuple<size_t, int, int, Exponent>, int> rows;
  std::vector<std::map<int, FE>> col_entries(slots.size());
  auto add = [&](size_t g, int rr, int cc, const Exponent& e, size_t slot, FE v) {
    if (F.is_zero(v)) return;
    auto key = std::make_tuple(g, rr, cc, padded(e, d));
    auto [it, fresh] = rows.try_emplace(key, int(rows.size()));
    FE& cell = col_entries[slot][it->second];
    cell = F.add(cell, v);
    if (F.is_zero(cell)) col_entries[slot].erase(it->second);
  };
  for (size_t s = 0; s < slots.size(); ++s) {
    Polynomial mono = Polynomial::monomial(F, slots[s].nu, F.one());
    for (size_t g = 0; g < src.action.size(); ++g) {
      for (int l = 0; l < src.rank(); ++l) {
        const Polynomial& a = src.action[g][size_t(slots[s].j)][size_t(l)];
        if (a.is_zero()) continue;
        Polynomial q = poly_mul(F, mono, a);
        for (const auto& [e, c] : q.terms) add(g, slots[s].i, l, e, s, c);
      }
      Polynomial gm = act_on_polynomial(F, varmats[g], mono);
      for (int k = 0; k < dst.rank(); ++k) {
        const Polynomial& a = dst.action[g][size_t(k)][size_t(slots[s].i)];
        if (a.is_zero()) continue;
        Polynomial q = poly_mul(F, gm, a);
        for (const auto& [e, c] : q.terms) add(g, k, slots[s].j, e, s, F.neg(c));
      }
    }
  }
  FieldMatrix A(F, std::max<int>(int(rows.size()), 1), int(slots.size()));
  for (size_t s = 0; s < slots.size(); ++s)
    for (const auto& [rr, v] : col_entries[s]) A.at(rr, int(s)) = v;
  FieldMatrix ker = rank_kernel_solve(A).kernel;
  std::vector<PolyMatrix> out;
  for (int b = 0; b < ker.cols(); ++b) {
    PolyMatrix H(size_t(dst.rank()), std::vector<Polynomial>(size_t(src.rank())));
    for (size_t s = 0; s < slots.size(); ++s) {
      FE c = ker.at(int(s), b);
      if (F.is_zero(c)) continue;
      auto& cell = H[size_t(slots[s].i)][size_t(slots[s].j)];
      cell = poly_add(F, cell, Polynomial::monomial(F, slots[s].nu, c));
    }
    out.push_back(std::move(H));
  }
  return out;
}

bool map_invertible(const GradedEquivariantModule& src, const GradedEquivariantModule& dst,
                    const PolyMatrix& H) {
  int n = src.rank();
  if (dst.rank() != n || int(H.size()) != n) return false;
  for (const auto& row : H)
    if (int(row.size()) != n) return false;
  const Field& F = dst.F;
  // Graded Nakayama: a degree-zero map of free graded modules is invertible
  // exactly when its scalar part modulo the variables is.
  FieldMatrix N(F, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) N.at(i, j) = constant_coeff(F, H[size_t(i)][size_t(j)]);
  return rank_of(N) == n;
}

// ------------------------------------------------------- summand counting

namespace {

// Basis of Hom over the constant group from P into a slice representation,
// using the cheapest valid route: a one-dimensional P is an eigenvector
// condition, a split summand of the regular module restricts the filtered
// maps kG -> W (spanning because the inclusion splits), anything else goes
// through the generic equivariance solver.
std::vector<FieldMatrix> hom_into(const ConstantGroup& C, const KGModule& P,
                                  const std::optional<FieldMatrix>& incl,
                                  const KGModule& W) {
  const Field& F = P.F;
  int ng = int(P.action.size());
  std::vector<FieldMatrix> maps;
  if (W.dim == 0) return maps;
  if (ng == 0) {
    for (int i = 0; i < W.dim; ++i)
      for (int j = 0; j < P.dim; ++j) {
        FieldMatrix X(F, W.dim, P.dim);
        X.at(i, j) = F.one();
        maps.push_back(std::move(X));
      }
    return maps;
  }
  if (P.dim == 1) {
    FieldMatrix stack(F, 0, 0);
    for (int t = 0; t < ng; ++t) {
      FE chi = P.action[size_t(t)].at(0, 0);
      FieldMatrix blk =
          W.action[size_t(t)].sub(FieldMatrix::identity(F, W.dim).scale(chi));
      stack = (t == 0) ? blk : vcat(stack, blk);
    }
    FieldMatrix ker = rank_kernel_solve(stack).kernel;
    for (int c = 0; c < ker.cols(); ++c) {
      FieldMatrix X(F, W.dim, 1);
      for (int i = 0; i < W.dim; ++i) X.at(i, 0) = ker.at(i, c);
      maps.push_back(std::move(X));
    }
  } else if (incl) {
    if (incl->rows() != int(C.order()) || incl->cols() != P.dim)
      throw InternalCheckError("summand inclusion has the wrong shape");
    std::vector<FieldMatrix> rho;
    rho.reserve(size_t(C.order()));
    for (int h = 0; h < int(C.order()); ++h) rho.push_back(element_action(W, C, h));
    // T_b = sum_h incl[h][b] rho(h); the map sending w to the matrix with
    // columns T_b w runs over all of Hom as w runs over W.
    std::vector<FieldMatrix> T;
    for (int b = 0; b < P.dim; ++b) {
      FieldMatrix Tb(F, W.dim, W.dim);
      for (int h = 0; h < int(C.order()); ++h) {
        FE c = incl->at(h, b);
        if (!F.is_zero(c)) Tb = Tb.add(rho[size_t(h)].scale(c));
      }
      T.push_back(std::move(Tb));
    }
    std::vector<FieldMatrix> cand;
    cand.reserve(size_t(W.dim));
    for (int w = 0; w < W.dim; ++w) {
      FieldMatrix X(F, W.dim, P.dim);
      for (int b = 0; b < P.dim; ++b)
        for (int i = 0; i < W.dim; ++i) X.at(i, b) = T[size_t(b)].at(i, w);
      cand.push_back(std::move(X));
    }
    if (incl->rows() == incl->cols() && incl->is_identity()) {
      maps = std::move(cand);
    } else {
      for (int idx : independent_matrix_subset(F, cand))
        maps.push_back(cand[size_t(idx)]);
    }
  } else {
    maps = hom_space(C, P, W);
  }
  // Equivariance is structural for every route; spot-check it anyway (all
  // maps on small spaces, a sample on large ones).
  size_t check_n = (size_t(W.dim) * size_t(P.dim) <= 4096)
                       ? maps.size()
                       : std::min<size_t>(maps.size(), 2);
  for (size_t m = 0; m < check_n; ++m)
    for (int t = 0; t < ng; ++t)
      if (!maps[m].mul(P.action[size_t(t)]).equals(W.action[size_t(t)].mul(maps[m])))
        throw InternalCheckError("hom-space element is not equivariant");
  return maps;
}

struct PairingContext {
  QuotientField E;
  KGModule Pd;
  std::optional<FieldMatrix> incl_d;
  GradedEquivariantModule Mdual;
  std::vector<long long> chi, chineg;
  bool use_weights = false;
};

PairingContext make_context(const GradedEquivariantModule& M, const ConstantGroup& C,
                            const std::vector<FieldMatrix>& varmats, const DiagPart& diag,
                            const SummandQuery& query) {
  check_module_group_sizes(M, C, varmats);
  if (query.incl.has_value() != query.proj.has_value())
    throw InternalCheckError("inclusion and retraction must come together");
  if (query.incl && !query.proj->mul(*query.incl).is_identity())
    throw InternalCheckError("retraction does not split the inclusion");
  PairingContext ctx{make_end_quotient(C, query.P),
                     dual_module(query.P, C),
                     std::nullopt,
                     dual_graded_module(M, C, varmats, diag),
                     reduce_weight(diag, query.weight),
                     negate_weight(diag, query.weight),
                     diag.factors() > 0};
  if (query.incl) ctx.incl_d = query.proj->transpose();
  return ctx;
}

struct ShiftWork {
  Rational delta;
  std::vector<int> J;                   // generators of M sitting exactly at delta
  SliceModule primal, dual;
  std::vector<int> pos_primal, pos_dual;  // slice positions of those generators
  std::vector<FieldMatrix> homP, homPd;
};

int slice_position(const SliceBasis& basis, const Exponent& z, int j) {
  for (size_t i = 0; i < basis.elems.size(); ++i)
    if (basis.elems[i].second == j && basis.elems[i].first == z) return int(i);
  throw InternalCheckError("generator position missing from its own slice");
}

ShiftWork build_shift(const GradedEquivariantModule& M, const ConstantGroup& C,
                      const std::vector<FieldMatrix>& varmats, const DiagPart& diag,
                      const SummandQuery& query, const PairingContext& ctx,
                      const Rational& delta, long long slice_cap) {
  ShiftWork w;
  w.delta = delta;
  for (int j = 0; j < M.rank(); ++j)
    if (M.gen_degree[size_t(j)] == delta &&
        (!ctx.use_weights || reduce_weight(diag, M.gen_weight[size_t(j)]) == ctx.chi))
      w.J.push_back(j);
  w.primal = slice_module(M, varmats, diag, delta,
                          ctx.use_weights ? &ctx.chi : nullptr, slice_cap);
  w.dual = slice_module(ctx.Mdual, varmats, diag, -delta,
                        ctx.use_weights ? &ctx.chineg : nullptr, slice_cap);
  Exponent z = zero_exponent(M.dimension);
  for (int j : w.J) {
    w.pos_primal.push_back(slice_position(w.primal.basis, z, j));
    w.pos_dual.push_back(slice_position(w.dual.basis, z, j));
  }
  w.homP = hom_into(C, query.P, query.incl, w.primal.mod);
  w.homPd = hom_into(C, ctx.Pd, ctx.incl_d, w.dual.mod);
  return w;
}

// Composite endomorphism of P realized by the pair (map into the slice of M,
// map into the slice of the dual): only the zero-exponent coordinates at the
// generators sitting exactly at the shift survive the composition.
FieldMatrix pairing_composite(const Field& F, const ShiftWork& w, int a, size_t t,
                              size_t s) {
  FieldMatrix U(F, a, a);
  for (size_t k = 0; k < w.J.size(); ++k) {
    int rp = w.pos_primal[k], rd = w.pos_dual[k];
    for (int tau = 0; tau < a; ++tau) {
      FE g = w.homPd[s].at(rd, tau);
      if (F.is_zero(g)) continue;
      for (int al = 0; al < a; ++al)
        U.at(tau, al) = F.add(U.at(tau, al), F.mul(g, w.homP[t].at(rp, al)));
    }
  }
  return U;
}

int shift_multiplicity(const Field& F, const SummandQuery& query,
                       const PairingContext& ctx, const ShiftWork& w) {
  if (w.homP.empty() || w.homPd.empty()) return 0;
  int a = query.P.dim;
  size_t nt = w.homP.size(), ns = w.homPd.size();
  size_t spot = 8, seen = 0;
  std::vector<std::vector<std::vector<FE>>> B;
  FieldMatrix Bk(F, int(nt), int(ns));
  if (ctx.E.sdim != 1)
    B.assign(nt, std::vector<std::vector<FE>>(ns));
  for (size_t t = 0; t < nt; ++t)
    for (size_t s = 0; s < ns; ++s) {
      FieldMatrix U = pairing_composite(F, w, a, t, s);
      if (seen < spot) {
        for (const auto& rho : query.P.action)
          if (!U.mul(rho).equals(rho.mul(U)))
            throw InternalCheckError("pairing composite is not equivariant");
        ++seen;
      }
      auto coords = ctx.E.coords(U);
      if (ctx.E.sdim == 1)
        Bk.at(int(t), int(s)) = coords[0];
      else
        B[t][s] = std::move(coords);
    }
  // Over a one-dimensional residue field the coordinate matrix has the same
  // rank as the pairing itself.
  if (ctx.E.sdim == 1) return rank_of(Bk);
  return rank_over_quotient_field(ctx.E, B).rank;
}

std::vector<Rational> candidate_shifts(const GradedEquivariantModule& M,
                                       const DiagPart& diag, const PairingContext& ctx) {
  std::vector<Rational> shifts;
  for (int j = 0; j < M.rank(); ++j) {
    if (ctx.use_weights && reduce_weight(diag, M.gen_weight[size_t(j)]) != ctx.chi)
      continue;
    shifts.push_back(M.gen_degree[size_t(j)]);
  }
  std::sort(shifts.begin(), shifts.end());
  shifts.erase(std::unique(shifts.begin(), shifts.end()), shifts.end());
  return shifts;
}

}  // namespace

std::vector<ShiftCount> summand_counts(const GradedEquivariantModule& M,
                                       const ConstantGroup& C,
                                       const std::vector<FieldMatrix>& varmats,
                                       const DiagPart& diag, const SummandQuery& query,
                                       long long slice_cap) {
  PairingContext ctx = make_context(M, C, varmats, diag, query);
  std::vector<ShiftCount> out;
  for (const auto& delta : candidate_shifts(M, diag, ctx)) {
    ShiftWork w = build_shift(M, C, varmats, diag, query, ctx, delta, slice_cap);
    out.push_back({delta, shift_multiplicity(M.F, query, ctx, w)});
  }
  return out;
}

std::optional<RealizedSummand> realize_summand(const GradedEquivariantModule& M,
                                               const ConstantGroup& C,
                                               const std::vector<FieldMatrix>& varmats,
                                               const DiagPart& diag,
                                               const SummandQuery& query,
                                               long long slice_cap) {
  const Field& F = M.F;
  PairingContext ctx = make_context(M, C, varmats, diag, query);
  int a = query.P.dim;
  for (const auto& delta : candidate_shifts(M, diag, ctx)) {
    ShiftWork w = build_shift(M, C, varmats, diag, query, ctx, delta, slice_cap);
    for (size_t t = 0; t < w.homP.size(); ++t)
      for (size_t s = 0; s < w.homPd.size(); ++s) {
        FieldMatrix U = pairing_composite(F, w, a, t, s);
        if (ctx.E.is_zero(ctx.E.coords(U))) continue;
        // The class of U is a unit in the local endomorphism ring, so U is
        // invertible and normalizing by it yields an exact retraction.
        auto Ui = inverse_of(U);
        if (!Ui)
          throw InternalCheckError("unit in a local endomorphism ring is singular");
        PolyMatrix embed(size_t(M.rank()), std::vector<Polynomial>(size_t(a)));
        for (size_t r = 0; r < w.primal.basis.elems.size(); ++r) {
          const auto& [mu, j] = w.primal.basis.elems[r];
          for (int al = 0; al < a; ++al) {
            FE c = w.homP[t].at(int(r), al);
            if (F.is_zero(c)) continue;
            auto& cell = embed[size_t(j)][size_t(al)];
            cell = poly_add(F, cell, Polynomial::monomial(F, mu, c));
          }
        }
        PolyMatrix gmap(size_t(a), std::vector<Polynomial>(size_t(M.rank())));
        for (size_t r = 0; r < w.dual.basis.elems.size(); ++r) {
          const auto& [nu, j] = w.dual.basis.elems[r];
          for (int tau = 0; tau < a; ++tau) {
            FE c = w.homPd[s].at(int(r), tau);
            if (F.is_zero(c)) continue;
            auto& cell = gmap[size_t(tau)][size_t(j)];
            cell = poly_add(F, cell, Polynomial::monomial(F, nu, c));
          }
        }
        PolyMatrix retract = constmat_polymul(F, *Ui, gmap);
        if (!polymatrix_equal(polymatrix_mul(F, retract, embed),
                              identity_polymatrix(F, a)))
          throw InternalCheckError("retraction composite is not the identity");
        // Both maps must intertwine the actions exactly.
        GradedEquivariantModule X =
            standard_module(F, M.dimension, query.P, delta, ctx.chi);
        for (size_t g = 0; g < M.action.size(); ++g) {
          PolyMatrix lhs = polymatrix_mul(F, embed, X.action[g]);
          PolyMatrix rhs =
              polymatrix_mul(F, M.action[g], acted_polymatrix(F, varmats[g], embed));
          if (!polymatrix_equal(lhs, rhs))
            throw InternalCheckError("embedding is not equivariant");
          lhs = polymatrix_mul(F, retract, M.action[g]);
          rhs = polymatrix_mul(F, X.action[g], acted_polymatrix(F, varmats[g], retract));
          if (!polymatrix_equal(lhs, rhs))
            throw InternalCheckError("retraction is not equivariant");
        }
        return RealizedSummand{delta, std::move(embed), std::move(retract)};
      }
  }
  return std::nullopt;
}

KGModule generator_module(const GradedEquivariantModule& M) {
  KGModule G{M.F, M.rank(), {}};
  for (const auto& A : M.action) {
    FieldMatrix R(M.F, M.rank(), M.rank());
    for (int i = 0; i < M.rank(); ++i)
      for (int j = 0; j < M.rank(); ++j)
        R.at(i, j) = constant_coeff(M.F, A[size_t(i)][size_t(j)]);
    G.action.push_back(std::move(R));
  }
  return G;
}

void verify_module_structure(const GradedEquivariantModule& M, const ConstantGroup& C,
                             const std::vector<FieldMatrix>& varmats,
                             const DiagPart& diag) {
  int n = M.rank();
  if (int(M.gen_weight.size()) != n)
    throw InternalCheckError("module bookkeeping arrays out of step");
  check_module_group_sizes(M, C, varmats);
  for (size_t t = 0; t < M.action.size(); ++t) {
    const PolyMatrix& A = M.action[t];
    if (int(A.size()) != n) throw InternalCheckError("action matrix has the wrong shape");
    for (int i = 0; i < n; ++i) {
      if (int(A[size_t(i)].size()) != n)
        throw InternalCheckError("action matrix has the wrong shape");
      for (int j = 0; j < n; ++j) {
        const Polynomial& a = A[size_t(i)][size_t(j)];
        if (a.is_zero()) continue;
        Rational dd = M.gen_degree[size_t(j)] - M.gen_degree[size_t(i)];
        if (!dd.is_integer() || dd.num < 0 ||
            !poly_homogeneous_of(a, int(dd.as_integer())))
          throw InternalCheckError("action entry is not homogeneous of the degree gap");
        if (diag.factors() > 0) {
          auto wi = reduce_weight(diag, M.gen_weight[size_t(i)]);
          auto wj = reduce_weight(diag, M.gen_weight[size_t(j)]);
          for (const auto& [e, c] : a.terms) {
            auto wm = monomial_weight(diag, padded(e, M.dimension));
            for (int l = 0; l < diag.factors(); ++l)
              if ((wm[size_t(l)] + wi[size_t(l)]) % diag.orders[size_t(l)] !=
                  wj[size_t(l)])
                throw InternalCheckError("action entry violates the weight grading");
          }
        }
      }
    }
  }
  // Generator-pair relations; full matrix comparison is kept to small ranks
  // (the relation cost is cubic, and large modules are validated through the
  // downstream count agreements instead).
  if (n <= 100) {
    for (size_t s = 0; s < M.action.size(); ++s)
      for (size_t t = 0; t < M.action.size(); ++t) {
        int u = C.mul(C.gen_index[s], C.gen_index[t]);
        PolyMatrix lhs = compose_action(M.F, M.action[s], varmats[s], M.action[t]);
        PolyMatrix rhs = action_of_element(M, C, varmats, u);
        if (!polymatrix_equal(lhs, rhs))
          throw InternalCheckError("generator-pair relation fails on the module action");
      }
  }
}

}  // namespace frobsig
