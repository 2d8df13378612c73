#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <vector>

#include "frobsig/equivmod.hpp"
#include "frobsig/errors.hpp"
#include "frobsig/gf.hpp"
#include "frobsig/groupscheme.hpp"
#include "frobsig/modrep.hpp"
#include "frobsig/polyring.hpp"

using namespace frobsig;

namespace {

Field F2() { return Field(FieldSpec{2, 1, {0, 1}}); }
Field F4() { return Field(FieldSpec{2, 2, {1, 1, 1}}); }
Field Fp(int p) { return Field(FieldSpec{p, 1, {0, 1}}); }

FieldMatrix mat(const Field& F, int n, std::vector<int> entries) {
  FieldMatrix M(F, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M.at(i, j) = F.from_int(entries[size_t(i) * n + j]);
  return M;
}

FE constant_part(const Field& F, const Polynomial& a) {
  for (const auto& [e, c] : a.terms)
    if (total_degree(e) == 0) return c;
  return F.zero();
}

// Shift -> count lookup from the counting routine.
std::map<Rational, int> count_map(const std::vector<ShiftCount>& v) {
  std::map<Rational, int> m;
  for (const auto& sc : v) m[sc.shift] = sc.count;
  return m;
}

std::vector<Rational> sorted_degrees(const GradedEquivariantModule& M) {
  auto d = M.gen_degree;
  std::sort(d.begin(), d.end());
  return d;
}

// Test fixture: a finite-group action on variables, with everything the
// counting routines need bundled together.
struct Setup {
  Field F;
  GroupSchemeDescriptor D;
  ConstantGroup C;
  std::vector<FieldMatrix> vm;
  std::vector<SimpleProjectiveDatum> data;
};

Setup make_setup(const Field& F, int d, const std::vector<FieldMatrix>& gens) {
  Setup s{F, GroupSchemeDescriptor{F, d, gens, DiagPart{}},
          enumerate_elements(F, d, gens), gens, {}};
  s.data = simples_and_projective_covers(s.C);
  return s;
}

// sigma = -identity on two variables over F_3: the degree-2 Veronese setup.
Setup veronese3() { return make_setup(Fp(3), 2, {mat(Fp(3), 2, {2, 0, 0, 2})}); }

// Unipotent shear on two variables over F_2 (order 2, modular).
Setup shear2() { return make_setup(F2(), 2, {mat(F2(), 2, {1, 1, 0, 1})}); }

// Cyclic 3 acting irreducibly on two variables over F_2 (coprime order).
Setup cyclic3f2() { return make_setup(F2(), 2, {mat(F2(), 2, {0, 1, 1, 1})}); }

SummandQuery query_of(const SimpleProjectiveDatum& d) {
  return SummandQuery{d.projective_cover, d.incl, d.proj, {}};
}

const SimpleProjectiveDatum& datum(const Setup& s, const std::string& label) {
  for (const auto& d : s.data)
    if (d.label == label) return d;
  REQUIRE(false);
  return s.data.front();
}

// Independent multiplicity oracle: count a standard summand through the
// polynomial hom solver in both directions and the rank of the composition
// pairing in End(P)/rad.  Shares no code with the slice-based counting path.
int mult_oracle(const GradedEquivariantModule& M, const Setup& s, const KGModule& P,
                const Rational& delta) {
  const Field& F = M.F;
  GradedEquivariantModule X = standard_module(F, M.dimension, P, delta, {});
  auto Fs = graded_hom(X, M, Rational(0), s.vm, s.D.diag, 100000);
  auto Gs = graded_hom(M, X, Rational(0), s.vm, s.D.diag, 100000);
  if (Fs.empty() || Gs.empty()) return 0;
  QuotientField E = make_end_quotient(s.C, P);
  size_t nt = Fs.size(), ns = Gs.size();
  FieldMatrix Bk(F, int(nt), int(ns));
  std::vector<std::vector<std::vector<FE>>> B(nt, std::vector<std::vector<FE>>(ns));
  for (size_t t = 0; t < nt; ++t)
    for (size_t sI = 0; sI < ns; ++sI) {
      PolyMatrix comp = polymatrix_mul(F, Gs[sI], Fs[t]);
      FieldMatrix U(F, P.dim, P.dim);
      for (int i = 0; i < P.dim; ++i)
        for (int j = 0; j < P.dim; ++j)
          U.at(i, j) = constant_part(F, comp[size_t(i)][size_t(j)]);
      auto coords = E.coords(U);
      if (E.sdim == 1)
        Bk.at(int(t), int(sI)) = coords[0];
      else
        B[t][sI] = std::move(coords);
    }
  if (E.sdim == 1) return rank_of(Bk);
  return rank_over_quotient_field(E, B).rank;
}

}  // namespace

TEST_CASE("pushforward ranks and degrees") {
  // Rank p^(d*e) with degrees (|r| + old)/p^e.  [TRIVIAL]
  {
    Field F = F2();
    GroupSchemeDescriptor D{F, 1, {}, DiagPart{}};
    auto S = ring_module(F, 1, 0, 0);
    auto S1 = frobenius_pushforward(S, D, 1);
    CHECK(S1.rank() == 2);
    CHECK(S1.gen_degree == std::vector<Rational>{Rational(0), Rational(1, 2)});
    auto S2 = frobenius_pushforward(S, D, 2);
    CHECK(S2.rank() == 4);
    CHECK(S2.gen_degree == std::vector<Rational>{Rational(0), Rational(1, 4),
                                                 Rational(1, 2), Rational(3, 4)});
    auto S11 = frobenius_pushforward(S1, D, 1);
    CHECK(S11.rank() == 4);
  }
  {
    Field F = F2();
    GroupSchemeDescriptor D{F, 2, {}, DiagPart{}};
    auto S1 = frobenius_pushforward(ring_module(F, 2, 0, 0), D, 1);
    CHECK(S1.gen_degree == std::vector<Rational>{Rational(0), Rational(1, 2),
                                                 Rational(1, 2), Rational(1)});
  }
  for (auto [p, d, e] :
       std::vector<std::tuple<int, int, unsigned>>{{2, 1, 3}, {3, 2, 1}, {2, 2, 2}, {5, 1, 2}}) {
    Field F = Fp(p);
    GroupSchemeDescriptor D{F, d, {}, DiagPart{}};
    auto Se = frobenius_pushforward(ring_module(F, d, 0, 0), D, e);
    long long want = 1;
    for (unsigned k = 0; k < e * unsigned(d); ++k) want *= p;
    CHECK(Se.rank() == want);
  }
}

TEST_CASE("pushforward rejects non-etale diagonal parts and oversized ranks") {
  {
    // mu_2 in characteristic 2 has no inverse of p mod 2.  [TRIVIAL]
    Field F = F2();
    DiagPart diag{{2}, {{1}}};
    GroupSchemeDescriptor D{F, 1, {}, diag};
    CHECK_THROWS_AS(frobenius_pushforward(ring_module(F, 1, 0, 1), D, 1), ConfigError);
  }
  {
    // 3^10 generators exceed the dense-representation cap.  [TRIVIAL]
    Field F = Fp(3);
    GroupSchemeDescriptor D{F, 2, {}, DiagPart{}};
    CHECK_THROWS_AS(frobenius_pushforward(ring_module(F, 2, 0, 0), D, 5),
                    ResourceCapError);
  }
}

TEST_CASE("pushforward weight transform divides by p^e modulo each order") {
  {
    // mu_2 with weight 1 on one variable over F_3: box weights r mod 2.
    // [DERIVED] 3^-1 = 1 mod 2, so weights are 0,1,0 for r = 0,1,2.
    Field F = Fp(3);
    DiagPart diag{{2}, {{1}}};
    GroupSchemeDescriptor D{F, 1, {}, diag};
    auto S1 = frobenius_pushforward(ring_module(F, 1, 0, 1), D, 1);
    CHECK(S1.gen_weight ==
          std::vector<std::vector<long long>>{{0}, {1}, {0}});
  }
  {
    // mu_3 over F_4: 2^-1 = 2 mod 3 at e=1; 4 = 1 mod 3 at e=2.  [DERIVED]
    Field F = F4();
    DiagPart diag{{3}, {{1}}};
    GroupSchemeDescriptor D{F, 1, {}, diag};
    auto S1 = frobenius_pushforward(ring_module(F, 1, 0, 1), D, 1);
    CHECK(S1.gen_weight == std::vector<std::vector<long long>>{{0}, {2}});
    auto S2 = frobenius_pushforward(ring_module(F, 1, 0, 1), D, 2);
    CHECK(S2.gen_weight ==
          std::vector<std::vector<long long>>{{0}, {1}, {2}, {0}});
  }
}

TEST_CASE("pushforward action entries: scalar twist through inverse Frobenius") {
  // Scalar action by omega on one variable over F_4: the box-1 generator
  // picks up the inverse-Frobenius image omega^2.  [DERIVED]
  Field F = F4();
  FE omega = F.from_coords({0, 1});
  FieldMatrix g(F, 1, 1);
  g.at(0, 0) = omega;
  GroupSchemeDescriptor D{F, 1, {g}, DiagPart{}};
  auto S1 = frobenius_pushforward(ring_module(F, 1, 1, 0), D, 1);
  REQUIRE(S1.rank() == 2);
  const PolyMatrix& A = S1.action[0];
  CHECK(poly_equal(A[0][0], Polynomial::constant(F, F.one())));
  CHECK(A[0][1].is_zero());
  CHECK(A[1][0].is_zero());
  FE om2 = F.mul(omega, omega);
  CHECK(poly_equal(A[1][1], Polynomial::constant(F, om2)));
  CHECK(F.frobenius(om2, 1) == omega);
}

TEST_CASE("pushforward action entries: unipotent shear carry terms") {
  // sigma: x1 -> x0 + x1 over F_2.  Boxes in lex order 1, x1, x0, x0*x1.
  // The x0*x1 column produces a genuine polynomial entry from x0^2.  [DERIVED]
  Setup s = shear2();
  auto S1 = frobenius_pushforward(ring_module(s.F, 2, 1, 0), s.D, 1);
  REQUIRE(S1.rank() == 4);
  const PolyMatrix& A = S1.action[0];
  CHECK(poly_equal(A[0][0], Polynomial::constant(s.F, s.F.one())));
  CHECK(poly_equal(A[1][1], Polynomial::constant(s.F, s.F.one())));
  CHECK(poly_equal(A[2][1], Polynomial::constant(s.F, s.F.one())));
  CHECK(poly_equal(A[2][2], Polynomial::constant(s.F, s.F.one())));
  CHECK(poly_equal(A[0][3], Polynomial::monomial(s.F, {1, 0}, s.F.one())));
  CHECK(poly_equal(A[3][3], Polynomial::constant(s.F, s.F.one())));
  CHECK(A[1][3].is_zero());
  verify_module_structure(S1, s.C, s.vm, s.D.diag);
}

TEST_CASE("iterated pushforward is isomorphic to the double pushforward") {
  // Sign action on one variable over F_3: compare e=2 against twice e=1
  // through an explicit degree-0 isomorphism.  [DERIVED]
  Field F = Fp(3);
  Setup s = make_setup(F, 1, {mat(F, 1, {2})});
  auto S = ring_module(F, 1, 1, 0);
  auto S2 = frobenius_pushforward(S, s.D, 2);
  auto S11 = frobenius_pushforward(frobenius_pushforward(S, s.D, 1), s.D, 1);
  CHECK(S2.rank() == 9);
  CHECK(S11.rank() == 9);
  CHECK(sorted_degrees(S2) == sorted_degrees(S11));
  verify_module_structure(S2, s.C, s.vm, s.D.diag);
  verify_module_structure(S11, s.C, s.vm, s.D.diag);
  auto homs = graded_hom(S2, S11, Rational(0), s.vm, s.D.diag, 100000);
  CHECK(homs.size() == 9);
  // Each generator line matches exactly one on the other side, so the sum of
  // a basis is already invertible; fall back to pseudorandom combinations if
  // a different basis normalization ever changes that.
  PolyMatrix H(9, std::vector<Polynomial>(9));
  for (const auto& B : homs)
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) H[size_t(i)][size_t(j)] =
          poly_add(F, H[size_t(i)][size_t(j)], B[size_t(i)][size_t(j)]);
  bool ok = map_invertible(S2, S11, H);
  unsigned long long seed = 12345;
  for (int tries = 0; !ok && tries < 20; ++tries) {
    PolyMatrix G(9, std::vector<Polynomial>(9));
    for (const auto& B : homs) {
      seed = seed * 6364136223846793005ULL + 1442695040888963407ULL;
      FE c = F.from_int((long long)((seed >> 33) % 3));
      for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j)
          G[size_t(i)][size_t(j)] = poly_add(
              F, G[size_t(i)][size_t(j)], poly_scale(F, B[size_t(i)][size_t(j)], c));
    }
    ok = map_invertible(S2, S11, G);
  }
  CHECK(ok);
  // The solver returns genuinely equivariant maps.
  const PolyMatrix& E0 = homs[0];
  PolyMatrix lhs = polymatrix_mul(F, E0, S2.action[0]);
  PolyMatrix rhs = compose_action(F, S11.action[0], s.vm[0], E0);
  bool eq = true;
  for (int i = 0; i < 9 && eq; ++i)
    for (int j = 0; j < 9 && eq; ++j)
      eq = poly_equal(lhs[size_t(i)][size_t(j)], rhs[size_t(i)][size_t(j)]);
  CHECK(eq);
}

TEST_CASE("sign-of-determinant counts for the order-2 diagonal action") {
  // Two labels split the pushforward by monomial parity.  e=1 per-shift
  // counts [DERIVED] by listing monomials; e=2 totals 41/40 are the exact
  // counts (3^4+1)/2 and (3^4-1)/2.  [DERIVED]
  Setup s = veronese3();
  REQUIRE(s.data.size() == 2);
  auto& triv = datum(s, "triv");
  auto& sgn = datum(s, "sgn");
  auto S = ring_module(s.F, 2, 1, 0);
  auto S1 = frobenius_pushforward(S, s.D, 1);
  verify_module_structure(S1, s.C, s.vm, s.D.diag);
  auto ct = count_map(summand_counts(S1, s.C, s.vm, s.D.diag, query_of(triv), 100000));
  auto cs = count_map(summand_counts(S1, s.C, s.vm, s.D.diag, query_of(sgn), 100000));
  std::map<Rational, int> want_t{{Rational(0), 1},
                                 {Rational(1, 3), 0},
                                 {Rational(2, 3), 3},
                                 {Rational(1), 0},
                                 {Rational(4, 3), 1}};
  std::map<Rational, int> want_s{{Rational(0), 0},
                                 {Rational(1, 3), 2},
                                 {Rational(2, 3), 0},
                                 {Rational(1), 2},
                                 {Rational(4, 3), 0}};
  CHECK(ct == want_t);
  CHECK(cs == want_s);

  auto S2 = frobenius_pushforward(S, s.D, 2);
  auto ct2 = count_map(summand_counts(S2, s.C, s.vm, s.D.diag, query_of(triv), 100000));
  auto cs2 = count_map(summand_counts(S2, s.C, s.vm, s.D.diag, query_of(sgn), 100000));
  // Independent parity enumeration over the 9x9 exponent box.
  std::map<Rational, int> even, odd;
  for (int r0 = 0; r0 < 9; ++r0)
    for (int r1 = 0; r1 < 9; ++r1) {
      Rational sh(r0 + r1, 9);
      ((r0 + r1) % 2 == 0 ? even : odd)[sh]++;
      if ((r0 + r1) % 2 == 0) odd.try_emplace(sh, 0);
      else even.try_emplace(sh, 0);
    }
  CHECK(ct2 == even);
  CHECK(cs2 == odd);
  int tot_t = 0, tot_s = 0;
  for (auto& [k, v] : ct2) tot_t += v;
  for (auto& [k, v] : cs2) tot_s += v;
  CHECK(tot_t == 41);
  CHECK(tot_s == 40);
  CHECK(tot_t + tot_s == 81);  // all 81 generators accounted for
}

TEST_CASE("modular shear: free and trivial summand counts") {
  // Order-2 unipotent over F_2.  e=1 values hand-checked through the slice
  // pairing; e=2 verified against the hom-solver oracle below and closed by
  // the rank identity 2*free + triv = 16.  [DERIVED]
  Setup s = shear2();
  REQUIRE(s.data.size() == 1);
  auto& t = s.data[0];
  CHECK(t.label == "triv");
  CHECK(t.projective_cover.dim == 2);
  SummandQuery qfree = query_of(t);
  SummandQuery qtriv{t.simple, std::nullopt, std::nullopt, {}};
  auto S = ring_module(s.F, 2, 1, 0);
  auto S1 = frobenius_pushforward(S, s.D, 1);
  auto f1 = count_map(summand_counts(S1, s.C, s.vm, s.D.diag, qfree, 100000));
  auto t1 = count_map(summand_counts(S1, s.C, s.vm, s.D.diag, qtriv, 100000));
  CHECK(f1 == std::map<Rational, int>{
                  {Rational(0), 0}, {Rational(1, 2), 1}, {Rational(1), 0}});
  CHECK(t1 == std::map<Rational, int>{
                  {Rational(0), 1}, {Rational(1, 2), 0}, {Rational(1), 1}});

  auto S2 = frobenius_pushforward(S, s.D, 2);
  auto f2 = count_map(summand_counts(S2, s.C, s.vm, s.D.diag, qfree, 100000));
  auto t2 = count_map(summand_counts(S2, s.C, s.vm, s.D.diag, qtriv, 100000));
  std::map<Rational, int> want_f, want_t;
  std::vector<int> fv{0, 1, 1, 2, 1, 1, 0}, tv{1, 0, 1, 0, 1, 0, 1};
  for (int k = 0; k <= 6; ++k) {
    want_f[Rational(k, 4)] = fv[size_t(k)];
    want_t[Rational(k, 4)] = tv[size_t(k)];
  }
  CHECK(f2 == want_f);
  CHECK(t2 == want_t);
  int tot_f = 0, tot_t = 0;
  for (auto& [k, v] : f2) tot_f += v;
  for (auto& [k, v] : t2) tot_t += v;
  CHECK(tot_f == 6);
  CHECK(tot_t == 4);
  CHECK(2 * tot_f + tot_t == 16);  // decomposition is complete at e=2
}

TEST_CASE("coprime-order cyclic action: simple-isotypic counts") {
  // Cyclic 3 over F_2 is semisimple with simples triv and a 2-dimensional
  // simple whose endomorphisms form the quadratic extension.  [DERIVED]
  Setup s = cyclic3f2();
  REQUIRE(s.data.size() == 2);
  auto& triv = datum(s, "triv");
  auto& v2 = datum(s, "V2");
  CHECK(triv.end_dim == 1);
  CHECK(v2.end_dim == 2);
  CHECK(v2.projective_cover.dim == 2);
  auto S1 = frobenius_pushforward(ring_module(s.F, 2, 1, 0), s.D, 1);
  auto ct = count_map(summand_counts(S1, s.C, s.vm, s.D.diag, query_of(triv), 100000));
  auto cv = count_map(summand_counts(S1, s.C, s.vm, s.D.diag, query_of(v2), 100000));
  CHECK(ct == std::map<Rational, int>{
                  {Rational(0), 1}, {Rational(1, 2), 0}, {Rational(1), 1}});
  CHECK(cv == std::map<Rational, int>{
                  {Rational(0), 0}, {Rational(1, 2), 1}, {Rational(1), 0}});
  // Dimension bookkeeping: 1+1 trivial strands plus one 2-dim strand fill 4.
  CHECK(1 * (1 + 1) + 2 * 1 == S1.rank());
}

TEST_CASE("summand counts are additive in direct sums") {
  Setup s = shear2();
  auto& t = s.data[0];
  auto S1 = frobenius_pushforward(ring_module(s.F, 2, 1, 0), s.D, 1);
  auto X = standard_module(s.F, 2, t.projective_cover, Rational(1, 2), {});
  auto M = module_direct_sum(S1, X);
  verify_module_structure(M, s.C, s.vm, s.D.diag);
  SummandQuery qfree = query_of(t);
  SummandQuery qtriv{t.simple, std::nullopt, std::nullopt, {}};
  auto f = count_map(summand_counts(M, s.C, s.vm, s.D.diag, qfree, 100000));
  auto tr = count_map(summand_counts(M, s.C, s.vm, s.D.diag, qtriv, 100000));
  CHECK(f == std::map<Rational, int>{
                 {Rational(0), 0}, {Rational(1, 2), 2}, {Rational(1), 0}});
  CHECK(tr == std::map<Rational, int>{
                  {Rational(0), 1}, {Rational(1, 2), 0}, {Rational(1), 1}});
}

TEST_CASE("realized summands come with exact verified retractions") {
  {
    Setup s = shear2();
    auto& t = s.data[0];
    auto S1 = frobenius_pushforward(ring_module(s.F, 2, 1, 0), s.D, 1);
    auto free = realize_summand(S1, s.C, s.vm, s.D.diag, query_of(t), 100000);
    REQUIRE(free.has_value());
    CHECK(free->shift == Rational(1, 2));
    auto comp = polymatrix_mul(s.F, free->retract, free->embed);
    auto I2 = identity_polymatrix(s.F, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(poly_equal(comp[size_t(i)][size_t(j)], I2[size_t(i)][size_t(j)]));
    // The embedding can only land in generators of compatible degree: rows 0
    // (degree 0) and 3 (degree 1) differ from 1/2 by non-integers.
    for (int j : {0, 3})
      for (int a = 0; a < 2; ++a) CHECK(free->embed[size_t(j)][size_t(a)].is_zero());
    SummandQuery qtriv{t.simple, std::nullopt, std::nullopt, {}};
    auto tr = realize_summand(S1, s.C, s.vm, s.D.diag, qtriv, 100000);
    REQUIRE(tr.has_value());
    CHECK(tr->shift == Rational(0));
  }
  {
    Setup s = veronese3();
    auto S1 = frobenius_pushforward(ring_module(s.F, 2, 1, 0), s.D, 1);
    auto rt = realize_summand(S1, s.C, s.vm, s.D.diag, query_of(datum(s, "triv")), 100000);
    REQUIRE(rt.has_value());
    CHECK(rt->shift == Rational(0));
    auto rs = realize_summand(S1, s.C, s.vm, s.D.diag, query_of(datum(s, "sgn")), 100000);
    REQUIRE(rs.has_value());
    CHECK(rs->shift == Rational(1, 3));
  }
}

TEST_CASE("generator modules have the expected Jordan type") {
  {
    Setup s = shear2();
    auto S1 = frobenius_pushforward(ring_module(s.F, 2, 1, 0), s.D, 1);
    KGModule G = generator_module(S1);
    std::vector<std::pair<std::string, KGModule>> refs{
        {"J1", trivial_module(s.F, s.C)}, {"J2", regular_module(s.C)}};
    auto dec = decompose_module(s.C, G, refs);
    REQUIRE(dec.complete);
    std::map<std::string, int> got;
    for (auto& p : dec.parts) got[p.label] = p.count;
    CHECK(got == std::map<std::string, int>{{"J1", 2}, {"J2", 1}});
  }
  {
    // Two shear blocks on four variables: the 16 generators decompose as six
    // free blocks and four trivial lines.  [DERIVED] from the tensor-square
    // rule: (J2 + 2 J1)^tensor2 = 6 J2 + 4 J1 in characteristic 2.
    Field F = F2();
    FieldMatrix g(F, 4, 4);
    for (int i = 0; i < 4; ++i) g.at(i, i) = F.one();
    g.at(0, 1) = F.one();
    g.at(2, 3) = F.one();
    Setup s = make_setup(F, 4, {g});
    auto S1 = frobenius_pushforward(ring_module(F, 4, 1, 0), s.D, 1);
    CHECK(S1.rank() == 16);
    KGModule G = generator_module(S1);
    std::vector<std::pair<std::string, KGModule>> refs{
        {"J1", trivial_module(F, s.C)}, {"J2", regular_module(s.C)}};
    auto dec = decompose_module(s.C, G, refs);
    REQUIRE(dec.complete);
    std::map<std::string, int> got;
    for (auto& p : dec.parts) got[p.label] = p.count;
    CHECK(got == std::map<std::string, int>{{"J1", 4}, {"J2", 6}});
  }
}

TEST_CASE("slice and hom caps raise resource errors") {
  Setup s = veronese3();
  auto S1 = frobenius_pushforward(ring_module(s.F, 2, 1, 0), s.D, 1);
  CHECK_THROWS_AS(slice_module(S1, s.vm, s.D.diag, Rational(2, 3), nullptr, 2),
                  ResourceCapError);
  Field F = Fp(3);
  Setup s1 = make_setup(F, 1, {mat(F, 1, {2})});
  auto S2 = frobenius_pushforward(ring_module(F, 1, 1, 0), s1.D, 2);
  CHECK_THROWS_AS(graded_hom(S2, S2, Rational(0), s1.vm, s1.D.diag, 3),
                  ResourceCapError);
}

TEST_CASE("structure verifier rejects corrupted modules") {
  Setup s = veronese3();
  auto S1 = frobenius_pushforward(ring_module(s.F, 2, 1, 0), s.D, 1);
  {
    // Wrong degree: a linear entry between generators 1/3 apart.
    auto M = S1;
    M.action[0][0][1] = Polynomial::monomial(s.F, {1, 0}, s.F.one());
    CHECK_THROWS_AS(verify_module_structure(M, s.C, s.vm, s.D.diag), InternalCheckError);
  }
  {
    // Degree-compatible corruption that breaks the order-2 relation.
    auto M = S1;
    M.action[0][0][0] = Polynomial::zero();
    CHECK_THROWS_AS(verify_module_structure(M, s.C, s.vm, s.D.diag), InternalCheckError);
  }
}

TEST_CASE("double dual returns the module on the nose") {
  Setup s = cyclic3f2();
  auto S1 = frobenius_pushforward(ring_module(s.F, 2, 1, 0), s.D, 1);
  auto D1 = dual_graded_module(S1, s.C, s.vm, s.D.diag);
  auto D2 = dual_graded_module(D1, s.C, s.vm, s.D.diag);
  CHECK(D1.gen_degree[1] == Rational(-1, 2));
  CHECK(D2.gen_degree == S1.gen_degree);
  CHECK(D2.gen_weight == S1.gen_weight);
  REQUIRE(D2.action.size() == S1.action.size());
  for (size_t t = 0; t < S1.action.size(); ++t)
    for (int i = 0; i < S1.rank(); ++i)
      for (int j = 0; j < S1.rank(); ++j)
        CHECK(poly_equal(D2.action[t][size_t(i)][size_t(j)],
                         S1.action[t][size_t(i)][size_t(j)]));
  verify_module_structure(D1, s.C, s.vm, s.D.diag);
}

TEST_CASE("graded hom spaces between twisted standard modules") {
  Field F = Fp(3);
  Setup s = make_setup(F, 2, {mat(F, 2, {2, 0, 0, 2})});
  KGModule ktriv{F, 1, {mat(F, 1, {1})}};
  KGModule ksgn{F, 1, {mat(F, 1, {2})}};
  auto Xt = standard_module(F, 2, ktriv, Rational(0), {});
  auto Xs = standard_module(F, 2, ksgn, Rational(0), {});
  CHECK(graded_hom(Xt, Xs, Rational(0), s.vm, s.D.diag, 1000).empty());
  CHECK(graded_hom(Xt, Xt, Rational(0), s.vm, s.D.diag, 1000).size() == 1);
  // One degree up, parity matches the sign twist: both linear forms work.
  CHECK(graded_hom(Xt, Xs, Rational(1), s.vm, s.D.diag, 1000).size() == 2);
  CHECK(graded_hom(Xt, Xt, Rational(1), s.vm, s.D.diag, 1000).empty());
}

TEST_CASE("slice pairing agrees with the hom-solver multiplicity oracle") {
  // Every count produced by the slice pairing is reproduced by an
  // independent computation through polynomial hom spaces.
  auto check_all = [](const Setup& s, unsigned emax) {
    auto S = ring_module(s.F, 2, 1, 0);
    for (unsigned e = 1; e <= emax; ++e) {
      auto Se = frobenius_pushforward(S, s.D, e);
      for (const auto& d : s.data) {
        SummandQuery q = query_of(d);
        for (const auto& sc : summand_counts(Se, s.C, s.vm, s.D.diag, q, 100000)) {
          int oracle = mult_oracle(Se, s, d.projective_cover, sc.shift);
          CHECK(oracle == sc.count);
        }
      }
    }
  };
  check_all(veronese3(), 2);
  check_all(shear2(), 2);
  check_all(cyclic3f2(), 2);
}
