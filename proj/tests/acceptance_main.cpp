// Acceptance gate: drives the real pipelines against independent oracles and
// prints exactly one pass/fail line per criterion.  Exit code = number of
// failed criteria.  All tolerances are pinned here as named constants; counts
// are compared by exact integer equality and densities by exact rationals
// unless a constant says otherwise.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "frobsig/config.hpp"
#include "frobsig/diagmu.hpp"
#include "frobsig/equivmod.hpp"
#include "frobsig/errors.hpp"
#include "frobsig/fsig.hpp"
#include "frobsig/gf.hpp"
#include "frobsig/groupscheme.hpp"
#include "frobsig/invariants.hpp"
#include "frobsig/modrep.hpp"
#include "frobsig/polyring.hpp"

using namespace frobsig;

namespace {

// Pinned tolerances and budgets.
constexpr double kDisplayTolE1 = 1e-4;   // 4-decimal displayed deviation at e=1
constexpr double kDisplayTolE23 = 1e-5;  // 5-decimal displayed deviations at e=2,3
constexpr double kBudgetC1Ms = 60 * 1000.0;
constexpr double kBudgetC2Ms = 300 * 1000.0;
constexpr double kBudgetC3Ms = 10 * 1000.0;
constexpr double kBudgetC4Ms = 600 * 1000.0;
constexpr int kRandomSumTrials = 50;
constexpr uint64_t kRandomSeed = 20260816ull;

Field Fp(uint32_t p) { return Field(FieldSpec{p, 1, {0, 1}}); }

FieldMatrix mat(const Field& F, int n, std::vector<int> entries) {
  FieldMatrix M(F, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M.at(i, j) = F.from_int(entries[size_t(i) * n + j]);
  return M;
}

GroupSchemeDescriptor veronese3() {
  Field F = Fp(3);
  return GroupSchemeDescriptor{F, 2, {mat(F, 2, {2, 0, 0, 2})}, DiagPart{}};
}
GroupSchemeDescriptor cyclic3f2() {
  Field F = Fp(2);
  return GroupSchemeDescriptor{F, 2, {mat(F, 2, {0, 1, 1, 1})}, DiagPart{}};
}
GroupSchemeDescriptor shear4() {
  Field F = Fp(2);
  return GroupSchemeDescriptor{
      F, 4, {mat(F, 4, {1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 1})}, DiagPart{}};
}
GroupSchemeDescriptor mu2_11() {
  return GroupSchemeDescriptor{Fp(2), 2, {}, DiagPart{{2}, {{1}, {1}}}};
}

const LabelSeries* series_of(const FSigReport& r, const std::string& label) {
  for (const auto& s : r.series)
    if (s.label == label) return &s;
  return nullptr;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct Lcg {
  uint64_t s;
  explicit Lcg(uint64_t seed) : s(seed) {}
  uint32_t next() {
    s = s * 6364136223846793005ull + 1442695040888963407ull;
    return uint32_t(s >> 33);
  }
};

FieldMatrix random_invertible(const Field& F, int n, Lcg& rng) {
  for (;;) {
    FieldMatrix M(F, n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M.at(i, j) = F.from_int(int(rng.next() % F.q()));
    if (inverse_of(M)) return M;
  }
}

int failures = 0;

void report(int n, bool ok, const std::string& note) {
  std::printf("criterion %d: %s — %s\n", n, ok ? "pass" : "fail", note.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <typename Fn>
void guarded(int n, Fn body) {
  try {
    auto [ok, note] = body();
    report(n, ok, note);
  } catch (const std::exception& e) {
    report(n, false, std::string("exception: ") + e.what());
  }
}

// --------------------------------------------------------------- criteria

std::pair<bool, std::string> criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  FSigReport R = measure(veronese3(), 3, 100000);
  const LabelSeries* t = series_of(R, "triv");
  const LabelSeries* s = series_of(R, "sgn");
  if (!t || !s) return {false, "labels triv/sgn missing"};

  bool ok = true;
  std::string why;
  const long long want_t[3] = {5, 41, 365}, want_s[3] = {4, 40, 364};
  for (int i = 0; i < 3; ++i) {
    // Independent oracle: parity enumeration of the exponent box.
    long long pe = 1;
    for (int k = 0; k < R.e_values[size_t(i)]; ++k) pe *= 3;
    long long even = 0, odd = 0;
    for (long long a = 0; a < pe; ++a)
      for (long long b = 0; b < pe; ++b) ((a + b) % 2 ? odd : even)++;
    if (even != want_t[i] || odd != want_s[i]) {
      ok = false;
      why = "parity oracle disagrees with the closed form at e=" +
            std::to_string(i + 1);
    }
    // Equivariant pipeline must reproduce the same exact integers.
    if (t->counts[size_t(i)] != want_t[i] || s->counts[size_t(i)] != want_s[i]) {
      ok = false;
      why = "equivariant counts off at e=" + std::to_string(i + 1) + ": got " +
            std::to_string(t->counts[size_t(i)]) + "/" +
            std::to_string(s->counts[size_t(i)]);
    }
  }
  const Rational want_dev[3] = {Rational(1, 18), Rational(1, 162), Rational(1, 1458)};
  const double displayed[3] = {0.0556, 0.00617, 0.00069};
  const double tol[3] = {kDisplayTolE1, kDisplayTolE23, kDisplayTolE23};
  for (int i = 0; i < 3; ++i) {
    if (t->deviations[size_t(i)] != want_dev[i]) {
      ok = false;
      why = "deviation at e=" + std::to_string(i + 1) + " is " +
            t->deviations[size_t(i)].str();
    }
    if (std::fabs(t->deviations[size_t(i)].as_double() - displayed[i]) > tol[i]) {
      ok = false;
      why = "deviation display drifted at e=" + std::to_string(i + 1);
    }
  }
  if (!(t->deviations[2] < t->deviations[1] && t->deviations[1] < t->deviations[0])) {
    ok = false;
    why = "deviations not strictly decreasing";
  }
  double ms = ms_since(t0);
  if (ms > kBudgetC1Ms) {
    ok = false;
    why = "budget exceeded";
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "order-2 scalars/F_3: counts 5/4, 41/40, 365/364 exact by both "
                "pipelines; deviations 1/18 > 1/162 > 1/1458 (%.0f ms)",
                ms);
  return {ok, ok ? buf : why};
}

std::pair<bool, std::string> criterion2() {
  auto t0 = std::chrono::steady_clock::now();
  GroupSchemeDescriptor D = cyclic3f2();
  Prediction P = predict(D, 1);
  bool ok = P.labels.size() == 2;
  std::string why = "wrong label count";
  const PredictedLabel* tl = nullptr;
  const PredictedLabel* bl = nullptr;
  for (const auto& l : P.labels) (l.label == "triv" ? tl : bl) = &l;
  if (!tl || !bl) return {false, "missing simple labels"};
  if (!(tl->simple_dim == 1 && tl->end_dim == 1 && bl->simple_dim == 2 &&
        bl->end_dim == 2)) {
    ok = false;
    why = "simple/endomorphism dimensions off";
  }
  if (!(tl->coefficient == Rational(1, 3) && bl->coefficient == Rational(2, 6))) {
    ok = false;
    why = "predicted densities off";
  }

  FSigReport R = measure(D, 3, 100000);
  const LabelSeries* t = series_of(R, "triv");
  const LabelSeries* b = nullptr;
  for (const auto& s : R.series)
    if (s.label != "triv") b = &s;
  if (!t || !b) return {false, "measured labels missing"};
  if (!(t->counts[0] == 2 && b->counts[0] == 1)) {
    ok = false;
    why = "e=1 counts are not (2, 1)";
  }

  // Independent oracle: split the 4-generator module directly.
  ConstantGroup C = enumerate_elements(D.F, 2, D.constant_generators);
  auto data = simples_and_projective_covers(C);
  std::vector<std::pair<std::string, KGModule>> refs;
  for (const auto& dt : data) refs.emplace_back(dt.label, dt.simple);
  GradedEquivariantModule M1 =
      frobenius_pushforward(ring_module(D.F, 2, 1, 0), D, 1);
  Decomposition dec = decompose_module(C, generator_module(M1), refs);
  std::map<std::string, int> oracle;
  for (const auto& part : dec.parts) oracle[part.label] += part.count;
  if (!dec.complete || oracle["triv"] != 2 || oracle[b->label] != 1) {
    ok = false;
    why = "brute-force split disagrees at e=1";
  }

  if (!(t->deviations[2] < t->deviations[0] && b->deviations[2] < b->deviations[0])) {
    ok = false;
    why = "deviations at e=3 not strictly below e=1";
  }
  double ms = ms_since(t0);
  if (ms > kBudgetC2Ms) {
    ok = false;
    why = "budget exceeded";
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "order-3 cyclic/F_2: simples of dim 1,2 with End dims 1,2; both "
                "densities 1/3; e=1 split (2,1) confirmed by direct "
                "decomposition (%.0f ms)",
                ms);
  return {ok, ok ? buf : why};
}

std::pair<bool, std::string> criterion3() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string why;
  DiagPart mu2{{2}, {{1}, {1}}};
  for (unsigned e = 1; e <= 4; ++e) {
    auto counts = veronese_summand_counts(mu2, 2, 2, e);
    long long want = 1LL << (2 * e - 1);
    if (counts.size() != 2 || counts[0].count != want || counts[1].count != want) {
      ok = false;
      why = "weight-class count is not 2^(2e-1) at e=" + std::to_string(e);
    }
  }
  FSigReport R = measure(mu2_11(), 4, 100000);
  for (const auto& s : R.series) {
    if (s.predicted != Rational(1, 2)) {
      ok = false;
      why = "predicted density is not 1/2";
    }
    for (const auto& d : s.deviations)
      if (d != Rational(0)) {
        ok = false;
        why = "nonzero deviation on the infinitesimal pipeline";
      }
  }
  GroupSchemeDescriptor mu4{Fp(2), 2, {}, DiagPart{{4}, {{1}, {3}}}};
  if (infinitesimal_e0(mu2_11()) != 1 || infinitesimal_e0(mu4) != 2) {
    ok = false;
    why = "infinitesimal depth e0 wrong";
  }
  double ms = ms_since(t0);
  if (ms > kBudgetC3Ms) {
    ok = false;
    why = "budget exceeded";
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "mu_2 weights (1,1)/F_2: exactly 2^(2e-1) per class for e<=4, "
                "density exactly 1/2, zero deviation; e0(mu_2)=1, e0(mu_4)=2 "
                "(%.0f ms)",
                ms);
  return {ok, ok ? buf : why};
}

std::pair<bool, std::string> criterion4() {
  auto t0 = std::chrono::steady_clock::now();
  GroupSchemeDescriptor D = shear4();
  ConstantGroup C = enumerate_elements(D.F, 4, D.constant_generators);
  bool ok = true;
  std::string why;
  SmallnessReport sm = is_small(D, C);
  if (!sm.small) {
    ok = false;
    why = "two-block shear not recognized as small";
  }
  Prediction P = predict(D, 1);
  if (P.s_value != Rational(0)) {
    ok = false;
    why = "predicted signature is not 0";
  }
  bool cover_half = false, free_zero = false;
  for (const auto& l : P.labels) {
    if (l.label == "triv" && l.module_rank == 2 && l.coefficient == Rational(1, 2))
      cover_half = true;
    if (l.label == "free" && l.coefficient == Rational(0)) free_zero = true;
  }
  if (!cover_half || !free_zero) {
    ok = false;
    why = "limit coefficients are not (group-algebra: 1/2, free: 0)";
  }

  FSigReport R = measure(D, 2, 100000);
  const LabelSeries* freeline = series_of(R, "free");
  const LabelSeries* cover = series_of(R, "triv");
  if (!freeline || !cover) return {false, "series labels missing"};
  Rational n1(freeline->counts[0], R.scales[0]), n2(freeline->counts[1], R.scales[1]);
  if (!(n2 < n1)) {
    ok = false;
    why = "normalized free count did not strictly drop from e=1 to e=2";
  }
  for (size_t i = 0; i < 2; ++i) {
    long long total = freeline->counts[i] + 2 * cover->counts[i];
    if (!R.complete[i] || total != R.scales[i]) {
      ok = false;
      why = "free + 2*regular does not exhaust p^(4e) at e=" + std::to_string(i + 1);
    }
  }

  // Brute-force splitting of the 16-generator module at e=1.
  GradedEquivariantModule M1 =
      frobenius_pushforward(ring_module(D.F, 4, 1, 0), D, 1);
  KGModule G1 = generator_module(M1);
  std::vector<std::pair<std::string, KGModule>> refs = {
      {"line", trivial_module(D.F, C)}, {"block", regular_module(C)}};
  Decomposition dec = decompose_module(C, G1, refs);
  std::map<std::string, int> oracle;
  for (const auto& part : dec.parts) oracle[part.label] += part.count;
  if (!dec.complete || oracle["line"] != freeline->counts[0] ||
      oracle["block"] != cover->counts[0]) {
    ok = false;
    why = "brute-force split of the 16-generator module disagrees";
  }
  double ms = ms_since(t0);
  if (ms > kBudgetC4Ms) {
    ok = false;
    why = "budget exceeded";
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "unipotent two-block shear/F_2: small; s=0 with group-algebra "
                "coefficient 1/2; free density %lld/16 -> %lld/256 strictly down; "
                "free + 2*regular = 16^e; e=1 split (4 lines + 6 blocks) "
                "confirmed (%.0f ms)",
                freeline->counts[0], freeline->counts[1], ms);
  return {ok, ok ? buf : why};
}

std::pair<bool, std::string> criterion5() {
  RealizationCheck rc =
      crosscheck_constant_realization(Fp(3), 2, DiagPart{{2}, {{1}, {1}}}, 2, 100000);
  bool ok = rc.agree && rc.lines.size() == 4;
  return {ok, ok ? "mu_2 as diag(-1,-1)/F_3: weight-class and equivariant counts "
                   "agree exactly at e=1,2"
                 : "realization crosscheck disagreed"};
}

std::pair<bool, std::string> criterion6() {
  bool ok = true;
  std::string why;
  std::string found_at;
  const GroupSchemeDescriptor configs[3] = {veronese3(), cyclic3f2(), shear4()};
  const char* names[3] = {"scalars", "cyclic3", "shear"};
  for (int k = 0; k < 3; ++k) {
    const GroupSchemeDescriptor& D = configs[k];
    ConstantGroup C = enumerate_elements(D.F, D.dimension, D.constant_generators);
    std::optional<RegularSummand> rs;
    int r_used = -1;
    for (int r = 0; r <= 2 && !rs; ++r) {
      rs = find_regular_summand(D, C, r);
      r_used = r;
    }
    if (!rs) {
      ok = false;
      why = std::string("no regular summand within r<=2 for ") + names[k];
      continue;
    }
    // Re-verify the retraction here, independent of the library's checks.
    KGModule R = regular_module(C);
    std::optional<KGModule> W;
    for (int n : rs->block_degrees) {
      GradedPiece gp =
          degree_module(D.F, D.dimension, D.constant_generators, DiagPart{}, n);
      KGModule block{D.F, int(gp.basis.size()), gp.action};
      W = W ? direct_sum(*W, block) : block;
    }
    if (!rs->retract.mul(rs->embed).is_identity()) {
      ok = false;
      why = std::string("retraction not the identity for ") + names[k];
    }
    for (size_t g = 0; g < D.constant_generators.size(); ++g) {
      if (!W->action[g].mul(rs->embed).equals(rs->embed.mul(R.action[g])) ||
          !R.action[g].mul(rs->retract).equals(rs->retract.mul(W->action[g]))) {
        ok = false;
        why = std::string("maps not equivariant for ") + names[k];
      }
    }
    found_at += std::string(found_at.empty() ? "" : ", ") + names[k] + " at r=" +
                std::to_string(r_used);
  }
  return {ok, ok ? "regular module embedded with verified split retraction: " + found_at
                 : why};
}

std::pair<bool, std::string> criterion7() {
  bool ok = true;
  std::string why;
  Field F3 = Fp(3);
  GroupSchemeDescriptor refl{F3, 2, {mat(F3, 2, {2, 0, 0, 1})}, DiagPart{}};
  ConstantGroup Cr = enumerate_elements(F3, 2, refl.constant_generators);
  SmallnessReport s1 = is_small(refl, Cr);
  if (s1.small || s1.witness.find("pseudo-reflection") == std::string::npos) {
    ok = false;
    why = "diagonal reflection not rejected with a pseudo-reflection witness";
  }
  GroupSchemeDescriptor mu4{Fp(2), 2, {}, DiagPart{{4}, {{1}, {2}}}};
  ConstantGroup Cm = enumerate_elements(mu4.F, 2, {});
  SmallnessReport s2 = is_small(mu4, Cm);
  if (s2.small || s2.witness.find("mu_2") == std::string::npos) {
    ok = false;
    why = "mu_4 weights (1,2) not rejected with a mu_2 subgroup witness";
  }
  auto exit_code = [](const std::string& cmd) {
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  std::string cli = FROBSIG_CLI_PATH, dir = FROBSIG_CONFIG_DIR;
  if (exit_code(cli + " predict --config " + dir +
                "/reflection_f3.json >/dev/null 2>&1") != 2) {
    ok = false;
    why = "predict subcommand did not exit 2 on the reflection config";
  }
  if (exit_code(cli + " fsig --config " + dir + "/mu4_w12_f2.json >/dev/null 2>&1") !=
      2) {
    ok = false;
    why = "fsig subcommand did not exit 2 on the mu_4 (1,2) config";
  }
  return {ok, ok ? "reflection-type actions rejected with witnesses; predict/fsig "
                   "exit 2 on them"
                 : why};
}

std::pair<bool, std::string> criterion8() {
  bool ok = true;
  std::string why;

  // (a) Frobenius round-trips over every element of every field with m <= 3.
  const std::vector<FieldSpec> specs = {
      {2, 1, {0, 1}},    {2, 2, {1, 1, 1}},    {2, 3, {1, 1, 0, 1}},
      {3, 1, {0, 1}},    {3, 2, {1, 0, 1}},    {3, 3, {1, 2, 0, 1}},
      {5, 1, {0, 1}},    {5, 2, {2, 0, 1}},    {5, 3, {3, 3, 0, 1}},
      {7, 1, {0, 1}},    {7, 2, {1, 0, 1}},    {7, 3, {2, 0, 0, 1}}};
  for (const auto& spec : specs) {
    auto F = Field(spec);
    for (unsigned e = 1; e <= 3 && ok; ++e)
      for (uint32_t v = 0; v < F.q(); ++v) {
        FE x{v};
        if (F.inv_frobenius(F.frobenius(x, e), e) != x ||
            F.frobenius(F.inv_frobenius(x, e), e) != x) {
          ok = false;
          why = "power-root round trip failed over p=" + std::to_string(spec.p) +
                " m=" + std::to_string(spec.m);
        }
      }
  }

  // (b) Multiplicity additivity on randomized, basis-scrambled direct sums.
  Lcg rng(kRandomSeed);
  GroupSchemeDescriptor Dv = veronese3(), Dc = cyclic3f2();
  ConstantGroup Cv = enumerate_elements(Dv.F, 2, Dv.constant_generators);
  ConstantGroup Cc = enumerate_elements(Dc.F, 2, Dc.constant_generators);
  auto data_v = simples_and_projective_covers(Cv);
  auto data_c = simples_and_projective_covers(Cc);
  for (int trial = 0; trial < kRandomSumTrials && ok; ++trial) {
    const ConstantGroup& C = trial % 2 ? Cc : Cv;
    const auto& data = trial % 2 ? data_c : data_v;
    std::vector<int> expect(data.size(), 0);
    auto build = [&](int pieces) {
      std::optional<KGModule> M;
      for (int i = 0; i < pieces; ++i) {
        int pick = int(rng.next() % data.size());
        expect[size_t(pick)]++;
        M = M ? direct_sum(*M, data[size_t(pick)].projective_cover)
              : data[size_t(pick)].projective_cover;
      }
      return *M;
    };
    KGModule A = build(1 + int(rng.next() % 3));
    KGModule B = build(1 + int(rng.next() % 3));
    KGModule S = direct_sum(A, B);
    FieldMatrix T = random_invertible(S.F, S.dim, rng);
    FieldMatrix Tinv = *inverse_of(T);
    KGModule scrambled{S.F, S.dim, {}};
    for (const auto& a : S.action) scrambled.action.push_back(T.mul(a).mul(Tinv));
    for (size_t i = 0; i < data.size(); ++i) {
      int m = summand_multiplicity(C, data[i].projective_cover, scrambled);
      if (m != expect[i]) {
        ok = false;
        why = "multiplicity not additive on trial " + std::to_string(trial);
      }
    }
  }

  // (c) Every constructed pushforward has rank p^(de).
  struct RankCase {
    GroupSchemeDescriptor D;
    unsigned e;
  };
  Field F7 = Fp(7);
  GroupSchemeDescriptor mixed{
      F7, 2, {mat(F7, 2, {6, 0, 0, 6})}, DiagPart{{3}, {{1}, {1}}}};
  const std::vector<RankCase> cases = {{veronese3(), 1}, {veronese3(), 2},
                                       {veronese3(), 3}, {cyclic3f2(), 2},
                                       {shear4(), 1},    {mixed, 1}};
  for (const auto& rc : cases) {
    GradedEquivariantModule M = frobenius_pushforward(
        ring_module(rc.D.F, rc.D.dimension, int(rc.D.constant_generators.size()),
                    rc.D.diag.factors()),
        rc.D, rc.e);
    long long want = 1;
    for (int i = 0; i < rc.D.dimension * int(rc.e); ++i) want *= rc.D.F.p();
    if (M.rank() != want) {
      ok = false;
      why = "pushforward rank is not p^(de)";
    }
  }

  // (d) The averaging projector is idempotent and fixes every computed
  // invariant, on both constant and infinitesimal linearly reductive actions.
  const GroupSchemeDescriptor rey_cases[3] = {veronese3(), cyclic3f2(), mu2_11()};
  for (const auto& D : rey_cases) {
    ConstantGroup C = enumerate_elements(D.F, D.dimension, D.constant_generators);
    InvariantRingData inv = generators_up_to(D, C, 4);
    for (const auto& g : inv.generators) {
      Polynomial r = reynolds(D, C, g.poly);
      if (!poly_equal(r, g.poly)) {
        ok = false;
        why = "projector moved an invariant generator";
      }
    }
    for (int n = 1; n <= 3; ++n)
      for (const Exponent& e : monomials_of_degree(D.dimension, n)) {
        Polynomial h = Polynomial::monomial(D.F, e, D.F.one());
        Polynomial r1 = reynolds(D, C, h);
        if (!poly_equal(reynolds(D, C, r1), r1)) {
          ok = false;
          why = "projector not idempotent";
        }
      }
  }
  return {ok, ok ? "power-root round trips (12 fields), 50 scrambled direct sums "
                   "additive, pushforward ranks p^(de), averaging projector "
                   "idempotent: zero failures"
                 : why};
}

}  // namespace

int main() {
  guarded(1, criterion1);
  guarded(2, criterion2);
  guarded(3, criterion3);
  guarded(4, criterion4);
  guarded(5, criterion5);
  guarded(6, criterion6);
  guarded(7, criterion7);
  guarded(8, criterion8);
  if (failures == 0)
    std::printf("acceptance: all 8 criteria pass\n");
  else
    std::printf("acceptance: %d criterion(s) failing\n", failures);
  return failures;
}
