#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <vector>

#include "frobsig/diagmu.hpp"
#include "frobsig/errors.hpp"
#include "frobsig/gf.hpp"
#include "frobsig/groupscheme.hpp"

using namespace frobsig;

namespace {

Field Fq(int p, int m = 1) {
  if (m == 1) return Field(FieldSpec{p, 1, {0, 1}});
  REQUIRE(m == 2);
  REQUIRE(p == 2);
  return Field(FieldSpec{2, 2, {1, 1, 1}});
}

std::map<std::vector<long long>, long long> as_map(const std::vector<WeightClassCount>& v) {
  std::map<std::vector<long long>, long long> m;
  for (const auto& wc : v) m[wc.cls] = wc.count;
  return m;
}

long long total_of(const std::vector<WeightClassCount>& v) {
  long long t = 0;
  for (const auto& wc : v) t += wc.count;
  return t;
}

}  // namespace

TEST_CASE("order-2 weight classes over p=3: parity counts") {
  // [DERIVED] enumerate 9 exponent pairs by parity: 5 even, 4 odd.
  DiagPart diag{{2}, {{1}, {1}}};
  auto counts = as_map(veronese_summand_counts(diag, 3, 2, 1));
  CHECK(counts == std::map<std::vector<long long>, long long>{{{0}, 5}, {{1}, 4}});
  // independent in-test parity enumeration
  int even = 0, odd = 0;
  for (int a0 = 0; a0 < 3; ++a0)
    for (int a1 = 0; a1 < 3; ++a1) ((a0 + a1) % 2 == 0 ? even : odd)++;
  CHECK(counts[{0}] == even);
  CHECK(counts[{1}] == odd);
}

TEST_CASE("p dividing the order: coset contributions") {
  DiagPart diag{{2}, {{1}, {1}}};
  // [DERIVED] gcd(2,2)=2: the two even-weight exponents contribute the full
  // coset {0,1} each; odd-weight exponents contribute nothing.
  auto c1 = as_map(veronese_summand_counts(diag, 2, 2, 1));
  CHECK(c1 == std::map<std::vector<long long>, long long>{{{0}, 2}, {{1}, 2}});
  // [DERIVED] closed form p^(2e-1) per class.
  auto c3 = as_map(veronese_summand_counts(diag, 2, 2, 3));
  CHECK(c3 == std::map<std::vector<long long>, long long>{{{0}, 32}, {{1}, 32}});
  // Exact p^(2e-1) per class for every e up to 4; normalized value is
  // exactly 1/2 with zero deviation.
  long long pe2 = 1;  // p^(2e)
  for (unsigned e = 1; e <= 4; ++e) {
    pe2 *= 4;
    auto ce = as_map(veronese_summand_counts(diag, 2, 2, e));
    CHECK(ce[{0}] == pe2 / 2);
    CHECK(ce[{1}] == pe2 / 2);
    CHECK(2 * ce[{0}] == pe2);  // normalized exactly one half
  }
}

TEST_CASE("enumerated and convolved counting strategies agree") {
  auto check_same = [](const DiagPart& diag, long long p, int d, unsigned e) {
    auto a = veronese_counts_enumerated(diag, p, d, e);
    auto b = veronese_counts_convolved(diag, p, d, e);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].cls == b[i].cls);
      CHECK(a[i].count == b[i].count);
    }
  };
  for (unsigned e = 1; e <= 3; ++e) {
    check_same(DiagPart{{2}, {{1}, {1}}}, 3, 2, e);
    check_same(DiagPart{{3}, {{1}, {2}}}, 2, 2, e);
    check_same(DiagPart{{4}, {{1}, {2}}}, 2, 2, e);
  }
  check_same(DiagPart{{4}, {{1}, {3}}}, 5, 2, 1);
  // two factors, mixed orders
  check_same(DiagPart{{2, 3}, {{1, 1}, {1, 2}}}, 5, 2, 1);
  check_same(DiagPart{{2, 3}, {{1, 1}, {1, 2}}}, 5, 2, 2);
}

TEST_CASE("coprime orders: every exponent contributes exactly once") {
  // [TRIVIAL] unique solution per exponent, so totals are p^(de).
  DiagPart d34{{3}, {{1}, {2}}};
  CHECK(total_of(veronese_summand_counts(d34, 2, 2, 2)) == 16);
  DiagPart d4{{4}, {{1}, {3}}};
  CHECK(total_of(veronese_summand_counts(d4, 5, 2, 1)) == 25);
  DiagPart d23{{2, 3}, {{1, 1}, {1, 2}}};
  CHECK(total_of(veronese_summand_counts(d23, 5, 2, 1)) == 25);
}

TEST_CASE("order-1 factor: a single class holding everything") {
  // [TRIVIAL]
  DiagPart diag{{1}, {{0}, {0}}};
  auto v = veronese_summand_counts(diag, 3, 2, 2);
  REQUIRE(v.size() == 1);
  CHECK(v[0].cls == std::vector<long long>{0});
  CHECK(v[0].count == 81);
}

TEST_CASE("zero classes are reported and class order is stable") {
  // Weights all even modulo 4: odd classes are never hit.
  DiagPart diag{{4}, {{2}, {2}}};
  auto v = veronese_summand_counts(diag, 3, 2, 1);
  REQUIRE(v.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(v[size_t(k)].cls == std::vector<long long>{k});
  CHECK(v[1].count == 0);
  CHECK(v[3].count == 0);
  CHECK(v[0].count + v[2].count == 9);
}

TEST_CASE("large boxes run through the convolved path exactly") {
  DiagPart diag{{2}, {{1}, {1}}};
  // 2^40 exponents: far beyond enumeration, closed form 2^39 per class.
  auto v = as_map(veronese_summand_counts(diag, 2, 2, 20));
  CHECK(v[{0}] == (1LL << 39));
  CHECK(v[{1}] == (1LL << 39));
  // Volume beyond 64-bit counting range is refused.
  CHECK_THROWS_AS(veronese_summand_counts(diag, 2, 2, 40), ResourceCapError);
}

TEST_CASE("normalized counts approach the reciprocal order") {
  DiagPart diag{{3}, {{1}, {2}}};
  auto dev = [&](unsigned e) {
    auto v = veronese_summand_counts(diag, 2, 2, e);
    double vol = std::pow(2.0, 2.0 * e);
    double worst = 0;
    for (const auto& wc : v)
      worst = std::max(worst, std::abs(double(wc.count) / vol - 1.0 / 3.0));
    return worst;
  };
  CHECK(dev(4) < dev(1));
}

TEST_CASE("constant realization agrees with the weight-class counts") {
  {
    // Order 2 as diag(-1,-1) over F_3, the two-pipeline bridge.  [DERIVED]
    DiagPart diag{{2}, {{1}, {1}}};
    auto rep = crosscheck_constant_realization(Fq(3), 2, diag, 2);
    CHECK(rep.agree);
    CHECK(rep.lines.size() == 4);  // classes 0,1 at e = 1,2
  }
  {
    // Order 4 with weights (1,3) over F_5.  [DERIVED: oracle equality]
    DiagPart diag{{4}, {{1}, {3}}};
    auto rep = crosscheck_constant_realization(Fq(5), 2, diag, 1);
    CHECK(rep.agree);
  }
  {
    // Order 3 over F_4 (roots of unity live in the quadratic extension).
    DiagPart diag{{3}, {{1}, {2}}};
    auto rep = crosscheck_constant_realization(Fq(2, 2), 2, diag, 1);
    CHECK(rep.agree);
  }
}

TEST_CASE("constant realization requires roots of unity in the field") {
  DiagPart mu2{{2}, {{1}, {1}}};
  CHECK_THROWS_AS(crosscheck_constant_realization(Fq(2), 2, mu2, 1), ConfigError);
  DiagPart mu4{{4}, {{1}, {3}}};
  CHECK_THROWS_AS(crosscheck_constant_realization(Fq(3), 2, mu4, 1), ConfigError);
  DiagPart two_factor{{2, 2}, {{1, 0}, {0, 1}}};
  CHECK_THROWS_AS(crosscheck_constant_realization(Fq(5), 2, two_factor, 1), ConfigError);
}
