#include "frobsig/diagmu.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "frobsig/equivmod.hpp"
#include "frobsig/errors.hpp"
#include "frobsig/modrep.hpp"

namespace frobsig {
namespace {

long long mod_pow(long long b, unsigned e, long long n) {
  long long r = 1 % n;
  b %= n;
  for (unsigned k = 0; k < e; ++k) r = (r * b) % n;
  return r;
}

long long inv_mod(long long a, long long n) {
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
  if (r != 1) throw InternalCheckError("modular inverse of a non-unit");
  return ((t % n) + n) % n;
}

// Per-factor solved form of p^e * chi = -v (mod n): chi = base + t * step for
// t in [0, nsol); nsol = 0 when unsolvable.
struct CosetSolver {
  long long n = 1;     // factor order
  long long g = 1;     // gcd(p^e, n) = p^min(e, v_p(n))
  long long m = 1;     // n / g
  long long peu = 1;   // (p^e / g) mod m, a unit mod m
  long long inv = 0;   // its inverse mod m
};

CosetSolver make_solver(long long n, long long p, unsigned e) {
  CosetSolver s;
  s.n = n;
  long long v = 0, t = n;
  while (t % p == 0) {
    t /= p;
    ++v;
  }
  unsigned vp = unsigned(std::min<long long>(v, e));
  s.g = 1;
  for (unsigned k = 0; k < vp; ++k) s.g *= p;
  s.m = n / s.g;
  s.peu = mod_pow(p, e - vp, s.m);
  s.inv = (s.m == 1) ? 0 : inv_mod(s.peu, s.m);
  return s;
}

// Enumerates class vectors in odometer order (rightmost factor fastest).
std::vector<std::vector<long long>> all_classes(const DiagPart& diag) {
  std::vector<std::vector<long long>> out;
  int r = diag.factors();
  std::vector<long long> c(size_t(r), 0);
  long long total = 1;
  for (int l = 0; l < r; ++l) total *= diag.orders[size_t(l)];
  out.reserve(size_t(total));
  for (long long i = 0; i < total; ++i) {
    out.push_back(c);
    for (int l = r - 1; l >= 0; --l) {
      if (++c[size_t(l)] < diag.orders[size_t(l)]) break;
      c[size_t(l)] = 0;
    }
  }
  return out;
}

long long flat_index(const DiagPart& diag, const std::vector<long long>& c) {
  long long idx = 0;
  for (int l = 0; l < diag.factors(); ++l) idx = idx * diag.orders[size_t(l)] + c[size_t(l)];
  return idx;
}

void check_volume(long long p, int dimension, unsigned e) {
  long double bits = (long double)(dimension) * e * std::log2((long double)p);
  if (bits > 62)
    throw ResourceCapError("pushforward volume exceeds 64-bit counting range");
}

// Adds the solution coset for weight vector v (one residue per factor) with
// the given multiplicity into the flat count table.
void add_coset(const DiagPart& diag, const std::vector<CosetSolver>& sol,
               const std::vector<long long>& v, long long mult,
               std::vector<long long>& counts) {
  int r = diag.factors();
  std::vector<long long> base(size_t(r), 0), nsol(size_t(r), 0);
  for (int l = 0; l < r; ++l) {
    const CosetSolver& s = sol[size_t(l)];
    long long vl = ((v[size_t(l)] % s.n) + s.n) % s.n;
    if (vl % s.g != 0) return;  // unsolvable in this factor
    long long rhs = ((-(vl / s.g)) % s.m + s.m) % s.m;
    base[size_t(l)] = (s.m == 1) ? 0 : (s.inv * rhs) % s.m;
    nsol[size_t(l)] = s.g;
  }
  // walk the product coset chi_l = base_l + t_l * m_l
  std::vector<long long> t(size_t(r), 0);
  while (true) {
    std::vector<long long> chi(size_t(r), 0);
    for (int l = 0; l < r; ++l)
      chi[size_t(l)] = base[size_t(l)] + t[size_t(l)] * sol[size_t(l)].m;
    counts[size_t(flat_index(diag, chi))] += mult;
    int l = r - 1;
    for (; l >= 0; --l) {
      if (++t[size_t(l)] < nsol[size_t(l)]) break;
      t[size_t(l)] = 0;
    }
    if (l < 0) break;
  }
}

std::vector<WeightClassCount> package(const DiagPart& diag,
                                      const std::vector<long long>& counts) {
  std::vector<WeightClassCount> out;
  auto classes = all_classes(diag);
  out.reserve(classes.size());
  for (auto& c : classes) out.push_back({c, counts[size_t(flat_index(diag, c))]});
  return out;
}

}  // namespace

std::vector<WeightClassCount> veronese_counts_enumerated(const DiagPart& diag, long long p,
                                                         int dimension, unsigned e) {
  check_volume(p, dimension, e);
  int r = diag.factors();
  long long pe = 1;
  for (unsigned k = 0; k < e; ++k) pe *= p;
  long long vol = 1;
  for (int k = 0; k < dimension; ++k) {
    if (vol > (1LL << 62) / pe)
      throw ResourceCapError("pushforward volume exceeds 64-bit counting range");
    vol *= pe;
  }
  std::vector<CosetSolver> sol;
  for (int l = 0; l < r; ++l) sol.push_back(make_solver(diag.orders[size_t(l)], p, e));
  long long ncls = 1;
  for (int l = 0; l < r; ++l) ncls *= diag.orders[size_t(l)];
  std::vector<long long> counts(size_t(ncls), 0);
  std::vector<long long> a(size_t(dimension), 0), v(size_t(r), 0);
  for (long long i = 0; i < vol; ++i) {
    for (int l = 0; l < r; ++l) {
      long long acc = 0;
      for (int k = 0; k < dimension; ++k)
        acc += diag.weights[size_t(k)][size_t(l)] * a[size_t(k)];
      v[size_t(l)] = acc % diag.orders[size_t(l)];
    }
    add_coset(diag, sol, v, 1, counts);
    for (int k = dimension - 1; k >= 0; --k) {
      if (++a[size_t(k)] < pe) break;
      a[size_t(k)] = 0;
    }
  }
  return package(diag, counts);
}

std::vector<WeightClassCount> veronese_counts_convolved(const DiagPart& diag, long long p,
                                                        int dimension, unsigned e) {
  check_volume(p, dimension, e);
  int r = diag.factors();
  long long pe = 1;
  for (unsigned k = 0; k < e; ++k) pe *= p;
  long long ncls = 1;
  for (int l = 0; l < r; ++l) ncls *= diag.orders[size_t(l)];
  std::vector<CosetSolver> sol;
  for (int l = 0; l < r; ++l) sol.push_back(make_solver(diag.orders[size_t(l)], p, e));

  // Joint distribution of the weight vector of x^a over the box, built one
  // coordinate at a time.  A coordinate's contribution is periodic in the
  // exponent with period dividing the order product, so large boxes cost
  // only the number of classes.
  std::vector<long long> dist(size_t(ncls), 0);
  dist[0] = 1;
  auto classes = all_classes(diag);
  for (int k = 0; k < dimension; ++k) {
    // distribution of the single exponent b in [0, pe)
    std::vector<long long> single(size_t(ncls), 0);
    long long period = 1;
    for (int l = 0; l < r; ++l) {
      long long n = diag.orders[size_t(l)];
      long long w = ((diag.weights[size_t(k)][size_t(l)] % n) + n) % n;
      long long step = n / std::gcd(n, w == 0 ? n : w);
      period = std::lcm(period, step);
    }
    std::vector<long long> v(size_t(r), 0);
    for (long long b = 0; b < std::min(pe, period); ++b) {
      long long reps = (pe - b + period - 1) / period;  // # of b' = b mod period
      for (int l = 0; l < r; ++l) {
        long long n = diag.orders[size_t(l)];
        v[size_t(l)] = ((diag.weights[size_t(k)][size_t(l)] * b) % n + n) % n;
      }
      single[size_t(flat_index(diag, v))] += reps;
    }
    std::vector<long long> next(size_t(ncls), 0);
    for (size_t ci = 0; ci < classes.size(); ++ci) {
      if (dist[ci] == 0) continue;
      for (size_t cj = 0; cj < classes.size(); ++cj) {
        if (single[cj] == 0) continue;
        std::vector<long long> sum(size_t(r), 0);
        for (int l = 0; l < r; ++l)
          sum[size_t(l)] = (classes[ci][size_t(l)] + classes[cj][size_t(l)]) %
                           diag.orders[size_t(l)];
        next[size_t(flat_index(diag, sum))] += dist[ci] * single[cj];
      }
    }
    dist = std::move(next);
  }

  std::vector<long long> counts(size_t(ncls), 0);
  for (size_t ci = 0; ci < classes.size(); ++ci)
    if (dist[ci] != 0) add_coset(diag, sol, classes[ci], dist[ci], counts);
  return package(diag, counts);
}

std::vector<WeightClassCount> veronese_summand_counts(const DiagPart& diag, long long p,
                                                      int dimension, unsigned e,
                                                      long long enumeration_cap) {
  check_volume(p, dimension, e);
  long double vol = std::pow((long double)p, (long double)dimension * e);
  if (vol <= (long double)enumeration_cap)
    return veronese_counts_enumerated(diag, p, dimension, e);
  return veronese_counts_convolved(diag, p, dimension, e);
}

RealizationCheck crosscheck_constant_realization(const Field& F, int dimension,
                                                 const DiagPart& diag, unsigned e_max,
                                                 long long slice_cap) {
  if (diag.factors() != 1)
    throw ConfigError("constant realization supports a single diagonal factor");
  long long n = diag.orders[0];
  long long p = F.p();
  long long q = 1;
  for (int k = 0; k < F.m(); ++k) q *= p;
  if (n % p == 0 || (q - 1) % n != 0) throw ConfigError("field lacks n-th roots");

  // A fixed primitive n-th root: the first field element of exact order n.
  FE zeta = F.one();
  bool found = false;
  for (FE x : F.all_elements()) {
    if (F.is_zero(x)) continue;
    FE pw = F.one();
    long long ord = 0;
    do {
      pw = F.mul(pw, x);
      ++ord;
    } while (!(pw == F.one()) && ord <= n);
    if (ord == n) {
      zeta = x;
      found = true;
      break;
    }
  }
  if (!found) throw ConfigError("field lacks n-th roots");

  FieldMatrix g(F, dimension, dimension);
  for (int i = 0; i < dimension; ++i) {
    long long w = ((diag.weights[size_t(i)][0] % n) + n) % n;
    FE v = F.one();
    for (long long k = 0; k < w; ++k) v = F.mul(v, zeta);
    g.at(i, i) = v;
  }
  ConstantGroup C = enumerate_elements(F, dimension, {g});
  if ((long long)C.order() != n)
    throw ConfigError("realized constant group has smaller order than the factor");
  std::vector<FieldMatrix> vm{g};
  GroupSchemeDescriptor D{F, dimension, {g}, DiagPart{}};
  auto data = simples_and_projective_covers(C);

  // Identify each simple by the exponent of zeta through which the generator
  // acts; the class-chi module pairs with the simple acting by zeta^(-chi).
  std::map<long long, const SimpleProjectiveDatum*> by_exponent;
  for (const auto& d : data) {
    if (d.simple.dim != 1)
      throw InternalCheckError("cyclic realization produced a non-linear simple");
    FE val = d.simple.action[0].at(0, 0);
    FE pw = F.one();
    long long k = 0;
    while (!(pw == val) && k < n) {
      pw = F.mul(pw, zeta);
      ++k;
    }
    if (!(pw == val))
      throw InternalCheckError("simple character is not a power of the chosen root");
    by_exponent[k % n] = &d;
  }

  RealizationCheck rep;
  rep.agree = true;
  GradedEquivariantModule S = ring_module(F, dimension, 1, 0);
  for (unsigned e = 1; e <= e_max; ++e) {
    auto Se = frobenius_pushforward(S, D, e);
    auto combinatorial = veronese_summand_counts(diag, p, dimension, e);
    for (const auto& wc : combinatorial) {
      long long chi = wc.cls[0];
      long long want_exp = ((-chi) % n + n) % n;
      auto it = by_exponent.find(want_exp);
      if (it == by_exponent.end())
        throw InternalCheckError("missing simple for a weight class");
      SummandQuery qy{it->second->simple, it->second->incl, it->second->proj, {}};
      long long total = 0;
      for (const auto& sc : summand_counts(Se, C, vm, DiagPart{}, qy, slice_cap))
        total += sc.count;
      bool ok = (total == wc.count);
      rep.agree = rep.agree && ok;
      rep.lines.push_back("e=" + std::to_string(e) + " class " + std::to_string(chi) +
                          ": weight-class " + std::to_string(wc.count) +
                          ", equivariant " + std::to_string(total) +
                          (ok ? " (agree)" : " (MISMATCH)"));
    }
  }
  return rep;
}

}  // namespace frobsig
