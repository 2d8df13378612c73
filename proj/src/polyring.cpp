#include "frobsig/polyring.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace frobsig {

int Polynomial::degree() const {
  int d = -1;
  for (auto& [e, c] : terms) d = std::max(d, total_degree(e));
  return d;
}

Polynomial Polynomial::constant(const Field& F, FE c) {
  Polynomial p;
  if (!F.is_zero(c)) p.terms[{}] = c;  // empty exponent = degree 0 in any arity
  return p;
}

Polynomial Polynomial::monomial(const Field& F, Exponent e, FE c) {
  Polynomial p;
  if (!F.is_zero(c)) p.terms[std::move(e)] = c;
  return p;
}

namespace {
// exponents may differ in arity when constants are involved; normalize
Exponent pad(const Exponent& e, size_t d) {
  Exponent out = e;
  out.resize(std::max(d, e.size()), 0);
  return out;
}
size_t arity(const Polynomial& a, const Polynomial& b) {
  size_t d = 0;
  for (auto& [e, c] : a.terms) d = std::max(d, e.size());
  for (auto& [e, c] : b.terms) d = std::max(d, e.size());
  return d;
}
}  // namespace

Polynomial poly_add(const Field& F, const Polynomial& a, const Polynomial& b) {
  size_t d = arity(a, b);
  Polynomial out;
  auto acc = [&](const Polynomial& p) {
    for (auto& [e, c] : p.terms) {
      Exponent key = pad(e, d);
      auto it = out.terms.find(key);
      FE v = it == out.terms.end() ? c : F.add(it->second, c);
      if (F.is_zero(v))
        out.terms.erase(key);
      else
        out.terms[key] = v;
    }
  };
  acc(a);
  acc(b);
  return out;
}

Polynomial poly_scale(const Field& F, const Polynomial& a, FE c) {
  Polynomial out;
  if (F.is_zero(c)) return out;
  for (auto& [e, v] : a.terms) out.terms[e] = F.mul(v, c);
  return out;
}

Polynomial poly_mul(const Field& F, const Polynomial& a, const Polynomial& b) {
  size_t d = arity(a, b);
  Polynomial out;
  for (auto& [ea, ca] : a.terms)
    for (auto& [eb, cb] : b.terms) {
      Exponent e = pad(ea, d);
      Exponent e2 = pad(eb, d);
      for (size_t i = 0; i < d; ++i) e[i] += e2[i];
      FE v = F.mul(ca, cb);
      auto it = out.terms.find(e);
      FE nv = it == out.terms.end() ? v : F.add(it->second, v);
      if (F.is_zero(nv))
        out.terms.erase(e);
      else
        out.terms[e] = nv;
    }
  return out;
}

bool poly_equal(const Polynomial& a, const Polynomial& b) {
  // compare up to exponent padding
  size_t d = arity(a, b);
  std::map<Exponent, FE> na, nb;
  for (auto& [e, c] : a.terms) na[pad(e, d)] = c;
  for (auto& [e, c] : b.terms) nb[pad(e, d)] = c;
  return na == nb;
}

bool poly_homogeneous_of(const Polynomial& a, int deg) {
  for (auto& [e, c] : a.terms)
    if (total_degree(e) != deg) return false;
  return true;
}

std::string poly_str(const Field& F, const Polynomial& a) {
  if (a.terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [e, c] : a.terms) {
    if (!first) os << " + ";
    first = false;
    os << F.to_string(c);
    for (size_t i = 0; i < e.size(); ++i)
      if (e[i] > 0) {
        os << "*x" << i + 1;
        if (e[i] > 1) os << "^" << e[i];
      }
  }
  return os.str();
}

Polynomial act_on_polynomial(const Field& F, const FieldMatrix& g, const Polynomial& f) {
  int d = g.cols();
  // image of each variable as a linear form
  std::vector<Polynomial> var_image(d);
  for (int j = 0; j < d; ++j) {
    Polynomial lf;
    for (int i = 0; i < d; ++i) {
      if (F.is_zero(g.at(i, j))) continue;
      Exponent e(d, 0);
      e[i] = 1;
      lf.terms[e] = g.at(i, j);
    }
    var_image[j] = lf;
  }
  // powers are memoized per call: pow_cache[j][k] = (g.x_j)^k
  std::vector<std::vector<Polynomial>> pow_cache(d);
  auto var_pow = [&](int j, int k) -> const Polynomial& {
    auto& cache = pow_cache[j];
    if (cache.empty()) cache.push_back(Polynomial::constant(F, F.one()));
    while (int(cache.size()) <= k)
      cache.push_back(poly_mul(F, cache.back(), var_image[j]));
    return cache[k];
  };
  Polynomial out;
  for (auto& [e, c] : f.terms) {
    Polynomial term = Polynomial::constant(F, c);
    for (int j = 0; j < int(e.size()) && j < d; ++j)
      if (e[j] > 0) term = poly_mul(F, term, var_pow(j, e[j]));
    out = poly_add(F, out, term);
  }
  return out;
}

std::vector<Exponent> monomials_of_degree(int d, int n) {
  std::vector<Exponent> out;
  Exponent cur(d, 0);
  // recursive enumeration in ascending lex order
  std::function<void(int, int)> rec = [&](int pos, int rem) {
    if (pos == d - 1) {
      cur[pos] = rem;
      out.push_back(cur);
      return;
    }
    for (int k = 0; k <= rem; ++k) {
      cur[pos] = k;
      rec(pos + 1, rem - k);
    }
  };
  if (d == 0) {
    if (n == 0) out.push_back({});
    return out;
  }
  rec(0, n);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<long long> monomial_weight(const DiagPart& diag, const Exponent& a) {
  std::vector<long long> w(diag.orders.size(), 0);
  for (size_t j = 0; j < diag.orders.size(); ++j) {
    long long acc = 0;
    for (size_t i = 0; i < a.size() && i < diag.weights.size(); ++i)
      acc += (long long)a[i] * diag.weights[i][j];
    long long n = diag.orders[j];
    w[j] = ((acc % n) + n) % n;
  }
  return w;
}

FieldMatrix poly_coords(const Field& F, const Polynomial& f,
                        const std::vector<Exponent>& basis) {
  FieldMatrix v(F, int(basis.size()), 1);
  std::map<Exponent, int> index;
  for (size_t i = 0; i < basis.size(); ++i) index[basis[i]] = int(i);
  size_t d = basis.empty() ? 0 : basis[0].size();
  for (auto& [e, c] : f.terms) {
    Exponent key = e;
    key.resize(std::max(d, e.size()), 0);
    auto it = index.find(key);
    if (it == index.end())
      throw InternalCheckError("poly_coords: monomial outside the given basis");
    v.at(it->second, 0) = c;
  }
  return v;
}

GradedPiece degree_module(const Field& F, int dimension,
                          const std::vector<FieldMatrix>& constant_generators,
                          const DiagPart& diag, int n) {
  if (n > 64) throw ResourceCapError("degree_module: total degree cap (64) exceeded");
  GradedPiece P;
  P.degree = n;
  P.basis = monomials_of_degree(dimension, n);
  int N = int(P.basis.size());
  for (auto& g : constant_generators) {
    FieldMatrix M(F, N, N);
    for (int j = 0; j < N; ++j) {
      Polynomial img = act_on_polynomial(
          F, g, Polynomial::monomial(F, P.basis[j], F.one()));
      if (!poly_homogeneous_of(img, n))
        throw InternalCheckError("degree_module: action is not degree-preserving");
      FieldMatrix col = poly_coords(F, img, P.basis);
      for (int i = 0; i < N; ++i) M.at(i, j) = col.at(i, 0);
    }
    P.action.push_back(std::move(M));
  }
  if (!diag.orders.empty()) {
    P.weights.reserve(N);
    for (auto& e : P.basis) P.weights.push_back(monomial_weight(diag, e));
  }
  return P;
}

}  // namespace frobsig
