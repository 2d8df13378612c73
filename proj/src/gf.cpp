#include "frobsig/gf.hpp"

#include <algorithm>
#include <sstream>

namespace frobsig {

namespace detail {

// ---- small F_p[x] helpers used for validation and table construction ----

static std::vector<uint32_t> pm_trim(std::vector<uint32_t> a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

static std::vector<uint32_t> pm_mul(const std::vector<uint32_t>& a,
                                    const std::vector<uint32_t>& b, uint32_t p) {
  if (a.empty() || b.empty()) return {};
  std::vector<uint32_t> c(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      c[i + j] = (c[i + j] + uint64_t(a[i]) * b[j]) % p;
  return pm_trim(c);
}

static std::vector<uint32_t> pm_mod(std::vector<uint32_t> a,
                                    const std::vector<uint32_t>& f, uint32_t p) {
  // f monic
  a = pm_trim(a);
  size_t df = f.size() - 1;
  while (a.size() > df) {
    uint32_t lead = a.back();
    size_t shift = a.size() - 1 - df;
    if (lead != 0) {
      for (size_t i = 0; i <= df; ++i) {
        uint64_t t = uint64_t(lead) * f[i] % p;
        uint32_t& c = a[shift + i];
        c = uint32_t((c + p - t) % p);
      }
    }
    a = pm_trim(a);
    if (a.empty()) break;
  }
  return a;
}

static std::vector<uint32_t> pm_powmod(std::vector<uint32_t> base, uint64_t n,
                                       const std::vector<uint32_t>& f, uint32_t p) {
  std::vector<uint32_t> r{1};
  base = pm_mod(std::move(base), f, p);
  while (n) {
    if (n & 1) r = pm_mod(pm_mul(r, base, p), f, p);
    base = pm_mod(pm_mul(base, base, p), f, p);
    n >>= 1;
  }
  return r;
}

static std::vector<uint32_t> pm_gcd(std::vector<uint32_t> a, std::vector<uint32_t> b,
                                    uint32_t p) {
  a = pm_trim(a);
  b = pm_trim(b);
  while (!b.empty()) {
    // make b monic for pm_mod
    uint32_t lead = b.back();
    if (lead != 1) {
      // scale by inverse of lead
      uint32_t li = 1;
      for (uint32_t t = 1; t < p; ++t)
        if (uint64_t(t) * lead % p == 1) { li = t; break; }
      for (auto& c : b) c = uint32_t(uint64_t(c) * li % p);
    }
    auto r = pm_mod(a, b, p);
    a = b;
    b = r;
  }
  return a;
}

static bool is_prime_u32(uint32_t n) {
  if (n < 2) return false;
  for (uint32_t d = 2; uint64_t(d) * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

struct FieldCtx {
  FieldSpec spec;
  uint32_t p = 2, m = 1, q = 2;
  // reduction row for x^m expressed in the power basis (m digits)
  std::vector<uint32_t> xm_red;
  // discrete log tables for m > 1 (or also m == 1; valid for q <= 2^16)
  std::vector<uint32_t> exp_;        // size q-1: exp_[i] = g^i packed
  std::vector<int32_t> log_;         // size q: log_[packed] (=-1 for 0)

  uint32_t pack(const std::vector<uint32_t>& c) const {
    uint32_t v = 0;
    for (size_t i = c.size(); i-- > 0;) v = v * p + (i < c.size() ? c[i] : 0);
    return v;
  }
  std::vector<uint32_t> unpack(uint32_t v) const {
    std::vector<uint32_t> c(m, 0);
    for (uint32_t i = 0; i < m; ++i) { c[i] = v % p; v /= p; }
    return c;
  }

  uint32_t mul_slow(uint32_t a, uint32_t b) const {
    // polynomial multiplication with reduction by the modulus
    auto ca = unpack(a), cb = unpack(b);
    std::vector<uint32_t> prod(2 * m - 1, 0);
    for (uint32_t i = 0; i < m; ++i) {
      if (ca[i] == 0) continue;
      for (uint32_t j = 0; j < m; ++j)
        prod[i + j] = uint32_t((prod[i + j] + uint64_t(ca[i]) * cb[j]) % p);
    }
    // reduce degrees >= m downward
    for (size_t k = prod.size(); k-- > m;) {
      uint32_t c = prod[k];
      if (c == 0) continue;
      prod[k] = 0;
      // x^k = x^(k-m) * x^m; substitute reduction row repeatedly
      for (uint32_t i = 0; i < m; ++i)
        prod[k - m + i] = uint32_t((prod[k - m + i] + uint64_t(c) * xm_red[i]) % p);
    }
    prod.resize(m);
    return pack(prod);
  }
};

}  // namespace detail

using detail::FieldCtx;

Field::Field(const FieldSpec& spec) {
  auto ctx = std::make_shared<FieldCtx>();
  ctx->spec = spec;
  ctx->p = spec.p;
  ctx->m = spec.m;
  if (!detail::is_prime_u32(spec.p)) throw ConfigError("field: p must be prime");
  if (spec.m < 1) throw ConfigError("field: m must be >= 1");
  uint64_t q = 1;
  for (uint32_t i = 0; i < spec.m; ++i) {
    q *= spec.p;
    if (q > 65536) throw ConfigError("field: p^m exceeds 2^16 cap");
  }
  ctx->q = uint32_t(q);
  if (spec.modulus.size() != size_t(spec.m) + 1)
    throw ConfigError("field: modulus must have m+1 coefficients");
  for (auto c : spec.modulus)
    if (c >= spec.p) throw ConfigError("field: modulus coefficients must be reduced mod p");
  if (spec.modulus.back() != 1) throw ConfigError("field: modulus must be monic");

  if (spec.m > 1) {
    // Rabin irreducibility: x^(p^m) == x mod f, and gcd(x^(p^(m/l)) - x, f) = 1
    // for every prime l dividing m.
    const auto& f = spec.modulus;
    uint32_t p = spec.p;
    auto xpow = [&](uint64_t e) {
      return detail::pm_powmod({0, 1}, e, f, p);
    };
    uint64_t pm = 1;
    for (uint32_t i = 0; i < spec.m; ++i) pm *= p;
    auto top = xpow(pm);
    if (!(top.size() == 2 && top[0] == 0 && top[1] == 1) &&
        !(top.size() <= 1 && spec.m == 0))
      throw ConfigError("field: modulus is not irreducible (x^q != x)");
    for (uint32_t l = 2; l <= spec.m; ++l) {
      if (spec.m % l != 0 || !detail::is_prime_u32(l)) continue;
      uint64_t e = 1;
      for (uint32_t i = 0; i < spec.m / l; ++i) e *= p;
      auto xe = xpow(e);  // x^(p^(m/l)) mod f
      // subtract x
      std::vector<uint32_t> diff = xe;
      if (diff.size() < 2) diff.resize(2, 0);
      diff[1] = uint32_t((diff[1] + p - 1) % p);
      diff = detail::pm_trim(diff);
      auto g = detail::pm_gcd(f, diff, p);
      if (!(g.size() == 1))  // gcd must be a nonzero constant
        throw ConfigError("field: modulus is not irreducible (nontrivial factor)");
    }
  }

  // reduction row: x^m = -(f_0 + f_1 x + ... + f_{m-1} x^{m-1})
  ctx->xm_red.resize(ctx->m);
  for (uint32_t i = 0; i < ctx->m; ++i)
    ctx->xm_red[i] = uint32_t((ctx->p - spec.modulus[i] % ctx->p) % ctx->p);

  // discrete-log tables via a multiplicative generator
  uint32_t qm1 = ctx->q - 1;
  std::vector<uint32_t> prime_factors;
  {
    uint32_t n = qm1;
    for (uint32_t d = 2; uint64_t(d) * d <= n; ++d)
      while (n % d == 0) { prime_factors.push_back(d); while (n % d == 0) n /= d; break; }
    // redo cleanly
    prime_factors.clear();
    n = qm1;
    for (uint32_t d = 2; uint64_t(d) * d <= n; ++d) {
      if (n % d == 0) {
        prime_factors.push_back(d);
        while (n % d == 0) n /= d;
      }
    }
    if (n > 1) prime_factors.push_back(n);
  }
  auto pow_slow = [&](uint32_t a, uint64_t e) {
    uint32_t r = ctx->pack([&] { std::vector<uint32_t> one(ctx->m, 0); one[0] = 1; return one; }());
    uint32_t b = a;
    while (e) {
      if (e & 1) r = ctx->mul_slow(r, b);
      b = ctx->mul_slow(b, b);
      e >>= 1;
    }
    return r;
  };
  uint32_t gen = 0;
  const uint32_t one_packed = 1;  // packed '1' is value 1 in base-p packing
  for (uint32_t cand = 1; cand < ctx->q; ++cand) {
    if (cand == one_packed && qm1 > 1) continue;
    bool ok = true;
    for (uint32_t l : prime_factors)
      if (pow_slow(cand, qm1 / l) == one_packed) { ok = false; break; }
    if (ok) { gen = cand; break; }
  }
  if (gen == 0 && qm1 >= 1) {
    if (qm1 == 1) gen = 1;  // F_2: trivial group
    else throw InternalCheckError("field: no multiplicative generator found");
  }
  ctx->exp_.resize(qm1);
  ctx->log_.assign(ctx->q, -1);
  uint32_t acc = one_packed;
  for (uint32_t i = 0; i < qm1; ++i) {
    ctx->exp_[i] = acc;
    if (ctx->log_[acc] != -1) throw InternalCheckError("field: generator order too small");
    ctx->log_[acc] = int32_t(i);
    acc = ctx->mul_slow(acc, gen);
  }
  if (acc != one_packed) throw InternalCheckError("field: generator does not close");
  ctx_ = std::move(ctx);
}

uint32_t Field::p() const { return ctx_->p; }
uint32_t Field::m() const { return ctx_->m; }
uint32_t Field::q() const { return ctx_->q; }
const FieldSpec& Field::spec() const { return ctx_->spec; }

bool Field::operator==(const Field& o) const {
  if (ctx_ == o.ctx_) return true;
  if (!ctx_ || !o.ctx_) return false;
  return ctx_->spec == o.ctx_->spec;
}

FE Field::from_int(long long n) const {
  long long r = n % ctx_->p;
  if (r < 0) r += ctx_->p;
  return FE{uint32_t(r)};
}

FE Field::from_coords(const std::vector<uint32_t>& c) const {
  if (c.size() != ctx_->m) throw ConfigError("field element: expected m coordinates");
  std::vector<uint32_t> cc(c);
  for (auto& x : cc) x %= ctx_->p;
  return FE{ctx_->pack(cc)};
}

std::vector<uint32_t> Field::coords(FE x) const { return ctx_->unpack(x.v); }

FE Field::add(FE a, FE b) const {
  if (ctx_->m == 1) {
    uint32_t s = a.v + b.v;
    if (s >= ctx_->p) s -= ctx_->p;
    return FE{s};
  }
  uint32_t av = a.v, bv = b.v, out = 0, mult = 1;
  for (uint32_t i = 0; i < ctx_->m; ++i) {
    uint32_t da = av % ctx_->p, db = bv % ctx_->p;
    av /= ctx_->p; bv /= ctx_->p;
    uint32_t s = da + db;
    if (s >= ctx_->p) s -= ctx_->p;
    out += s * mult;
    mult *= ctx_->p;
  }
  return FE{out};
}

FE Field::neg(FE a) const {
  if (ctx_->m == 1) return FE{a.v == 0 ? 0 : ctx_->p - a.v};
  uint32_t av = a.v, out = 0, mult = 1;
  for (uint32_t i = 0; i < ctx_->m; ++i) {
    uint32_t d = av % ctx_->p;
    av /= ctx_->p;
    out += (d == 0 ? 0 : ctx_->p - d) * mult;
    mult *= ctx_->p;
  }
  return FE{out};
}

FE Field::sub(FE a, FE b) const { return add(a, neg(b)); }

FE Field::mul(FE a, FE b) const {
  if (a.v == 0 || b.v == 0) return FE{0};
  if (ctx_->m == 1) return FE{uint32_t(uint64_t(a.v) * b.v % ctx_->p)};
  uint32_t qm1 = ctx_->q - 1;
  uint32_t l = uint32_t(ctx_->log_[a.v]) + uint32_t(ctx_->log_[b.v]);
  if (l >= qm1) l -= qm1;
  return FE{ctx_->exp_[l]};
}

FE Field::inv(FE a) const {
  if (a.v == 0) throw InternalCheckError("field: inverse of zero");
  uint32_t qm1 = ctx_->q - 1;
  if (qm1 == 1) return a;  // F_2
  if (ctx_->m == 1) {
    uint32_t l = uint32_t(ctx_->log_[a.v]);
    return FE{ctx_->exp_[(qm1 - l) % qm1]};
  }
  uint32_t l = uint32_t(ctx_->log_[a.v]);
  return FE{ctx_->exp_[(qm1 - l) % qm1]};
}

FE Field::pow(FE a, unsigned long long n) const {
  if (n == 0) return one();
  if (a.v == 0) return FE{0};
  uint32_t qm1 = ctx_->q - 1;
  uint64_t l = uint64_t(ctx_->log_[a.v]) * (n % qm1) % qm1;
  return FE{ctx_->exp_[l]};
}

FE Field::frobenius(FE a, unsigned e) const {
  if (a.v == 0) return a;
  unsigned k = e % ctx_->m;
  uint64_t pe = 1;
  for (unsigned i = 0; i < k; ++i) pe *= ctx_->p;
  return pow(a, pe);
}

FE Field::inv_frobenius(FE a, unsigned e) const {
  // Frobenius has order m on F_{p^m}; invert by exponent reduction:
  // result = a^(p^((m - e mod m) mod m)).
  unsigned k = (ctx_->m - (e % ctx_->m)) % ctx_->m;
  return frobenius(a, k);
}

std::vector<FE> Field::all_elements() const {
  std::vector<FE> out;
  out.reserve(ctx_->q);
  for (uint32_t v = 0; v < ctx_->q; ++v) {
    // valid packings only: every base-p digit < p -- all v < q are valid
    out.push_back(FE{v});
  }
  return out;
}

std::string Field::to_string(FE x) const {
  if (ctx_->m == 1) return std::to_string(x.v);
  auto c = coords(x);
  std::ostringstream os;
  os << "(";
  for (uint32_t i = 0; i < ctx_->m; ++i) os << (i ? "," : "") << c[i];
  os << ")";
  return os.str();
}

// ---------------------------------------------------------------- matrices

FieldMatrix FieldMatrix::identity(const Field& F, int n) {
  FieldMatrix M(F, n, n);
  for (int i = 0; i < n; ++i) M.at(i, i) = F.one();
  return M;
}

FieldMatrix FieldMatrix::mul(const FieldMatrix& o) const {
  if (cols_ != o.rows_) throw InternalCheckError("matrix mul: shape mismatch");
  FieldMatrix R(F_, rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      FE aik = at(i, k);
      if (F_.is_zero(aik)) continue;
      for (int j = 0; j < o.cols_; ++j) {
        FE t = F_.mul(aik, o.at(k, j));
        R.at(i, j) = F_.add(R.at(i, j), t);
      }
    }
  return R;
}

FieldMatrix FieldMatrix::add(const FieldMatrix& o) const {
  FieldMatrix R(F_, rows_, cols_);
  for (size_t i = 0; i < a_.size(); ++i) R.a_[i] = F_.add(a_[i], o.a_[i]);
  return R;
}

FieldMatrix FieldMatrix::sub(const FieldMatrix& o) const {
  FieldMatrix R(F_, rows_, cols_);
  for (size_t i = 0; i < a_.size(); ++i) R.a_[i] = F_.sub(a_[i], o.a_[i]);
  return R;
}

FieldMatrix FieldMatrix::scale(FE c) const {
  FieldMatrix R(F_, rows_, cols_);
  for (size_t i = 0; i < a_.size(); ++i) R.a_[i] = F_.mul(a_[i], c);
  return R;
}

FieldMatrix FieldMatrix::transpose() const {
  FieldMatrix R(F_, cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) R.at(j, i) = at(i, j);
  return R;
}

FieldMatrix FieldMatrix::pow(unsigned long long n) const {
  if (rows_ != cols_) throw InternalCheckError("matrix pow: not square");
  FieldMatrix r = identity(F_, rows_);
  FieldMatrix b = *this;
  while (n) {
    if (n & 1) r = r.mul(b);
    b = b.mul(b);
    n >>= 1;
  }
  return r;
}

FieldMatrix FieldMatrix::kron(const FieldMatrix& o) const {
  FieldMatrix R(F_, rows_ * o.rows_, cols_ * o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) {
      FE c = at(i, j);
      if (F_.is_zero(c)) continue;
      for (int k = 0; k < o.rows_; ++k)
        for (int l = 0; l < o.cols_; ++l)
          R.at(i * o.rows_ + k, j * o.cols_ + l) = F_.mul(c, o.at(k, l));
    }
  return R;
}

bool FieldMatrix::is_zero() const {
  for (auto& x : a_) if (x.v != 0) return false;
  return true;
}

bool FieldMatrix::is_identity() const {
  if (rows_ != cols_) return false;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      if (at(i, j) != (i == j ? F_.one() : F_.zero())) return false;
  return true;
}

bool FieldMatrix::equals(const FieldMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ &&
         std::equal(a_.begin(), a_.end(), o.a_.begin(),
                    [](FE x, FE y) { return x.v == y.v; });
}

std::vector<uint32_t> FieldMatrix::packed() const {
  std::vector<uint32_t> out;
  out.reserve(a_.size());
  for (auto& x : a_) out.push_back(x.v);
  return out;
}

std::string FieldMatrix::to_string() const {
  std::ostringstream os;
  for (int i = 0; i < rows_; ++i) {
    os << "[";
    for (int j = 0; j < cols_; ++j) os << (j ? " " : "") << F_.to_string(at(i, j));
    os << "]";
    if (i + 1 < rows_) os << "\n";
  }
  return os.str();
}

// ------------------------------------------------------------- elimination

LinSolveResult rank_kernel_solve(const FieldMatrix& A, const FieldMatrix* rhs) {
  const Field& F = A.field();
  int n = A.rows(), m = A.cols();
  int rs = rhs ? rhs->cols() : 0;
  if (rhs && rhs->rows() != n) throw InternalCheckError("solve: rhs shape mismatch");

  // working copy: [A | rhs]
  FieldMatrix W(F, n, m + rs);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) W.at(i, j) = A.at(i, j);
    for (int j = 0; j < rs; ++j) W.at(i, m + j) = rhs->at(i, j);
  }

  std::vector<int> pivot_col_of_row;
  std::vector<int> pivot_cols;
  int r = 0;
  for (int c = 0; c < m && r < n; ++c) {
    int pr = -1;
    for (int i = r; i < n; ++i)
      if (!F.is_zero(W.at(i, c))) { pr = i; break; }
    if (pr < 0) continue;
    if (pr != r)
      for (int j = 0; j < m + rs; ++j) std::swap(W.at(pr, j), W.at(r, j));
    FE piv_inv = F.inv(W.at(r, c));
    for (int j = c; j < m + rs; ++j) W.at(r, j) = F.mul(W.at(r, j), piv_inv);
    for (int i = 0; i < n; ++i) {
      if (i == r) continue;
      FE f = W.at(i, c);
      if (F.is_zero(f)) continue;
      for (int j = c; j < m + rs; ++j)
        W.at(i, j) = F.sub(W.at(i, j), F.mul(f, W.at(r, j)));
    }
    pivot_cols.push_back(c);
    pivot_col_of_row.push_back(c);
    ++r;
  }

  LinSolveResult res;
  res.rank = r;

  // kernel basis: one column per free column, ascending
  std::vector<int> is_pivot(m, 0);
  for (int c : pivot_cols) is_pivot[c] = 1;
  std::vector<int> free_cols;
  for (int c = 0; c < m; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  FieldMatrix K(F, m, int(free_cols.size()));
  for (size_t k = 0; k < free_cols.size(); ++k) {
    int fc = free_cols[k];
    K.at(fc, int(k)) = F.one();
    for (int i = 0; i < r; ++i) {
      int pc = pivot_col_of_row[i];
      K.at(pc, int(k)) = F.neg(W.at(i, fc));
    }
  }
  res.kernel = std::move(K);

  if (rhs) {
    // consistency: rows r..n-1 must have zero rhs entries
    bool ok = true;
    for (int i = r; i < n && ok; ++i)
      for (int j = 0; j < rs; ++j)
        if (!F.is_zero(W.at(i, m + j))) { ok = false; break; }
    res.solvable = ok;
    if (ok) {
      FieldMatrix X(F, m, rs);
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < rs; ++j) X.at(pivot_col_of_row[i], j) = W.at(i, m + j);
      res.solution = std::move(X);
    }
  }
  return res;
}

int rank_of(const FieldMatrix& A) { return rank_kernel_solve(A).rank; }

std::optional<FieldMatrix> inverse_of(const FieldMatrix& A) {
  if (A.rows() != A.cols()) return std::nullopt;
  FieldMatrix I = FieldMatrix::identity(A.field(), A.rows());
  auto res = rank_kernel_solve(A, &I);
  if (res.rank != A.rows()) return std::nullopt;
  return res.solution;
}

std::vector<int> pivot_columns(const FieldMatrix& A) {
  const Field& F = A.field();
  int n = A.rows(), m = A.cols();
  FieldMatrix W = A;
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < m && r < n; ++c) {
    int pr = -1;
    for (int i = r; i < n; ++i)
      if (!F.is_zero(W.at(i, c))) { pr = i; break; }
    if (pr < 0) continue;
    if (pr != r)
      for (int j = 0; j < m; ++j) std::swap(W.at(pr, j), W.at(r, j));
    FE piv_inv = F.inv(W.at(r, c));
    for (int j = c; j < m; ++j) W.at(r, j) = F.mul(W.at(r, j), piv_inv);
    for (int i = 0; i < n; ++i) {
      if (i == r) continue;
      FE f = W.at(i, c);
      if (F.is_zero(f)) continue;
      for (int j = c; j < m; ++j) W.at(i, j) = F.sub(W.at(i, j), F.mul(f, W.at(r, j)));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

FieldMatrix column_space(const FieldMatrix& A) {
  auto pivots = pivot_columns(A);
  FieldMatrix B(A.field(), A.rows(), int(pivots.size()));
  for (size_t k = 0; k < pivots.size(); ++k)
    for (int i = 0; i < A.rows(); ++i) B.at(i, int(k)) = A.at(i, pivots[k]);
  return B;
}

FieldMatrix hcat(const FieldMatrix& A, const FieldMatrix& B) {
  if (A.rows() != B.rows()) throw InternalCheckError("hcat: row mismatch");
  FieldMatrix R(A.field(), A.rows(), A.cols() + B.cols());
  for (int i = 0; i < A.rows(); ++i) {
    for (int j = 0; j < A.cols(); ++j) R.at(i, j) = A.at(i, j);
    for (int j = 0; j < B.cols(); ++j) R.at(i, A.cols() + j) = B.at(i, j);
  }
  return R;
}

FieldMatrix vcat(const FieldMatrix& A, const FieldMatrix& B) {
  if (A.cols() != B.cols()) throw InternalCheckError("vcat: col mismatch");
  FieldMatrix R(A.field(), A.rows() + B.rows(), A.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) R.at(i, j) = A.at(i, j);
  for (int i = 0; i < B.rows(); ++i)
    for (int j = 0; j < B.cols(); ++j) R.at(A.rows() + i, j) = B.at(i, j);
  return R;
}

std::vector<FE> char_poly(const FieldMatrix& A) {
  if (A.rows() != A.cols()) throw InternalCheckError("char_poly: not square");
  const Field& F = A.field();
  int n = A.rows();
  if (n == 0) return {F.one()};
  FieldMatrix H = A;

  // Hessenberg reduction by similarity (exact over the field).
  for (int k = 0; k < n - 2; ++k) {
    int piv = -1;
    for (int i = k + 1; i < n; ++i)
      if (!F.is_zero(H.at(i, k))) { piv = i; break; }
    if (piv < 0) continue;
    if (piv != k + 1) {
      for (int j = 0; j < n; ++j) std::swap(H.at(piv, j), H.at(k + 1, j));
      for (int i = 0; i < n; ++i) std::swap(H.at(i, piv), H.at(i, k + 1));
    }
    FE inv = F.inv(H.at(k + 1, k));
    for (int i = k + 2; i < n; ++i) {
      FE f = F.mul(H.at(i, k), inv);
      if (F.is_zero(f)) continue;
      // row_i -= f * row_{k+1};  col_{k+1} += f * col_i
      for (int j = 0; j < n; ++j) H.at(i, j) = F.sub(H.at(i, j), F.mul(f, H.at(k + 1, j)));
      for (int j = 0; j < n; ++j) H.at(j, k + 1) = F.add(H.at(j, k + 1), F.mul(f, H.at(j, i)));
    }
  }

  // char polys of leading principal Hessenberg minors:
  // p_0 = 1;  p_k = (x - h_{k,k}) p_{k-1} - sum_{i=1}^{k-1}
  //   h_{i,k} (prod_{j=i}^{k-1} h_{j+1,j}) p_{i-1}     (1-based)
  std::vector<std::vector<FE>> P(n + 1);
  P[0] = {F.one()};
  for (int k = 1; k <= n; ++k) {
    std::vector<FE> pk(k + 1, F.zero());
    // (x - h_{kk}) * P[k-1]
    FE hkk = H.at(k - 1, k - 1);
    for (int t = 0; t < k; ++t) {
      pk[t + 1] = F.add(pk[t + 1], P[k - 1][t]);
      pk[t] = F.sub(pk[t], F.mul(hkk, P[k - 1][t]));
    }
    FE prod = F.one();
    for (int i = k - 1; i >= 1; --i) {
      prod = F.mul(prod, H.at(i, i - 1));  // h_{i+1,i} in 1-based
      FE coeff = F.mul(H.at(i - 1, k - 1), prod);
      if (F.is_zero(coeff)) continue;
      for (int t = 0; t < i; ++t)
        pk[t] = F.sub(pk[t], F.mul(coeff, P[i - 1][t]));
    }
    P[k] = std::move(pk);
  }
  return P[n];
}

}  // namespace frobsig
