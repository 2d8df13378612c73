#include "frobsig/groupscheme.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace frobsig {

void validate_descriptor(GroupSchemeDescriptor& D) {
  if (!D.F.valid()) throw ConfigError("descriptor: field missing");
  if (D.dimension < 1) throw ConfigError("descriptor: dimension must be >= 1");
  for (auto& g : D.constant_generators) {
    if (g.rows() != D.dimension || g.cols() != D.dimension)
      throw ConfigError("descriptor: constant generator has wrong shape");
    if (!inverse_of(g).has_value())
      throw ConfigError("descriptor: constant generator not invertible");
  }
  auto& dg = D.diag;
  if (dg.orders.empty()) {
    if (!dg.weights.empty()) throw ConfigError("descriptor: weights without orders");
  } else {
    for (auto n : dg.orders)
      if (n < 1) throw ConfigError("descriptor: diag order must be >= 1");
    if (int(dg.weights.size()) != D.dimension)
      throw ConfigError("descriptor: weights need one row per variable");
    for (auto& row : dg.weights) {
      if (row.size() != dg.orders.size())
        throw ConfigError("descriptor: weight row has wrong number of factors");
      for (size_t j = 0; j < row.size(); ++j) {
        long long n = dg.orders[j];
        row[j] = ((row[j] % n) + n) % n;
      }
    }
    // commuting requirement: constant generators block-diagonal w.r.t. the
    // simultaneous weight decomposition (entry (i,j) != 0 forces equal weight
    // rows i and j).
    for (auto& g : D.constant_generators)
      for (int i = 0; i < D.dimension; ++i)
        for (int j = 0; j < D.dimension; ++j)
          if (!D.F.is_zero(g.at(i, j)) && dg.weights[i] != dg.weights[j])
            throw ConfigError(
                "descriptor: constant generator does not commute with the "
                "diagonalizable action (mixes distinct weight rows)");
  }
}

ConstantGroup enumerate_elements(const Field& F, int dim,
                                 const std::vector<FieldMatrix>& gens,
                                 size_t element_cap) {
  ConstantGroup C;
  C.F = F;
  C.dim = dim;
  FieldMatrix I = FieldMatrix::identity(F, dim);

  std::map<std::vector<uint32_t>, int> seen;
  std::vector<FieldMatrix> pool;
  pool.push_back(I);
  seen[I.packed()] = 0;
  for (size_t head = 0; head < pool.size(); ++head) {
    FieldMatrix cur = pool[head];
    for (auto& g : gens) {
      FieldMatrix nxt = cur.mul(g);
      auto key = nxt.packed();
      if (seen.count(key)) continue;
      if (pool.size() >= element_cap)
        throw ResourceCapError("group enumeration exceeded element cap of " +
                               std::to_string(element_cap));
      seen[key] = int(pool.size());
      pool.push_back(std::move(nxt));
    }
  }

  // canonical order: sort by packed entries
  std::sort(pool.begin(), pool.end(), [](const FieldMatrix& a, const FieldMatrix& b) {
    return a.packed() < b.packed();
  });
  C.elements = std::move(pool);
  std::map<std::vector<uint32_t>, int> index;
  for (size_t i = 0; i < C.elements.size(); ++i) index[C.elements[i].packed()] = int(i);
  C.identity_index = index.at(I.packed());

  size_t n = C.elements.size();
  C.mult.assign(n, std::vector<int>(n, -1));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      auto key = C.elements[i].mul(C.elements[j]).packed();
      auto it = index.find(key);
      if (it == index.end())
        throw InternalCheckError("group closure not closed under product");
      C.mult[i][j] = it->second;
    }
  C.inverse.assign(n, -1);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (C.mult[i][j] == C.identity_index) { C.inverse[i] = int(j); break; }
  for (auto v : C.inverse)
    if (v < 0) throw InternalCheckError("group element without inverse");

  C.gen_index.clear();
  for (auto& g : gens) C.gen_index.push_back(index.at(g.packed()));

  // words: BFS from the identity over the sorted list
  C.words.assign(n, {});
  std::vector<char> visited(n, 0);
  std::vector<int> queue{C.identity_index};
  visited[C.identity_index] = 1;
  for (size_t head = 0; head < queue.size(); ++head) {
    int cur = queue[head];
    for (size_t gi = 0; gi < C.gen_index.size(); ++gi) {
      int nxt = C.mult[cur][C.gen_index[gi]];
      if (visited[nxt]) continue;
      visited[nxt] = 1;
      C.words[nxt] = C.words[cur];
      C.words[nxt].push_back(int(gi));
      queue.push_back(nxt);
    }
  }
  for (auto f : visited)
    if (!f) throw InternalCheckError("group element unreachable from generators");
  return C;
}

long long scheme_order(const GroupSchemeDescriptor& D, const ConstantGroup& C) {
  long long o = C.order();
  for (auto n : D.diag.orders) o *= n;
  return o;
}

bool is_linearly_reductive(const GroupSchemeDescriptor& D, const ConstantGroup& C) {
  (void)D;
  return C.order() % C.F.p() != 0;
}

unsigned infinitesimal_e0(const GroupSchemeDescriptor& D) {
  unsigned best = 0;
  long long p = D.F.p();
  for (auto n : D.diag.orders) {
    unsigned s = 0;
    long long m = n;
    while (m % p == 0) { m /= p; ++s; }
    best = std::max(best, s);
  }
  return best;
}

bool diag_is_etale(const GroupSchemeDescriptor& D) {
  for (auto n : D.diag.orders)
    if (n % D.F.p() == 0) return false;
  return true;
}

namespace {

std::string matrix_witness(const FieldMatrix& g) {
  std::ostringstream os;
  os << "pseudo-reflection element (rank(g - 1) < 2):\n" << g.to_string();
  return os.str();
}

// subgroup of prod Z/n_j generated by the weight rows; capped closure
bool weights_generate(const DiagPart& dg, std::string* why) {
  long long total = 1;
  for (auto n : dg.orders) {
    total *= n;
    if (total > (1 << 20)) {
      if (why) *why = "character-group enumeration exceeds cap";
      return false;
    }
  }
  std::set<std::vector<long long>> sub;
  std::vector<long long> zero(dg.orders.size(), 0);
  sub.insert(zero);
  std::vector<std::vector<long long>> queue{zero};
  for (size_t head = 0; head < queue.size(); ++head) {
    for (auto& row : dg.weights) {
      std::vector<long long> nxt = queue[head];
      for (size_t j = 0; j < nxt.size(); ++j) nxt[j] = (nxt[j] + row[j]) % dg.orders[j];
      if (sub.insert(nxt).second) queue.push_back(nxt);
    }
  }
  if ((long long)sub.size() != total) {
    if (why)
      *why = "character map not injective: weight rows generate a proper "
             "subgroup of the character group";
    return false;
  }
  return true;
}

}  // namespace

SmallnessReport is_small(const GroupSchemeDescriptor& D, const ConstantGroup& C) {
  SmallnessReport rep;
  rep.small = true;
  rep.exact = !(D.has_constant() && D.has_diag());  // mixed certified factorwise only

  // constant part: no pseudo-reflections among the enumerated elements
  FieldMatrix I = FieldMatrix::identity(C.F, C.dim);
  for (size_t i = 0; i < C.elements.size(); ++i) {
    if (int(i) == C.identity_index) continue;
    FieldMatrix diff = C.elements[i].sub(I);
    if (rank_of(diff) < 2) {
      rep.small = false;
      rep.witness = matrix_witness(C.elements[i]);
      return rep;
    }
  }

  if (D.has_diag()) {
    std::string why;
    if (!weights_generate(D.diag, &why)) {
      rep.small = false;
      rep.witness = why;
      return rep;
    }
    // per factor j, per divisor delta > 1 of n_j: the subgroup mu_delta fixes
    // codimension #{i : w_ij != 0 mod delta}, which must be >= 2
    for (int j = 0; j < D.diag.factors(); ++j) {
      long long n = D.diag.orders[j];
      for (long long delta = 2; delta <= n; ++delta) {
        if (n % delta != 0) continue;
        int moved = 0;
        for (int i = 0; i < D.dimension; ++i)
          if (D.diag.weights[i][j] % delta != 0) ++moved;
        if (moved < 2) {
          std::ostringstream os;
          os << "subgroup mu_" << delta << " of factor " << j
             << " acts as a pseudo-reflection (moves " << moved << " variable"
             << (moved == 1 ? "" : "s") << ")";
          rep.small = false;
          rep.witness = os.str();
          return rep;
        }
      }
    }
  }
  return rep;
}

}  // namespace frobsig
