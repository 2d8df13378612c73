#include "frobsig/fsig.hpp"

#include <chrono>
#include <cmath>
#include <map>

#include "frobsig/diagmu.hpp"
#include "frobsig/errors.hpp"
#include "frobsig/polyring.hpp"

namespace frobsig {
namespace {

std::string class_label(const std::vector<long long>& cls) {
  std::string s = "w=(";
  for (size_t i = 0; i < cls.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(cls[i]);
  }
  return s + ")";
}

std::string joined_label(const std::string& cover, const std::vector<long long>& cls,
                         bool has_constant, bool has_diag) {
  if (has_constant && has_diag) return cover + "|" + class_label(cls);
  if (has_diag) return class_label(cls);
  return cover;
}

// Class vectors in odometer order, rightmost factor fastest; a single empty
// class when there is no diagonalizable part.
std::vector<std::vector<long long>> weight_classes(const DiagPart& diag) {
  std::vector<std::vector<long long>> out;
  int r = diag.factors();
  std::vector<long long> c(size_t(r), 0);
  long long total = 1;
  for (int l = 0; l < r; ++l) total *= diag.orders[size_t(l)];
  for (long long i = 0; i < total; ++i) {
    out.push_back(c);
    for (int l = r - 1; l >= 0; --l) {
      if (++c[size_t(l)] < diag.orders[size_t(l)]) break;
      c[size_t(l)] = 0;
    }
  }
  return out;
}

long long pow_ll(long long b, unsigned e) {
  long long r = 1;
  while (e--) r *= b;
  return r;
}

void check_measure_range(unsigned p, int d, unsigned e_max) {
  if (double(d) * e_max * std::log2(double(p)) > 40)
    throw ResourceCapError("measurement range exceeds the counting cap");
}

struct QueryPlan {
  std::string label;
  int module_rank = 1;
  Rational predicted;
  KGModule P;
  std::optional<FieldMatrix> incl, proj;
  std::vector<long long> weight;
};

// The full deterministic label grid shared by predict() and measure():
// weight classes outermost (odometer order), covers within a class in
// Wedderburn order, the modular free line last within each class.
std::vector<QueryPlan> label_grid(const GroupSchemeDescriptor& D, const ConstantGroup& C,
                                  const std::vector<SimpleProjectiveDatum>& data,
                                  long long group_dim, long long L_rank) {
  bool constant_semisimple = C.order() % (long long)D.F.spec().p != 0;
  std::vector<QueryPlan> grid;
  for (const auto& cls : weight_classes(D.diag)) {
    for (const auto& d : data) {
      QueryPlan q;
      q.label = joined_label(d.label, cls, D.has_constant(), D.has_diag());
      q.module_rank = d.projective_cover.dim;
      q.predicted =
          Rational(L_rank * d.simple.dim, group_dim * d.end_dim);
      q.P = d.projective_cover;
      q.incl = d.incl;
      q.proj = d.proj;
      q.weight = cls;
      grid.push_back(std::move(q));
    }
    if (D.has_constant() && !constant_semisimple) {
      QueryPlan q;
      q.label = joined_label("free", cls, true, D.has_diag());
      q.module_rank = 1;
      q.predicted = Rational(0);
      q.P = trivial_module(D.F, C);
      q.weight = cls;
      grid.push_back(std::move(q));
    }
  }
  return grid;
}

void gate_smallness(const GroupSchemeDescriptor& D, const ConstantGroup& C,
                    SmallnessReport& out) {
  out = is_small(D, C);
  if (!out.small)
    throw NotSmallError(out.witness.empty() ? "action not small" : out.witness);
}

// Split complement of the equivariant idempotent idem on M: submodule
// structure on ker(idem) with inclusion/retraction relative to M.
struct SplitPart {
  KGModule mod;
  FieldMatrix incl;  // M.dim x k
  FieldMatrix proj;  // k x M.dim
};

SplitPart complement_of(const Field& F, const KGModule& M, const FieldMatrix& idem) {
  FieldMatrix K = rank_kernel_solve(idem).kernel;  // M.dim x k
  FieldMatrix target = FieldMatrix::identity(F, M.dim).sub(idem);
  auto sol = rank_kernel_solve(K, &target);
  if (!sol.solvable || !sol.solution)
    throw InternalCheckError("complement_of: idempotent image mismatch");
  SplitPart out;
  out.incl = K;
  out.proj = *sol.solution;  // k x M.dim with K*proj = I - idem
  out.mod.F = F;
  out.mod.dim = K.cols();
  for (const auto& A : M.action) out.mod.action.push_back(out.proj.mul(A).mul(K));
  return out;
}

}  // namespace

// ------------------------------------------------------------ theta vectors

ThetaVector theta_vector(const std::vector<std::pair<std::string, long long>>& counts,
                         const std::vector<int>& u_values, unsigned p, int dimension,
                         unsigned e) {
  double scale = std::pow(double(p), double(dimension) * e);
  ThetaVector v;
  for (size_t i = 0; i < counts.size(); ++i)
    v.terms.push_back({counts[i].first, double(counts[i].second) / scale,
                       i < u_values.size() ? u_values[i] : 1});
  return v;
}

double theta_norm(const ThetaVector& v) {
  double n = 0;
  for (const auto& t : v.terms) n += std::abs(t.coeff) * t.u_value;
  return n;
}

// -------------------------------------------------------------- predictions

Prediction predict(const GroupSchemeDescriptor& D, long long L_rank) {
  if (L_rank < 1) throw ConfigError("module rank must be positive");
  ConstantGroup C = enumerate_elements(D.F, D.dimension, D.constant_generators);
  SmallnessReport sm;
  gate_smallness(D, C, sm);
  Prediction P;
  P.group_algebra_dim = scheme_order(D, C);
  P.linearly_reductive = is_linearly_reductive(D, C);
  P.e0 = infinitesimal_e0(D);
  P.L_rank = L_rank;
  P.s_value = P.linearly_reductive ? Rational(1, P.group_algebra_dim) : Rational(0);
  std::vector<SimpleProjectiveDatum> data = simples_and_projective_covers(C);
  std::vector<QueryPlan> grid = label_grid(D, C, data, P.group_algebra_dim, L_rank);
  size_t per_class = grid.size() / weight_classes(D.diag).size();
  for (size_t i = 0; i < grid.size(); ++i) {
    PredictedLabel pl;
    pl.label = grid[i].label;
    pl.module_rank = grid[i].module_rank;
    pl.coefficient = grid[i].predicted;
    size_t in_class = i % per_class;  // Wedderburn entries first, then "free"
    if (in_class < data.size()) {
      pl.simple_dim = data[in_class].simple.dim;
      pl.end_dim = data[in_class].end_dim;
    }
    P.labels.push_back(std::move(pl));
  }
  return P;
}

// -------------------------------------------------------------- measurement

FSigReport measure(const GroupSchemeDescriptor& D, unsigned e_max, long long slice_cap,
                   const std::string& module_choice) {
  auto t0 = std::chrono::steady_clock::now();
  const Field& F = D.F;
  unsigned p = F.spec().p;
  int d = D.dimension;
  if (e_max < 1) throw ConfigError("e_max must be at least 1");
  check_measure_range(p, d, e_max);

  ConstantGroup C = enumerate_elements(F, d, D.constant_generators);
  FSigReport R;
  SmallnessReport sm;
  gate_smallness(D, C, sm);
  R.small = sm.small;
  R.smallness_exact = sm.exact;
  R.linearly_reductive = is_linearly_reductive(D, C);
  R.e0 = infinitesimal_e0(D);
  R.group_algebra_dim = scheme_order(D, C);
  bool hasC = D.has_constant(), hasD = D.has_diag();
  R.pipeline = hasD ? (hasC ? "mixed" : "diagonalizable") : "constant";
  R.s_value = R.linearly_reductive ? Rational(1, R.group_algebra_dim) : Rational(0);

  std::vector<SimpleProjectiveDatum> data = simples_and_projective_covers(C);

  // Resolve the starting module.
  long long L_rank = 1;
  const SimpleProjectiveDatum* cover_start = nullptr;
  if (module_choice != "S") {
    if (module_choice.rfind("cover:", 0) != 0)
      throw ConfigError("unknown module choice: " + module_choice);
    if (R.pipeline != "constant")
      throw ConfigError("cover module choice requires the constant pipeline");
    std::string want = module_choice.substr(6);
    for (const auto& dt : data)
      if (dt.label == want) cover_start = &dt;
    if (!cover_start) throw ConfigError("no cover labeled " + want);
    L_rank = cover_start->projective_cover.dim;
  }

  std::vector<QueryPlan> grid = label_grid(D, C, data, R.group_algebra_dim, L_rank);
  for (const auto& q : grid) {
    LabelSeries s;
    s.label = q.label;
    s.module_rank = q.module_rank;
    s.predicted = q.predicted;
    R.series.push_back(std::move(s));
  }

  for (unsigned e = 1; e <= e_max; ++e) {
    long long scale = pow_ll((long long)p, unsigned(d) * e);
    R.e_values.push_back(e);
    R.scales.push_back(scale);
    std::vector<long long> counts_now(grid.size(), 0);
    std::vector<std::vector<ShiftCount>> shifts_now(grid.size());

    if (R.pipeline == "diagonalizable") {
      std::map<std::vector<long long>, long long> by_class;
      for (const auto& wc : veronese_summand_counts(D.diag, p, d, e))
        by_class[wc.cls] = wc.count;
      for (size_t i = 0; i < grid.size(); ++i) {
        auto it = by_class.find(grid[i].weight);
        counts_now[i] = it == by_class.end() ? 0 : it->second;
      }
      R.max_rank = std::max(R.max_rank, scale);
    } else {
      GradedEquivariantModule M0 =
          cover_start
              ? standard_module(F, d, cover_start->projective_cover, Rational(0),
                                std::vector<long long>(size_t(D.diag.factors()), 0))
              : ring_module(F, d, int(D.constant_generators.size()), D.diag.factors());
      GradedEquivariantModule Me = frobenius_pushforward(M0, D, e);
      R.max_rank = std::max(R.max_rank, (long long)Me.rank());
      for (size_t i = 0; i < grid.size(); ++i) {
        SummandQuery q{grid[i].P, grid[i].incl, grid[i].proj, grid[i].weight};
        shifts_now[i] = summand_counts(Me, C, D.constant_generators, D.diag, q, slice_cap);
        long long t = 0;
        for (const auto& sc : shifts_now[i]) t += sc.count;
        counts_now[i] = t;
      }
    }

    long long weighted = 0;
    ThetaVector theta;
    for (size_t i = 0; i < grid.size(); ++i) {
      LabelSeries& s = R.series[i];
      s.counts.push_back(counts_now[i]);
      s.shift_breakdown.push_back(std::move(shifts_now[i]));
      Rational dev = (Rational(counts_now[i], scale) - s.predicted).abs();
      if (!s.deviations.empty() && !(dev <= s.deviations.back()))
        s.trend_nonincreasing = false;
      s.deviations.push_back(dev);
      weighted += counts_now[i] * s.module_rank;
      theta.terms.push_back(
          {s.label, double(counts_now[i]) / double(scale), s.module_rank});
    }
    R.complete.push_back(weighted == scale * L_rank);
    R.theta.push_back(std::move(theta));
  }

  R.wall_ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
  return R;
}

// --------------------------------------------------- regular-module search

std::optional<RegularSummand> find_regular_summand(const GroupSchemeDescriptor& D,
                                                   const ConstantGroup& C, int r) {
  if (D.has_diag())
    throw ConfigError("regular summand search requires a constant-only descriptor");
  const Field& F = D.F;

  RegularSummand out;
  out.degree_cap = r;
  KGModule W;
  W.F = F;
  W.dim = 0;
  W.action.assign(D.constant_generators.size(), FieldMatrix(F, 0, 0));
  bool first = true;
  for (int n = 0; n <= r; ++n) {
    GradedPiece gp = degree_module(F, D.dimension, D.constant_generators, DiagPart{}, n);
    KGModule block{F, int(gp.basis.size()), gp.action};
    out.block_degrees.push_back(n);
    out.block_offsets.push_back(W.dim);
    W = first ? block : direct_sum(W, block);
    first = false;
  }

  KGModule R = regular_module(C);
  PeelResult parts = peel_with_maps(C, R);
  if (!parts.complete)
    throw InternalCheckError("regular module did not peel completely");

  std::vector<SimpleProjectiveDatum> data = simples_and_projective_covers(C);

  // Greedy placement: split one copy per piece, then shrink to a complement
  // so later pieces land in fresh coordinates.
  SplitPart cur{W, FieldMatrix::identity(F, W.dim), FieldMatrix::identity(F, W.dim)};
  std::vector<FieldMatrix> ins, outs;  // relative to W
  for (const auto& part : parts.parts) {
    SplitPairs sp = summand_split_pairs(C, part.mod, cur.mod);
    if (sp.multiplicity == 0) return std::nullopt;  // not found up to r
    // The returned pairing is invertible over End/rad but an individual
    // composition need not be; pick one with an exact inverse (End/rad is a
    // field here, so some entry of the first pivot row is a unit) and
    // normalize so that psi . phi is the identity on the piece.
    FieldMatrix phi(F, 0, 0), psi(F, 0, 0);
    bool normalized = false;
    for (size_t i = 0; i < sp.outs.size() && !normalized; ++i)
      for (size_t j = 0; j < sp.ins.size() && !normalized; ++j) {
        auto uinv = inverse_of(sp.outs[i].mul(sp.ins[j]));
        if (uinv) {
          phi = sp.ins[j];
          psi = uinv->mul(sp.outs[i]);
          normalized = true;
        }
      }
    if (!normalized)
      throw InternalCheckError("regular summand: no invertible split pairing");
    FieldMatrix in_W = cur.incl.mul(phi);
    FieldMatrix out_W = psi.mul(cur.proj);
    ins.push_back(in_W);
    outs.push_back(out_W);
    FieldMatrix idem = phi.mul(psi);
    SplitPart comp = complement_of(F, cur.mod, idem);
    comp.incl = cur.incl.mul(comp.incl);
    comp.proj = comp.proj.mul(cur.proj);
    cur = std::move(comp);

    RegularPiece piece;
    piece.dim = part.mod.dim;
    piece.label = "P?";
    for (const auto& dt : data)
      if (dt.projective_cover.dim == part.mod.dim &&
          indecomposable_iso(C, part.mod, dt.projective_cover)) {
        piece.label = dt.label;
        break;
      }
    for (size_t b = 0; b < out.block_offsets.size(); ++b) {
      int lo = out.block_offsets[b];
      int hi = b + 1 < out.block_offsets.size() ? out.block_offsets[b + 1] : W.dim;
      bool touched = false;
      for (int i = lo; i < hi && !touched; ++i)
        for (int j = 0; j < in_W.cols() && !touched; ++j)
          if (!(in_W.at(i, j) == F.zero())) touched = true;
      if (touched) piece.degrees.push_back(out.block_degrees[b]);
    }
    out.pieces.push_back(std::move(piece));
  }

  // Assemble the block maps through the peel system of the regular module.
  auto E = FieldMatrix(F, W.dim, R.dim);
  auto Pi = FieldMatrix(F, R.dim, W.dim);
  for (size_t t = 0; t < parts.parts.size(); ++t) {
    E = E.add(ins[t].mul(parts.parts[t].proj));
    Pi = Pi.add(parts.parts[t].incl.mul(outs[t]));
  }
  if (!Pi.mul(E).is_identity())
    throw InternalCheckError("regular summand: retraction is not the identity");
  for (size_t g = 0; g < D.constant_generators.size(); ++g) {
    if (!W.action[g].mul(E).equals(E.mul(R.action[g])))
      throw InternalCheckError("regular summand: embedding not equivariant");
    if (!R.action[g].mul(Pi).equals(Pi.mul(W.action[g])))
      throw InternalCheckError("regular summand: retraction not equivariant");
  }
  out.embed = std::move(E);
  out.retract = std::move(Pi);
  return out;
}

}  // namespace frobsig
