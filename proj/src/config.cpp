#include "frobsig/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace frobsig {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& why) {
  throw ConfigError("config: " + path + " " + why);
}

void require_object(const json& j, const std::string& path,
                    const std::vector<std::string>& allowed) {
  if (!j.is_object()) bad(path, "must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) bad(path + "." + it.key(), "is not a recognized field");
  }
}

long long get_int(const json& j, const std::string& path, long long lo, long long hi) {
  if (!j.is_number_integer())
    bad(path, "must be an integer");
  long long v = j.get<long long>();
  if (v < lo || v > hi)
    bad(path, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

bool is_prime(uint32_t n) {
  if (n < 2) return false;
  for (uint32_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

constexpr long long kElementMaxLimit = 200;       // global group-enumeration cap
constexpr long long kSliceMaxLimit = 10000000;    // global slice-dimension cap
constexpr long long kDegreeBoundLimit = 64;
constexpr long long kEMaxLimit = 64;

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  require_object(j, "$",
                 {"p", "m", "modulus", "dimension", "group", "module", "e_max",
                  "degree_bound", "caps", "output"});

  RunConfig cfg;
  if (!j.contains("p")) bad("$.p", "is required");
  cfg.p = uint32_t(get_int(j["p"], "$.p", 2, 65521));
  if (!is_prime(cfg.p)) bad("$.p", "must be prime");

  if (j.contains("m")) cfg.m = uint32_t(get_int(j["m"], "$.m", 1, 16));
  long long q = 1;
  for (uint32_t i = 0; i < cfg.m; ++i) {
    q *= cfg.p;
    if (q > 65536) bad("$.m", "gives a field larger than 2^16 elements");
  }

  if (j.contains("modulus")) {
    const json& mod = j["modulus"];
    if (!mod.is_array() || mod.size() != size_t(cfg.m) + 1)
      bad("$.modulus", "must be an array of m+1 coefficients");
    for (size_t i = 0; i < mod.size(); ++i)
      cfg.modulus.push_back(
          uint32_t(get_int(mod[i], "$.modulus[" + std::to_string(i) + "]", 0, cfg.p - 1)));
    if (cfg.modulus.back() != 1) bad("$.modulus", "must be monic (last coefficient 1)");
  } else {
    if (cfg.m > 1) bad("$.modulus", "is required when m > 1");
    cfg.modulus = {0, 1};
  }

  if (!j.contains("dimension")) bad("$.dimension", "is required");
  cfg.dimension = int(get_int(j["dimension"], "$.dimension", 1, 12));

  if (j.contains("group")) {
    const json& g = j["group"];
    require_object(g, "$.group", {"constant_generators", "diag"});
    if (g.contains("constant_generators")) {
      const json& gens = g["constant_generators"];
      if (!gens.is_array()) bad("$.group.constant_generators", "must be an array");
      for (size_t k = 0; k < gens.size(); ++k) {
        std::string gp = "$.group.constant_generators[" + std::to_string(k) + "]";
        const json& gm = gens[k];
        if (!gm.is_array() || gm.size() != size_t(cfg.dimension))
          bad(gp, "must be a " + std::to_string(cfg.dimension) + "-row matrix");
        std::vector<std::vector<long long>> rows;
        for (size_t r = 0; r < gm.size(); ++r) {
          std::string rp = gp + "[" + std::to_string(r) + "]";
          if (!gm[r].is_array() || gm[r].size() != size_t(cfg.dimension))
            bad(rp, "must have " + std::to_string(cfg.dimension) + " entries");
          std::vector<long long> row;
          for (size_t c = 0; c < gm[r].size(); ++c)
            row.push_back(get_int(gm[r][c], rp + "[" + std::to_string(c) + "]", 0, q - 1));
          rows.push_back(std::move(row));
        }
        cfg.constant_generators.push_back(std::move(rows));
      }
    }
    if (g.contains("diag")) {
      const json& dg = g["diag"];
      require_object(dg, "$.group.diag", {"orders", "weights"});
      if (!dg.contains("orders") || !dg.contains("weights"))
        bad("$.group.diag", "needs both orders and weights");
      const json& ords = dg["orders"];
      if (!ords.is_array() || ords.empty()) bad("$.group.diag.orders", "must be a nonempty array");
      for (size_t i = 0; i < ords.size(); ++i)
        cfg.diag_orders.push_back(
            get_int(ords[i], "$.group.diag.orders[" + std::to_string(i) + "]", 1, 1000000));
      const json& wts = dg["weights"];
      if (!wts.is_array() || wts.size() != size_t(cfg.dimension))
        bad("$.group.diag.weights", "must have one row per variable");
      for (size_t r = 0; r < wts.size(); ++r) {
        std::string rp = "$.group.diag.weights[" + std::to_string(r) + "]";
        if (!wts[r].is_array() || wts[r].size() != cfg.diag_orders.size())
          bad(rp, "must have one weight per diagonal factor");
        std::vector<long long> row;
        for (size_t c = 0; c < wts[r].size(); ++c)
          row.push_back(get_int(wts[r][c], rp + "[" + std::to_string(c) + "]",
                                -1000000000LL, 1000000000LL));
        cfg.diag_weights.push_back(std::move(row));
      }
    }
  }

  if (j.contains("module")) {
    if (!j["module"].is_string())
      bad("$.module", "must be \"S\" or \"cover:<label>\"");
    cfg.module_choice = j["module"].get<std::string>();
    if (cfg.module_choice != "S" &&
        (cfg.module_choice.rfind("cover:", 0) != 0 || cfg.module_choice.size() <= 6))
      bad("$.module", "must be \"S\" or \"cover:<label>\"");
  }

  if (j.contains("e_max"))
    cfg.e_max = unsigned(get_int(j["e_max"], "$.e_max", 1, kEMaxLimit));
  if (j.contains("degree_bound"))
    cfg.degree_bound = int(get_int(j["degree_bound"], "$.degree_bound", 0, kDegreeBoundLimit));

  if (j.contains("caps")) {
    const json& caps = j["caps"];
    require_object(caps, "$.caps", {"element_max", "slice_max"});
    if (caps.contains("element_max"))
      cfg.element_max = get_int(caps["element_max"], "$.caps.element_max", 1, kElementMaxLimit);
    if (caps.contains("slice_max"))
      cfg.slice_max = get_int(caps["slice_max"], "$.caps.slice_max", 1, kSliceMaxLimit);
  }

  if (j.contains("output")) {
    const json& out = j["output"];
    require_object(out, "$.output", {"format", "path"});
    if (out.contains("format")) {
      if (!out["format"].is_string()) bad("$.output.format", "must be \"csv\" or \"json\"");
      cfg.output_format = out["format"].get<std::string>();
      if (cfg.output_format != "csv" && cfg.output_format != "json")
        bad("$.output.format", "must be \"csv\" or \"json\"");
    }
    if (out.contains("path")) {
      if (!out["path"].is_string()) bad("$.output.path", "must be a string");
      cfg.output_path = out["path"].get<std::string>();
    }
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

GroupSchemeDescriptor descriptor_of(const RunConfig& cfg) {
  auto F = Field(FieldSpec{cfg.p, cfg.m, cfg.modulus});
  GroupSchemeDescriptor D;
  D.F = F;
  D.dimension = cfg.dimension;
  for (const auto& rows : cfg.constant_generators) {
    FieldMatrix g(F, cfg.dimension, cfg.dimension);
    for (int r = 0; r < cfg.dimension; ++r)
      for (int c = 0; c < cfg.dimension; ++c) g.at(r, c) = FE{uint32_t(rows[r][c])};
    D.constant_generators.push_back(std::move(g));
  }
  if (!cfg.diag_orders.empty()) {
    D.diag.orders = cfg.diag_orders;
    D.diag.weights = cfg.diag_weights;
  }
  validate_descriptor(D);
  return D;
}

std::string canonical_config_json(const RunConfig& cfg) {
  json j;
  j["p"] = cfg.p;
  j["m"] = cfg.m;
  j["modulus"] = cfg.modulus;
  j["dimension"] = cfg.dimension;
  j["group"]["constant_generators"] = cfg.constant_generators;
  j["group"]["diag"]["orders"] = cfg.diag_orders;
  j["group"]["diag"]["weights"] = cfg.diag_weights;
  j["module"] = cfg.module_choice;
  j["e_max"] = cfg.e_max;
  j["degree_bound"] = cfg.degree_bound;
  j["caps"]["element_max"] = cfg.element_max;
  j["caps"]["slice_max"] = cfg.slice_max;
  j["output"]["format"] = cfg.output_format;
  j["output"]["path"] = cfg.output_path;
  return j.dump();  // keys sorted, compact separators
}

std::string config_hash_hex(const RunConfig& cfg) {
  uint64_t h = fnv1a64(canonical_config_json(cfg));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return std::string(buf);
}

unsigned worker_count_from_env() {
  const char* v = std::getenv("FROBSIG_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  long n = std::strtol(v, &end, 10);
  if (end == v || *end != '\0' || n < 1 || n > 4096)
    throw ConfigError("FROBSIG_THREADS must be a positive integer");
  return unsigned(n);
}

std::string decimal4(const Rational& r) {
  __int128 scaled = (__int128)r.num * 10000;
  bool neg = scaled < 0;
  if (neg) scaled = -scaled;
  __int128 d = r.den;
  long long qv = (long long)((2 * scaled + d) / (2 * d));  // half away from zero
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%lld.%04lld", neg && qv ? "-" : "", qv / 10000,
                qv % 10000);
  std::string s(buf);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

std::string csv_field(const std::string& s) {
  bool needs = s.find_first_of(",\"\n") != std::string::npos;
  if (!needs) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

std::string breakdown_str(const std::vector<ShiftCount>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += v[i].shift.str() + ":" + std::to_string(v[i].count);
  }
  return s;
}

}  // namespace

std::string fsig_csv(const FSigReport& R, const std::string& hash) {
  std::string out =
      "config_hash,e,label,shift_count_breakdown,count,normalized,predicted,deviation\n";
  for (size_t idx = 0; idx < R.e_values.size(); ++idx)
    for (const auto& s : R.series) {
      out += hash;
      out += ',' + std::to_string(R.e_values[idx]);
      out += ',' + csv_field(s.label);
      out += ',' + csv_field(idx < s.shift_breakdown.size()
                                 ? breakdown_str(s.shift_breakdown[idx])
                                 : std::string());
      out += ',' + std::to_string(s.counts[idx]);
      out += ',' + decimal4(Rational(s.counts[idx], R.scales[idx]));
      out += ',' + decimal4(s.predicted);
      out += ',' + decimal4(s.deviations[idx]);
      out += '\n';
    }
  return out;
}

std::string fsig_json(const FSigReport& R, const std::string& hash) {
  json j;
  j["config_hash"] = hash;
  j["pipeline"] = R.pipeline;
  j["small"] = R.small;
  j["smallness_exact"] = R.smallness_exact;
  j["linearly_reductive"] = R.linearly_reductive;
  j["e0"] = R.e0;
  j["group_algebra_dim"] = R.group_algebra_dim;
  j["s_value"] = R.s_value.str();
  j["e"] = R.e_values;
  j["scales"] = R.scales;
  j["complete"] = std::vector<bool>(R.complete.begin(), R.complete.end());
  j["max_rank"] = R.max_rank;
  j["series"] = json::array();
  for (const auto& s : R.series) {
    json row;
    row["label"] = s.label;
    row["module_rank"] = s.module_rank;
    row["predicted"] = s.predicted.str();
    row["counts"] = s.counts;
    json norms = json::array(), devs = json::array(), shifts = json::array();
    for (size_t idx = 0; idx < s.counts.size(); ++idx) {
      norms.push_back(Rational(s.counts[idx], R.scales[idx]).str());
      devs.push_back(s.deviations[idx].str());
      json per_e = json::array();
      if (idx < s.shift_breakdown.size())
        for (const auto& sc : s.shift_breakdown[idx])
          per_e.push_back({sc.shift.str(), sc.count});
      shifts.push_back(per_e);
    }
    row["normalized"] = norms;
    row["deviations"] = devs;
    row["shift_counts"] = shifts;
    row["trend_nonincreasing"] = s.trend_nonincreasing;
    j["series"].push_back(row);
  }
  return j.dump();
}

std::string pushforward_csv(const FSigReport& R, const std::string& hash) {
  std::string out;
  if (R.pipeline == "diagonalizable") {
    out = "config_hash,e,class,count,normalized,predicted\n";
    for (size_t idx = 0; idx < R.e_values.size(); ++idx)
      for (const auto& s : R.series) {
        out += hash;
        out += ',' + std::to_string(R.e_values[idx]);
        out += ',' + csv_field(s.label);
        out += ',' + std::to_string(s.counts[idx]);
        out += ',' + decimal4(Rational(s.counts[idx], R.scales[idx]));
        out += ',' + decimal4(s.predicted);
        out += '\n';
      }
    return out;
  }
  out = "config_hash,e,label,shift,count,normalized\n";
  for (size_t idx = 0; idx < R.e_values.size(); ++idx)
    for (const auto& s : R.series) {
      if (idx >= s.shift_breakdown.size()) continue;
      for (const auto& sc : s.shift_breakdown[idx]) {
        out += hash;
        out += ',' + std::to_string(R.e_values[idx]);
        out += ',' + csv_field(s.label);
        out += ',' + sc.shift.str();
        out += ',' + std::to_string(sc.count);
        out += ',' + decimal4(Rational(sc.count, R.scales[idx]));
        out += '\n';
      }
    }
  return out;
}

std::string prediction_csv(const Prediction& P, const std::string& hash) {
  std::string out = "config_hash,label,module_rank,simple_dim,end_dim,coefficient\n";
  for (const auto& l : P.labels) {
    out += hash;
    out += ',' + csv_field(l.label);
    out += ',' + std::to_string(l.module_rank);
    out += ',' + std::to_string(l.simple_dim);
    out += ',' + std::to_string(l.end_dim);
    out += ',' + l.coefficient.str();
    out += '\n';
  }
  return out;
}

std::string prediction_json(const Prediction& P, const std::string& hash) {
  json j;
  j["config_hash"] = hash;
  j["group_algebra_dim"] = P.group_algebra_dim;
  j["linearly_reductive"] = P.linearly_reductive;
  j["e0"] = P.e0;
  j["s_value"] = P.s_value.str();
  j["labels"] = json::array();
  for (const auto& l : P.labels)
    j["labels"].push_back({{"label", l.label},
                           {"module_rank", l.module_rank},
                           {"simple_dim", l.simple_dim},
                           {"end_dim", l.end_dim},
                           {"coefficient", l.coefficient.str()}});
  return j.dump();
}

std::string invariants_json(const Field& F, const InvariantRingData& inv,
                            const std::string& hash) {
  json j;
  j["config_hash"] = hash;
  j["certified_up_to"] = inv.degree_bound;
  j["note"] = inv.note;
  j["hilbert"] = inv.hilbert;
  j["generators"] = json::array();
  for (const auto& g : inv.generators)
    j["generators"].push_back({{"degree", g.degree}, {"poly", poly_str(F, g.poly)}});
  return j.dump();
}

}  // namespace frobsig
