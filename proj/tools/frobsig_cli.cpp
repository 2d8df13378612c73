// Command-line driver: loads a JSON run configuration, dispatches to the
// requested pipeline, writes a machine-readable report (CSV or JSON), and
// prints a short summary table when the report goes to a file.
//
// Exit codes: 0 success; 1 invalid configuration or usage; 2 action rejected
// as not small; 3 resource cap exceeded; 4 internal verification failure.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "frobsig/config.hpp"
#include "frobsig/diagmu.hpp"
#include "frobsig/errors.hpp"
#include "frobsig/fsig.hpp"
#include "frobsig/groupscheme.hpp"
#include "frobsig/invariants.hpp"

using namespace frobsig;

namespace {

// Writes the report to cfg.output_path (atomically, via a temp file) and the
// summary to stdout; with no path the report itself is the stdout payload.
void emit(const RunConfig& cfg, const std::string& report, const std::string& summary) {
  if (cfg.output_path.empty()) {
    std::fputs(report.c_str(), stdout);
    return;
  }
  std::string tmp = cfg.output_path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("config: cannot write output path: " + cfg.output_path);
    out << report;
  }
  if (std::rename(tmp.c_str(), cfg.output_path.c_str()) != 0)
    throw ConfigError("config: cannot finalize output path: " + cfg.output_path);
  std::fputs(summary.c_str(), stdout);
}

ConstantGroup group_of(const RunConfig& cfg, const GroupSchemeDescriptor& D) {
  return enumerate_elements(D.F, D.dimension, D.constant_generators,
                            size_t(cfg.element_max));
}

int run_check_small(const RunConfig& cfg) {
  GroupSchemeDescriptor D = descriptor_of(cfg);
  ConstantGroup C = group_of(cfg, D);
  SmallnessReport sm = is_small(D, C);
  std::string hash = config_hash_hex(cfg);
  std::printf("config_hash: %s\n", hash.c_str());
  std::printf("scheme_order: %lld\n", scheme_order(D, C));
  std::printf("small: %s\n", sm.small ? "yes" : "no");
  std::printf("certification: %s\n", sm.exact ? "exact" : "factorwise");
  if (!sm.small) std::printf("witness: %s\n", sm.witness.c_str());
  return sm.small ? 0 : 2;
}

int run_invariants(const RunConfig& cfg) {
  GroupSchemeDescriptor D = descriptor_of(cfg);
  ConstantGroup C = group_of(cfg, D);
  InvariantRingData inv = generators_up_to(D, C, cfg.degree_bound);
  std::string hash = config_hash_hex(cfg);
  std::string summary = "config_hash: " + hash + "\n";
  summary += "generators: " + std::to_string(inv.generators.size()) + " (degrees";
  for (const auto& g : inv.generators) summary += " " + std::to_string(g.degree);
  summary += ")\nhilbert:";
  for (int h : inv.hilbert) summary += " " + std::to_string(h);
  summary += "\ncertified_up_to: " + std::to_string(inv.degree_bound) + "\n";
  emit(cfg, invariants_json(D.F, inv, hash) + "\n", summary);
  return 0;
}

std::string measure_summary(const FSigReport& R, const Prediction& P,
                            const std::string& hash) {
  std::string s = "config_hash: " + hash + "\n";
  s += "pipeline: " + R.pipeline + "\n";
  s += "group_algebra_dim: " + std::to_string(R.group_algebra_dim) + "\n";
  s += std::string("linearly_reductive: ") + (R.linearly_reductive ? "yes" : "no") + "\n";
  s += "predicted s: " + P.s_value.str() + "\n";
  if (!R.e_values.empty()) {
    size_t last = R.e_values.size() - 1;
    s += "at e=" + std::to_string(R.e_values[last]) + ":";
    for (const auto& ser : R.series)
      s += " " + ser.label + "=" + decimal4(Rational(ser.counts[last], R.scales[last]));
    s += "\n";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "wall_ms: %.1f\n", R.wall_ms);
  s += buf;
  return s;
}

int run_fsig(const RunConfig& cfg, bool per_shift) {
  GroupSchemeDescriptor D = descriptor_of(cfg);
  if (D.has_constant()) group_of(cfg, D);  // enforce the enumeration cap
  FSigReport R = measure(D, cfg.e_max, cfg.slice_max, cfg.module_choice);
  Prediction P = predict(D, R.series.empty() ? 1 : R.series.front().module_rank);
  std::string hash = config_hash_hex(cfg);
  std::string report;
  if (cfg.output_format == "json")
    report = fsig_json(R, hash) + "\n";
  else
    report = per_shift ? pushforward_csv(R, hash) : fsig_csv(R, hash);
  emit(cfg, report, measure_summary(R, P, hash));
  return 0;
}

int run_predict(const RunConfig& cfg) {
  GroupSchemeDescriptor D = descriptor_of(cfg);
  Prediction P = predict(D, 1);
  std::string hash = config_hash_hex(cfg);
  std::string report = cfg.output_format == "json" ? prediction_json(P, hash) + "\n"
                                                   : prediction_csv(P, hash);
  std::string summary = "config_hash: " + hash + "\n";
  summary += "predicted s: " + P.s_value.str() + "\n";
  emit(cfg, report, summary);
  return 0;
}

int run_regular_summand(const RunConfig& cfg, int r) {
  GroupSchemeDescriptor D = descriptor_of(cfg);
  ConstantGroup C = group_of(cfg, D);
  auto found = find_regular_summand(D, C, r);
  std::printf("config_hash: %s\n", config_hash_hex(cfg).c_str());
  std::printf("r: %d\n", r);
  if (!found) {
    std::printf("found: no (no split copy of the regular module within degrees <= %d)\n",
                r);
    return 0;
  }
  std::printf("found: yes\n");
  for (const auto& pc : found->pieces) {
    std::string degs;
    for (size_t i = 0; i < pc.degrees.size(); ++i)
      degs += (i ? "," : "") + std::to_string(pc.degrees[i]);
    std::printf("piece: label=%s dim=%d degrees=%s\n", pc.label.c_str(), pc.dim,
                degs.c_str());
  }
  std::printf("verified: retraction composes to the exact identity; both maps equivariant\n");
  return 0;
}

int run_crosscheck(const RunConfig& cfg) {
  GroupSchemeDescriptor D = descriptor_of(cfg);
  RealizationCheck rc = crosscheck_constant_realization(D.F, D.dimension, D.diag,
                                                        cfg.e_max, cfg.slice_max);
  std::printf("config_hash: %s\n", config_hash_hex(cfg).c_str());
  for (const auto& line : rc.lines) std::printf("%s\n", line.c_str());
  std::printf("agree: %s\n", rc.agree ? "yes" : "no");
  if (!rc.agree) {
    std::fprintf(stderr, "error(internal): the two counting pipelines disagree\n");
    return 4;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frobenius pushforward summand structure of invariant rings"};
  app.require_subcommand(1);

  std::string config_path;
  int e_override = -1;
  int degree_override = -1;
  int r_window = 2;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
  };
  CLI::App* c_small = app.add_subcommand("check-small", "Verify the action is small");
  add_config(c_small);
  CLI::App* c_inv =
      app.add_subcommand("invariants", "Invariant-ring generators up to the degree bound");
  add_config(c_inv);
  c_inv->add_option("--degree-bound", degree_override, "Override degree_bound");
  CLI::App* c_frob =
      app.add_subcommand("frobenius", "Per-shift pushforward summand counts");
  add_config(c_frob);
  c_frob->add_option("--e-max", e_override, "Override e_max");
  CLI::App* c_fsig =
      app.add_subcommand("fsig", "Measured summand densities vs predicted limits");
  add_config(c_fsig);
  c_fsig->add_option("--e-max", e_override, "Override e_max");
  CLI::App* c_pred = app.add_subcommand("predict", "Predicted limit densities");
  add_config(c_pred);
  CLI::App* c_reg =
      app.add_subcommand("regular-summand", "Locate the regular module in low degrees");
  add_config(c_reg);
  c_reg->add_option("--r", r_window, "Largest polynomial degree searched");
  CLI::App* c_cross = app.add_subcommand(
      "crosscheck", "Compare the weight-class counter against a constant realization");
  add_config(c_cross);
  c_cross->add_option("--e-max", e_override, "Override e_max");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    worker_count_from_env();  // validate FROBSIG_THREADS (pipelines run one worker)
    RunConfig cfg = load_config_file(config_path);
    if (e_override > 0) cfg.e_max = unsigned(e_override);
    if (degree_override >= 0) cfg.degree_bound = degree_override;

    if (c_small->parsed()) return run_check_small(cfg);
    if (c_inv->parsed()) return run_invariants(cfg);
    if (c_frob->parsed()) return run_fsig(cfg, /*per_shift=*/true);
    if (c_fsig->parsed()) return run_fsig(cfg, /*per_shift=*/false);
    if (c_pred->parsed()) return run_predict(cfg);
    if (c_reg->parsed()) return run_regular_summand(cfg, r_window);
    if (c_cross->parsed()) return run_crosscheck(cfg);
    return 1;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error(config): %s\n", e.what());
    return 1;
  } catch (const NotSmallError& e) {
    std::fprintf(stderr, "error(not-small): %s\n", e.what());
    return 2;
  } catch (const ResourceCapError& e) {
    std::fprintf(stderr, "error(resource-cap): %s\n", e.what());
    return 3;
  } catch (const InternalCheckError& e) {
    std::fprintf(stderr, "error(internal): %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error(internal): unexpected: %s\n", e.what());
    return 4;
  }
}
