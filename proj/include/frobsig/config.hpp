#pragma once
#include <string>
#include <vector>

#include "frobsig/fsig.hpp"
#include "frobsig/groupscheme.hpp"
#include "frobsig/invariants.hpp"

namespace frobsig {

// Fully defaulted run configuration parsed from a JSON document.  Field names
// in the document are fixed: p, m, modulus, dimension,
// group.constant_generators, group.diag.orders, group.diag.weights, module,
// e_max, degree_bound, caps.element_max, caps.slice_max, output.format,
// output.path.  Unknown keys are rejected with the offending path.
struct RunConfig {
  uint32_t p = 2;
  uint32_t m = 1;
  std::vector<uint32_t> modulus;  // ascending, size m+1, monic
  int dimension = 0;
  // Raw matrix entries (packed field-element words, base-p digit encoding;
  // for prime fields these are just residues).
  std::vector<std::vector<std::vector<long long>>> constant_generators;
  std::vector<long long> diag_orders;
  std::vector<std::vector<long long>> diag_weights;  // dimension rows
  std::string module_choice = "S";  // "S" or "cover:<label>"
  unsigned e_max = 2;
  int degree_bound = 6;
  long long element_max = 200;      // constant-group enumeration cap
  long long slice_max = 100000;     // degree-slice dimension cap
  std::string output_format = "csv";  // "csv" or "json"
  std::string output_path;            // empty: report goes to stdout
};

// Parse and schema-check a JSON text / file.  ConfigError messages carry the
// JSON path of the offending field.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

// Build the validated group-scheme descriptor (constructs the field, checks
// matrix invertibility and weight shapes via validate_descriptor).
GroupSchemeDescriptor descriptor_of(const RunConfig& cfg);

// Canonical form of the effective configuration: every field present with
// defaults filled, keys sorted, compact separators.  The config hash is
// FNV-1a (64-bit) over those bytes, printed as 16 lowercase hex digits, and
// is embedded in every report.
std::string canonical_config_json(const RunConfig& cfg);
std::string config_hash_hex(const RunConfig& cfg);

// FROBSIG_THREADS: optional positive integer bounding the worker count
// (the pipelines run on a single worker at desk scale, so any bound >= 1 is
// honored as-is).  Unset -> 1.  Junk -> ConfigError.
unsigned worker_count_from_env();

// Deterministic decimal rendering used by the CSV reports: exact rational
// rounded half-away-from-zero to 4 decimal places, trailing zeros trimmed
// ("0.5", "0.5556", "0").
std::string decimal4(const Rational& r);

// CSV field quoting (labels may contain commas, e.g. w=(0,1)).
std::string csv_field(const std::string& s);

// ------------------------------------------------------ report renderers
// All renderers are byte-deterministic for a fixed report + hash.

// Signature measurement table; fields exactly: config_hash, e, label,
// shift_count_breakdown, count, normalized, predicted, deviation.
std::string fsig_csv(const FSigReport& R, const std::string& hash);
std::string fsig_json(const FSigReport& R, const std::string& hash);

// Pushforward summand detail: per-shift rows (config_hash, e, label, shift,
// count, normalized) on the equivariant pipelines; per-class rows
// (config_hash, e, class, count, normalized, predicted) on the
// diagonalizable one.
std::string pushforward_csv(const FSigReport& R, const std::string& hash);

// Predicted limit densities per label.
std::string prediction_csv(const Prediction& P, const std::string& hash);
std::string prediction_json(const Prediction& P, const std::string& hash);

// Invariant-ring generator report:
// {"generators":[{"degree":n,"poly":...}],"hilbert":[...],"certified_up_to":D}
// plus config_hash and the certification note.
std::string invariants_json(const Field& F, const InvariantRingData& inv,
                            const std::string& hash);

}  // namespace frobsig
