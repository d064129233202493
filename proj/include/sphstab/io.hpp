// Run configuration, field-file ingestion, and report emission.
//
// Two field schemas are accepted (harmonic expansions and weighted bubble
// sums); loaded fields are validated for strict positivity.  Reports are
// emitted as JSON with a fixed key order, or as CSV for probe tables, and
// every report embeds the tool version and the full run configuration so a
// result can be reproduced from the report alone.  At a fixed configuration
// and seed the emitted bytes are identical across runs.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sphstab/stability.hpp"
#include "sphstab/verify.hpp"

namespace sphstab {

inline constexpr const char* kToolName = "sphstab";
inline constexpr const char* kToolVersion = "0.1.0";

// JSON type with insertion-ordered keys, so report layout is deterministic.
using OrderedJson = nlohmann::ordered_json;

// The knobs of one run.  Serialized verbatim into every report.
struct RunConfig {
  int n = 2;                    // sphere dimension (1 or 2)
  double s = 1.5;               // differentiation order
  int grid = -1;                // workspace refinement level; -1 = automatic
  int L = 8;                    // truncation degree for spectral listings
  int budget = 8;               // multistart budget for critical-point search
  double tol = 1e-6;            // relative tolerance for report self-checks
  std::uint64_t seed = 20260819ull;
  std::string out;              // output path; empty writes to stdout
  std::string format = "json";  // "json" or "csv"

  // Validates every knob and returns the induced spectral parameters;
  // throws InputError naming the offending field.
  SpectralParams validated() const;
};

// ---------------------------------------------------------------- ingestion

// Builds a field from a parsed JSON document.  Two schemas:
//   {"type":"harmonic", "n":2, "coeffs":[[l,m,value],...], "offset":1.0}
//   {"type":"bubble_sum", "n":2, "terms":[{"c":1.0,"zeta":[0,0,0.5]},...]}
// "offset" (default 0) adds a constant; repeated (l,m) entries accumulate.
// On the circle, m = +1 selects the cosine mode and m = -1 the sine mode
// (m = 0 only for l = 0).  Every bubble weight c must be positive and every
// center must satisfy |zeta| < 1.  The resulting field must be strictly
// positive on the grid.  level < 0 picks a refinement automatically (from
// the band content, or from the sharpest bubble center).  Violations throw
// InputError.
SphereField field_from_json(const OrderedJson& doc, const SpectralParams& par,
                            int level = -1);

// Reads and parses `path`, then defers to field_from_json.  Unreadable
// files and malformed JSON throw InputError.
SphereField load_field(const std::string& path, const SpectralParams& par,
                       int level = -1);

// ----------------------------------------------------------------- reports

// {"n":..., "s":..., ..., "format":...} — the configuration block.
OrderedJson config_json(const RunConfig& cfg);

// Common preamble: tool name, version, report kind, configuration.
OrderedJson report_shell(const std::string& kind, const RunConfig& cfg);

// Constants listing for the configured parameters: eigenvalues 0..L, the
// sharp constant by both routes, the integrability exponent, the local
// stability constant, sphere areas, and the concentration/balance
// constants.
OrderedJson constants_report_json(const RunConfig& cfg);

// Full quotient audit for one field.  `invariance_ok` compares the report's
// invariance residual against cfg.tol.
OrderedJson stability_report_json(const StabilityReport& rep,
                                  const RunConfig& cfg);

// Critical-point enumeration: minimal remainder energy, the attaining
// indices, and every enumerated point.
OrderedJson distance_report_json(const DistanceResult& res,
                                 const SpectralParams& par,
                                 const RunConfig& cfg);

// Probe table (local / sharpness / two-peak study) as JSON rows.
OrderedJson probe_report_json(const std::string& kind,
                              const std::vector<ProbeRow>& rows,
                              const RunConfig& cfg);

// Strict-inequality probe: rows plus the fitted slope, its prediction, and
// the grid minimum against the local constant.
OrderedJson strict_report_json(const StrictProbe& probe, const RunConfig& cfg);

// Descent trajectory of the explorer with the audited closing figures.
OrderedJson explorer_report_json(const ExplorerResult& res,
                                 const RunConfig& cfg);

// Invariant-suite outcomes: per-check id, pass flag, measured value,
// tolerance, and detail.  Wall-clock timings are deliberately excluded so
// the report is byte-stable; timing goes to the console instead.
OrderedJson verify_report_json(const std::vector<SuiteResult>& suites,
                               const RunConfig& cfg);

// Probe table as CSV with exactly the columns
//   epsilon, ell, beta, quotient, predicted, deficit, distance, min_u,
//   tail_ratio, converged
// plus n_critical and d_multiplicity when `bubble_columns` is set.  Absent
// entries (NaN, or negative counters) print as empty cells.
std::string probe_csv(const std::vector<ProbeRow>& rows, bool bubble_columns);

// Fixed-layout serialization: 2-space indent, trailing newline.
std::string render_json(const OrderedJson& j);

// Output-path resolution: empty stays empty (stdout); absolute paths pass
// through; relative paths are joined onto $SPHSTAB_OUT_DIR when that is set
// and nonempty.
std::string resolve_out_path(const std::string& out);

// Writes `content` to the resolved path, or to stdout when the resolved
// path is empty.  Unwritable paths throw InputError.
void write_report(const std::string& out, const std::string& content);

}  // namespace sphstab
