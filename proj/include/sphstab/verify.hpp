#pragma once
// Self-verification suites: each suite re-checks a family of library
// invariants end to end and reports machine-readable pass/fail results.
// The suites back the command-line `verify` subcommand and the acceptance
// harness.

#include <cstdint>
#include <string>
#include <vector>

#include "sphstab/specialfn.hpp"

namespace sphstab {

// One executed check.  `pass` is authoritative; `measured` and `tolerance`
// describe the decisive comparison (for most checks: pass iff
// measured <= tolerance), and `detail` pins down where the worst case
// occurred so a failure is actionable from the report alone.
struct CheckResult {
  std::string id;  // stable identifier, "<suite>.<check-name>"
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;
  bool pass = false;    // conjunction over checks
  double seconds = 0.0; // wall-clock time for the suite
};

struct VerifyOptions {
  // Parameter pairs the suites sweep; empty selects the default matrix
  // {(1,0.75), (1,2.0), (2,1.5), (2,2.5)}.
  std::vector<SpectralParams> params;
  int budget = 8;                  // enumeration budget for decompositions
  std::uint64_t seed = 20260819ull;
  // Negative control: this offset is added to every operator eigenvalue
  // used inside the `constants` suite.  Any nonzero value must make that
  // suite fail with a named check; it exists to prove the harness can
  // detect a broken constant and must stay 0 in normal runs.
  double alpha_tamper = 0.0;
};

// The individual suite names, in execution order (excluding "all").
const std::vector<std::string>& suite_names();

// The default parameter matrix used when VerifyOptions::params is empty.
std::vector<SpectralParams> default_matrix();

// Runs one named suite ("constants", "sphere", "conformal", "quadform",
// "decompose", "stability", "asymptotics").  Throws InputError for an
// unknown suite name.
SuiteResult run_suite(const std::string& suite, const VerifyOptions& opt = {});

// Runs the named suite, or every suite in order for "all".
std::vector<SuiteResult> run_verify(const std::string& suite,
                                    const VerifyOptions& opt = {});

bool all_pass(const std::vector<SuiteResult>& results);

}  // namespace sphstab
