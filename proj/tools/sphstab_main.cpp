// Command-line front end: constants listings, invariant suites, quotient
// audits, critical-point enumeration, perturbation probes, the two-peak
// study, and the descent explorer.  Structured reports are JSON; probe
// tables can be emitted as CSV.  Exit codes: 0 success, 2 invalid input,
// 3 numerical non-convergence, 4 invariant failure.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sphstab/io.hpp"
#include "sphstab/specialfn.hpp"

namespace {

using namespace sphstab;

// Structured reports are JSON-only; probe tables may choose CSV.
void require_json(const RunConfig& cfg, const char* command) {
  if (cfg.format != "json") {
    throw InputError(std::string(command) +
                     ": csv output is available for probe tables only");
  }
}

void emit(const RunConfig& cfg, const std::string& content) {
  write_report(cfg.out, content);
}

int run_constants(const RunConfig& cfg) {
  require_json(cfg, "constants");
  emit(cfg, render_json(constants_report_json(cfg)));
  return 0;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite,
               double tamper, bool single_pair) {
  require_json(cfg, "verify");
  VerifyOptions vo;
  if (single_pair) vo.params = {cfg.validated()};
  vo.budget = cfg.budget;
  vo.seed = cfg.seed;
  vo.alpha_tamper = tamper;
  const std::vector<SuiteResult> suites = sphstab::run_verify(suite, vo);
  for (const SuiteResult& sr : suites) {
    int failed = 0;
    for (const CheckResult& c : sr.checks) {
      if (!c.pass) ++failed;
    }
    std::fprintf(stderr, "suite %-12s %s  (%zu checks, %.1f s)\n",
                 sr.suite.c_str(), sr.pass ? "PASS" : "FAIL",
                 sr.checks.size(), sr.seconds);
    if (failed > 0) {
      for (const CheckResult& c : sr.checks) {
        if (!c.pass) {
          std::fprintf(stderr, "  FAIL %s: measured=%.6g tolerance=%.6g %s\n",
                       c.id.c_str(), c.measured, c.tolerance,
                       c.detail.c_str());
        }
      }
    }
  }
  emit(cfg, render_json(verify_report_json(suites, cfg)));
  return all_pass(suites) ? 0 : 4;
}

int run_quotient(const RunConfig& cfg, const std::string& field_path) {
  require_json(cfg, "quotient");
  const SpectralParams par = cfg.validated();
  const SphereField u = load_field(field_path, par, cfg.grid);
  QuotientOptions opt;
  opt.budget = cfg.budget;
  opt.seed = cfg.seed;
  const StabilityReport rep = quotient(u, par, opt);
  emit(cfg, render_json(stability_report_json(rep, cfg)));
  return 0;
}

int run_decompose(const RunConfig& cfg, const std::string& field_path) {
  require_json(cfg, "decompose");
  const SpectralParams par = cfg.validated();
  const SphereField u = load_field(field_path, par, cfg.grid);
  const DistanceResult res = distance(u, par, cfg.budget, cfg.seed);
  emit(cfg, render_json(distance_report_json(res, par, cfg)));
  return 0;
}

// Zonal perturbation direction for the local probe: the degree-`ell`
// rotation-symmetric mode, unit-normalized.
SphereField zonal_mode(const SpectralParams& par, int ell) {
  if (ell < 2) {
    throw InputError("probe local: --ell must be at least 2 (degree 0 and 1 "
                     "content is excluded from the probe direction)");
  }
  const int n = par.dim;
  const int size = n == 2 ? (ell + 1) * (ell + 1) : 2 * ell + 1;
  Vec packed = Vec::Zero(size);
  packed(n == 2 ? ell * ell + ell : 2 * ell - 1) = 1.0;
  return SphereField::from_coeffs(n, packed, level_for_degree(n, 2 * ell));
}

int run_probe(const RunConfig& cfg, const std::string& kind, int ell,
              std::vector<double> eps_list, std::vector<int> ell_list) {
  const SpectralParams par = cfg.validated();
  if (kind == "strict") {
    if (eps_list.empty()) eps_list = {-0.05, -0.02, 0.02, 0.05};
    const StrictProbe probe =
        probe_strict(par, eps_list, cfg.budget, cfg.seed);
    if (cfg.format == "csv") {
      emit(cfg, probe_csv(probe.rows, false));
    } else {
      emit(cfg, render_json(strict_report_json(probe, cfg)));
    }
    return 0;
  }

  std::vector<ProbeRow> rows;
  std::string report_kind;
  if (kind == "local") {
    if (eps_list.empty()) eps_list = {0.04, 0.02, 0.01};
    rows = probe_local(par, zonal_mode(par, ell), eps_list, cfg.budget,
                       cfg.seed);
    report_kind = "probe-local";
  } else {  // sharpness
    if (ell_list.empty()) ell_list = {2, 4, 6, 10};
    const double eps = eps_list.empty() ? 0.01 : eps_list.front();
    rows = probe_sharpness(par, ell_list, eps, cfg.budget, cfg.seed);
    report_kind = "probe-sharpness";
  }
  if (cfg.format == "csv") {
    emit(cfg, probe_csv(rows, false));
  } else {
    emit(cfg, render_json(probe_report_json(report_kind, rows, cfg)));
  }
  return 0;
}

int run_bubble(const RunConfig& cfg, std::vector<double> beta_list) {
  const SpectralParams par = cfg.validated();
  if (beta_list.empty()) beta_list = {0.1, 0.6, 0.95};
  const std::vector<ProbeRow> rows =
      bubble_study(par, beta_list, cfg.budget, cfg.seed);
  if (cfg.format == "csv") {
    emit(cfg, probe_csv(rows, true));
  } else {
    emit(cfg, render_json(probe_report_json("bubble-study", rows, cfg)));
  }
  return 0;
}

int run_explore(const RunConfig& cfg, int max_band, int iterations) {
  require_json(cfg, "explore");
  const SpectralParams par = cfg.validated();
  ExplorerOptions opt;
  opt.max_band = max_band;
  opt.iterations = iterations;
  opt.seed = cfg.seed;
  opt.budget = cfg.budget;
  const ExplorerResult res = explore_min(par, opt);
  emit(cfg, render_json(explorer_report_json(res, cfg)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "sphstab: spectral quadratic forms, conformal profiles, and the "
      "stability quotient of the reverse Sobolev inequality on the sphere"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto add_common = [&cfg](CLI::App* cmd) {
    cmd->add_option("--n", cfg.n, "sphere dimension (1 or 2)");
    cmd->add_option("--s", cfg.s, "differentiation order s");
    cmd->add_option("--grid", cfg.grid,
                    "workspace refinement level (-1 = automatic)");
    cmd->add_option("--L", cfg.L, "truncation degree for listings");
    cmd->add_option("--budget", cfg.budget,
                    "multistart budget for critical-point enumeration");
    cmd->add_option("--seed", cfg.seed, "seed for randomized search/checks");
    cmd->add_option("--tol", cfg.tol,
                    "relative tolerance for report self-checks");
    cmd->add_option(
        "--out", cfg.out,
        "output path (default stdout; relative paths are joined onto "
        "$SPHSTAB_OUT_DIR when set)");
    cmd->add_option("--format", cfg.format,
                    "output format: json, or csv for probe tables")
        ->check(CLI::IsMember({"json", "csv"}));
  };

  CLI::App* c_const = app.add_subcommand(
      "constants", "eigenvalues, sharp and local constants, sphere areas");
  add_common(c_const);

  CLI::App* c_verify =
      app.add_subcommand("verify", "run an invariant suite (or all)");
  add_common(c_verify);
  std::string suite = "all";
  double tamper = 0.0;
  c_verify->add_option("--suite", suite,
                       "suite name: constants, sphere, conformal, quadform, "
                       "decompose, stability, asymptotics, or all");
  c_verify->add_option(
      "--tamper-alpha", tamper,
      "negative control: offset added to every eigenvalue inside the "
      "constants suite (any nonzero value must make it fail)");

  CLI::App* c_quot = app.add_subcommand(
      "quotient", "deficit / minimal remainder energy for one field");
  add_common(c_quot);
  std::string field_path;
  c_quot->add_option("--field", field_path, "field description JSON file")
      ->required();

  CLI::App* c_dec = app.add_subcommand(
      "decompose", "critical-point enumeration and minimal remainder energy");
  add_common(c_dec);
  std::string dec_field;
  c_dec->add_option("--field", dec_field, "field description JSON file")
      ->required();

  CLI::App* c_probe = app.add_subcommand(
      "probe", "perturbation probes: local, sharpness, strict");
  std::string probe_kind;
  c_probe
      ->add_option("kind", probe_kind,
                   "probe kind: local (quotient along 1 + eps*Y), sharpness "
                   "(band scan in the upper window), strict (signed slope "
                   "fit in the lower window)")
      ->required()
      ->check(CLI::IsMember({"local", "sharpness", "strict"}));
  add_common(c_probe);
  int probe_ell = 2;
  std::vector<double> eps_list;
  std::vector<int> ell_list;
  c_probe->add_option("--ell", probe_ell,
                      "zonal degree of the local-probe direction");
  c_probe
      ->add_option("--eps-list", eps_list,
                   "perturbation sizes (sharpness uses the first entry)")
      ->delimiter(',');
  c_probe->add_option("--ell-list", ell_list, "bands for the sharpness scan")
      ->delimiter(',');

  CLI::App* c_bub = app.add_subcommand(
      "bubble", "two-peak concentration study over a beta grid");
  add_common(c_bub);
  std::vector<double> beta_list;
  c_bub->add_option("--beta-list", beta_list, "peak sharpness values in (0,1)")
      ->delimiter(',');

  CLI::App* c_exp = app.add_subcommand(
      "explore", "projected descent on the quotient (study tool)");
  add_common(c_exp);
  int max_band = 4;
  int iterations = 12;
  c_exp->add_option("--max-band", max_band,
                    "highest harmonic band in the descent space");
  c_exp->add_option("--iterations", iterations, "descent iterations");

  try {
    app.parse(argc, argv);
    // Probe tables default to CSV; structured reports stay JSON.
    if ((c_probe->parsed() && c_probe->count("--format") == 0) ||
        (c_bub->parsed() && c_bub->count("--format") == 0)) {
      cfg.format = "csv";
    }
    if (c_const->parsed()) return run_constants(cfg);
    if (c_verify->parsed()) {
      const bool single_pair = c_verify->count("--n") > 0 ||
                               c_verify->count("--s") > 0;
      return cmd_verify(cfg, suite, tamper, single_pair);
    }
    if (c_quot->parsed()) return run_quotient(cfg, field_path);
    if (c_dec->parsed()) return run_decompose(cfg, dec_field);
    if (c_probe->parsed()) {
      return run_probe(cfg, probe_kind, probe_ell, eps_list, ell_list);
    }
    if (c_bub->parsed()) return run_bubble(cfg, beta_list);
    if (c_exp->parsed()) return run_explore(cfg, max_band, iterations);
    return 2;  // unreachable: a subcommand is required
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const sphstab::InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const sphstab::NumericsError& e) {
    std::fprintf(stderr, "numerics error: %s\n", e.what());
    return 3;
  } catch (const sphstab::InvariantError& e) {
    std::fprintf(stderr, "invariant error: %s\n", e.what());
    return 4;
  }
}
