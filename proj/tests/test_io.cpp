#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "sphstab/conformal.hpp"
#include "sphstab/io.hpp"
#include "sphstab/specialfn.hpp"
#include "testutil.hpp"

using namespace sphstab;
using doctest::Approx;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines = split(text, '\n');
  REQUIRE(!lines.empty());
  REQUIRE(lines.back().empty());  // trailing newline
  lines.pop_back();
  return lines;
}

Vec pole3() {
  Vec w = Vec::Zero(3);
  w(2) = 1.0;
  return w;
}

}  // namespace

TEST_CASE("run configuration validation") {
  RunConfig cfg;
  SpectralParams par = cfg.validated();
  CHECK(par.dim == 2);
  CHECK(par.order == Approx(1.5));

  RunConfig bad = cfg;
  bad.s = 2.0;  // sigma = 1 is excluded
  CHECK_THROWS_AS(bad.validated(), InputError);
  bad = cfg;
  bad.n = 3;
  CHECK_THROWS_AS(bad.validated(), InputError);
  bad = cfg;
  bad.grid = max_level(2) + 1;
  CHECK_THROWS_AS(bad.validated(), InputError);
  bad = cfg;
  bad.grid = -2;
  CHECK_THROWS_AS(bad.validated(), InputError);
  bad = cfg;
  bad.L = -1;
  CHECK_THROWS_AS(bad.validated(), InputError);
  bad = cfg;
  bad.L = 257;
  CHECK_THROWS_AS(bad.validated(), InputError);
  bad = cfg;
  bad.L = 256;
  CHECK_NOTHROW(bad.validated());
  bad = cfg;
  bad.budget = 0;
  CHECK_THROWS_AS(bad.validated(), InputError);
  bad = cfg;
  bad.tol = 0.0;
  CHECK_THROWS_AS(bad.validated(), InputError);
  bad = cfg;
  bad.format = "xml";
  CHECK_THROWS_AS(bad.validated(), InputError);
  bad = cfg;
  bad.format = "csv";
  CHECK_NOTHROW(bad.validated());
}

TEST_CASE("harmonic loader builds the expected band-limited field") {
  const SpectralParams par = SpectralParams::create(2, 1.5);

  SUBCASE("single mode with offset") {
    OrderedJson doc = {
        {"type", "harmonic"},
        {"n", 2},
        {"coeffs", {{2, 0, 0.05}}},
        {"offset", 1.0},
    };
    SphereField u = field_from_json(doc, par);
    CHECK(u.positive());
    CHECK(u.band_limited());
    CHECK(u.level() == 0);
    // born coefficients are zero-padded to the workspace degree
    REQUIRE(u.born_coeffs().size() >= 9);
    CHECK(u.born_coeffs().tail(u.born_coeffs().size() - 9).norm() == 0.0);
    CHECK(u.born_coeffs()(0) ==
          Approx(std::sqrt(sphere_area(2))).epsilon(1e-14));
    CHECK(u.born_coeffs()(6) == Approx(0.05).epsilon(1e-14));
    const Vec w = pole3();
    const double expected = 1.0 + 0.05 * u.basis().eval_basis(2, 0, w);
    CHECK(u(w) == Approx(expected).epsilon(1e-12));
    CHECK(u.integral() == Approx(sphere_area(2)).epsilon(1e-12));
  }

  SUBCASE("repeated entries accumulate") {
    OrderedJson doc = {
        {"type", "harmonic"},
        {"coeffs", {{2, 0, 0.03}, {2, 0, 0.02}}},
        {"offset", 1.0},
    };
    SphereField u = field_from_json(doc, par);
    CHECK(u.born_coeffs()(6) == Approx(0.05).epsilon(1e-14));
  }

  SUBCASE("offset defaults to zero") {
    OrderedJson doc = {
        {"type", "harmonic"},
        {"coeffs", {{0, 0, std::sqrt(sphere_area(2))}}},
    };
    SphereField u = field_from_json(doc, par);
    CHECK(u(pole3()) == Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("circle modes use the documented packing") {
    const SpectralParams c = SpectralParams::create(1, 0.75);
    OrderedJson doc = {
        {"type", "harmonic"},
        {"n", 1},
        {"coeffs", {{1, 1, 0.1}, {2, -1, 0.07}}},
        {"offset", 1.0},
    };
    SphereField u = field_from_json(doc, c);
    REQUIRE(u.born_coeffs().size() >= 5);
    CHECK(u.born_coeffs()(1) == Approx(0.1).epsilon(1e-14));
    CHECK(u.born_coeffs()(4) == Approx(0.07).epsilon(1e-14));
    Vec w(2);
    w << std::cos(0.3), std::sin(0.3);
    const double expected = 1.0 + 0.1 * u.basis().eval_basis(1, 1, w) +
                            0.07 * u.basis().eval_basis(2, -1, w);
    CHECK(u(w) == Approx(expected).epsilon(1e-12));
  }

  SUBCASE("automatic level grows with the band content") {
    OrderedJson doc = {
        {"type", "harmonic"},
        {"coeffs", {{30, 0, 0.001}}},
        {"offset", 1.0},
    };
    SphereField u = field_from_json(doc, par);
    CHECK(u.level() == level_for_degree(2, 60));
    CHECK(u.level() >= 1);
    SphereField u2 = field_from_json(doc, par, 2);
    CHECK(u2.level() == 2);
  }
}

TEST_CASE("harmonic loader rejections") {
  const SpectralParams par = SpectralParams::create(2, 1.5);
  const SpectralParams circ = SpectralParams::create(1, 2.0);

  OrderedJson doc = {
      {"type", "harmonic"}, {"coeffs", {{2, 0, 0.05}}}, {"offset", 1.0}};
  CHECK_NOTHROW(field_from_json(doc, par));

  SUBCASE("missing or bad type") {
    OrderedJson d = doc;
    d.erase("type");
    CHECK_THROWS_AS(field_from_json(d, par), InputError);
    d = doc;
    d["type"] = "fourier";
    CHECK_THROWS_AS(field_from_json(d, par), InputError);
    CHECK_THROWS_AS(field_from_json(OrderedJson::array(), par), InputError);
  }
  SUBCASE("dimension mismatch") {
    OrderedJson d = doc;
    d["n"] = 1;
    CHECK_THROWS_AS(field_from_json(d, par), InputError);
  }
  SUBCASE("missing coeffs") {
    OrderedJson d = {{"type", "harmonic"}, {"offset", 1.0}};
    CHECK_THROWS_AS(field_from_json(d, par), InputError);
  }
  SUBCASE("entry shape") {
    OrderedJson d = doc;
    d["coeffs"] = {{2, 0}};
    CHECK_THROWS_AS(field_from_json(d, par), InputError);
    d["coeffs"] = {{2.5, 0, 0.05}};
    CHECK_THROWS_AS(field_from_json(d, par), InputError);
    d["coeffs"] = OrderedJson::array({OrderedJson::array({2, 0, "x"})});
    CHECK_THROWS_AS(field_from_json(d, par), InputError);
  }
  SUBCASE("index ranges") {
    OrderedJson d = doc;
    d["coeffs"] = {{-1, 0, 0.05}};
    CHECK_THROWS_AS(field_from_json(d, par), InputError);
    d["coeffs"] = {{300, 0, 0.05}};
    CHECK_THROWS_AS(field_from_json(d, par), InputError);
    d["coeffs"] = {{2, 3, 0.05}};
    CHECK_THROWS_AS(field_from_json(d, par), InputError);
    OrderedJson dc = {{"type", "harmonic"},
                      {"n", 1},
                      {"coeffs", {{1, 0, 0.05}}},
                      {"offset", 1.0}};
    CHECK_THROWS_AS(field_from_json(dc, circ), InputError);
    dc["coeffs"] = {{1, 2, 0.05}};
    CHECK_THROWS_AS(field_from_json(dc, circ), InputError);
  }
  SUBCASE("non-finite value") {
    OrderedJson d = doc;
    d["coeffs"] = OrderedJson::array(
        {OrderedJson::array({2, 0, std::nan("")})});
    CHECK_THROWS_AS(field_from_json(d, par), InputError);
  }
  SUBCASE("empty field") {
    OrderedJson d = {{"type", "harmonic"}, {"coeffs", OrderedJson::array()}};
    CHECK_THROWS_AS(field_from_json(d, par), InputError);
  }
  SUBCASE("positivity") {
    OrderedJson d = doc;
    d["coeffs"] = {{2, 0, 4.0}};  // min of 1 + 4*Y20 dips below zero
    CHECK_THROWS_AS(field_from_json(d, par), InputError);
  }
  SUBCASE("level beyond the registry") {
    CHECK_THROWS_AS(field_from_json(doc, par, max_level(2) + 1), InputError);
  }
}

TEST_CASE("bubble sum loader matches profile evaluators") {
  const SpectralParams par = SpectralParams::create(2, 1.5);

  SUBCASE("single weighted bubble") {
    OrderedJson doc = {
        {"type", "bubble_sum"},
        {"n", 2},
        {"terms", {{{"c", 1.3}, {"zeta", {0.0, 0.0, 0.5}}}}},
    };
    SphereField u = field_from_json(doc, par);
    CHECK(u.positive());
    CHECK(u.level() == 0);
    Vec zeta = Vec::Zero(3);
    zeta(2) = 0.5;
    Evaluator prof = bubble_profile(par, zeta);
    for (double t : {0.0, 1.3, 2.9}) {
      Vec w(3);
      w << std::sin(t), 0.0, std::cos(t);
      CHECK(u(w) == Approx(1.3 * prof(w)).epsilon(1e-12));
    }
    // integral of u^p is c^p * |S^2|, i.e. the signed-exponent norm is
    // c * |S^2|^(1/p)
    const double norm = pnorm(u, par.p);
    CHECK(norm ==
          Approx(1.3 * std::pow(sphere_area(2), 1.0 / par.p)).epsilon(1e-8));
  }

  SUBCASE("symmetric pair is even") {
    OrderedJson doc = {
        {"type", "bubble_sum"},
        {"terms",
         {{{"zeta", {0.0, 0.0, 0.3}}}, {{"zeta", {0.0, 0.0, -0.3}}}}},
    };
    SphereField u = field_from_json(doc, par);
    auto rng = testutil::make_rng(7);
    for (int k = 0; k < 3; ++k) {
      Vec w = testutil::random_unit(3, rng);
      CHECK(u(w) == Approx(u(-w)).epsilon(1e-12));
    }
  }

  SUBCASE("sharp centers refine the grid automatically") {
    OrderedJson doc = {
        {"type", "bubble_sum"},
        {"terms", {{{"zeta", {0.0, 0.0, 0.9}}}}},
    };
    SphereField u = field_from_json(doc, par);
    CHECK(u.level() >= 1);
  }
}

TEST_CASE("bubble sum loader rejections") {
  const SpectralParams par = SpectralParams::create(2, 1.5);
  OrderedJson doc = {
      {"type", "bubble_sum"},
      {"terms", {{{"c", 1.0}, {"zeta", {0.0, 0.0, 0.5}}}}},
  };
  CHECK_NOTHROW(field_from_json(doc, par));

  OrderedJson d = doc;
  d["terms"] = OrderedJson::array();
  CHECK_THROWS_AS(field_from_json(d, par), InputError);
  d = doc;
  d["terms"] = {{{"c", 1.0}}};
  CHECK_THROWS_AS(field_from_json(d, par), InputError);
  d = doc;
  d["terms"] = {{{"zeta", {0.0, 0.5}}}};
  CHECK_THROWS_AS(field_from_json(d, par), InputError);
  d = doc;
  d["terms"] = {{{"zeta", {0.0, 0.0, 1.0}}}};
  CHECK_THROWS_AS(field_from_json(d, par), InputError);
  d = doc;
  d["terms"] = {{{"c", 0.0}, {"zeta", {0.0, 0.0, 0.5}}}};
  CHECK_THROWS_AS(field_from_json(d, par), InputError);
  d = doc;
  d["terms"] = {{{"c", -1.0}, {"zeta", {0.0, 0.0, 0.5}}}};
  CHECK_THROWS_AS(field_from_json(d, par), InputError);
  d = doc;
  d["terms"] = {1, 2};
  CHECK_THROWS_AS(field_from_json(d, par), InputError);
}

TEST_CASE("field files load and parse errors are input errors") {
  const SpectralParams par = SpectralParams::create(2, 1.5);
  const std::string path = "/tmp/sphstab_io_field.json";
  {
    std::ofstream f(path);
    f << R"({"type":"harmonic","n":2,"coeffs":[[2,0,0.05]],"offset":1.0})";
  }
  SphereField u = load_field(path, par);
  CHECK(u.born_coeffs()(6) == Approx(0.05).epsilon(1e-14));

  CHECK_THROWS_AS(load_field("/tmp/sphstab_io_missing_xyz.json", par),
                  InputError);
  {
    std::ofstream f(path);
    f << "{not json";
  }
  CHECK_THROWS_AS(load_field(path, par), InputError);
  std::remove(path.c_str());
}

TEST_CASE("probe CSV layout") {
  ProbeRow r1;
  r1.epsilon = 0.02;
  r1.quotient = 0.86;
  r1.predicted = 6.0 / 7.0;
  r1.deficit = 1.5;
  r1.distance = 2.5;
  r1.min_u = 0.9;
  r1.tail_ratio = 1e-9;
  r1.converged = true;
  ProbeRow r2;
  r2.beta = 0.95;
  r2.converged = false;
  r2.n_critical = 10;
  r2.d_multiplicity = 1;
  const std::vector<ProbeRow> rows = {r1, r2};

  SUBCASE("without the study counters") {
    const std::string text = probe_csv(rows, false);
    const std::vector<std::string> lines = csv_lines(text);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] ==
          "epsilon,ell,beta,quotient,predicted,deficit,distance,min_u,"
          "tail_ratio,converged");
    const std::vector<std::string> f1 = split(lines[1], ',');
    REQUIRE(f1.size() == 10);
    CHECK(std::stod(f1[0]) == Approx(0.02).epsilon(1e-15));
    CHECK(f1[1].empty());
    CHECK(f1[2].empty());
    CHECK(std::stod(f1[3]) == Approx(0.86).epsilon(1e-15));
    CHECK(std::stod(f1[4]) == Approx(6.0 / 7.0).epsilon(1e-15));
    CHECK(std::stod(f1[8]) == Approx(1e-9).epsilon(1e-15));
    CHECK(f1[9] == "true");
    const std::vector<std::string> f2 = split(lines[2], ',');
    REQUIRE(f2.size() == 10);
    CHECK(f2[0].empty());
    CHECK(std::stod(f2[2]) == Approx(0.95).epsilon(1e-15));
    CHECK(f2[9] == "false");
  }

  SUBCASE("with the study counters") {
    const std::string text = probe_csv(rows, true);
    const std::vector<std::string> lines = csv_lines(text);
    CHECK(lines[0] ==
          "epsilon,ell,beta,quotient,predicted,deficit,distance,min_u,"
          "tail_ratio,converged,n_critical,d_multiplicity");
    const std::vector<std::string> f1 = split(lines[1], ',');
    REQUIRE(f1.size() == 12);
    CHECK(f1[10].empty());
    CHECK(f1[11].empty());
    const std::vector<std::string> f2 = split(lines[2], ',');
    REQUIRE(f2.size() == 12);
    CHECK(f2[10] == "10");
    CHECK(f2[11] == "1");
  }

  SUBCASE("deterministic bytes") {
    CHECK(probe_csv(rows, true) == probe_csv(rows, true));
  }
}

TEST_CASE("report shells embed tool, version, and configuration") {
  RunConfig cfg;
  cfg.seed = 123456789012345678ull;
  cfg.out = "report.json";
  OrderedJson j = report_shell("quotient", cfg);
  CHECK(j["tool"] == "sphstab");
  CHECK(j["version"] == kToolVersion);
  CHECK(j["kind"] == "quotient");
  CHECK(j["config"]["n"] == 2);
  CHECK(j["config"]["s"].get<double>() == Approx(1.5));
  CHECK(j["config"]["seed"].get<std::uint64_t>() == cfg.seed);
  CHECK(j["config"]["out"] == "report.json");
  CHECK(j["config"]["format"] == "json");
  const std::string text = render_json(j);
  CHECK(text.front() == '{');
  CHECK(text.back() == '\n');
  CHECK(render_json(j) == text);
  // keys stay in insertion order
  CHECK(text.find("\"tool\"") < text.find("\"version\""));
  CHECK(text.find("\"version\"") < text.find("\"kind\""));
}

TEST_CASE("constants report") {
  RunConfig cfg;
  cfg.L = 4;
  OrderedJson j = constants_report_json(cfg);
  REQUIRE(j["eigenvalues"].size() == 5);
  CHECK(j["eigenvalues"][0]["l"] == 0);
  CHECK(j["eigenvalues"][0]["value"].get<double>() == Approx(-0.375));
  const double sharp = j["sharp_constant"].get<double>();
  const double via = j["sharp_constant_via_eigenvalue"].get<double>();
  CHECK(sharp == Approx(via).epsilon(1e-12));
  CHECK(sharp < 0.0);
  CHECK(j["local_constant"].get<double>() == Approx(6.0 / 7.0));
  CHECK(j["areas"]["sphere"].get<double>() ==
        Approx(4.0 * M_PI).epsilon(1e-14));
  CHECK(j["params"]["p"].get<double>() == Approx(-4.0));

  RunConfig upper = cfg;
  upper.s = 2.5;
  OrderedJson ju = constants_report_json(upper);
  CHECK(ju["sharp_constant"].get<double>() > 0.0);

  RunConfig bad = cfg;
  bad.s = 2.0;
  CHECK_THROWS_AS(constants_report_json(bad), InputError);
}

TEST_CASE("quotient report handles absent numbers as null") {
  RunConfig cfg;
  StabilityReport rep;
  rep.params = SpectralParams::create(2, 1.5);
  rep.quotient = 0.8577;
  rep.deficit = 1.25;
  rep.distance = std::numeric_limits<double>::quiet_NaN();
  rep.min_u = 0.95;
  rep.invariance_residual = 2e-7;
  rep.best.c = 1.01;
  rep.best.zeta = Vec::Zero(3);
  rep.n_critical = 1;
  rep.d_multiplicity = 1;
  rep.complete = true;
  rep.diag.truncation_degree = 48;
  rep.diag.band_contributions = {1.0, 0.0, 0.5};
  rep.diag.tail_ratio = 1e-12;
  rep.diag.converged = true;

  OrderedJson j = stability_report_json(rep, cfg);
  CHECK(j["quotient"].get<double>() == Approx(0.8577));
  CHECK(j["distance"].is_null());
  CHECK(j["invariance_ok"] == true);
  REQUIRE(j["best"]["zeta"].size() == 3);
  CHECK(j["spectral"]["band_contributions"].size() == 3);
  CHECK(j["spectral"]["converged"] == true);

  rep.invariance_residual = 0.5;  // above cfg.tol
  OrderedJson j2 = stability_report_json(rep, cfg);
  CHECK(j2["invariance_ok"] == false);
}

TEST_CASE("probe rows serialize absent counters as null") {
  RunConfig cfg;
  ProbeRow r;
  r.epsilon = 0.01;
  r.quotient = 1.2;
  r.converged = true;
  OrderedJson j = probe_report_json("probe-local", {r}, cfg);
  REQUIRE(j["rows"].size() == 1);
  CHECK(j["kind"] == "probe-local");
  CHECK(j["rows"][0]["epsilon"].get<double>() == Approx(0.01));
  CHECK(j["rows"][0]["ell"].is_null());
  CHECK(j["rows"][0]["n_critical"].is_null());
  CHECK(j["rows"][0]["converged"] == true);
}

TEST_CASE("decompose report from a real enumeration") {
  RunConfig cfg;
  cfg.budget = 6;
  const SpectralParams par = cfg.validated();
  OrderedJson doc = {
      {"type", "harmonic"},
      {"coeffs", {{2, 0, 0.05}}},
      {"offset", 1.0},
  };
  SphereField u = field_from_json(doc, par);
  DistanceResult res = distance(u, par, cfg.budget, cfg.seed);
  OrderedJson j = distance_report_json(res, par, cfg);
  CHECK(j["distance"].get<double>() > 0.0);
  const int n_critical = j["n_critical"].get<int>();
  REQUIRE(n_critical >= 1);
  CHECK(j["points"].size() == static_cast<std::size_t>(n_critical));
  REQUIRE(!j["attaining"].empty());
  const int argmin = j["argmin"].get<int>();
  CHECK(j["attaining"][0].get<int>() == argmin);
  const OrderedJson& best = j["points"][argmin];
  CHECK(best["c"].get<double>() == Approx(1.0).epsilon(0.05));
  for (const auto& z : best["zeta"]) {
    CHECK(std::abs(z.get<double>()) < 1e-2);
  }
  CHECK(best["branch"].is_string());
}

TEST_CASE("verify report is deterministic and aggregates pass flags") {
  RunConfig cfg;
  VerifyOptions vo;
  vo.params = {SpectralParams::create(2, 1.5)};
  SuiteResult s1 = run_suite("constants", vo);
  SuiteResult s2 = run_suite("constants", vo);
  OrderedJson j1 = verify_report_json({s1}, cfg);
  OrderedJson j2 = verify_report_json({s2}, cfg);
  CHECK(render_json(j1) == render_json(j2));  // timings are excluded
  CHECK(j1["pass"] == true);
  CHECK(j1["n_suites"] == 1);
  CHECK(j1["n_checks"].get<int>() ==
        static_cast<int>(s1.checks.size()));
  CHECK(j1["n_failed"] == 0);
  REQUIRE(j1["suites"].size() == 1);
  CHECK(j1["suites"][0]["suite"] == "constants");
  REQUIRE(!j1["suites"][0]["checks"].empty());
  CHECK(j1["suites"][0]["checks"][0]["id"].is_string());

  OrderedJson empty = verify_report_json({}, cfg);
  CHECK(empty["pass"] == false);
}

TEST_CASE("strict and explorer reports carry their headline figures") {
  RunConfig cfg;
  StrictProbe probe;
  ProbeRow row;
  row.epsilon = -0.05;
  row.quotient = 0.853;
  row.converged = true;
  probe.rows = {row};
  probe.slope_measured = 0.0815;
  probe.slope_predicted = 4.0 / 49.0;
  probe.intercept = 0.857;
  probe.fit_residual = 1e-4;
  probe.cubic_integral = 8.0 * M_PI / 35.0;
  probe.min_over_signs = 0.853;
  OrderedJson js = strict_report_json(probe, cfg);
  CHECK(js["kind"] == "probe-strict");
  CHECK(js["local_constant"].get<double>() == Approx(6.0 / 7.0));
  CHECK(js["slope_predicted"].get<double>() == Approx(4.0 / 49.0));
  CHECK(js["min_over_signs"].get<double>() == Approx(0.853));
  REQUIRE(js["rows"].size() == 1);

  ExplorerStep st0;
  st0.iteration = 0;
  st0.quotient = 0.865;
  st0.deficit = 1.0;
  st0.distance = 1.16;
  st0.min_u = 0.9;
  st0.band_energies = {0.0, 0.0, 0.5};
  ExplorerStep st1 = st0;
  st1.iteration = 1;
  st1.quotient = 0.857;
  st1.step_size = 0.25;
  SphereField one(2, [](Eigen::Ref<const Vec>) { return 1.0; }, 0);
  ExplorerResult res{{st0, st1}, false, true, 0.857, 1.2, one};
  OrderedJson je = explorer_report_json(res, cfg);
  CHECK(je["kind"] == "explore");
  CHECK(je["reached_below_local"] == true);
  CHECK(je["final_quotient"].get<double>() == Approx(0.857));
  REQUIRE(je["trajectory"].size() == 2);
  CHECK(je["trajectory"][1]["step_size"].get<double>() == Approx(0.25));
  REQUIRE(je["trajectory"][0]["band_energies"].size() == 3);
}

TEST_CASE("output path resolution and report writing") {
  unsetenv("SPHSTAB_OUT_DIR");
  CHECK(resolve_out_path("") == "");
  CHECK(resolve_out_path("a.json") == "a.json");
  CHECK(resolve_out_path("/abs/a.json") == "/abs/a.json");
  setenv("SPHSTAB_OUT_DIR", "/tmp/sphstab_io_outdir", 1);
  CHECK(resolve_out_path("a.json") == "/tmp/sphstab_io_outdir/a.json");
  CHECK(resolve_out_path("/abs/a.json") == "/abs/a.json");
  CHECK(resolve_out_path("") == "");
  setenv("SPHSTAB_OUT_DIR", "/tmp/sphstab_io_outdir/", 1);
  CHECK(resolve_out_path("a.json") == "/tmp/sphstab_io_outdir/a.json");
  unsetenv("SPHSTAB_OUT_DIR");

  const std::string path = "/tmp/sphstab_io_report.json";
  write_report(path, "{\"x\": 1}\n");
  std::ifstream f(path);
  REQUIRE(f.good());
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  CHECK(text == "{\"x\": 1}\n");
  std::remove(path.c_str());

  CHECK_THROWS_AS(write_report("/nonexistent_dir_xyz/a.json", "x"),
                  InputError);
}
