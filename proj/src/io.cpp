#include "sphstab/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sphstab/conformal.hpp"
#include "sphstab/specialfn.hpp"

namespace sphstab {

namespace {

// Non-finite numbers have no JSON literal; emit null so absence is explicit.
OrderedJson num(double v) {
  if (!std::isfinite(v)) return OrderedJson(nullptr);
  return OrderedJson(v);
}

OrderedJson vec_json(const Vec& v) {
  OrderedJson arr = OrderedJson::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(num(v(i)));
  return arr;
}

OrderedJson count_json(int v) {
  if (v < 0) return OrderedJson(nullptr);
  return OrderedJson(v);
}

// CSV cell for a double: empty when absent, else a round-trippable decimal.
std::string csv_num(double v) {
  if (!std::isfinite(v)) return std::string();
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

// Packed coefficient index (mirrors the harmonic-basis packing: on S^2 it is
// l^2 + l + m; on S^1 it is 0 for l = 0, then cosine before sine per degree).
int packed_index(int dim, int l, int m) {
  if (dim == 2) return l * l + l + m;
  if (l == 0) return 0;
  return m == 1 ? 2 * l - 1 : 2 * l;
}

// Refinement level that resolves a profile concentrated at radius t: the
// expansion coefficients decay like r^(-l) with r = (1+sqrt(1-t^2))/t, so
// pick the degree that pushes the tail to the double-precision floor.
int level_for_radius(int n, double t) {
  if (t < 0.2) return 0;
  const double r = (1.0 + std::sqrt(std::max(0.0, 1.0 - t * t))) / t;
  const int need = static_cast<int>(std::ceil(18.5 / std::log(r) + 16.0));
  return level_for_degree(n, need);
}

const OrderedJson& require(const OrderedJson& doc, const char* key,
                           const char* context) {
  auto it = doc.find(key);
  if (it == doc.end()) {
    throw InputError(std::string(context) + ": missing \"" + key + "\"");
  }
  return *it;
}

double require_finite_number(const OrderedJson& j, const char* what) {
  if (!j.is_number()) {
    throw InputError(std::string(what) + " must be a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    throw InputError(std::string(what) + " must be finite");
  }
  return v;
}

SphereField harmonic_from_json(const OrderedJson& doc,
                               const SpectralParams& par, int level) {
  const OrderedJson& coeffs = require(doc, "coeffs", "harmonic field");
  if (!coeffs.is_array()) {
    throw InputError("harmonic field: \"coeffs\" must be an array");
  }
  double offset = 0.0;
  if (doc.contains("offset")) {
    offset = require_finite_number(doc["offset"], "harmonic field: offset");
  }

  const int n = par.dim;
  const int degree_cap = degree_for_level(n, max_level(n));
  struct Entry {
    int l, m;
    double a;
  };
  std::vector<Entry> entries;
  int degree = 0;
  for (const OrderedJson& item : coeffs) {
    if (!item.is_array() || item.size() != 3 ||
        !item[0].is_number_integer() || !item[1].is_number_integer()) {
      throw InputError(
          "harmonic field: each coeffs entry must be [l, m, value] with "
          "integer l and m");
    }
    const int l = item[0].get<int>();
    const int m = item[1].get<int>();
    const double a = require_finite_number(item[2], "harmonic field: value");
    if (l < 0) throw InputError("harmonic field: degree l must be >= 0");
    if (l > degree_cap) {
      throw InputError("harmonic field: degree " + std::to_string(l) +
                       " exceeds the workspace cap " +
                       std::to_string(degree_cap));
    }
    if (n == 2) {
      if (m < -l || m > l) {
        throw InputError("harmonic field: order m must satisfy |m| <= l");
      }
    } else {
      if (l == 0 ? m != 0 : (m != 1 && m != -1)) {
        throw InputError(
            "harmonic field: on the circle m must be 0 for l = 0, else +1 "
            "(cosine) or -1 (sine)");
      }
    }
    entries.push_back({l, m, a});
    degree = std::max(degree, l);
  }
  if (entries.empty() && offset == 0.0) {
    throw InputError("harmonic field: no coefficients and no offset");
  }

  const int size = n == 2 ? (degree + 1) * (degree + 1) : 2 * degree + 1;
  Vec packed = Vec::Zero(size);
  for (const Entry& e : entries) packed(packed_index(n, e.l, e.m)) += e.a;
  packed(0) += offset * std::sqrt(sphere_area(n));

  int lvl = level;
  if (lvl < 0) {
    // Leave quadrature headroom for products of the loaded band content.
    lvl = level_for_degree(n, std::min(2 * degree, degree_cap));
  }
  return SphereField::from_coeffs(n, packed, lvl);
}

SphereField bubble_sum_from_json(const OrderedJson& doc,
                                 const SpectralParams& par, int level) {
  const OrderedJson& terms = require(doc, "terms", "bubble_sum field");
  if (!terms.is_array() || terms.empty()) {
    throw InputError("bubble_sum field: \"terms\" must be a nonempty array");
  }
  const int n = par.dim;
  std::vector<double> weights;
  std::vector<Evaluator> profiles;
  double radius_max = 0.0;
  for (const OrderedJson& item : terms) {
    if (!item.is_object()) {
      throw InputError("bubble_sum field: each term must be an object");
    }
    double c = 1.0;
    if (item.contains("c")) {
      c = require_finite_number(item["c"], "bubble_sum field: c");
    }
    if (!(c > 0.0)) {
      throw InputError("bubble_sum field: weight c must be positive");
    }
    const OrderedJson& zj = require(item, "zeta", "bubble_sum field");
    if (!zj.is_array() || static_cast<int>(zj.size()) != n + 1) {
      throw InputError("bubble_sum field: \"zeta\" must have " +
                       std::to_string(n + 1) + " entries");
    }
    Vec zeta(n + 1);
    for (int i = 0; i <= n; ++i) {
      zeta(i) = require_finite_number(zj[i], "bubble_sum field: zeta entry");
    }
    const double r = zeta.norm();
    if (!(r < 1.0)) {
      throw InputError("bubble_sum field: center must satisfy |zeta| < 1");
    }
    radius_max = std::max(radius_max, r);
    weights.push_back(c);
    profiles.push_back(bubble_profile(par, zeta));
  }

  const int lvl = level >= 0 ? level : level_for_radius(n, radius_max);
  Evaluator sum = [weights, profiles](Eigen::Ref<const Vec> w) {
    double v = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      v += weights[i] * profiles[i](w);
    }
    return v;
  };
  return SphereField(n, std::move(sum), lvl);
}

OrderedJson diagnostics_json(const SpectralDiagnostics& diag) {
  OrderedJson j;
  j["truncation_degree"] = diag.truncation_degree;
  j["tail_ratio"] = num(diag.tail_ratio);
  j["converged"] = diag.converged;
  j["positive_part"] = num(diag.positive_part);
  j["negative_part"] = num(diag.negative_part);
  OrderedJson bands = OrderedJson::array();
  for (double b : diag.band_contributions) bands.push_back(num(b));
  j["band_contributions"] = std::move(bands);
  return j;
}

OrderedJson params_json(const SpectralParams& par) {
  OrderedJson j;
  j["n"] = par.dim;
  j["s"] = num(par.order);
  j["sigma"] = num(par.sigma);
  j["p"] = num(par.p);
  return j;
}

OrderedJson probe_row_json(const ProbeRow& row) {
  OrderedJson j;
  j["epsilon"] = num(row.epsilon);
  j["ell"] = num(row.ell);
  j["beta"] = num(row.beta);
  j["quotient"] = num(row.quotient);
  j["predicted"] = num(row.predicted);
  j["deficit"] = num(row.deficit);
  j["distance"] = num(row.distance);
  j["min_u"] = num(row.min_u);
  j["tail_ratio"] = num(row.tail_ratio);
  j["converged"] = row.converged;
  j["n_critical"] = count_json(row.n_critical);
  j["d_multiplicity"] = count_json(row.d_multiplicity);
  return j;
}

}  // namespace

SpectralParams RunConfig::validated() const {
  const SpectralParams par = SpectralParams::create(n, s);
  if (grid < -1 || grid > max_level(n)) {
    throw InputError("grid level must be -1 (automatic) or in [0, " +
                     std::to_string(max_level(n)) + "]");
  }
  const int degree_cap = degree_for_level(n, max_level(n));
  if (L < 0 || L > degree_cap) {
    throw InputError("truncation degree L must be in [0, " +
                     std::to_string(degree_cap) + "]");
  }
  if (budget < 1 || budget > 1024) {
    throw InputError("budget must be in [1, 1024]");
  }
  if (!(tol > 0.0) || tol > 1.0) {
    throw InputError("tol must be in (0, 1]");
  }
  if (format != "json" && format != "csv") {
    throw InputError("format must be \"json\" or \"csv\"");
  }
  return par;
}

SphereField field_from_json(const OrderedJson& doc, const SpectralParams& par,
                            int level) {
  if (!doc.is_object()) {
    throw InputError("field document must be a JSON object");
  }
  const OrderedJson& type_j = require(doc, "type", "field document");
  if (!type_j.is_string()) {
    throw InputError("field document: \"type\" must be a string");
  }
  const std::string type = type_j.get<std::string>();
  if (doc.contains("n")) {
    if (!doc["n"].is_number_integer()) {
      throw InputError("field document: \"n\" must be an integer");
    }
    const int fn = doc["n"].get<int>();
    if (fn != par.dim) {
      throw InputError("field dimension n=" + std::to_string(fn) +
                       " does not match the run dimension n=" +
                       std::to_string(par.dim));
    }
  }
  if (level > max_level(par.dim)) {
    throw InputError("field level exceeds the registry maximum " +
                     std::to_string(max_level(par.dim)));
  }

  SphereField u = [&]() {
    if (type == "harmonic") return harmonic_from_json(doc, par, level);
    if (type == "bubble_sum") return bubble_sum_from_json(doc, par, level);
    throw InputError("unknown field type \"" + type +
                     "\" (expected harmonic or bubble_sum)");
  }();

  if (!u.positive()) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", u.min_sample());
    throw InputError(std::string("field is not strictly positive "
                                 "(grid minimum ") +
                     buf + ")");
  }
  return u;
}

SphereField load_field(const std::string& path, const SpectralParams& par,
                       int level) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read field file \"" + path + "\"");
  OrderedJson doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& err) {
    throw InputError("field file \"" + path + "\" is not valid JSON: " +
                     err.what());
  }
  return field_from_json(doc, par, level);
}

OrderedJson config_json(const RunConfig& cfg) {
  OrderedJson j;
  j["n"] = cfg.n;
  j["s"] = num(cfg.s);
  j["grid"] = cfg.grid;
  j["L"] = cfg.L;
  j["budget"] = cfg.budget;
  j["tol"] = num(cfg.tol);
  j["seed"] = cfg.seed;
  j["out"] = cfg.out;
  j["format"] = cfg.format;
  return j;
}

OrderedJson report_shell(const std::string& kind, const RunConfig& cfg) {
  OrderedJson j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["kind"] = kind;
  j["config"] = config_json(cfg);
  return j;
}

OrderedJson constants_report_json(const RunConfig& cfg) {
  const SpectralParams par = cfg.validated();
  OrderedJson j = report_shell("constants", cfg);
  j["params"] = params_json(par);
  j["sharp_constant"] = num(sharp_constant(par));
  j["sharp_constant_via_eigenvalue"] = num(sharp_constant_identity(par));
  j["local_constant"] = num(local_constant(par));
  j["local_constant_via_eigenvalues"] = num(local_constant_identity(par));
  j["balance_constant"] = num(balance_limit_constant(par));
  j["concentration_constant"] = num(concentration_constant(par));
  OrderedJson areas;
  areas["sphere"] = num(sphere_area(par.dim));
  areas["equator"] = num(sphere_area(par.dim - 1));
  j["areas"] = std::move(areas);
  OrderedJson eig = OrderedJson::array();
  for (int l = 0; l <= cfg.L; ++l) {
    OrderedJson row;
    row["l"] = l;
    row["value"] = num(eigenvalue(par, l));
    eig.push_back(std::move(row));
  }
  j["eigenvalues"] = std::move(eig);
  return j;
}

OrderedJson stability_report_json(const StabilityReport& rep,
                                  const RunConfig& cfg) {
  OrderedJson j = report_shell("quotient", cfg);
  j["params"] = params_json(rep.params);
  j["quotient"] = num(rep.quotient);
  j["deficit"] = num(rep.deficit);
  j["distance"] = num(rep.distance);
  j["min_u"] = num(rep.min_u);
  j["invariance_residual"] = num(rep.invariance_residual);
  j["invariance_ok"] = rep.invariance_residual <= cfg.tol;
  OrderedJson best;
  best["c"] = num(rep.best.c);
  best["zeta"] = vec_json(rep.best.zeta);
  best["residual_norm"] = num(rep.best_residual_norm);
  j["best"] = std::move(best);
  j["n_critical"] = rep.n_critical;
  j["d_multiplicity"] = rep.d_multiplicity;
  j["complete"] = rep.complete;
  j["spectral"] = diagnostics_json(rep.diag);
  return j;
}

OrderedJson distance_report_json(const DistanceResult& res,
                                 const SpectralParams& par,
                                 const RunConfig& cfg) {
  OrderedJson j = report_shell("decompose", cfg);
  j["params"] = params_json(par);
  j["distance"] = num(res.value);
  j["argmin"] = res.argmin;
  OrderedJson att = OrderedJson::array();
  for (int i : res.attaining) att.push_back(i);
  j["attaining"] = std::move(att);
  j["n_critical"] = static_cast<int>(res.set.points.size());
  j["complete"] = res.set.complete;
  OrderedJson pts = OrderedJson::array();
  for (const Decomposition& d : res.set.points) {
    OrderedJson p;
    p["c"] = num(d.bubble.c);
    p["zeta"] = vec_json(d.bubble.zeta);
    p["rho_energy"] = num(d.rho_energy);
    p["residual_norm"] = num(d.residual_norm);
    p["branch"] = d.branch;
    pts.push_back(std::move(p));
  }
  j["points"] = std::move(pts);
  return j;
}

OrderedJson probe_report_json(const std::string& kind,
                              const std::vector<ProbeRow>& rows,
                              const RunConfig& cfg) {
  OrderedJson j = report_shell(kind, cfg);
  OrderedJson arr = OrderedJson::array();
  for (const ProbeRow& row : rows) arr.push_back(probe_row_json(row));
  j["rows"] = std::move(arr);
  return j;
}

OrderedJson strict_report_json(const StrictProbe& probe,
                               const RunConfig& cfg) {
  OrderedJson j = report_shell("probe-strict", cfg);
  const SpectralParams par = cfg.validated();
  j["local_constant"] = num(local_constant(par));
  j["slope_measured"] = num(probe.slope_measured);
  j["slope_predicted"] = num(probe.slope_predicted);
  j["intercept"] = num(probe.intercept);
  j["fit_residual"] = num(probe.fit_residual);
  j["cubic_integral"] = num(probe.cubic_integral);
  j["min_over_signs"] = num(probe.min_over_signs);
  OrderedJson arr = OrderedJson::array();
  for (const ProbeRow& row : probe.rows) arr.push_back(probe_row_json(row));
  j["rows"] = std::move(arr);
  return j;
}

OrderedJson explorer_report_json(const ExplorerResult& res,
                                 const RunConfig& cfg) {
  OrderedJson j = report_shell("explore", cfg);
  const SpectralParams par = cfg.validated();
  j["local_constant"] = num(local_constant(par));
  j["stalled"] = res.stalled;
  j["reached_below_local"] = res.reached_below_local;
  j["final_quotient"] = num(res.final_quotient);
  j["final_distance"] = num(res.final_distance);
  OrderedJson arr = OrderedJson::array();
  for (const ExplorerStep& st : res.trajectory) {
    OrderedJson row;
    row["iteration"] = st.iteration;
    row["quotient"] = num(st.quotient);
    row["deficit"] = num(st.deficit);
    row["distance"] = num(st.distance);
    row["min_u"] = num(st.min_u);
    row["step_size"] = num(st.step_size);
    OrderedJson bands = OrderedJson::array();
    for (double b : st.band_energies) bands.push_back(num(b));
    row["band_energies"] = std::move(bands);
    arr.push_back(std::move(row));
  }
  j["trajectory"] = std::move(arr);
  return j;
}

OrderedJson verify_report_json(const std::vector<SuiteResult>& suites,
                               const RunConfig& cfg) {
  OrderedJson j = report_shell("verify", cfg);
  bool pass = !suites.empty();
  int n_checks = 0;
  int n_failed = 0;
  OrderedJson arr = OrderedJson::array();
  for (const SuiteResult& suite : suites) {
    pass = pass && suite.pass;
    OrderedJson sj;
    sj["suite"] = suite.suite;
    sj["pass"] = suite.pass;
    OrderedJson checks = OrderedJson::array();
    for (const CheckResult& c : suite.checks) {
      ++n_checks;
      if (!c.pass) ++n_failed;
      OrderedJson cj;
      cj["id"] = c.id;
      cj["pass"] = c.pass;
      cj["measured"] = num(c.measured);
      cj["tolerance"] = num(c.tolerance);
      cj["detail"] = c.detail;
      checks.push_back(std::move(cj));
    }
    sj["checks"] = std::move(checks);
    arr.push_back(std::move(sj));
  }
  j["pass"] = pass;
  j["n_suites"] = static_cast<int>(suites.size());
  j["n_checks"] = n_checks;
  j["n_failed"] = n_failed;
  j["suites"] = std::move(arr);
  return j;
}

std::string probe_csv(const std::vector<ProbeRow>& rows, bool bubble_columns) {
  std::string out =
      "epsilon,ell,beta,quotient,predicted,deficit,distance,min_u,"
      "tail_ratio,converged";
  if (bubble_columns) out += ",n_critical,d_multiplicity";
  out += "\n";
  for (const ProbeRow& row : rows) {
    out += csv_num(row.epsilon);
    out += ',';
    out += csv_num(row.ell);
    out += ',';
    out += csv_num(row.beta);
    out += ',';
    out += csv_num(row.quotient);
    out += ',';
    out += csv_num(row.predicted);
    out += ',';
    out += csv_num(row.deficit);
    out += ',';
    out += csv_num(row.distance);
    out += ',';
    out += csv_num(row.min_u);
    out += ',';
    out += csv_num(row.tail_ratio);
    out += ',';
    out += row.converged ? "true" : "false";
    if (bubble_columns) {
      out += ',';
      if (row.n_critical >= 0) out += std::to_string(row.n_critical);
      out += ',';
      if (row.d_multiplicity >= 0) out += std::to_string(row.d_multiplicity);
    }
    out += '\n';
  }
  return out;
}

std::string render_json(const OrderedJson& j) { return j.dump(2) + "\n"; }

std::string resolve_out_path(const std::string& out) {
  if (out.empty() || out.front() == '/') return out;
  const char* dir = std::getenv("SPHSTAB_OUT_DIR");
  if (dir == nullptr || *dir == '\0') return out;
  std::string d(dir);
  if (d.back() != '/') d += '/';
  return d + out;
}

void write_report(const std::string& out, const std::string& content) {
  const std::string path = resolve_out_path(out);
  if (path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open output file \"" + path + "\"");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw InputError("failed writing output file \"" + path + "\"");
}

}  // namespace sphstab
