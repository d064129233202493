#include "sphstab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "sphstab/stability.hpp"

namespace sphstab {

namespace {

std::string param_tag(const SpectralParams& par) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "(n=%d, s=%g)", par.dim, par.order);
  return buf;
}

std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t salt) {
  return std::mt19937_64(seed ^ (salt * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull));
}

// Tracks the worst (largest) observed value of a gated quantity together
// with a human-readable location.
struct Worst {
  double value = -std::numeric_limits<double>::infinity();
  std::string where;
  void track(double v, const std::string& w) {
    if (v > value) {
      value = v;
      where = w;
    }
  }
  double finite() const { return std::isfinite(value) ? value : 0.0; }
};

CheckResult gate(const std::string& id, const Worst& worst, double tol) {
  CheckResult r;
  r.id = id;
  r.measured = worst.finite();
  r.tolerance = tol;
  r.pass = r.measured <= tol;
  r.detail = worst.where.empty() ? "no cases executed" : "worst at " + worst.where;
  if (worst.where.empty()) r.pass = false;
  return r;
}

CheckResult flag(const std::string& id, bool pass, double measured, double tol,
                 const std::string& detail) {
  return CheckResult{id, pass, measured, tol, detail};
}

Mat random_rotation(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = g(rng);
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  Vec diag = qr.matrixQR().diagonal();
  for (int j = 0; j < d; ++j)
    if (diag(j) < 0) q.col(j) = -q.col(j);
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

Vec random_unit(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(d);
  do {
    for (int i = 0; i < d; ++i) v(i) = g(rng);
  } while (v.norm() < 1e-8);
  return v / v.norm();
}

int packed_size(int n, int degree) {
  return n == 1 ? 2 * degree + 1 : (degree + 1) * (degree + 1);
}

int band_start(int n, int l) {
  if (n == 2) return l * l;
  return l == 0 ? 0 : 2 * l - 1;
}

int band_count(int n, int l) {
  if (n == 2) return 2 * l + 1;
  return l == 0 ? 1 : 2;
}

// Positive field 1 + (random content in bands [lo, hi]), rescaled until the
// minimum stays clear of zero.
SphereField random_positive_field(int n, int lo, int hi, double amp,
                                  std::mt19937_64& rng, double floor = 0.05) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec packed = Vec::Zero(packed_size(n, hi));
  for (int l = lo; l <= hi; ++l) {
    const int k0 = band_start(n, l), cnt = band_count(n, l);
    for (int k = 0; k < cnt; ++k) packed(k0 + k) = g(rng);
  }
  packed *= amp / packed.norm();
  packed(0) = std::sqrt(sphere_area(n));
  for (int attempt = 0; attempt < 40; ++attempt) {
    SphereField u = SphereField::from_coeffs(n, packed, 0);
    if (u.min_sample() > floor) return u;
    packed.tail(packed.size() - 1) *= 0.7;
  }
  throw NumericsError("verify: could not build a positive random field");
}

SphereField smooth_positive(int n) {
  return SphereField(n, [n](Eigen::Ref<const Vec> w) {
    return std::exp(0.25 * w(n)) * (1.0 + 0.2 * w(0));
  });
}

// Refinement level resolving a profile concentrated at radius t, from the
// exponential decay rate of its expansion coefficients.
int profile_level(int n, double t) {
  if (t < 0.2) return 0;
  const double r = (1.0 + std::sqrt(std::max(0.0, 1.0 - t * t))) / t;
  const int need = static_cast<int>(std::ceil(18.5 / std::log(r) + 16.0));
  return level_for_degree(n, need);
}

std::string zeta_tag(const SpectralParams& par, double t, const Vec& dir) {
  std::ostringstream os;
  os << param_tag(par) << ", |zeta|=" << t << ", dir=(";
  for (int i = 0; i < dir.size(); ++i) os << (i ? "," : "") << dir(i);
  os << ")";
  return os.str();
}

// ---------------------------------------------------------------- constants

SuiteResult suite_constants(const VerifyOptions& opt,
                            const std::vector<SpectralParams>&) {
  SuiteResult out;
  out.suite = "constants";
  auto rng = seeded(opt.seed, 0xC0);
  std::uniform_real_distribution<double> low(0.03, 0.97), high(1.03, 1.97);

  const double tamper = opt.alpha_tamper;
  Worst two_routes, first_band, local_id;
  int sign_violations = 0;
  std::string sign_where = "all 50 samples";
  for (int i = 0; i < 50; ++i) {
    const int n = (i % 2) + 1;
    const double sg = (i % 4 < 2) ? low(rng) : high(rng);
    const auto par = SpectralParams::create(n, sg + 0.5 * n);
    const std::string tag = param_tag(par);

    const double a0 = eigenvalue(par, 0) + tamper;
    const double a1 = eigenvalue(par, 1) + tamper;
    const double a2 = eigenvalue(par, 2) + tamper;

    const double route_a = sharp_constant(par);
    const double route_b = a0 * std::pow(sphere_area(n), 2.0 * par.order / n);
    two_routes.track(std::abs(route_a - route_b) / std::abs(route_a), tag);

    first_band.track(std::abs(a1 - (par.p - 1.0) * a0) / std::abs(a1), tag);

    local_id.track(
        std::abs(local_constant(par) - (1.0 - a1 / a2)) / local_constant(par),
        tag);

    const bool expect_negative = par.sigma < 1.0;
    if ((route_a < 0.0) != expect_negative) {
      ++sign_violations;
      sign_where = tag;
    }
  }
  out.checks.push_back(gate("constants.sharp-two-routes", two_routes, 1e-12));
  out.checks.push_back(gate("constants.first-band-ratio", first_band, 1e-12));
  out.checks.push_back(
      gate("constants.local-constant-identity", local_id, 1e-12));
  out.checks.push_back(flag("constants.sharp-sign-window", sign_violations == 0,
                            sign_violations, 0.0, sign_where));
  return out;
}

// ------------------------------------------------------------------- sphere

SuiteResult suite_sphere(const VerifyOptions& opt,
                         const std::vector<SpectralParams>& matrix) {
  SuiteResult out;
  out.suite = "sphere";
  std::vector<int> dims;
  for (const auto& par : matrix)
    if (std::find(dims.begin(), dims.end(), par.dim) == dims.end())
      dims.push_back(par.dim);

  Worst area_err, roundtrip;
  auto rng = seeded(opt.seed, 0x5F);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int n : dims) {
    for (int level = 0; level <= 1; ++level) {
      std::ostringstream tag;
      tag << "n=" << n << ", level=" << level;
      SphereField one(n, [](Eigen::Ref<const Vec>) { return 1.0; }, level);
      area_err.track(std::abs(one.integral() - sphere_area(n)) / sphere_area(n),
                     tag.str());

      Vec packed(packed_size(n, degree_for_level(n, level)));
      for (Eigen::Index k = 0; k < packed.size(); ++k) packed(k) = g(rng);
      SphereField f = SphereField::from_coeffs(n, packed, level);
      const Vec& back = f.coeffs();
      roundtrip.track(
          (back.head(packed.size()) - packed).norm() / packed.norm(),
          tag.str());
    }
  }
  out.checks.push_back(gate("sphere.area-quadrature", area_err, 1e-12));
  out.checks.push_back(gate("sphere.analysis-roundtrip", roundtrip, 1e-10));
  return out;
}

// ---------------------------------------------------------------- conformal

SuiteResult suite_conformal(const VerifyOptions& opt,
                            const std::vector<SpectralParams>& matrix) {
  SuiteResult out;
  out.suite = "conformal";

  Worst norm_err, energy_err;
  for (const auto& par : matrix) {
    const int n = par.dim;
    auto rng = seeded(opt.seed, 0xCF00 + n * 16 + static_cast<int>(par.order * 4));
    std::vector<Vec> dirs;
    Vec pole = Vec::Zero(n + 1);
    pole(n) = 1.0;
    dirs.push_back(pole);
    dirs.push_back(-pole);
    for (int k = 0; k < 3; ++k) dirs.push_back(random_unit(n + 1, rng));

    for (double t : {0.0, 0.3, 0.6, 0.9}) {
      const int lvl = profile_level(n, t);
      for (const Vec& dir : dirs) {
        Bubble b{1.0, t * dir};
        SphereField v = bubble_eval(par, b, lvl);
        const std::string tag = zeta_tag(par, t, dir);

        const double mass = std::pow(pnorm(v, par.p), par.p);
        norm_err.track(std::abs(mass - sphere_area(n)) / sphere_area(n), tag);

        QuadFormResult q = a2s(v, par);
        const double target = eigenvalue(par, 0) * sphere_area(n);
        double err = std::abs(q.value - target) / std::abs(target);
        if (!q.diag.converged) err = std::numeric_limits<double>::infinity();
        energy_err.track(err, tag);
        if (t == 0.0) break;  // all directions coincide at the center
      }
    }
  }
  out.checks.push_back(gate("conformal.profile-normalization", norm_err, 1e-6));
  out.checks.push_back(gate("conformal.profile-energy", energy_err, 1e-6));

  Worst inv_energy, inv_deficit;
  for (const auto& par : matrix) {
    const int n = par.dim;
    auto rng = seeded(opt.seed, 0xCF55 + n * 32 + static_cast<int>(par.order * 4));
    std::uniform_real_distribution<double> du(0.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
      SphereField u = random_positive_field(n, 2, 4, 0.45, rng);
      const double delta = 1.0 + 2.0 * du(rng);
      ConformalMap phi = ConformalMap::dilation(delta, random_unit(n + 1, rng))
                             .with_rotation(random_rotation(n + 1, rng));
      SphereField moved = pullback(par, u, phi);
      std::ostringstream tag;
      tag << param_tag(par) << ", rep=" << rep << ", delta=" << delta;

      const double e0 = a2s_value(u, par), e1 = a2s_value(moved, par);
      inv_energy.track(std::abs(e1 - e0) / std::abs(e0), tag.str());

      const double d0 = deficit(u, par), d1 = deficit(moved, par);
      inv_deficit.track(std::abs(d1 - d0) / std::abs(d0), tag.str());
    }
  }
  out.checks.push_back(gate("conformal.energy-invariance", inv_energy, 1e-6));
  out.checks.push_back(gate("conformal.deficit-invariance", inv_deficit, 1e-6));
  return out;
}

// ----------------------------------------------------------------- quadform

SuiteResult suite_quadform(const VerifyOptions& opt,
                           const std::vector<SpectralParams>& matrix) {
  SuiteResult out;
  out.suite = "quadform";

  Worst neg_deficit;
  for (const auto& par : matrix) {
    const int n = par.dim;
    auto rng = seeded(opt.seed, 0xAF00 + n * 64 + static_cast<int>(par.order * 4));
    std::uniform_real_distribution<double> du(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
      SphereField u = [&]() -> SphereField {
        switch (i % 3) {
          case 0:
            return random_positive_field(n, 2, 5, 0.1 + 0.3 * du(rng), rng);
          case 1: {
            SphereField base = random_positive_field(n, 1, 3, 0.5, rng, 0.2);
            return SphereField(
                n,
                [base](Eigen::Ref<const Vec> w) {
                  return std::exp(0.6 * (base(w) - 1.0));
                },
                1);
          }
          default:
            return two_peak_field(par, 0.1 + 0.7 * du(rng));
        }
      }();
      std::ostringstream tag;
      tag << param_tag(par) << ", sample=" << i;
      const double def = deficit(u, par);
      const double scale = field_scale(u, par);
      neg_deficit.track(std::max(0.0, -def / scale), tag.str());
    }
  }
  out.checks.push_back(gate("quadform.deficit-nonnegative", neg_deficit, 1e-7));

  Worst profile_def;
  for (const auto& par : matrix) {
    const int n = par.dim;
    auto rng = seeded(opt.seed, 0xAF77 + n);
    Vec pole = Vec::Zero(n + 1);
    pole(n) = 1.0;
    for (double t : {0.0, 0.5, 0.9}) {
      for (const Vec& dir : {pole, random_unit(n + 1, rng)}) {
        SphereField v = bubble_eval(par, Bubble{1.0, t * dir},
                                    profile_level(n, t));
        profile_def.track(deficit(v, par) / field_scale(v, par),
                          zeta_tag(par, t, dir));
        if (t == 0.0) break;
      }
    }
  }
  out.checks.push_back(gate("quadform.profile-deficit-zero", profile_def, 1e-6));

  Worst polar;
  for (const auto& par : matrix) {
    const int n = par.dim;
    auto rng = seeded(opt.seed, 0xAFAA + n);
    for (int rep = 0; rep < 2; ++rep) {
      SphereField u = random_positive_field(n, 1, 4, 0.4, rng);
      SphereField v = random_positive_field(n, 2, 5, 0.4, rng);
      const double direct = a2s_bilinear(u, v, par);
      const double viaforms =
          0.25 * (a2s_value(u.combine(1.0, 1.0, v), par) -
                  a2s_value(u.combine(1.0, -1.0, v), par));
      const double yard = std::sqrt(field_scale(u, par) * field_scale(v, par));
      std::ostringstream tag;
      tag << param_tag(par) << ", rep=" << rep;
      polar.track(std::abs(direct - viaforms) / yard, tag.str());
    }
  }
  out.checks.push_back(gate("quadform.bilinear-polarization", polar, 1e-9));
  return out;
}

// ---------------------------------------------------------------- decompose

SuiteResult suite_decompose(const VerifyOptions& opt,
                            const std::vector<SpectralParams>& matrix) {
  SuiteResult out;
  out.suite = "decompose";

  Worst recovery, ortho;
  for (const auto& par : matrix) {
    const int n = par.dim;
    auto rng = seeded(opt.seed, 0xDE00 + n * 8 + static_cast<int>(par.order * 4));
    std::uniform_real_distribution<double> du(0.0, 1.0);
    for (int rep = 0; rep < 2; ++rep) {
      const Vec zeta = (0.15 + 0.2 * du(rng)) * random_unit(n + 1, rng);
      const double c = 0.8 + 0.45 * du(rng);

      SphereField v = bubble_eval(par, Bubble{1.0, zeta}, 0);
      std::vector<SphereField> frame;
      frame.push_back(v);
      for (int i = 0; i <= n; ++i)
        frame.push_back(bubble_dzeta(par, Bubble{1.0, zeta}, i, 0));

      // Remove the frame components from a rough perturbation so that
      // (c, zeta) solves the critical-point system exactly, then ask the
      // solver to recover the pair it was never told about.
      SphereField w0 = random_positive_field(n, 3, 5, 0.08 * c, rng, -2.0)
                           .combine(1.0, -1.0, SphereField::from_coeffs(
                                                   n,
                                                   [n] {
                                                     Vec c0(1);
                                                     c0(0) = std::sqrt(
                                                         sphere_area(n));
                                                     return c0;
                                                   }(),
                                                   0));
      SphereField cv = v.scaled(c);
      const int m = n + 2;
      Mat a(m, m);
      for (int j = 0; j < m; ++j)
        a.col(j) = residual_F(cv.combine(1.0, 1.0, frame[j]), c, zeta, par);
      Vec rhs = residual_F(cv.combine(1.0, 1.0, w0), c, zeta, par);
      Vec coef = a.fullPivLu().solve(rhs);

      SphereField rho = w0;
      for (int j = 0; j < m; ++j)
        rho = rho.combine(1.0, -coef(j), frame[j]);
      SphereField u = cv.combine(1.0, 1.0, rho);
      for (int shrink = 0; shrink < 6 && !(u.min_sample() > 0.02); ++shrink) {
        rho = rho.scaled(0.5);
        u = cv.combine(1.0, 1.0, rho);
      }
      std::ostringstream tag;
      tag << param_tag(par) << ", rep=" << rep << ", c=" << c
          << ", |zeta|=" << zeta.norm();

      DistanceResult d = distance(u, par, opt.budget, opt.seed);
      double best = std::numeric_limits<double>::infinity();
      const Decomposition* hit = nullptr;
      for (const Decomposition& p : d.set.points) {
        const double err = std::max(std::abs(p.bubble.c - c) / c,
                                    (p.bubble.zeta - zeta).norm());
        if (err < best) {
          best = err;
          hit = &p;
        }
      }
      recovery.track(best, tag.str());
      if (hit != nullptr) {
        const Vec res = residual_F(u, hit->bubble.c, hit->bubble.zeta, par);
        ortho.track(res.cwiseAbs().maxCoeff() / field_scale(u, par), tag.str());
      }
    }
  }
  out.checks.push_back(gate("decompose.ground-truth-recovery", recovery, 1e-6));
  out.checks.push_back(gate("decompose.residual-orthogonality", ortho, 1e-10));

  int empty_or_failed = 0;
  std::string fail_where = "none";
  double min_distance = std::numeric_limits<double>::infinity();
  std::string min_where;
  int corpus = 0;
  for (const auto& par : matrix) {
    const int n = par.dim;
    auto rng = seeded(opt.seed, 0xDEAD + n);
    std::vector<std::pair<std::string, SphereField>> fields;
    fields.emplace_back("smooth positive", smooth_positive(n));
    fields.emplace_back("random banded", random_positive_field(n, 2, 4, 0.4, rng));
    fields.emplace_back("two peaks beta=0.6", two_peak_field(par, 0.6));
    if (par.dim == 2 && par.sigma > 1.0) {
      fields.emplace_back("two peaks beta=0.95", two_peak_field(par, 0.95));
    }
    for (auto& [label, u] : fields) {
      ++corpus;
      const std::string tag = param_tag(par) + ", " + label;
      try {
        DistanceResult d = distance(u, par, opt.budget, opt.seed);
        if (d.set.points.empty()) {
          ++empty_or_failed;
          fail_where = tag;
        } else if (d.value < min_distance) {
          min_distance = d.value;
          min_where = tag;
        }
      } catch (const NumericsError&) {
        ++empty_or_failed;
        fail_where = tag;
      }
    }
  }
  out.checks.push_back(flag("decompose.no-empty-critical-sets",
                            empty_or_failed == 0, empty_or_failed, 0.0,
                            empty_or_failed ? fail_where
                                            : std::to_string(corpus) +
                                                  " corpus fields enumerated"));
  out.checks.push_back(flag("decompose.distance-positive",
                            std::isfinite(min_distance) && min_distance > 0.0,
                            std::isfinite(min_distance) ? min_distance : 0.0,
                            0.0,
                            "smallest distance at " + min_where +
                                " (pass requires measured > 0)"));
  return out;
}

// ---------------------------------------------------------------- stability

SuiteResult suite_stability(const VerifyOptions& opt,
                            const std::vector<SpectralParams>& matrix) {
  SuiteResult out;
  out.suite = "stability";

  double floor_min = std::numeric_limits<double>::infinity();
  std::string floor_where = "no upper-window evaluation ran";

  bool have_low = false, have_up = false;
  SpectralParams low{}, up{};
  for (const auto& par : matrix) {
    if (par.dim == 2 && par.sigma < 1.0 && !have_low) {
      low = par;
      have_low = true;
    }
    if (par.dim == 2 && par.sigma > 1.0 && !have_up) {
      up = par;
      have_up = true;
    }
  }

  // Local limit with Richardson halving in the lower window.
  if (have_low) {
    Vec packed = Vec::Zero(packed_size(2, 2));
    packed(2 * 2 + 2) = 1.0;
    SphereField rho = SphereField::from_coeffs(2, packed, 0);
    const double target = local_constant(low);
    auto rows = probe_local(low, rho, {0.04, 0.02, 0.01}, opt.budget, opt.seed);
    const double d0 = std::abs(rows[0].quotient - target);
    const double d1 = std::abs(rows[1].quotient - target);
    const double d2 = std::abs(rows[2].quotient - target);
    const double r1 = d1 / d0, r2 = d2 / d1;
    const bool rate_ok = r1 > 0.25 && r1 < 0.85 && r2 > 0.25 && r2 < 0.85;
    std::ostringstream det;
    det << param_tag(low) << ": discrepancies " << d0 << " -> " << d1 << " -> "
        << d2 << ", halving ratios " << r1 << ", " << r2;
    out.checks.push_back(flag("stability.local-limit-richardson",
                              rate_ok && d2 < 0.01, d2, 0.01, det.str()));
  } else {
    out.checks.push_back(flag("stability.local-limit-richardson", false, 0.0,
                              0.01, "no lower-window pair in the matrix"));
  }

  // Band-ratio sharpness scan in the upper window.
  if (have_up) {
    auto rows = probe_sharpness(up, {2, 4, 6, 10}, 0.01, opt.budget, opt.seed);
    Worst mismatch;
    bool decreasing = true, above_one = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      std::ostringstream tag;
      tag << param_tag(up) << ", band=" << rows[k].ell;
      mismatch.track(std::abs(rows[k].quotient - rows[k].predicted) /
                         rows[k].predicted,
                     tag.str());
      if (k > 0 && !(rows[k].quotient < rows[k - 1].quotient))
        decreasing = false;
      if (!(rows[k].quotient > 1.0)) above_one = false;
      floor_min = std::min(floor_min, rows[k].quotient);
      if (floor_min == rows[k].quotient) floor_where = tag.str();
    }
    CheckResult c = gate("stability.sharpness-band-match", mismatch, 0.02);
    c.pass = c.pass && decreasing && above_one;
    if (!decreasing) c.detail += "; values not strictly decreasing";
    if (!above_one) c.detail += "; a value dipped to 1 or below";
    out.checks.push_back(std::move(c));
  } else {
    out.checks.push_back(flag("stability.sharpness-band-match", false, 0.0,
                              0.02, "no upper-window pair in the matrix"));
  }

  // Strict-inequality probe: fitted slope and the dip below the constant.
  if (have_low) {
    StrictProbe sp = probe_strict(low, {-0.05, -0.02, 0.02, 0.05}, opt.budget,
                                  opt.seed);
    const double slope_err =
        std::abs(sp.slope_measured - sp.slope_predicted) /
        std::abs(sp.slope_predicted);
    const double dip_margin = local_constant(low) - 1e-3 - sp.min_over_signs;
    std::ostringstream det;
    det << param_tag(low) << ": slope " << sp.slope_measured << " vs "
        << sp.slope_predicted << ", min quotient " << sp.min_over_signs;
    out.checks.push_back(flag("stability.strict-slope-dip",
                              slope_err <= 0.05 && dip_margin > 0.0, slope_err,
                              0.05, det.str()));
  } else {
    out.checks.push_back(flag("stability.strict-slope-dip", false, 0.0, 0.05,
                              "no lower-window pair in the matrix"));
  }

  // Two-peak multiplicity: at beta = 0.95 the critical set must contain at
  // least two distinct points of equal remainder energy, with positive
  // distance.
  if (have_up) {
    SphereField u = two_peak_field(up, 0.95);
    DistanceResult d = distance(u, up, std::max(opt.budget, 8), opt.seed);
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d.set.points.size(); ++i) {
      for (std::size_t j = i + 1; j < d.set.points.size(); ++j) {
        const double ei = d.set.points[i].rho_energy;
        const double ej = d.set.points[j].rho_energy;
        best_gap = std::min(best_gap,
                            std::abs(ei - ej) / std::max(std::abs(ei),
                                                         std::abs(ej)));
      }
    }
    std::ostringstream det;
    det << param_tag(up) << ": " << d.set.points.size()
        << " critical points, closest energy pair differs by " << best_gap
        << ", distance " << d.value;
    out.checks.push_back(flag("stability.two-peak-energy-tie",
                              d.set.points.size() >= 2 && best_gap <= 1e-8 &&
                                  d.value > 0.0,
                              best_gap, 1e-8, det.str()));
  } else {
    out.checks.push_back(flag("stability.two-peak-energy-tie", false, 0.0,
                              1e-8, "no upper-window pair in the matrix"));
  }

  // Unit floor over every upper-window quotient this suite evaluated, plus
  // dedicated spot checks.
  QuotientOptions qo;
  qo.budget = opt.budget;
  qo.seed = opt.seed;
  qo.invariance_check = false;
  for (const auto& par : matrix) {
    if (par.sigma < 1.0) continue;
    Vec packed = Vec::Zero(packed_size(par.dim, 2));
    packed(0) = std::sqrt(sphere_area(par.dim));
    packed(band_start(par.dim, 2)) = 0.05;
    for (const auto& [label, u] :
         {std::pair<std::string, SphereField>{
              "1 + 0.05 x band-2 mode",
              SphereField::from_coeffs(par.dim, packed, 0)},
          {"two peaks beta=0.5", two_peak_field(par, 0.5)}}) {
      StabilityReport rep = quotient(u, par, qo);
      if (rep.quotient < floor_min) {
        floor_min = rep.quotient;
        floor_where = param_tag(par) + ", " + label;
      }
    }
  }
  const bool floor_ran = std::isfinite(floor_min);
  out.checks.push_back(flag("stability.unit-floor",
                            floor_ran && floor_min >= 1.0 - 1e-6,
                            floor_ran ? 1.0 - floor_min : 1.0, 1e-6,
                            "smallest upper-window quotient " +
                                (floor_ran ? std::to_string(floor_min)
                                           : std::string("(none)")) +
                                " at " + floor_where));
  return out;
}

// -------------------------------------------------------------- asymptotics

SuiteResult suite_asymptotics(const VerifyOptions& opt,
                              const std::vector<SpectralParams>& matrix) {
  SuiteResult out;
  out.suite = "asymptotics";

  Worst growth;
  bool settled = true;
  for (const auto& par : matrix) {
    const auto table = eigenvalue_growth_deviation(par, 1000);
    double sup = 0.0;
    for (const auto& [k, dev] : table) sup = std::max(sup, dev);
    growth.track(sup, param_tag(par));
    if (std::abs(table[999].second - table[499].second) >
        0.05 * (1.0 + table[999].second))
      settled = false;
  }
  CheckResult cg = gate("asymptotics.eigen-growth-bounded", growth, 10.0);
  cg.pass = cg.pass && settled;
  if (!settled) cg.detail += "; scaled deviation has not settled by k=1000";
  out.checks.push_back(std::move(cg));

  Worst conc_ratio;
  for (const auto& par : matrix) {
    const int n = par.dim;
    SphereField u = smooth_positive(n);
    Vec nu = Vec::Zero(n + 1);
    nu(n) = 1.0;
    const double cc = concentration_constant(par);
    const double ratio = concentration_ratio(u, par, nu, 0.99);
    conc_ratio.track(std::abs(ratio - cc) / cc, param_tag(par));
  }
  out.checks.push_back(
      gate("asymptotics.concentration-pairing-ratio", conc_ratio, 0.03));

  Worst conc_quad, bal_quad;
  for (const auto& par : matrix) {
    const int n = par.dim;
    const double s = par.order;
    // Radial quadrature in the angle psi with r = tan(psi/2): both limit
    // constants are one-dimensional integrals of the flat profile.
    const double quad_conc =
        std::pow(2.0, -0.5 * par.sigma) * sphere_area(n - 1) *
        tanh_sinh(
            [n, s](double psi) {
              const double c = std::cos(0.5 * psi);
              const double r = std::tan(0.5 * psi);
              return std::pow(0.5 * (1.0 + r * r), -0.5 * (n + 2.0 * s)) *
                     std::pow(r, n - 1) * 0.5 / (c * c);
            },
            0.0, M_PI, 1e-12);
    conc_quad.track(std::abs(concentration_constant(par) - quad_conc) /
                        std::abs(quad_conc),
                    param_tag(par));

    const double quad_bal =
        sphere_area(n - 1) *
        tanh_sinh(
            [n, s](double psi) {
              const double c = std::cos(0.5 * psi);
              const double r = std::tan(0.5 * psi);
              const double r2 = r * r;
              return (1.0 - r2) *
                     std::pow(1.0 + r2, -0.5 * (n + 2.0 * s + 2.0)) *
                     std::pow(2.0, 0.5 * (n + 2.0 * s)) * std::pow(r, n - 1) *
                     0.5 / (c * c);
            },
            0.0, M_PI, 1e-12);
    bal_quad.track(std::abs(balance_limit_constant(par) - quad_bal) /
                       std::abs(quad_bal),
                   param_tag(par));
  }
  out.checks.push_back(
      gate("asymptotics.concentration-quadrature", conc_quad, 1e-8));
  out.checks.push_back(gate("asymptotics.balance-quadrature", bal_quad, 1e-8));

  Worst bal_final;
  bool monotone = true;
  std::string mono_where;
  for (const auto& par : matrix) {
    const int n = par.dim;
    auto rng = seeded(opt.seed, 0xBA1 + n);
    SphereField u = smooth_positive(n);
    for (int rep = 0; rep < 2; ++rep) {
      const Vec xi = random_unit(n + 1, rng);
      double prev = std::numeric_limits<double>::infinity();
      double err = prev;
      for (double delta : {5.0, 10.0, 20.0, 40.0}) {
        err = (balance_G(par, u, delta, xi) - xi).norm();
        if (!(err < prev)) {
          monotone = false;
          std::ostringstream os;
          os << param_tag(par) << ", rep=" << rep << ", delta=" << delta;
          mono_where = os.str();
        }
        prev = err;
      }
      std::ostringstream tag;
      tag << param_tag(par) << ", rep=" << rep;
      bal_final.track(err, tag.str());
    }
  }
  CheckResult cb = gate("asymptotics.balance-monotone", bal_final, 0.15);
  cb.pass = cb.pass && monotone;
  if (!monotone) cb.detail += "; error not monotone at " + mono_where;
  out.checks.push_back(std::move(cb));
  return out;
}

using SuiteFn = SuiteResult (*)(const VerifyOptions&,
                                const std::vector<SpectralParams>&);

const std::vector<std::pair<std::string, SuiteFn>>& suite_table() {
  static const std::vector<std::pair<std::string, SuiteFn>> table = {
      {"constants", suite_constants},   {"sphere", suite_sphere},
      {"conformal", suite_conformal},   {"quadform", suite_quadform},
      {"decompose", suite_decompose},   {"stability", suite_stability},
      {"asymptotics", suite_asymptotics},
  };
  return table;
}

SuiteResult run_named(const std::string& suite, const VerifyOptions& opt,
                      const std::vector<SpectralParams>& matrix) {
  for (const auto& [name, fn] : suite_table()) {
    if (name == suite) {
      const auto t0 = std::chrono::steady_clock::now();
      SuiteResult r = fn(opt, matrix);
      r.pass = !r.checks.empty();
      for (const CheckResult& c : r.checks) r.pass = r.pass && c.pass;
      r.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      return r;
    }
  }
  throw InputError("unknown verify suite '" + suite +
                   "' (expected one of: constants, sphere, conformal, "
                   "quadform, decompose, stability, asymptotics, all)");
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : suite_table()) v.push_back(name);
    return v;
  }();
  return names;
}

std::vector<SpectralParams> default_matrix() {
  return {SpectralParams::create(1, 0.75), SpectralParams::create(1, 2.0),
          SpectralParams::create(2, 1.5), SpectralParams::create(2, 2.5)};
}

SuiteResult run_suite(const std::string& suite, const VerifyOptions& opt) {
  const std::vector<SpectralParams> matrix =
      opt.params.empty() ? default_matrix() : opt.params;
  return run_named(suite, opt, matrix);
}

std::vector<SuiteResult> run_verify(const std::string& suite,
                                    const VerifyOptions& opt) {
  std::vector<SuiteResult> results;
  if (suite == "all") {
    for (const std::string& name : suite_names())
      results.push_back(run_suite(name, opt));
  } else {
    results.push_back(run_suite(suite, opt));
  }
  return results;
}

bool all_pass(const std::vector<SuiteResult>& results) {
  if (results.empty()) return false;
  for (const SuiteResult& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace sphstab
