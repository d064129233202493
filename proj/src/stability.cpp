// Stability quotient assembly and probes.  The quotient couples the
// quadform deficit (numerator) to the decompose distance (denominator);
// probes wrap it over parameter grids, and the explorer descends it over
// low-band perturbations with conformal renormalization between steps.
#include "sphstab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace sphstab {
namespace {

int packed_size(int n, int degree) {
  return n == 1 ? 2 * degree + 1 : (degree + 1) * (degree + 1);
}

// Packed index of the rotation-symmetric (zonal) basis function of degree l.
int zonal_index(int n, int l) {
  if (n == 2) return l * l + l;
  return l == 0 ? 0 : 2 * l - 1;
}

// Exactly-constant field (band-limited, so every transform of it is exact).
SphereField constant_field(int n, int level) {
  Vec c0(1);
  c0(0) = std::sqrt(sphere_area(n));
  return SphereField::from_coeffs(n, c0, level);
}

// Quadrature integral of samples^k.
double moment_integral(const SphereField& u, int k) {
  const auto& s = u.samples();
  std::vector<double> powed(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) powed[i] = std::pow(s[i], k);
  return u.grid().integrate(powed);
}

double raw_deficit(const SphereField& u, const SpectralParams& par,
                   SpectralDiagnostics* diag_out) {
  QuadFormResult qf = a2s(u, par);
  if (diag_out) *diag_out = qf.diag;
  if (!qf.diag.converged) {
    throw NumericsError(
        "quotient: the spectral tail of the input did not converge");
  }
  const double nrm = pnorm(u, par.p);
  return qf.value - sharp_constant(par) * nrm * nrm;
}

void enforce_quotient_bounds(double q, const SpectralParams& par) {
  if (!(q > 0.0)) {
    throw InvariantError("stability quotient must be positive; measured " +
                         std::to_string(q));
  }
  if (par.sigma > 1.0 && q < 1.0 - 1e-6) {
    throw InvariantError(
        "stability quotient fell below the unit floor of the upper parameter "
        "window; measured " +
        std::to_string(q));
  }
}

struct CoreEval {
  double deficit = 0.0;
  double distance = 0.0;
  double quotient = 0.0;
  double min_grid = 0.0;
  SpectralDiagnostics diag;
  DistanceResult dres;
};

CoreEval full_eval(const SphereField& u, const SpectralParams& par,
                   int budget, std::uint64_t seed) {
  CoreEval ev;
  ev.deficit = raw_deficit(u, par, &ev.diag);
  ev.dres = distance(u, par, budget, seed);
  ev.distance = ev.dres.value;
  ev.quotient = ev.deficit / ev.distance;
  ev.min_grid = u.min_sample();
  enforce_quotient_bounds(ev.quotient, par);
  return ev;
}

ProbeRow row_from(const CoreEval& ev) {
  ProbeRow r;
  r.quotient = ev.quotient;
  r.deficit = ev.deficit;
  r.distance = ev.distance;
  r.min_u = ev.min_grid;
  r.tail_ratio = ev.diag.tail_ratio;
  r.converged = ev.diag.converged && ev.dres.set.complete;
  return r;
}

void require_no_low_bands(const SphereField& rho) {
  const auto& bands = rho.band_energies();
  double total = 0.0;
  for (double b : bands) total += b;
  if (!(total > 0.0)) {
    throw InputError("probe direction is identically zero");
  }
  double low = bands.empty() ? 0.0 : bands[0];
  if (bands.size() > 1) low += bands[1];
  if (low > 1e-10 * total) {
    throw InputError(
        "probe direction must be mean-free with no degree-1 content");
  }
}

ConformalMap random_conformal(int n, std::mt19937_64& rng, double max_delta) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vec xi(n + 1);
  do {
    for (int i = 0; i <= n; ++i) xi(i) = gauss(rng);
  } while (xi.norm() < 1e-3);
  xi /= xi.norm();
  const double delta = 1.0 + (max_delta - 1.0) * unif(rng);
  Mat g(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) g(i, j) = gauss(rng);
  Mat q = Eigen::HouseholderQR<Mat>(g).householderQ();
  return ConformalMap::dilation(delta, xi).with_rotation(q);
}

}  // namespace

StabilityReport quotient(const SphereField& u, const SpectralParams& par,
                         const QuotientOptions& opt) {
  if (u.dim() != par.dim) {
    throw InputError("quotient: field dimension does not match parameters");
  }
  CoreEval ev = full_eval(u, par, opt.budget, opt.seed);
  double resid = 0.0;
  if (opt.invariance_check) {
    std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ull);
    ConformalMap phi = random_conformal(par.dim, rng, 1.5);
    std::uniform_real_distribution<double> unif(-0.6, 0.6);
    const double lambda = std::exp(unif(rng));
    SphereField moved = pullback(par, u, phi).scaled(lambda);
    CoreEval ev2 = full_eval(moved, par, opt.budget, opt.seed + 1);
    resid = std::abs(ev2.quotient - ev.quotient) /
            std::max(std::abs(ev.quotient), 1e-300);
  }
  const Decomposition& best = ev.dres.set.points[ev.dres.argmin];
  StabilityReport rep;
  rep.params = par;
  rep.deficit = ev.deficit;
  rep.distance = ev.distance;
  rep.quotient = ev.quotient;
  rep.min_u = min_on_sphere(u);
  rep.invariance_residual = resid;
  rep.best = best.bubble;
  rep.best_residual_norm = best.residual_norm;
  rep.n_critical = static_cast<int>(ev.dres.set.points.size());
  rep.d_multiplicity = static_cast<int>(ev.dres.attaining.size());
  rep.complete = ev.dres.set.complete;
  rep.diag = std::move(ev.diag);
  return rep;
}

double local_prediction(const SpectralParams& par, const SphereField& rho) {
  if (rho.dim() != par.dim) {
    throw InputError(
        "local_prediction: field dimension does not match parameters");
  }
  const double mass = moment_integral(rho, 2);
  QuadFormResult qf = a2s(rho, par);
  if (!qf.diag.converged) {
    throw NumericsError(
        "local_prediction: the direction's spectral tail did not converge");
  }
  if (qf.value == 0.0) {
    throw InputError("local_prediction: direction has zero form energy");
  }
  return 1.0 - eigenvalue(par, 1) * mass / qf.value;
}

std::vector<ProbeRow> probe_local(const SpectralParams& par,
                                  const SphereField& rho,
                                  const std::vector<double>& eps_list,
                                  int budget, std::uint64_t seed) {
  if (rho.dim() != par.dim) {
    throw InputError("probe_local: field dimension does not match parameters");
  }
  if (eps_list.empty()) throw InputError("probe_local: empty epsilon grid");
  require_no_low_bands(rho);
  const double predicted = local_prediction(par, rho);
  SphereField one = constant_field(par.dim, rho.level());
  std::vector<ProbeRow> rows;
  rows.reserve(eps_list.size());
  for (double eps : eps_list) {
    SphereField u = one.combine(1.0, eps, rho);
    if (!u.positive()) {
      throw InputError("probe_local: 1 + eps*rho is not positive at eps = " +
                       std::to_string(eps));
    }
    ProbeRow r = row_from(full_eval(u, par, budget, seed));
    r.epsilon = eps;
    r.predicted = predicted;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ProbeRow> probe_sharpness(const SpectralParams& par,
                                      const std::vector<int>& ell_list,
                                      double eps, int budget,
                                      std::uint64_t seed) {
  if (!(par.sigma > 1.0)) {
    throw InputError(
        "probe_sharpness runs in the upper parameter window only");
  }
  if (ell_list.empty()) throw InputError("probe_sharpness: empty degree list");
  if (!(eps != 0.0)) throw InputError("probe_sharpness: eps must be nonzero");
  std::vector<ProbeRow> rows;
  rows.reserve(ell_list.size());
  const double alpha1 = eigenvalue(par, 1);
  for (int ell : ell_list) {
    if (ell < 2) {
      throw InputError("probe_sharpness: degrees must be >= 2");
    }
    const int lvl = level_for_degree(par.dim, ell);
    Vec packed = Vec::Zero(packed_size(par.dim, ell));
    packed(zonal_index(par.dim, ell)) = 1.0;
    SphereField y = SphereField::from_coeffs(par.dim, packed, lvl);
    SphereField u = constant_field(par.dim, lvl).combine(1.0, eps, y);
    if (!u.positive()) {
      throw InputError("probe_sharpness: 1 + eps*Y is not positive at ell = " +
                       std::to_string(ell));
    }
    ProbeRow r = row_from(full_eval(u, par, budget, seed));
    r.ell = ell;
    r.epsilon = eps;
    r.predicted = 1.0 - alpha1 / eigenvalue(par, ell);
    rows.push_back(std::move(r));
  }
  return rows;
}

StrictProbe probe_strict(const SpectralParams& par,
                         const std::vector<double>& eps_list, int budget,
                         std::uint64_t seed) {
  if (par.dim != 2) {
    throw InputError("the strict-inequality probe is defined on the 2-sphere");
  }
  if (!(par.sigma < 1.0)) {
    throw InputError(
        "the strict-inequality probe runs in the lower parameter window only");
  }
  if (eps_list.size() < 2) {
    throw InputError("probe_strict: need at least two epsilon values");
  }
  SphereField rho(
      2,
      [](Eigen::Ref<const Vec> w) {
        return w(0) * w(1) + w(1) * w(2) + w(2) * w(0);
      },
      0);
  const double cubic = moment_integral(rho, 3);
  if (!(cubic > 0.0)) {
    throw InvariantError(
        "probe_strict: the cubic moment of the probe direction must be "
        "positive; measured " +
        std::to_string(cubic));
  }
  QuadFormResult qf = a2s(rho, par);
  if (!qf.diag.converged) {
    throw NumericsError("probe_strict: direction spectrum did not converge");
  }
  const double slope_pred = -eigenvalue(par, 0) * (par.p - 1.0) *
                            (par.p - 2.0) / 3.0 * cubic / qf.value;
  const double base = local_prediction(par, rho);

  StrictProbe out;
  out.cubic_integral = cubic;
  out.slope_predicted = slope_pred;
  SphereField one = constant_field(2, 0);
  for (double eps : eps_list) {
    SphereField u = one.combine(1.0, eps, rho);
    if (!u.positive()) {
      throw InputError("probe_strict: 1 + eps*rho is not positive at eps = " +
                       std::to_string(eps));
    }
    ProbeRow r = row_from(full_eval(u, par, budget, seed));
    r.epsilon = eps;
    r.predicted = base + slope_pred * eps;
    out.rows.push_back(std::move(r));
  }

  // Least-squares line through (eps, quotient).
  const double n = static_cast<double>(out.rows.size());
  double sx = 0.0, sq = 0.0, sxx = 0.0, sxq = 0.0;
  for (const ProbeRow& r : out.rows) {
    sx += r.epsilon;
    sq += r.quotient;
    sxx += r.epsilon * r.epsilon;
    sxq += r.epsilon * r.quotient;
  }
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) {
    throw InputError("probe_strict: epsilon grid is degenerate");
  }
  out.slope_measured = (n * sxq - sx * sq) / denom;
  out.intercept = (sq - out.slope_measured * sx) / n;
  out.fit_residual = 0.0;
  out.min_over_signs = out.rows.front().quotient;
  for (const ProbeRow& r : out.rows) {
    out.fit_residual =
        std::max(out.fit_residual,
                 std::abs(r.quotient -
                          (out.intercept + out.slope_measured * r.epsilon)));
    out.min_over_signs = std::min(out.min_over_signs, r.quotient);
  }
  return out;
}

SphereField two_peak_field(const SpectralParams& par, double beta, int level) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw InputError("two_peak_field: beta must lie in (0,1)");
  }
  const int n = par.dim;
  if (level < 0) {
    // Band energies of (1 +/- beta*z)^e decay like r^(-2l) with
    // r = (1 + sqrt(1-beta^2))/beta; pick the degree that pushes the tail to
    // the double-precision floor, with margin.  Beyond the registry cap the
    // convergence flags take over.
    const double r = (1.0 + std::sqrt(1.0 - beta * beta)) / beta;
    const double need = 18.5 / std::log(r) + 16.0;
    level = level_for_degree(n, static_cast<int>(std::ceil(need)));
  }
  const double e = -par.sigma;  // (n - 2s)/2
  return SphereField(
      n,
      [beta, e, n](Eigen::Ref<const Vec> w) {
        return std::pow(1.0 + beta * w(n), e) + std::pow(1.0 - beta * w(n), e);
      },
      level);
}

std::vector<ProbeRow> bubble_study(const SpectralParams& par,
                                   const std::vector<double>& beta_list,
                                   int budget, std::uint64_t seed) {
  if (beta_list.empty()) throw InputError("bubble_study: empty beta grid");
  std::vector<ProbeRow> rows;
  rows.reserve(beta_list.size());
  for (double beta : beta_list) {
    SphereField u = two_peak_field(par, beta);
    ProbeRow r;
    r.beta = beta;
    r.min_u = u.min_sample();
    QuadFormResult qf = a2s(u, par);
    r.tail_ratio = qf.diag.tail_ratio;
    if (!qf.diag.converged) {
      // Truncation breakdown: flag the row, fabricate nothing.
      r.converged = false;
      rows.push_back(std::move(r));
      continue;
    }
    const double nrm = pnorm(u, par.p);
    r.deficit = qf.value - sharp_constant(par) * nrm * nrm;
    try {
      DistanceResult dres = distance(u, par, budget, seed);
      r.distance = dres.value;
      r.quotient = r.deficit / dres.value;
      enforce_quotient_bounds(r.quotient, par);
      r.n_critical = static_cast<int>(dres.set.points.size());
      r.d_multiplicity = static_cast<int>(dres.attaining.size());
      r.converged = dres.set.complete;
    } catch (const NumericsError&) {
      r.converged = false;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

double concentration_ratio(const SphereField& u, const SpectralParams& par,
                           const Vec& nu, double t) {
  if (u.dim() != par.dim) {
    throw InputError(
        "concentration_ratio: field dimension does not match parameters");
  }
  if (nu.size() != par.dim + 1) {
    throw InputError("concentration_ratio: direction has the wrong dimension");
  }
  if (!(t > 0.0 && t < 1.0)) {
    throw InputError("concentration_ratio: t must lie in (0,1)");
  }
  Vec dir = nu;
  const double len = dir.norm();
  if (!(len > 0.0)) {
    throw InputError("concentration_ratio: direction must be nonzero");
  }
  dir /= len;
  const double uval = u(dir);
  if (!(uval > 0.0)) {
    throw InputError("concentration_ratio: u must be positive at nu");
  }
  // The conjugate profile power at radius t needs the same band budget as a
  // profile concentrated there; lift the grid accordingly.
  const double r = (1.0 + std::sqrt(1.0 - t * t)) / t;
  const int need = static_cast<int>(std::ceil(18.5 / std::log(r) + 16.0));
  const int lvl = std::max(u.level(), level_for_degree(par.dim, need));
  SphereField w = (lvl == u.level()) ? u : u.at_level(lvl);
  const double g = profile_pairing(w, t * dir, par);
  return g / (uval * std::pow(1.0 - t, par.dim / (2.0 * par.p)));
}

namespace {

struct WarmEval {
  double quotient = 0.0;
  double deficit = 0.0;
  double dist = 0.0;  // single-branch remainder energy
  double min_u = 0.0;
  double c = 1.0;
  Vec zeta;
};

class Explorer {
 public:
  Explorer(const SpectralParams& par, const ExplorerOptions& opt)
      : par_(par), opt_(opt) {
    if (par.dim != 2) {
      throw InputError("the explorer runs on the 2-sphere");
    }
    if (!(par.sigma < 1.0)) {
      throw InputError("the explorer runs in the lower parameter window only");
    }
    if (opt.max_band < 2 || opt.max_band > 12) {
      throw InputError("explorer descent bands must satisfy 2 <= L <= 12");
    }
    if (opt.iterations < 1) {
      throw InputError("explorer needs at least one iteration");
    }
    if (!(opt.positivity_margin >= 1e-6 && opt.positivity_margin <= 0.1)) {
      throw InputError(
          "explorer positivity margin must lie in [1e-6, 0.1]");
    }
    full_size_ = packed_size(2, opt.max_band);
    for (int l = 2; l <= opt.max_band; ++l) {
      for (int m = -l; m <= l; ++m) {
        idx_.push_back(l * l + l + m);
        band_of_.push_back(l);
      }
    }
  }

  ExplorerResult run(const SphereField& init_rho) {
    if (init_rho.dim() != 2) {
      throw InputError("explorer start must live on the 2-sphere");
    }
    Vec theta(idx_.size());
    const Vec& rc = init_rho.coeffs();
    for (std::size_t k = 0; k < idx_.size(); ++k) theta(k) = rc(idx_[k]);
    if (!(theta.norm() > 0.0)) {
      throw InputError(
          "explorer start lies on the profile manifold (no perturbation "
          "content in the descent bands)");
    }
    SphereField u = synth(theta);
    if (!(u.min_sample() > opt_.positivity_margin)) {
      throw InputError("explorer start violates the positivity margin");
    }

    // Full-enumeration audit of the start; every accepted step below is
    // audited the same way, so the recorded trajectory never relies on a
    // single warm-started branch that may drift off the true minimizer.
    std::optional<WarmEval> start = audit(u);
    if (!start) {
      throw NumericsError("explorer: start point could not be decomposed");
    }
    WarmEval cur = *start;
    enforce_quotient_bounds(cur.quotient, par_);

    const double local_c = local_constant(par_);
    std::vector<ExplorerStep> steps;
    steps.push_back(make_step(0, cur, 0.0, theta));
    bool stalled = false;
    bool reached = cur.quotient < local_c;
    double trust = 1.0;
    const double h = 1e-4;

    for (int it = 1; it <= opt_.iterations; ++it) {
      Vec g = gradient(theta, cur, h);
      const double gn = g.norm();
      if (!(gn > 1e-9 * std::max(1.0, std::abs(cur.quotient)))) break;
      bool accepted = false;
      double used_step = 0.0;
      WarmEval next = cur;
      Vec theta_next = theta;
      for (int half = 0; half < 25 && !accepted; ++half) {
        const double step = trust * std::pow(0.5, half);
        Vec theta_try = theta - step * g;
        SphereField ut = synth(theta_try);
        // Positivity margin is a hard step filter, not an error.
        if (!(ut.min_sample() > opt_.positivity_margin)) continue;
        // Cheap single-branch prescreen, then a full-enumeration audit;
        // acceptance is decided on the audited quotient only.
        std::optional<WarmEval> ev = eval(ut, cur.c, cur.zeta);
        if (!ev) continue;
        const double gate = cur.quotient - 1e-4 * step * gn * gn;
        if (ev->quotient > gate) continue;
        std::optional<WarmEval> checked = audit(ut);
        if (!checked || checked->quotient > gate) continue;
        next = *checked;
        theta_next = std::move(theta_try);
        used_step = step;
        accepted = true;
      }
      if (!accepted) {
        stalled = true;
        break;
      }
      trust = std::min(8.0, 2.0 * used_step);
      theta = std::move(theta_next);
      cur = next;

      // Renormalize: pull back so the accepted point's best profile becomes
      // the constant, then re-project onto the descent bands.  The
      // re-projection discards content the pullback pushed above the band
      // cap, so it is kept only when its own audit does not lose ground.
      if (cur.zeta.norm() > 1e-10 && cur.c > 1e-8) {
        ConformalMap phi = bubble_as_pullback(par_, cur.zeta);
        SphereField moved =
            pullback(par_, synth(theta), phi.inverse()).scaled(1.0 / cur.c);
        Vec theta_rn(idx_.size());
        const Vec& mc = moved.coeffs();
        for (std::size_t k = 0; k < idx_.size(); ++k) theta_rn(k) = mc(idx_[k]);
        SphereField un = synth(theta_rn);
        if (un.min_sample() > opt_.positivity_margin) {
          std::optional<WarmEval> ev2 = audit(un);
          if (ev2 && ev2->quotient <=
                         cur.quotient + 1e-9 * std::max(1.0, std::abs(cur.quotient))) {
            theta = std::move(theta_rn);
            cur = *ev2;
          }
        }
      }
      steps.push_back(make_step(it, cur, used_step, theta));
      reached = reached || cur.quotient < local_c;
    }

    // cur always holds the audited values for the current theta, so the
    // closing figures need no extra enumeration pass.
    SphereField u_final = synth(theta);
    enforce_quotient_bounds(cur.quotient, par_);
    return ExplorerResult{std::move(steps), stalled,      reached,
                          cur.quotient,     cur.dist, std::move(u_final)};
  }

 private:
  SphereField synth(const Vec& theta) const {
    Vec packed = Vec::Zero(full_size_);
    packed(0) = std::sqrt(sphere_area(2));
    for (std::size_t k = 0; k < idx_.size(); ++k) packed(idx_[k]) = theta(k);
    return SphereField::from_coeffs(2, packed, 0);
  }

  // Full-enumeration evaluation: the distance comes from the complete
  // critical-point search, so the value cannot ride a branch that stopped
  // being the global minimizer.  Used for every recorded step.
  std::optional<WarmEval> audit(const SphereField& u) const {
    try {
      const double def = raw_deficit(u, par_, nullptr);
      DistanceResult d = distance(u, par_, opt_.budget, opt_.seed);
      const Decomposition& best = d.set.points[d.argmin];
      const double q = def / d.value;
      if (!std::isfinite(q)) return std::nullopt;
      return WarmEval{q,           def,           d.value,
                      u.min_sample(), best.bubble.c, best.bubble.zeta};
    } catch (const NumericsError&) {
      return std::nullopt;
    }
  }

  // Single-branch quotient estimate warm-started at (c0, z0); empty on any
  // numerical failure so line search and finite differences can route
  // around bad points instead of aborting the study.
  std::optional<WarmEval> eval(const SphereField& u, double c0,
                               const Vec& z0) const {
    double def = 0.0;
    try {
      def = raw_deficit(u, par_, nullptr);
    } catch (const NumericsError&) {
      return std::nullopt;
    } catch (const InputError&) {
      return std::nullopt;
    }
    std::optional<Decomposition> dec;
    if (std::optional<Decomposition> hit =
            solve_branch(u, c0, z0, par_, "explorer")) {
      dec = std::move(hit);
    } else {
      try {
        CriticalPointSet set = enumerate_critical_points(u, par_, 4, opt_.seed);
        std::size_t best = 0;
        for (std::size_t i = 1; i < set.points.size(); ++i) {
          if (set.points[i].rho_energy < set.points[best].rho_energy) best = i;
        }
        dec = set.points[best];
      } catch (const NumericsError&) {
        return std::nullopt;
      }
    }
    if (!(dec->rho_energy > 0.0)) return std::nullopt;
    const double q = def / dec->rho_energy;
    if (!std::isfinite(q) || !(q > 0.0)) return std::nullopt;
    return WarmEval{q,
                    def,
                    dec->rho_energy,
                    u.min_sample(),
                    dec->bubble.c,
                    dec->bubble.zeta};
  }

  Vec gradient(const Vec& theta, const WarmEval& at, double h) const {
    Vec g(theta.size());
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
      Vec tp = theta;
      tp(k) += h;
      Vec tm = theta;
      tm(k) -= h;
      std::optional<WarmEval> ep = eval(synth(tp), at.c, at.zeta);
      std::optional<WarmEval> em = eval(synth(tm), at.c, at.zeta);
      if (ep && em) {
        g(k) = (ep->quotient - em->quotient) / (2.0 * h);
      } else if (ep) {
        g(k) = (ep->quotient - at.quotient) / h;
      } else if (em) {
        g(k) = (at.quotient - em->quotient) / h;
      } else {
        throw NumericsError(
            "explorer: quotient not evaluable near the current point");
      }
    }
    return g;
  }

  ExplorerStep make_step(int it, const WarmEval& ev, double step_size,
                         const Vec& theta) const {
    ExplorerStep s;
    s.iteration = it;
    s.quotient = ev.quotient;
    s.deficit = ev.deficit;
    s.distance = ev.dist;
    s.min_u = ev.min_u;
    s.step_size = step_size;
    s.band_energies.assign(opt_.max_band + 1, 0.0);
    for (std::size_t k = 0; k < idx_.size(); ++k) {
      s.band_energies[band_of_[k]] += theta(k) * theta(k);
    }
    return s;
  }

  const SpectralParams& par_;
  ExplorerOptions opt_;
  std::vector<int> idx_;
  std::vector<int> band_of_;
  int full_size_ = 0;
};

}  // namespace

ExplorerResult explore_min(const SpectralParams& par,
                           const SphereField& init_rho,
                           const ExplorerOptions& opt) {
  return Explorer(par, opt).run(init_rho);
}

ExplorerResult explore_min(const SpectralParams& par,
                           const ExplorerOptions& opt) {
  SphereField rho(
      2,
      [](Eigen::Ref<const Vec> w) {
        return 0.1 * (w(0) * w(1) + w(1) * w(2) + w(2) * w(0));
      },
      0);
  return explore_min(par, rho, opt);
}

}  // namespace sphstab
