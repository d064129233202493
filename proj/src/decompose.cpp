#include "sphstab/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace sphstab {

namespace {

constexpr double kZetaCap = 0.995;     // solver-facing profile parameter cap
constexpr int kMaxIterations = 80;
constexpr double kResidualTolRel = 1e-10;
constexpr double kFdStep = 1e-6;
constexpr double kDedupRadius = 1e-6;
constexpr double kManifoldTolRel = 1e-9;
constexpr double kTieTolRel = 1e-9;

Vec clamp_zeta(Vec zeta) {
  const double r = zeta.norm();
  if (r > kZetaCap) zeta *= kZetaCap / r;
  return zeta;
}

struct SolveContext {
  const SphereField& u;
  const SpectralParams& par;
  double scale;  // gross spectral magnitude of u, the tolerance yardstick
};

Vec eval_residual(const SolveContext& ctx, double c, const Vec& zeta) {
  const int d = ctx.par.dim + 1;
  const Bubble unit{1.0, zeta};
  SphereField v = bubble_eval(ctx.par, unit, ctx.u.level());
  SphereField w = ctx.u.combine(1.0, -c, v);
  Vec f(d + 1);
  f(0) = a2s_bilinear(w, v, ctx.par);
  for (int i = 0; i < d; ++i)
    f(i + 1) = a2s_bilinear(
        w, bubble_dzeta(ctx.par, unit, i, ctx.u.level()), ctx.par);
  return f;
}

Decomposition finish_point(const SolveContext& ctx, double c, const Vec& zeta,
                           double residual_norm, const std::string& label) {
  SphereField v = bubble_eval(ctx.par, Bubble{1.0, zeta}, ctx.u.level());
  SphereField rho = ctx.u.combine(1.0, -c, v);

  // A remainder whose entire spectral mass sits far below the input's own
  // roundoff floor is the exact-recovery case: its band profile is pure
  // sampling noise (which never decays), so the spectral tail test cannot
  // pass, but the energy is zero for every practical purpose.  Screen for it
  // cheaply first: the gross spectral mass at any resolution is at most the
  // largest band weight times the squared coefficient mass.
  const int n = ctx.par.dim;
  const double weight_cap =
      std::abs(eigenvalue(ctx.par, degree_for_level(n, max_level(n))));
  const double noise_floor = 1e-14 * ctx.scale;
  QuadFormResult energy;
  if (weight_cap * rho.coeffs().squaredNorm() <= noise_floor) {
    energy.value = 0.0;
    energy.diag.converged = true;
  } else {
    energy = a2s(rho, ctx.par);
  }
  if (!energy.diag.converged) {
    if (diagnostics_scale(energy.diag) <= noise_floor) {
      energy.value = 0.0;
    } else {
      throw NumericsError(
          "decompose: remainder field has a non-convergent spectral tail");
    }
  }
  if (energy.value < -1e-8 * ctx.scale)
    throw InvariantError(
        "decompose: remainder energy " + std::to_string(energy.value) +
        " is negative beyond tolerance; the form should be positive off the "
        "tangent frame");
  Decomposition dec{Bubble{c, zeta}, std::move(rho), residual_norm,
                    energy.value, label};
  return dec;
}

}  // namespace

Vec residual_F(const SphereField& u, double c, Eigen::Ref<const Vec> zeta,
               const SpectralParams& par) {
  if (zeta.size() != par.dim + 1)
    throw InputError("residual_F: profile parameter has the wrong dimension");
  if (zeta.norm() >= 1.0)
    throw InputError("residual_F: profile parameter must lie inside the ball");
  SolveContext ctx{u, par, field_scale(u, par)};
  return eval_residual(ctx, c, Vec(zeta));
}

double profile_pairing(const SphereField& u, Eigen::Ref<const Vec> zeta,
                       const SpectralParams& par) {
  Evaluator prof = bubble_profile(par, Vec(zeta));
  const auto& grid = u.grid();
  std::vector<double> weighted(grid.node_count());
  for (int k = 0; k < grid.node_count(); ++k) {
    const Vec w = grid.nodes().row(k).transpose();
    weighted[k] = u.samples()[k] * std::pow(prof(w), par.p - 1.0);
  }
  return grid.integrate(weighted);
}

std::optional<Decomposition> solve_branch(const SphereField& u, double c0,
                                          Eigen::Ref<const Vec> zeta0,
                                          const SpectralParams& par,
                                          const std::string& label) {
  const int d = par.dim + 1;
  if (zeta0.size() != d)
    throw InputError("solve_branch: start has the wrong dimension");
  SolveContext ctx{u, par, field_scale(u, par)};
  const double tol = kResidualTolRel * ctx.scale;

  double c = c0;
  Vec zeta = clamp_zeta(zeta0);
  Vec f(d + 1);
  try {
    f = eval_residual(ctx, c, zeta);
  } catch (const NumericsError&) {
    return std::nullopt;  // the start is outside evaluable territory
  }

  // Best point seen with residual below the acceptance tolerance.  Once a
  // point is acceptable, a few extra (polish) iterations push the residual
  // toward the numerical floor, so that different starts landing on the same
  // zero agree far inside the deduplication radius.
  bool have_best = false;
  double best_c = c;
  Vec best_zeta = zeta;
  double best_norm = std::numeric_limits<double>::infinity();
  int polish_left = 8;
  const auto record = [&](double fnorm) {
    if (fnorm < tol && fnorm < best_norm) {
      best_norm = fnorm;
      best_c = c;
      best_zeta = zeta;
      have_best = true;
    }
  };

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const double fnorm = f.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(fnorm)) break;
    const double prev_best = best_norm;
    record(fnorm);
    // stop polishing at the numerical floor, when improvement stalls, or
    // when the extra-iteration allowance is used up
    if (have_best && (fnorm < 1e-13 * ctx.scale || fnorm > 0.25 * prev_best ||
                      polish_left-- <= 0))
      break;

    // forward-difference Jacobian in (c, zeta)
    Mat jac(d + 1, d + 1);
    try {
      Vec fc = eval_residual(ctx, c + kFdStep, zeta);
      jac.col(0) = (fc - f) / kFdStep;
      for (int i = 0; i < d; ++i) {
        Vec zp = zeta;
        zp(i) += kFdStep;
        Vec fz = eval_residual(ctx, c, zp);
        jac.col(i + 1) = (fz - f) / kFdStep;
      }
    } catch (const NumericsError&) {
      break;  // keep the best accepted point, if any
    }
    Vec step = Eigen::FullPivLU<Mat>(jac).solve(-f);
    if (!step.allFinite()) break;

    // backtracking on the squared residual, with the parameter cap applied
    // inside every trial
    const double phi = f.squaredNorm();
    double factor = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 30; ++halving, factor *= 0.5) {
      const double c_try = c + factor * step(0);
      const Vec zeta_try = clamp_zeta(zeta + factor * step.tail(d));
      Vec f_try;
      try {
        f_try = eval_residual(ctx, c_try, zeta_try);
      } catch (const NumericsError&) {
        // An unevaluable trial next to an already-accepted point means the
        // iterate is at the noise floor; stop instead of probing further.
        if (have_best) break;
        continue;  // otherwise shorten the step and retry
      }
      if (f_try.allFinite() &&
          f_try.squaredNorm() <= (1.0 - 1e-4 * factor) * phi) {
        c = c_try;
        zeta = zeta_try;
        f = std::move(f_try);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // stagnated or boundary-trapped
  }
  const double fnorm = f.lpNorm<Eigen::Infinity>();
  if (std::isfinite(fnorm)) record(fnorm);
  if (have_best) return finish_point(ctx, best_c, best_zeta, best_norm, label);
  return std::nullopt;  // never reached the residual tolerance
}

CriticalPointSet enumerate_critical_points(const SphereField& u,
                                           const SpectralParams& par,
                                           int budget, std::uint64_t seed) {
  if (u.dim() != par.dim)
    throw InputError("enumerate_critical_points: dimension mismatch");
  if (!u.positive())
    throw InputError(
        "enumerate_critical_points: field must be strictly positive");
  const int d = par.dim + 1;
  const double area = sphere_area(par.dim);

  struct Start {
    std::string label;
    double c;
    Vec zeta;
  };
  std::vector<Start> starts;
  const auto push_start = [&](const std::string& label, Vec zeta) {
    zeta = clamp_zeta(std::move(zeta));
    const double c = profile_pairing(u, zeta, par) / area;
    starts.push_back({label, c, std::move(zeta)});
  };

  // (i) center of mass of the field, pulled into the parameter ball
  {
    const auto& grid = u.grid();
    Vec moment = Vec::Zero(d);
    for (int i = 0; i < d; ++i) {
      std::vector<double> w(grid.node_count());
      for (int k = 0; k < grid.node_count(); ++k)
        w[k] = u.samples()[k] * grid.nodes()(k, i);
      moment(i) = grid.integrate(w);
    }
    Vec com = moment / u.integral();
    if (com.norm() > 0.9) com *= 0.9 / com.norm();
    push_start("center-of-mass", std::move(com));
  }

  // (ii) coarse direction/radius mesh along the coordinate axes
  for (int i = 0; i < d; ++i) {
    for (double sign : {1.0, -1.0}) {
      for (double t : {0.3, 0.6, 0.85}) {
        Vec zeta = Vec::Zero(d);
        zeta(i) = sign * t;
        push_start("mesh axis " + std::to_string(i) +
                       (sign > 0 ? "+" : "-") + " t=" + std::to_string(t),
                   std::move(zeta));
      }
    }
  }

  // (iii) seeded random restarts
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(0.05, 0.9);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 0; k < budget; ++k) {
    Vec dir(d);
    for (int i = 0; i < d; ++i) dir(i) = gauss(rng);
    dir.normalize();
    push_start("random " + std::to_string(k), radius(rng) * dir);
  }

  CriticalPointSet set;
  set.complete = true;
  for (const auto& start : starts) {
    auto dec = solve_branch(u, start.c, start.zeta, par, start.label);
    if (!dec) {
      set.complete = false;
      continue;
    }
    bool duplicate = false;
    for (auto& kept : set.points) {
      const double dc = std::abs(kept.bubble.c - dec->bubble.c);
      const double dz =
          (kept.bubble.zeta - dec->bubble.zeta).cwiseAbs().maxCoeff();
      if (std::max(dc, dz) < kDedupRadius) {
        duplicate = true;
        if (dec->residual_norm < kept.residual_norm) kept = std::move(*dec);
        break;
      }
    }
    if (!duplicate) set.points.push_back(std::move(*dec));
  }

  if (set.points.empty())
    throw NumericsError(
        "enumerate_critical_points: no critical point found from any start; "
        "existence theory guarantees one, so this is a numerical breakdown");

  std::sort(set.points.begin(), set.points.end(),
            [](const Decomposition& a, const Decomposition& b) {
              if (a.bubble.c != b.bubble.c) return a.bubble.c > b.bubble.c;
              return std::lexicographical_compare(
                  a.bubble.zeta.data(), a.bubble.zeta.data() + a.bubble.zeta.size(),
                  b.bubble.zeta.data(), b.bubble.zeta.data() + b.bubble.zeta.size());
            });
  return set;
}

DistanceResult distance(const SphereField& u, const SpectralParams& par,
                        int budget, std::uint64_t seed) {
  const double scale = field_scale(u, par);
  const double def = deficit(u, par);
  CriticalPointSet set = enumerate_critical_points(u, par, budget, seed);

  int argmin = 0;
  for (int i = 1; i < static_cast<int>(set.points.size()); ++i)
    if (set.points[i].rho_energy < set.points[argmin].rho_energy) argmin = i;
  const double min_energy = set.points[argmin].rho_energy;

  if (def < kManifoldTolRel * scale && min_energy < kManifoldTolRel * scale)
    throw InputError(
        "distance: field lies on the profile manifold within tolerance, so "
        "the distance (and the stability quotient) is undefined");

  // energy identity at every accepted point
  const double form_u = a2s_value(u, par);
  const double alpha0 = eigenvalue(par, 0);
  for (const auto& p : set.points) {
    const double expected =
        form_u - alpha0 * p.bubble.c * p.bubble.c * sphere_area(par.dim);
    const double yard = std::max(std::abs(expected), scale);
    if (std::abs(p.rho_energy - expected) > 1e-6 * yard)
      throw InvariantError(
          "distance: remainder energy disagrees with the energy identity "
          "(got " + std::to_string(p.rho_energy) + ", expected " +
          std::to_string(expected) + ")");
  }

  if (!(min_energy > 0.0))
    throw InvariantError(
        "distance: minimal remainder energy is not strictly positive (" +
        std::to_string(min_energy) + ")");

  DistanceResult res;
  res.value = min_energy;
  res.set = std::move(set);
  for (int i = 0; i < static_cast<int>(res.set.points.size()); ++i)
    if (res.set.points[i].rho_energy - min_energy <= kTieTolRel * scale)
      res.attaining.push_back(i);
  res.argmin = res.attaining.front();
  return res;
}

}  // namespace sphstab
