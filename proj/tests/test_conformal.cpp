#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "sphstab/conformal.hpp"
#include "testutil.hpp"

using namespace sphstab;
using doctest::Approx;

namespace {

Vec make_vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec make_vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

SphereField constant_one(int n, int level = 0) {
  return SphereField(n, [](Eigen::Ref<const Vec>) { return 1.0; }, level);
}

SphereField smooth_positive(int n, int level = 0) {
  return SphereField(
      n,
      [n](Eigen::Ref<const Vec> w) {
        return std::exp(0.4 * w(n)) * (1.0 + 0.2 * w(0));
      },
      level);
}

}  // namespace

TEST_CASE("tanh-sinh quadrature handles endpoint singularities") {
  CHECK(tanh_sinh([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0) ==
        Approx(2.0).epsilon(1e-11));
  CHECK(tanh_sinh([](double x) { return std::log(1.0 / x); }, 0.0, 1.0) ==
        Approx(1.0).epsilon(1e-11));
  CHECK(tanh_sinh([](double x) { return std::sin(x); }, 0.0, M_PI) ==
        Approx(2.0).epsilon(1e-12));
  // bounded fractional power at a nonzero endpoint
  CHECK(tanh_sinh([](double x) { return std::sqrt(M_PI - x); }, 0.0, M_PI) ==
        Approx((2.0 / 3.0) * M_PI * std::sqrt(M_PI)).epsilon(1e-11));
  CHECK_THROWS_AS(tanh_sinh([](double) { return 0.0; }, 1.0, 1.0), InputError);
}

TEST_CASE("stereographic projection and its inverse") {
  for (int n : {1, 2}) {
    Vec zero = Vec::Zero(n);
    Vec pole = stereo(zero);
    CHECK(pole(n) == Approx(1.0));
    CHECK(pole.head(n).cwiseAbs().maxCoeff() == 0.0);
    CHECK(stereo_jacobian(zero) == Approx(std::pow(2.0, n)));

    auto rng = testutil::make_rng(11u + static_cast<uint64_t>(n));
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int rep = 0; rep < 20; ++rep) {
      Vec x(n);
      for (int i = 0; i < n; ++i) x(i) = unif(rng);
      Vec omega = stereo(x);
      CHECK(std::abs(omega.norm() - 1.0) < 1e-14);
      Vec back = stereo_inv(omega);
      CHECK((back - x).cwiseAbs().maxCoeff() < 1e-13);
      CHECK(stereo_jacobian(x) * stereo_inv_jacobian(omega) ==
            Approx(1.0).epsilon(1e-13));
    }
    Vec south = Vec::Zero(n + 1);
    south(n) = -1.0;
    CHECK_THROWS_AS(stereo_inv(south), InputError);
    CHECK_THROWS_AS(stereo_inv_jacobian(south), InputError);
  }
}

TEST_CASE("rotation_to_pole sends the center to the pole") {
  for (int n : {1, 2}) {
    const int d = n + 1;
    Vec pole = Vec::Zero(d);
    pole(d - 1) = 1.0;
    // identity at the pole itself
    CHECK((rotation_to_pole(pole) - Mat::Identity(d, d)).cwiseAbs().maxCoeff() <
          1e-14);
    auto rng = testutil::make_rng(23u + static_cast<uint64_t>(n));
    for (int rep = 0; rep < 25; ++rep) {
      Vec xi = testutil::random_unit(d, rng);
      Mat r = rotation_to_pole(xi);
      CHECK((r * xi - pole).cwiseAbs().maxCoeff() < 1e-13);
      CHECK((r.transpose() * r - Mat::Identity(d, d)).cwiseAbs().maxCoeff() <
            1e-13);
      CHECK(r.determinant() == Approx(1.0).epsilon(1e-12));
    }
    // antipode and near-antipode use the flipped construction
    Vec anti = -pole;
    Mat r = rotation_to_pole(anti);
    CHECK((r * anti - pole).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(r.determinant() == Approx(1.0).epsilon(1e-12));
    Vec near_anti = -pole;
    near_anti(0) = 0.05;
    near_anti.normalize();
    Mat r2 = rotation_to_pole(near_anti);
    CHECK((r2 * near_anti - pole).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(r2.determinant() == Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("conformal maps send the sphere to itself with unit mass") {
  for (int n : {1, 2}) {
    auto rng = testutil::make_rng(37u + static_cast<uint64_t>(n));
    Workspace ws = workspace(n, 0);
    for (double delta : {0.5, 1.0, 2.7}) {
      Mat rot = testutil::random_rotation(n + 1, rng);
      Vec xi = testutil::random_unit(n + 1, rng);
      ConformalMap phi = ConformalMap::dilation(delta, xi).with_rotation(rot);
      ConformalMap inv = phi.inverse();

      double max_norm_err = 0.0, max_round = 0.0, max_chain = 0.0;
      std::vector<double> jac(ws.grid->node_count());
      for (int k = 0; k < ws.grid->node_count(); ++k) {
        Vec w = ws.grid->nodes().row(k).transpose();
        Vec image = phi.apply(w);
        max_norm_err = std::max(max_norm_err, std::abs(image.norm() - 1.0));
        const double j = phi.jacobian(w);
        CHECK(j > 0.0);
        jac[k] = j;
        max_round =
            std::max(max_round, (inv.apply(image) - w).cwiseAbs().maxCoeff());
        max_chain =
            std::max(max_chain, std::abs(j * inv.jacobian(image) - 1.0));
      }
      CHECK(max_norm_err < 1e-13);
      CHECK(max_round < 1e-12);
      CHECK(max_chain < 1e-12);
      CHECK(ws.grid->integrate(jac) ==
            Approx(sphere_area(n)).epsilon(1e-8));
    }
  }
  // rotations act as plain rotations with unit Jacobian
  auto rng = testutil::make_rng(5u);
  Mat rot = testutil::random_rotation(3, rng);
  ConformalMap phi = ConformalMap::rotation(rot);
  Vec w = make_vec3(0.48, -0.6, 0.64);
  CHECK((phi.apply(w) - rot * w).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(phi.jacobian(w) == Approx(1.0));

  Mat bad = Mat::Identity(3, 3);
  bad(0, 1) = 0.1;
  CHECK_THROWS_AS(ConformalMap::rotation(bad), InputError);
  CHECK_THROWS_AS(ConformalMap::dilation(2.0, make_vec3(0.5, 0.5, 0.5)),
                  InputError);
  CHECK_THROWS_AS(ConformalMap::dilation(-1.0, make_vec3(0, 0, 1)),
                  InputError);
}

TEST_CASE("pullback of the constant under a centered dilation is the profile") {
  const double pairs[4][2] = {{1, 0.75}, {1, 2.0}, {2, 1.5}, {2, 2.5}};
  for (auto& pr : pairs) {
    const int n = static_cast<int>(pr[0]);
    const auto par = SpectralParams::create(n, pr[1]);
    auto rng = testutil::make_rng(101u + static_cast<uint64_t>(10 * pr[1]));
    for (double delta : {1.3, 2.0, 3.0}) {
      Vec xi = testutil::random_unit(n + 1, rng);
      ConformalMap gamma = ConformalMap::dilation(delta, xi);
      SphereField pulled = pullback(par, constant_one(n), gamma);
      const double t = (delta * delta - 1.0) / (delta * delta + 1.0);
      SphereField prof = bubble_eval(par, Bubble{1.0, Vec(t * xi)});
      double worst = 0.0;
      for (size_t k = 0; k < pulled.samples().size(); ++k)
        worst = std::max(worst, std::abs(pulled.samples()[k] -
                                         prof.samples()[k]) /
                                    prof.samples()[k]);
      CHECK(worst < 1e-12);
      // rotations leave the constant untouched
      SphereField rotated =
          pullback(par, constant_one(n),
                   ConformalMap::rotation(testutil::random_rotation(n + 1, rng)));
      for (double v : rotated.samples()) CHECK(std::abs(v - 1.0) < 1e-13);
    }
  }
}

TEST_CASE("pullback round trip and critical-norm preservation") {
  const double pairs[4][2] = {{1, 0.75}, {1, 2.0}, {2, 1.5}, {2, 2.5}};
  for (auto& pr : pairs) {
    const int n = static_cast<int>(pr[0]);
    const auto par = SpectralParams::create(n, pr[1]);
    auto rng = testutil::make_rng(211u + static_cast<uint64_t>(10 * pr[1]));
    SphereField u = smooth_positive(n);
    const double base_norm = pnorm(u, par.p);
    for (int rep = 0; rep < 3; ++rep) {
      std::uniform_real_distribution<double> dd(1.0, 3.0);
      ConformalMap phi =
          ConformalMap::dilation(dd(rng), testutil::random_unit(n + 1, rng))
              .with_rotation(testutil::random_rotation(n + 1, rng));
      SphereField moved = pullback(par, u, phi);
      CHECK(moved.positive());
      CHECK(pnorm(moved, par.p) == Approx(base_norm).epsilon(1e-8));
      SphereField back = pullback(par, moved, phi.inverse());
      double worst = 0.0;
      for (size_t k = 0; k < back.samples().size(); ++k)
        worst = std::max(worst,
                         std::abs(back.samples()[k] - u.samples()[k]));
      CHECK(worst < 1e-9);
    }
  }
}

TEST_CASE("profile family: normalization, center, derivative consistency") {
  const auto par = SpectralParams::create(2, 1.5);
  // zeta = 0 is the constant 1, with derivative -sigma * w_i
  SphereField v0 = bubble_eval(par, Bubble{1.0, Vec::Zero(3)});
  for (double v : v0.samples()) CHECK(v == Approx(1.0).epsilon(1e-14));
  for (int i = 0; i < 3; ++i) {
    SphereField dv = bubble_dzeta(par, Bubble{1.0, Vec::Zero(3)}, i);
    const auto& nodes = dv.grid().nodes();
    double worst = 0.0;
    for (int k = 0; k < dv.grid().node_count(); ++k)
      worst = std::max(worst, std::abs(dv.samples()[k] +
                                       par.sigma * nodes(k, i)));
    CHECK(worst < 1e-13);
    // pure degree-1 content
    const auto& bands = dv.band_energies();
    CHECK(bands[1] > 1e-3);
    double off = 0.0;
    for (size_t l = 0; l < bands.size(); ++l)
      if (l != 1) off += bands[l];
    CHECK(off < 1e-20);
  }

  // normalization at the critical exponent away from the origin
  for (int n : {1, 2}) {
    const auto pr = SpectralParams::create(n, n == 1 ? 0.75 : 2.5);
    Vec zeta = Vec::Zero(n + 1);
    zeta(0) = 0.7;
    SphereField v = bubble_eval(pr, Bubble{1.0, zeta});
    CHECK(pnorm(v, pr.p) ==
          Approx(std::pow(sphere_area(n), 1.0 / pr.p)).epsilon(1e-8));
  }

  // analytic zeta-derivative against central differences, with O(h^2) decay
  auto rng = testutil::make_rng(314u);
  Vec zeta = make_vec3(0.3, -0.2, 0.4);
  for (int i = 0; i < 3; ++i) {
    Evaluator deriv = bubble_profile_dzeta(par, zeta, i);
    double err_h = 0.0, err_h2 = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
      Vec w = testutil::random_unit(3, rng);
      const double exact = deriv(w);
      for (double h : {1e-3, 5e-4}) {
        Vec zp = zeta, zm = zeta;
        zp(i) += h;
        zm(i) -= h;
        const double fd = (bubble_profile(par, zp)(w) -
                           bubble_profile(par, zm)(w)) /
                          (2.0 * h);
        const double err = std::abs(fd - exact);
        (h == 1e-3 ? err_h : err_h2) = std::max(err, h == 1e-3 ? err_h : err_h2);
      }
    }
    CHECK(err_h < 1e-5);
    const double ratio = err_h / std::max(err_h2, 1e-300);
    CHECK(ratio > 2.5);
    CHECK(ratio < 6.0);
  }

  // parameter validation
  Vec rim = make_vec3(1.0 - 1e-13, 0, 0);
  CHECK_THROWS_AS(bubble_eval(par, Bubble{1.0, rim}), InputError);
  CHECK_THROWS_AS(bubble_eval(par, Bubble{-1.0, Vec::Zero(3)}), InputError);
  CHECK_THROWS_AS(bubble_dzeta(par, Bubble{1.0, Vec::Zero(3)}, 3), InputError);
  CHECK_THROWS_AS(bubble_profile(par, make_vec2(0.5, 0.0)), InputError);
}

TEST_CASE("profiles are pullbacks of the constant") {
  for (int n : {1, 2}) {
    const auto par = SpectralParams::create(n, n == 1 ? 2.0 : 1.5);
    auto rng = testutil::make_rng(999u + static_cast<uint64_t>(n));
    for (double t : {0.0, 0.35, 0.8}) {
      Vec zeta = t * testutil::random_unit(n + 1, rng);
      ConformalMap gamma = bubble_as_pullback(par, zeta);
      SphereField via_map = pullback(par, constant_one(n), gamma);
      SphereField direct = bubble_eval(par, Bubble{1.0, zeta});
      double worst = 0.0;
      for (size_t k = 0; k < via_map.samples().size(); ++k)
        worst = std::max(worst, std::abs(via_map.samples()[k] -
                                         direct.samples()[k]));
      CHECK(worst < 1e-12);
    }
  }
}

TEST_CASE("balance vector: identity case, route agreement, positivity guard") {
  const auto par = SpectralParams::create(2, 1.5);
  SphereField one = constant_one(2);
  Vec xi = make_vec3(0, 0, 1);
  CHECK(balance_F(par, one, 1.0, xi).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(balance_F(par, one, 0.5, xi), InputError);

  SphereField signchange(
      2, [](Eigen::Ref<const Vec> w) { return 1.0 + 2.0 * w(2); });
  CHECK_THROWS_AS(balance_F(par, signchange, 2.0, xi), InputError);

  // grid route vs concentrated radial route
  for (int n : {1, 2}) {
    const auto pr = SpectralParams::create(n, n == 1 ? 0.75 : 1.5);
    SphereField u = smooth_positive(n, 1);
    auto rng = testutil::make_rng(555u + static_cast<uint64_t>(n));
    for (double delta : {3.0, 10.0}) {
      Vec c = testutil::random_unit(n + 1, rng);
      Vec fg = balance_F_on_grid(pr, u, delta, c);
      Vec fr = balance_F_radial(pr, u, delta, c);
      CHECK((fg - fr).cwiseAbs().maxCoeff() <
            1e-8 * std::max(1.0, fg.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("normalized balance direction converges to the center") {
  for (int n : {1, 2}) {
    const auto par = SpectralParams::create(n, n == 1 ? 0.75 : 1.5);
    SphereField u = smooth_positive(n);
    auto rng = testutil::make_rng(777u + static_cast<uint64_t>(n));
    for (int rep = 0; rep < 3; ++rep) {
      Vec xi = testutil::random_unit(n + 1, rng);
      double first = 0.0;
      double prev = std::numeric_limits<double>::infinity();
      for (double delta : {5.0, 10.0, 20.0, 40.0}) {
        const double err = (balance_G(par, u, delta, xi) - xi).norm();
        CHECK(err < prev);
        prev = err;
        if (delta == 5.0) first = err;
      }
      CHECK(prev < 0.15);
      CHECK(prev < 0.5 * first);
    }
  }
}

TEST_CASE("limit constants match their radial quadrature oracles") {
  const double pairs[4][2] = {{1, 0.75}, {1, 2.0}, {2, 1.5}, {2, 2.5}};
  for (auto& pr : pairs) {
    const int n = static_cast<int>(pr[0]);
    const double s = pr[1];
    const auto par = SpectralParams::create(n, s);

    // first-moment limit integral, radial form via r = tan(psi/2)
    const double oracle_bal =
        sphere_area(n - 1) *
        tanh_sinh(
            [n, s](double psi) {
              const double c = std::cos(0.5 * psi);
              const double r = std::tan(0.5 * psi);
              const double r2 = r * r;
              return (1.0 - r2) *
                     std::pow(1.0 + r2, -0.5 * (n + 2.0 * s + 2.0)) *
                     std::pow(2.0, 0.5 * (n + 2.0 * s)) *
                     std::pow(r, n - 1) * 0.5 / (c * c);
            },
            0.0, M_PI, 1e-12);
    CHECK(balance_limit_constant(par) == Approx(oracle_bal).epsilon(1e-8));

    // concentration constant: 2^(-sigma/2) times the integral of the
    // flat-space profile at the conjugate exponent (the blow-up chart's
    // dilation power combined with the profile value at the origin)
    const double oracle_conc =
        std::pow(2.0, -0.5 * par.sigma) * sphere_area(n - 1) *
        tanh_sinh(
            [n, s](double psi) {
              const double c = std::cos(0.5 * psi);
              const double r = std::tan(0.5 * psi);
              const double r2 = r * r;
              return std::pow(0.5 * (1.0 + r2), -0.5 * (n + 2.0 * s)) *
                     std::pow(r, n - 1) * 0.5 / (c * c);
            },
            0.0, M_PI, 1e-12);
    CHECK(concentration_constant(par) == Approx(oracle_conc).epsilon(1e-8));
  }
}
