#pragma once
// Shared test oracles: tangent-frame projection, profile-parameter
// extraction, and reference field families used across suites.

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "sphstab/conformal.hpp"
#include "sphstab/quadform.hpp"

namespace oracles {

using namespace sphstab;

inline int packed_size(int n, int degree) {
  return n == 1 ? 2 * degree + 1 : (degree + 1) * (degree + 1);
}

// random band-limited field supported on degrees [lo, hi]
inline SphereField random_banded(int n, int lo, int hi,
                                 std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec packed = Vec::Zero(packed_size(n, hi));
  const int start = lo == 0 ? 0 : packed_size(n, lo - 1);
  for (int i = start; i < packed.size(); ++i) packed(i) = gauss(rng);
  return SphereField::from_coeffs(n, packed);
}

// tangent frame of the profile manifold at (c = 1, zeta)
inline std::vector<SphereField> profile_frame(const SpectralParams& par,
                                              const Vec& zeta) {
  std::vector<SphereField> frame;
  frame.push_back(bubble_eval(par, Bubble{1.0, zeta}));
  for (int i = 0; i <= par.dim; ++i)
    frame.push_back(bubble_dzeta(par, Bubble{1.0, zeta}, i));
  return frame;
}

// removes the frame components of rho in the quadratic-form pairing
inline SphereField project_out(const SphereField& rho,
                               const std::vector<SphereField>& frame,
                               const SpectralParams& par) {
  const int m = static_cast<int>(frame.size());
  Mat gram(m, m);
  Vec rhs(m);
  for (int i = 0; i < m; ++i) {
    rhs(i) = a2s_bilinear(rho, frame[i], par);
    for (int j = i; j < m; ++j) {
      gram(i, j) = a2s_bilinear(frame[i], frame[j], par);
      gram(j, i) = gram(i, j);
    }
  }
  Vec lambda = Eigen::FullPivLU<Mat>(gram).solve(rhs);
  SphereField out = rho;
  for (int i = 0; i < m; ++i) out = out.combine(1.0, -lambda(i), frame[i]);
  return out;
}

// Recovers the parameters (c, zeta) of a field on the profile manifold:
// its (1/sigma)-power is affine in the ambient coordinates.
inline std::pair<double, Vec> extract_profile(const SphereField& u,
                                              const SpectralParams& par) {
  const auto& grid = u.grid();
  const int d = par.dim + 1;
  std::vector<double> y(grid.node_count());
  for (int k = 0; k < grid.node_count(); ++k)
    y[k] = std::pow(u.samples()[k], 1.0 / par.sigma);
  const double area = sphere_area(par.dim);
  const double a = grid.integrate(y) / area;
  Vec b(d);
  for (int i = 0; i < d; ++i) {
    std::vector<double> yi(y);
    for (int k = 0; k < grid.node_count(); ++k) yi[k] *= grid.nodes()(k, i);
    b(i) = (d / area) * grid.integrate(yi);
  }
  Vec zeta = -b / a;
  const double c =
      std::pow(a * std::sqrt(1.0 - zeta.squaredNorm()), par.sigma);
  return {c, zeta};
}

// superposition of two antipodal profile powers along the last axis
// Concentrating test field with peaks at both poles; the exponent
// (n-2s)/2 = -sigma makes each term blow up like (1-beta)^(-sigma) at its
// own pole as beta -> 1, which is what drives the symmetric critical pair.
inline SphereField two_bubble(const SpectralParams& par, double beta,
                              int level = 0) {
  const int n = par.dim;
  const double e = -par.sigma;
  return SphereField(
      n,
      [beta, e, n](Eigen::Ref<const Vec> w) {
        return std::pow(1.0 + beta * w(n), e) +
               std::pow(1.0 - beta * w(n), e);
      },
      level);
}

}  // namespace oracles
