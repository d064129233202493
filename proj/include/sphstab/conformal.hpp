// Stereographic projection, conformal self-maps of the sphere with
// closed-form Jacobians, the conformal pullback that preserves the
// critical-exponent norm, the normalized concentrating profile family
// v_zeta with its analytic zeta-derivatives, and the first-moment balance
// vector whose zero picks out a centered representative.
#pragma once

#include "sphstab/field.hpp"

namespace sphstab {

// Inverse stereographic projection R^n -> S^n (north pole at x = 0) and its
// inverse; the scalar versions give the conformal volume factors.
Vec stereo(const Vec& x);                      // size n -> n+1
double stereo_jacobian(const Vec& x);          // (2/(1+|x|^2))^n
Vec stereo_inv(const Vec& omega);              // size n+1 -> n
double stereo_inv_jacobian(const Vec& omega);  // (1+omega_last)^(-n)

// Rotation R with R*xi = north pole: the rotation in the xi-pole plane,
// identity at the pole itself; near the antipode it is composed with a
// fixed half-turn so the construction stays well-conditioned.
Mat rotation_to_pole(const Vec& xi);

// Conformal self-map of S^n stored in factored form
//   Phi = A . S . D_delta . S^{-1} . B
// with A, B orthogonal and D_delta the dilation of R^n.  Covers rotations
// (delta = 1) and the centered dilations gamma_{delta, xi}; Jacobians and
// inverses stay closed-form.
class ConformalMap {
 public:
  static ConformalMap identity(int n);
  static ConformalMap rotation(const Mat& r);
  // gamma_{delta, xi}: dilation by delta centered at the unit vector xi
  // (conjugated through the rotation taking xi to the pole).
  static ConformalMap dilation(double delta, const Vec& xi);

  ConformalMap inverse() const;
  // r . (*this): compose with a final rotation.
  ConformalMap with_rotation(const Mat& r) const;

  int dim() const { return static_cast<int>(a_.rows()) - 1; }
  double dilation_factor() const { return delta_; }
  const Mat& post_rotation() const { return a_; }
  const Mat& pre_rotation() const { return b_; }

  Vec apply(Eigen::Ref<const Vec> omega) const;
  double jacobian(Eigen::Ref<const Vec> omega) const;

 private:
  ConformalMap(Mat a, double delta, Mat b);
  Mat a_, b_;
  double delta_ = 1.0;
};

// u_Phi(w) = u(Phi(w)) * J_Phi(w)^(1/p); preserves positivity and the
// critical-exponent norm.  `level` < 0 keeps u's level.
SphereField pullback(const SpectralParams& par, const SphereField& u,
                     const ConformalMap& phi, int level = -1);

// Concentrating profile parameters: amplitude c > 0 and center zeta in the
// open unit ball of R^(n+1).
struct Bubble {
  double c = 1.0;
  Vec zeta;
};

// v_zeta(w) = (1-|zeta|^2)^(-sigma/2) * (1 - zeta.w)^sigma with
// sigma = s - n/2, so that the pullback of the constant 1 under the
// dilation centered at zeta/|zeta| equals v_zeta and the critical-exponent
// norm is independent of zeta.
Evaluator bubble_profile(const SpectralParams& par, Vec zeta);
// Analytic partial derivative of the profile in zeta_i, i = 0..n.
Evaluator bubble_profile_dzeta(const SpectralParams& par, Vec zeta, int i);

SphereField bubble_eval(const SpectralParams& par, const Bubble& b,
                        int level = 0);
SphereField bubble_dzeta(const SpectralParams& par, const Bubble& b, int i,
                         int level = 0);

// The centered dilation gamma with 1_gamma = v_zeta.
ConformalMap bubble_as_pullback(const SpectralParams& par, const Vec& zeta);

// First-moment balance vector
//   F(delta, xi)[u] = integral of gamma(w) * J_gamma(w)^((n+2s)/(2n)) * u(w)
// over the sphere, gamma = gamma_{delta, xi}.  The dispatching version
// integrates on u's grid for delta <= 10 and switches to concentrated
// radial coordinates beyond that; the two explicit routes are exposed for
// cross-checking.
Vec balance_F(const SpectralParams& par, const SphereField& u, double delta,
              const Vec& xi);
Vec balance_F_on_grid(const SpectralParams& par, const SphereField& u,
                      double delta, const Vec& xi);
Vec balance_F_radial(const SpectralParams& par, const SphereField& u,
                     double delta, const Vec& xi);

// Normalized balance direction
//   G(delta, xi) = delta^((n-2s)/2) * F(delta, xi) / (c_bal * u(xi)),
// which converges to xi as delta -> infinity; c_bal combines the
// first-moment limit integral with the dilation normalization.
Vec balance_G(const SpectralParams& par, const SphereField& u, double delta,
              const Vec& xi);

}  // namespace sphstab
