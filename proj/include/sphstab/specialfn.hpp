// Spectral parameters and closed-form constants for the reverse sharp
// inequality on the sphere: operator eigenvalues, the sharp constant,
// the local stability constant, and expansion constants used by the
// asymptotic checks.
#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sphstab {

// Thrown when a request is structurally invalid (bad parameters, bad input
// files, out-of-domain arguments).  The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when an iterative routine fails to converge.  CLI exit code 3.
class NumericsError : public std::runtime_error {
 public:
  explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a computed result violates a mathematical identity that the
// theory guarantees (a self-check failed, not a bad input).  CLI exit code 4.
class InvariantError : public std::runtime_error {
 public:
  explicit InvariantError(const std::string& msg) : std::runtime_error(msg) {}
};

// Parameters of the spectral family.  The admissible window is
// sigma = s - n/2 in (0,1) U (1,2); the endpoints {0,1,2} are rejected
// with an absolute guard band of 1e-9 because every downstream formula
// degenerates there.  The integrability exponent p = 2n/(n-2s) is negative
// throughout the window.
struct SpectralParams {
  int dim = 0;        // sphere dimension n >= 1
  double order = 0;   // operator order parameter s
  double sigma = 0;   // s - n/2
  double p = 0;       // 2n/(n-2s) < 0

  static SpectralParams create(int n, double s);
};

// Gamma and log-Gamma with pole detection.  gamma_fn throws InputError at
// non-positive integer arguments; log_gamma_abs returns log|Gamma(x)| and
// gamma_sign the sign of Gamma(x) away from poles.
double gamma_fn(double x);
double log_gamma_abs(double x);
int gamma_sign(double x);

// Surface area of the unit n-sphere, |S^n| = 2 pi^((n+1)/2) / Gamma((n+1)/2).
double sphere_area(int n);

// Eigenvalue of the conformal operator on degree-ell spherical harmonics:
//   eigenvalue(ell) = Gamma(ell + n/2 + s) / Gamma(ell + n/2 - s),
// with the convention that the value is exactly 0 when the denominator
// argument is a non-positive integer (a pole of Gamma).  Within the
// admissible sigma window that branch can never fire for integer ell >= 0;
// eigenvalue_any exposes the total function for unvalidated (n, s).
double eigenvalue(const SpectralParams& par, int ell);
double eigenvalue_any(int n, double s, int ell);

// The two evaluation routes, exposed separately so they can be
// cross-checked: a direct Gamma ratio (small arguments) and a log-space
// difference with explicit sign tracking (large arguments; the direct
// ratio overflows near ell ~ 170).
double eigenvalue_direct(int n, double s, int ell);
double eigenvalue_logspace(int n, double s, int ell);

// Sharp constant of the inequality,
//   S = (4 pi)^s Gamma((n+2s)/2)/Gamma((n-2s)/2) * (Gamma(n/2)/Gamma(n))^(2s/n),
// negative exactly when sigma is in (0,1).  The identity route
// eigenvalue(0) * |S^n|^(2s/n) must agree to machine accuracy.
double sharp_constant(const SpectralParams& par);
double sharp_constant_identity(const SpectralParams& par);

// Local stability constant 4s/(n+2s+2) and the eigenvalue-ratio identity
// 1 - eigenvalue(1)/eigenvalue(2) it must equal.
double local_constant(const SpectralParams& par);
double local_constant_identity(const SpectralParams& par);

// Growth law of the eigenvalues: eigenvalue(k) = k^(2s) (1 + O(1/k)).
// Returns (k, |eigenvalue(k) k^(-2s) - 1| * k) for k = 1..kmax; the second
// component stays bounded (it converges to s(n-1)).
std::vector<std::pair<int, double>> eigenvalue_growth_deviation(
    const SpectralParams& par, int kmax);

// Closed form of the first-moment integral that controls the large-dilation
// balance limit:
//   integral over R^n of (1-|x|^2)/(1+|x|^2) * (2/(1+|x|^2))^((n+2s)/2) dx
//     = 2^((n+2s-2)/2) |S^(n-1)| Gamma(n/2) Gamma(s) / Gamma((n+2s+2)/2)
//       * (s - n/2),
// strictly positive on the admissible window.
double balance_limit_constant(const SpectralParams& par);

// Closed form of the concentration constant
//   2^(n/(2p)) * integral over R^n of ((1+|x|^2)/2)^(-(n+2s)/2) dx,
// which normalises pairings against concentrating profiles.  The power of
// two is the flat-space profile value at the origin times the dilation
// factor of the blow-up chart; see the pairing-ratio checks for the
// independent spherical measurement this must match.
double concentration_constant(const SpectralParams& par);

}  // namespace sphstab
