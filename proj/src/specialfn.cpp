#include "sphstab/specialfn.hpp"

#include <cmath>
#include <sstream>

namespace sphstab {

namespace {

bool is_nonpositive_integer(double x, double tol = 1e-12) {
  return x < 0.5 && std::abs(x - std::rint(x)) < tol;
}

}  // namespace

SpectralParams SpectralParams::create(int n, double s) {
  if (n < 1) throw InputError("sphere dimension must be >= 1, got " + std::to_string(n));
  const double sigma = s - 0.5 * n;
  constexpr double kGuard = 1e-9;
  if (sigma <= kGuard || sigma >= 2.0 - kGuard || std::abs(sigma - 1.0) <= kGuard) {
    std::ostringstream os;
    os << "sigma = s - n/2 = " << sigma
       << " outside the admissible window (0,1) U (1,2) (guard band 1e-9)";
    throw InputError(os.str());
  }
  SpectralParams par;
  par.dim = n;
  par.order = s;
  par.sigma = sigma;
  par.p = 2.0 * n / (n - 2.0 * s);  // negative throughout the window
  return par;
}

double gamma_fn(double x) {
  if (x <= 0.5 && x == std::rint(x)) {
    throw InputError("gamma_fn: pole at non-positive integer argument " + std::to_string(x));
  }
  return std::tgamma(x);
}

double log_gamma_abs(double x) {
  if (x <= 0.5 && x == std::rint(x)) {
    throw InputError("log_gamma_abs: pole at non-positive integer argument " +
                     std::to_string(x));
  }
  return std::lgamma(x);
}

int gamma_sign(double x) {
  if (x > 0) return 1;
  if (x == std::rint(x)) {
    throw InputError("gamma_sign: pole at non-positive integer argument " +
                     std::to_string(x));
  }
  // Gamma alternates sign on the intervals (-k-1, -k): negative on (-1,0),
  // positive on (-2,-1), and so on.
  const long long k = static_cast<long long>(std::floor(x));
  return (k % 2 == 0) ? 1 : -1;
}

double sphere_area(int n) {
  if (n < 0) throw InputError("sphere_area: dimension must be >= 0");
  return 2.0 * std::pow(M_PI, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

double eigenvalue_direct(int n, double s, int ell) {
  const double num = ell + 0.5 * n + s;
  const double den = ell + 0.5 * n - s;
  return gamma_fn(num) / gamma_fn(den);
}

double eigenvalue_logspace(int n, double s, int ell) {
  const double num = ell + 0.5 * n + s;
  const double den = ell + 0.5 * n - s;
  const int sign = gamma_sign(num) * gamma_sign(den);
  return sign * std::exp(log_gamma_abs(num) - log_gamma_abs(den));
}

double eigenvalue_any(int n, double s, int ell) {
  if (ell < 0) throw InputError("eigenvalue: degree must be >= 0");
  const double den = ell + 0.5 * n - s;
  // Pole of the denominator Gamma: the ratio is defined as exactly zero.
  if (is_nonpositive_integer(den)) return 0.0;
  const double num = ell + 0.5 * n + s;
  if (num <= 150.0) return eigenvalue_direct(n, s, ell);
  return eigenvalue_logspace(n, s, ell);
}

double eigenvalue(const SpectralParams& par, int ell) {
  return eigenvalue_any(par.dim, par.order, ell);
}

double sharp_constant(const SpectralParams& par) {
  const int n = par.dim;
  const double s = par.order;
  const double ratio = gamma_fn(0.5 * (n + 2.0 * s)) / gamma_fn(0.5 * (n - 2.0 * s));
  const double vol = std::pow(gamma_fn(0.5 * n) / gamma_fn(static_cast<double>(n)),
                              2.0 * s / n);
  return std::pow(4.0 * M_PI, s) * ratio * vol;
}

double sharp_constant_identity(const SpectralParams& par) {
  return eigenvalue(par, 0) * std::pow(sphere_area(par.dim), 2.0 * par.order / par.dim);
}

double local_constant(const SpectralParams& par) {
  return 4.0 * par.order / (par.dim + 2.0 * par.order + 2.0);
}

double local_constant_identity(const SpectralParams& par) {
  return 1.0 - eigenvalue(par, 1) / eigenvalue(par, 2);
}

std::vector<std::pair<int, double>> eigenvalue_growth_deviation(
    const SpectralParams& par, int kmax) {
  if (kmax < 1) throw InputError("eigenvalue_growth_deviation: kmax must be >= 1");
  std::vector<std::pair<int, double>> out;
  out.reserve(kmax);
  for (int k = 1; k <= kmax; ++k) {
    // log-space throughout: eigenvalue(k) k^(-2s) can be formed without
    // overflow for any k.
    const double num = k + 0.5 * par.dim + par.order;
    const double den = k + 0.5 * par.dim - par.order;
    const double lg = log_gamma_abs(num) - log_gamma_abs(den) -
                      2.0 * par.order * std::log(static_cast<double>(k));
    const int sign = gamma_sign(num) * gamma_sign(den);
    const double ratio = sign * std::exp(lg);
    out.emplace_back(k, std::abs(ratio - 1.0) * k);
  }
  return out;
}

double balance_limit_constant(const SpectralParams& par) {
  const int n = par.dim;
  const double s = par.order;
  return std::pow(2.0, 0.5 * (n + 2.0 * s - 2.0)) * sphere_area(n - 1) *
         gamma_fn(0.5 * n) * gamma_fn(s) / gamma_fn(0.5 * (n + 2.0 * s + 2.0)) *
         (s - 0.5 * n);
}

double concentration_constant(const SpectralParams& par) {
  const int n = par.dim;
  const double s = par.order;
  return std::pow(2.0, -0.5 * par.sigma + 0.5 * (n + 2.0 * s) - 1.0) *
         sphere_area(n - 1) * gamma_fn(0.5 * n) * gamma_fn(s) /
         gamma_fn(0.5 * (n + 2.0 * s));
}

}  // namespace sphstab
