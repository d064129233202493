#include "sphstab/conformal.hpp"

#include <cmath>
#include <utility>

namespace sphstab {

namespace {

void require_sphere_dim(int n, const char* op) {
  if (n != 1 && n != 2)
    throw InputError(std::string(op) + ": only S^1 and S^2 are supported");
}

void require_orthogonal(const Mat& m, const char* op) {
  if (m.rows() != m.cols() || (m.rows() != 2 && m.rows() != 3))
    throw InputError(std::string(op) + ": rotation must be 2x2 or 3x3");
  const double defect =
      (m.transpose() * m - Mat::Identity(m.rows(), m.cols()))
          .cwiseAbs()
          .maxCoeff();
  if (defect > 1e-12)
    throw InputError(std::string(op) +
                     ": matrix is not orthogonal (defect " +
                     std::to_string(defect) + ")");
}

Vec unitize(const Vec& xi, const char* op) {
  const double norm = xi.norm();
  if (std::abs(norm - 1.0) > 1e-8)
    throw InputError(std::string(op) + ": center must be a unit vector");
  return xi / norm;
}

}  // namespace

Vec stereo(const Vec& x) {
  const int n = static_cast<int>(x.size());
  require_sphere_dim(n, "stereo");
  const double r2 = x.squaredNorm();
  Vec omega(n + 1);
  omega.head(n) = 2.0 * x / (1.0 + r2);
  omega(n) = (1.0 - r2) / (1.0 + r2);
  return omega;
}

double stereo_jacobian(const Vec& x) {
  const int n = static_cast<int>(x.size());
  require_sphere_dim(n, "stereo_jacobian");
  return std::pow(2.0 / (1.0 + x.squaredNorm()), n);
}

Vec stereo_inv(const Vec& omega) {
  const int n = static_cast<int>(omega.size()) - 1;
  require_sphere_dim(n, "stereo_inv");
  const double h = 1.0 + omega(n);
  if (h <= 1e-14)
    throw InputError("stereo_inv: undefined at the antipode of the pole");
  return omega.head(n) / h;
}

double stereo_inv_jacobian(const Vec& omega) {
  const int n = static_cast<int>(omega.size()) - 1;
  require_sphere_dim(n, "stereo_inv_jacobian");
  const double h = 1.0 + omega(n);
  if (h <= 1e-14)
    throw InputError("stereo_inv_jacobian: undefined at the antipode");
  return std::pow(h, -n);
}

Mat rotation_to_pole(const Vec& xi) {
  const int d = static_cast<int>(xi.size());
  require_sphere_dim(d - 1, "rotation_to_pole");
  const Vec a = unitize(xi, "rotation_to_pole");
  Vec pole = Vec::Zero(d);
  pole(d - 1) = 1.0;

  // rotation in the plane of `from` and the pole sending `from` to the pole
  auto plane_rotation = [&pole, d](const Vec& from) {
    const Vec sum = from + pole;
    Mat r = Mat::Identity(d, d) - sum * sum.transpose() / (1.0 + from(d - 1)) +
            2.0 * pole * from.transpose();
    return r;
  };

  if (a(d - 1) >= -0.9) return plane_rotation(a);
  // Near the antipode: first apply a fixed half-turn flipping the first and
  // last axes, then rotate in-plane from the flipped position.
  Mat half = Mat::Identity(d, d);
  half(0, 0) = -1.0;
  half(d - 1, d - 1) = -1.0;
  return plane_rotation(Vec(half * a)) * half;
}

ConformalMap::ConformalMap(Mat a, double delta, Mat b)
    : a_(std::move(a)), b_(std::move(b)), delta_(delta) {
  require_orthogonal(a_, "ConformalMap");
  require_orthogonal(b_, "ConformalMap");
  if (a_.rows() != b_.rows())
    throw InputError("ConformalMap: rotation sizes disagree");
  if (!(delta_ > 0.0) || !std::isfinite(delta_))
    throw InputError("ConformalMap: dilation factor must be positive");
}

ConformalMap ConformalMap::identity(int n) {
  require_sphere_dim(n, "ConformalMap::identity");
  return ConformalMap(Mat::Identity(n + 1, n + 1), 1.0,
                      Mat::Identity(n + 1, n + 1));
}

ConformalMap ConformalMap::rotation(const Mat& r) {
  require_orthogonal(r, "ConformalMap::rotation");
  return ConformalMap(r, 1.0, Mat::Identity(r.rows(), r.cols()));
}

ConformalMap ConformalMap::dilation(double delta, const Vec& xi) {
  Mat o = rotation_to_pole(xi);
  Mat ot = o.transpose();
  return ConformalMap(std::move(ot), delta, std::move(o));
}

ConformalMap ConformalMap::inverse() const {
  return ConformalMap(b_.transpose(), 1.0 / delta_, a_.transpose());
}

ConformalMap ConformalMap::with_rotation(const Mat& r) const {
  require_orthogonal(r, "ConformalMap::with_rotation");
  return ConformalMap(r * a_, delta_, b_);
}

Vec ConformalMap::apply(Eigen::Ref<const Vec> omega) const {
  const int d = static_cast<int>(a_.rows());
  Vec p = b_ * omega;
  const double z = p(d - 1);
  const double d2 = delta_ * delta_;
  const double denom = (1.0 + z) + d2 * (1.0 - z);
  Vec out(d);
  out.head(d - 1) = 2.0 * delta_ * p.head(d - 1) / denom;
  out(d - 1) = ((1.0 + z) - d2 * (1.0 - z)) / denom;
  return a_ * out;
}

double ConformalMap::jacobian(Eigen::Ref<const Vec> omega) const {
  const int d = static_cast<int>(a_.rows());
  const double z = b_.row(d - 1).dot(omega);
  const double d2 = delta_ * delta_;
  const double denom = (1.0 + z) + d2 * (1.0 - z);
  return std::pow(2.0 * delta_ / denom, d - 1);
}

SphereField pullback(const SpectralParams& par, const SphereField& u,
                     const ConformalMap& phi, int level) {
  if (u.dim() != par.dim || phi.dim() != par.dim)
    throw InputError("pullback: dimension mismatch");
  const int lvl = level < 0 ? u.level() : level;
  const double inv_p = 1.0 / par.p;
  Evaluator eval = [eu = u.evaluator(), phi,
                    inv_p](Eigen::Ref<const Vec> omega) {
    return eu(phi.apply(omega)) * std::pow(phi.jacobian(omega), inv_p);
  };
  return SphereField(par.dim, std::move(eval), lvl);
}

Evaluator bubble_profile(const SpectralParams& par, Vec zeta) {
  if (static_cast<int>(zeta.size()) != par.dim + 1)
    throw InputError("bubble_profile: center must live in R^(n+1)");
  const double r = zeta.norm();
  if (r >= 1.0 - 1e-12)
    throw InputError(
        "bubble_profile: concentration parameter too close to the unit "
        "sphere");
  const double sigma = par.sigma;
  const double pref = std::pow(1.0 - r * r, -0.5 * sigma);
  return [pref, zeta = std::move(zeta), sigma](Eigen::Ref<const Vec> w) {
    return pref * std::pow(1.0 - zeta.dot(w), sigma);
  };
}

Evaluator bubble_profile_dzeta(const SpectralParams& par, Vec zeta, int i) {
  if (static_cast<int>(zeta.size()) != par.dim + 1)
    throw InputError("bubble_profile_dzeta: center must live in R^(n+1)");
  if (i < 0 || i > par.dim)
    throw InputError("bubble_profile_dzeta: component index out of range");
  const double r2 = zeta.squaredNorm();
  if (std::sqrt(r2) >= 1.0 - 1e-12)
    throw InputError(
        "bubble_profile_dzeta: concentration parameter too close to the "
        "unit sphere");
  const double sigma = par.sigma;
  const double pref = std::pow(1.0 - r2, -0.5 * sigma);
  return [pref, zeta = std::move(zeta), sigma, r2,
          i](Eigen::Ref<const Vec> w) {
    const double lin = 1.0 - zeta.dot(w);
    const double value = pref * std::pow(lin, sigma);
    return value * sigma * (zeta(i) / (1.0 - r2) - w(i) / lin);
  };
}

SphereField bubble_eval(const SpectralParams& par, const Bubble& b,
                        int level) {
  if (!(b.c > 0.0))
    throw InputError("bubble_eval: amplitude must be positive");
  Evaluator profile = bubble_profile(par, b.zeta);
  Evaluator eval = [c = b.c, profile = std::move(profile)](
                       Eigen::Ref<const Vec> w) { return c * profile(w); };
  return SphereField(par.dim, std::move(eval), level);
}

SphereField bubble_dzeta(const SpectralParams& par, const Bubble& b, int i,
                         int level) {
  if (!(b.c > 0.0))
    throw InputError("bubble_dzeta: amplitude must be positive");
  Evaluator deriv = bubble_profile_dzeta(par, b.zeta, i);
  Evaluator eval = [c = b.c, deriv = std::move(deriv)](
                       Eigen::Ref<const Vec> w) { return c * deriv(w); };
  return SphereField(par.dim, std::move(eval), level);
}

ConformalMap bubble_as_pullback(const SpectralParams& par, const Vec& zeta) {
  if (static_cast<int>(zeta.size()) != par.dim + 1)
    throw InputError("bubble_as_pullback: center must live in R^(n+1)");
  const double t = zeta.norm();
  if (t >= 1.0 - 1e-12)
    throw InputError(
        "bubble_as_pullback: concentration parameter too close to the unit "
        "sphere");
  if (t < 1e-14) return ConformalMap::identity(par.dim);
  const double delta = std::sqrt((1.0 + t) / (1.0 - t));
  return ConformalMap::dilation(delta, Vec(zeta / t));
}

namespace {

void check_balance_inputs(const SpectralParams& par, const SphereField& u,
                          double delta, const Vec& xi) {
  if (u.dim() != par.dim)
    throw InputError("balance_F: field dimension mismatch");
  if (static_cast<int>(xi.size()) != par.dim + 1)
    throw InputError("balance_F: center must live in R^(n+1)");
  if (!(delta >= 1.0) || !std::isfinite(delta))
    throw InputError("balance_F: dilation must satisfy delta >= 1");
  if (!u.positive())
    throw InputError("balance_F: field must be strictly positive");
}

}  // namespace

Vec balance_F_on_grid(const SpectralParams& par, const SphereField& u,
                      double delta, const Vec& xi) {
  check_balance_inputs(par, u, delta, xi);
  const int d = par.dim + 1;
  const double expo = (par.dim + 2.0 * par.order) / (2.0 * par.dim);
  const ConformalMap gamma = ConformalMap::dilation(delta, xi);
  const auto& grid = u.grid();
  const auto& su = u.samples();
  std::vector<std::vector<double>> comp(d);
  for (auto& c : comp) c.resize(su.size());
  for (int k = 0; k < grid.node_count(); ++k) {
    Vec w = grid.nodes().row(k).transpose();
    Vec image = gamma.apply(w);
    const double weight = std::pow(gamma.jacobian(w), expo) * su[k];
    for (int c = 0; c < d; ++c) comp[c][k] = image(c) * weight;
  }
  Vec f(d);
  for (int c = 0; c < d; ++c) f(c) = grid.integrate(comp[c]);
  return f;
}

Vec balance_F_radial(const SpectralParams& par, const SphereField& u,
                     double delta, const Vec& xi) {
  check_balance_inputs(par, u, delta, xi);
  const int n = par.dim;
  const double s = par.order;
  const Mat rot = rotation_to_pole(Vec(xi / xi.norm()));
  const Mat rot_t = rot.transpose();
  const auto& eval = u.evaluator();

  // directions of the equatorial sphere S^(n-1) with quadrature weights
  std::vector<Vec> dirs;
  std::vector<double> dir_w;
  if (n == 1) {
    Vec plus(1), minus(1);
    plus << 1.0;
    minus << -1.0;
    dirs = {plus, minus};
    dir_w = {1.0, 1.0};
  } else {
    const int m = std::max(64, 2 * u.grid().resolution());
    for (int j = 0; j < m; ++j) {
      const double phi = 2.0 * M_PI * j / m;
      Vec t(2);
      t << std::cos(phi), std::sin(phi);
      dirs.push_back(t);
      dir_w.push_back(2.0 * M_PI / m);
    }
  }

  const double d2m1 = delta * delta - 1.0;
  Vec total = Vec::Zero(n + 1);
  for (size_t j = 0; j < dirs.size(); ++j) {
    const Vec& theta = dirs[j];
    auto integrand = [&](double psi) -> Vec {
      const double ch = std::cos(0.5 * psi);
      const double sh = std::sin(0.5 * psi);
      const double q = 1.0 + d2m1 * ch * ch;
      const double scalar = std::pow(q, 0.5 * (2.0 * s - n)) *
                            std::pow(ch * sh, n - 1);
      // point seen by u: polar angle chi with tan(chi/2) = tan(psi/2)/delta
      const double chi = 2.0 * std::atan2(sh, delta * ch);
      Vec src(n + 1);
      src.head(n) = std::sin(chi) * theta;
      src(n) = std::cos(chi);
      const double uval = eval(Vec(rot_t * src));
      Vec out(n + 1);
      out.head(n) = std::sin(psi) * theta;
      out(n) = std::cos(psi);
      return (scalar * uval) * out;
    };
    total += dir_w[j] * tanh_sinh_vec(integrand, 0.0, M_PI, 1e-11);
  }
  const double pref =
      std::pow(2.0, n - 1) * std::pow(delta, 0.5 * (n - 2.0 * s));
  return pref * (rot_t * total);
}

Vec balance_F(const SpectralParams& par, const SphereField& u, double delta,
              const Vec& xi) {
  if (delta <= 10.0) return balance_F_on_grid(par, u, delta, xi);
  return balance_F_radial(par, u, delta, xi);
}

Vec balance_G(const SpectralParams& par, const SphereField& u, double delta,
              const Vec& xi) {
  check_balance_inputs(par, u, delta, xi);
  const Vec center = xi / xi.norm();
  const double u_at_center = u(center);
  if (!(u_at_center > 0.0))
    throw InputError("balance_G: field must be positive at the center");
  const double scale = std::pow(delta, 0.5 * (par.dim - 2.0 * par.order));
  const double c_bal = std::pow(2.0, 0.5 * (par.dim - 2.0 * par.order)) *
                       balance_limit_constant(par);
  return (scale / (c_bal * u_at_center)) * balance_F(par, u, delta, center);
}

}  // namespace sphstab
