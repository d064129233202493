#include "sphstab/sphere.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace sphstab {

double pairwise_sum(std::span<const double> v) {
  const size_t n = v.size();
  if (n <= 32) {
    double acc = 0;
    for (double x : v) acc += x;
    return acc;
  }
  const size_t mid = n / 2;
  return pairwise_sum(v.first(mid)) + pairwise_sum(v.subspan(mid));
}

void gauss_legendre(int count, std::vector<double>& x, std::vector<double>& w) {
  x.assign(count, 0.0);
  w.assign(count, 0.0);
  const int half = (count + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (count + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < count; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = count * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[count - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[count - 1 - i] = w[i];
  }
}

namespace {

// One tanh-sinh pass at mesh h over (a, b): nodes x = m + r*tanh((pi/2)
// sinh(t)) for t = j*h.  Node positions are computed through their distance
// to the endpoints so that clustering near a and b survives rounding.
Vec tanh_sinh_pass(const std::function<Vec(double)>& f, double a, double b,
                   double h) {
  const double radius = 0.5 * (b - a);
  const double t_cut = 4.5;  // weights below ~1e-17 relative past this point
  const int count = static_cast<int>(std::ceil(t_cut / h));
  Vec center = f(0.5 * (a + b));
  const int out_dim = static_cast<int>(center.size());
  std::vector<std::vector<double>> parts(out_dim);
  for (int d = 0; d < out_dim; ++d)
    parts[d].push_back(M_PI_2 * center(d));  // t = 0 term: weight pi/2
  // Each side of the pair stops independently once its node rounds onto the
  // endpoint; a blow-up singularity is therefore only supported at an
  // endpoint equal to zero, where subnormals keep nodes distinct much longer.
  bool lo_live = true, hi_live = true;
  for (int j = 1; j <= count && (lo_live || hi_live); ++j) {
    const double t = j * h;
    const double z = M_PI_2 * std::sinh(t);
    const double q = std::exp(-2.0 * z);
    const double dist = radius * 2.0 * q / (1.0 + q);  // r*(1 - tanh(z))
    // weight = (pi/2) cosh(t) / cosh^2(z); the q-form avoids overflow
    const double weight =
        M_PI_2 * std::cosh(t) * 4.0 * q / ((1.0 + q) * (1.0 + q));
    if (!(weight > 0.0)) break;
    lo_live = lo_live && a + dist != a;
    hi_live = hi_live && b - dist != b;
    if (hi_live) {
      Vec hi = f(b - dist);
      for (int d = 0; d < out_dim; ++d) parts[d].push_back(weight * hi(d));
    }
    if (lo_live) {
      Vec lo = f(a + dist);
      for (int d = 0; d < out_dim; ++d) parts[d].push_back(weight * lo(d));
    }
  }
  Vec total(out_dim);
  for (int d = 0; d < out_dim; ++d)
    total(d) = h * radius * pairwise_sum(parts[d]);
  return total;
}

}  // namespace

Vec tanh_sinh_vec(const std::function<Vec(double)>& f, double a, double b,
                  double tol) {
  if (!(b > a)) throw InputError("tanh_sinh: requires b > a");
  Vec prev;
  double h = 1.0;
  for (int level = 0; level <= 9; ++level, h *= 0.5) {
    Vec cur = tanh_sinh_pass(f, a, b, h);
    if (level >= 2) {
      const double change = (cur - prev).lpNorm<Eigen::Infinity>();
      const double scale = std::max(1.0, cur.lpNorm<Eigen::Infinity>());
      if (change <= tol * scale) return cur;
    }
    prev = cur;
  }
  throw NumericsError("tanh_sinh: no convergence at the refinement limit");
}

double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  Vec r = tanh_sinh_vec(
      [&f](double x) {
        Vec v(1);
        v(0) = f(x);
        return v;
      },
      a, b, tol);
  return r(0);
}

std::shared_ptr<const QuadratureGrid> QuadratureGrid::create(int n, int resolution) {
  if (n != 1 && n != 2) {
    throw InputError("QuadratureGrid: only S^1 and S^2 are supported, got n = " +
                     std::to_string(n));
  }
  if (resolution < 8) {
    throw InputError("QuadratureGrid: resolution must be >= 8, got " +
                     std::to_string(resolution));
  }
  auto g = std::shared_ptr<QuadratureGrid>(new QuadratureGrid());
  g->n_ = n;
  g->resolution_ = resolution;
  if (n == 1) {
    g->polar_count_ = resolution;
    g->azimuth_count_ = 0;
    g->nodes_.resize(resolution, 2);
    g->weights_.resize(resolution);
    const double w = 2.0 * M_PI / resolution;
    for (int j = 0; j < resolution; ++j) {
      const double th = 2.0 * M_PI * j / resolution;
      g->nodes_(j, 0) = std::cos(th);
      g->nodes_(j, 1) = std::sin(th);
      g->weights_[j] = w;
      g->azimuth_phi_.push_back(th);
    }
  } else {
    gauss_legendre(resolution, g->polar_x_, g->polar_w_);
    g->polar_count_ = resolution;
    const int m = 2 * resolution;
    g->azimuth_count_ = m;
    g->azimuth_phi_.resize(m);
    for (int j = 0; j < m; ++j) g->azimuth_phi_[j] = 2.0 * M_PI * j / m;
    const int total = resolution * m;
    g->nodes_.resize(total, 3);
    g->weights_.resize(total);
    const double wphi = 2.0 * M_PI / m;
    for (int i = 0; i < resolution; ++i) {
      const double x = g->polar_x_[i];
      const double st = std::sqrt(std::max(0.0, 1.0 - x * x));
      for (int j = 0; j < m; ++j) {
        const int k = i * m + j;
        g->nodes_(k, 0) = st * std::cos(g->azimuth_phi_[j]);
        g->nodes_(k, 1) = st * std::sin(g->azimuth_phi_[j]);
        g->nodes_(k, 2) = x;
        g->weights_[k] = g->polar_w_[i] * wphi;
      }
    }
  }
  return g;
}

int QuadratureGrid::supported_degree() const {
  return n_ == 1 ? (resolution_ - 1) / 2 : resolution_ - 1;
}

std::vector<double> QuadratureGrid::sample(const Evaluator& f) const {
  std::vector<double> out(node_count());
  for (int k = 0; k < node_count(); ++k) {
    out[k] = f(nodes_.row(k).transpose());
  }
  return out;
}

double QuadratureGrid::integrate(std::span<const double> samples) const {
  if (static_cast<int>(samples.size()) != node_count()) {
    throw InputError("integrate: sample count does not match grid");
  }
  std::vector<double> terms(samples.size());
  for (size_t k = 0; k < samples.size(); ++k) terms[k] = samples[k] * weights_[k];
  return pairwise_sum(terms);
}

double QuadratureGrid::integrate(const Evaluator& f) const {
  const auto s = sample(f);
  return integrate(s);
}

HarmonicBasis::HarmonicBasis(std::shared_ptr<const QuadratureGrid> grid, int max_degree)
    : grid_(std::move(grid)), max_degree_(max_degree) {
  if (max_degree < 0) throw InputError("HarmonicBasis: max degree must be >= 0");
  if (max_degree > grid_->supported_degree()) {
    throw InputError("HarmonicBasis: degree " + std::to_string(max_degree) +
                     " exceeds grid's exact range " +
                     std::to_string(grid_->supported_degree()));
  }
  const int L = max_degree_;
  if (grid_->dim() == 2) {
    const int np = grid_->polar_count();
    plm_.resize(L + 1);
    for (int m = 0; m <= L; ++m) plm_[m].resize(np, L + 1 - m);
    for (int i = 0; i < np; ++i) {
      const double x = grid_->polar_x()[i];
      const double st = std::sqrt(std::max(0.0, 1.0 - x * x));
      // normalized associated Legendre recurrence (no Condon-Shortley sign):
      // pbar(m,m) -> pbar(m+1,m) -> upward in l
      double pmm = std::sqrt(1.0 / (4.0 * M_PI));
      for (int m = 0; m <= L; ++m) {
        if (m > 0) pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st;
        plm_[m](i, 0) = pmm;
        if (m < L) {
          double pl2 = pmm;
          double pl = std::sqrt(2.0 * m + 3.0) * x * pmm;
          plm_[m](i, 1) = pl;
          for (int l = m + 2; l <= L; ++l) {
            const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
            const double b = std::sqrt(((l - 1.0) * (l - 1.0) - static_cast<double>(m) * m) /
                                       (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
            const double pn = a * (x * pl - b * pl2);
            plm_[m](i, l - m) = pn;
            pl2 = pl;
            pl = pn;
          }
        }
      }
    }
    const int ma = grid_->azimuth_count();
    cos_t_.resize(ma, L + 1);
    sin_t_.resize(ma, L + 1);
    for (int j = 0; j < ma; ++j) {
      const double phi = grid_->azimuth_phi()[j];
      for (int m = 0; m <= L; ++m) {
        cos_t_(j, m) = std::cos(m * phi);
        sin_t_(j, m) = std::sin(m * phi);
      }
    }
  } else {
    const int res = grid_->resolution();
    circ_t_.resize(res, 2 * L + 1);
    const double c0 = 1.0 / std::sqrt(2.0 * M_PI);
    const double c1 = 1.0 / std::sqrt(M_PI);
    for (int j = 0; j < res; ++j) {
      const double th = grid_->azimuth_phi()[j];
      circ_t_(j, 0) = c0;
      for (int l = 1; l <= L; ++l) {
        circ_t_(j, 2 * l - 1) = c1 * std::cos(l * th);
        circ_t_(j, 2 * l) = c1 * std::sin(l * th);
      }
    }
  }
}

int HarmonicBasis::coeff_count() const {
  const int L = max_degree_;
  return dim() == 2 ? (L + 1) * (L + 1) : 2 * L + 1;
}

int HarmonicBasis::pack_index(int l, int m) const {
  if (dim() == 2) return l * l + l + m;
  if (l == 0) return 0;
  return m >= 0 ? 2 * l - 1 : 2 * l;  // n = 1: m = +1 cosine, m = -1 sine
}

int HarmonicBasis::multiplicity(int l) const {
  if (dim() == 2) return 2 * l + 1;
  return l == 0 ? 1 : 2;
}

Vec HarmonicBasis::analyze(std::span<const double> samples) const {
  if (static_cast<int>(samples.size()) != grid_->node_count()) {
    throw InputError("analyze: sample count does not match grid");
  }
  const int L = max_degree_;
  Vec coeffs = Vec::Zero(coeff_count());
  if (dim() == 1) {
    Eigen::Map<const Vec> f(samples.data(), samples.size());
    coeffs = circ_t_.transpose() * grid_->weights().cwiseProduct(f);
    return coeffs;
  }
  const int np = grid_->polar_count();
  const int ma = grid_->azimuth_count();
  Eigen::Map<const RowMat> f(samples.data(), np, ma);
  const double wphi = 2.0 * M_PI / ma;
  const Mat fc = f * cos_t_;  // np x (L+1)
  const Mat fs = f * sin_t_;
  Eigen::Map<const Vec> pw(grid_->polar_w().data(), np);
  const double r2 = std::sqrt(2.0);
  for (int m = 0; m <= L; ++m) {
    const Vec dc = pw.cwiseProduct(fc.col(m)) * wphi;
    const Vec cl = plm_[m].transpose() * dc;
    if (m == 0) {
      for (int l = 0; l <= L; ++l) coeffs[pack_index(l, 0)] = cl[l];
    } else {
      const Vec ds = pw.cwiseProduct(fs.col(m)) * wphi;
      const Vec sl = plm_[m].transpose() * ds;
      for (int l = m; l <= L; ++l) {
        coeffs[pack_index(l, m)] = r2 * cl[l - m];
        coeffs[pack_index(l, -m)] = r2 * sl[l - m];
      }
    }
  }
  return coeffs;
}

std::vector<double> HarmonicBasis::synthesize(const Vec& coeffs) const {
  const int L = max_degree_;
  if (coeffs.size() != coeff_count()) {
    throw InputError("synthesize: coefficient count mismatch");
  }
  if (dim() == 1) {
    const Vec f = circ_t_ * coeffs;
    return std::vector<double>(f.data(), f.data() + f.size());
  }
  const int np = grid_->polar_count();
  Mat gc = Mat::Zero(np, L + 1), gs = Mat::Zero(np, L + 1);
  const double r2 = std::sqrt(2.0);
  for (int m = 0; m <= L; ++m) {
    Vec cl(L + 1 - m), sl = Vec::Zero(L + 1 - m);
    for (int l = m; l <= L; ++l) {
      cl[l - m] = (m == 0 ? coeffs[pack_index(l, 0)] : r2 * coeffs[pack_index(l, m)]);
      if (m > 0) sl[l - m] = r2 * coeffs[pack_index(l, -m)];
    }
    gc.col(m) = plm_[m] * cl;
    if (m > 0) gs.col(m) = plm_[m] * sl;
  }
  RowMat f = gc * cos_t_.transpose() + gs * sin_t_.transpose();  // np x ma
  return std::vector<double>(f.data(), f.data() + f.size());
}

double HarmonicBasis::eval_basis(int l, int m, Eigen::Ref<const Vec> omega) const {
  if (l < 0 || l > max_degree_ || std::abs(m) > (dim() == 2 ? l : 1)) {
    throw InputError("eval_basis: invalid (l, m)");
  }
  if (dim() == 1) {
    const double th = std::atan2(omega[1], omega[0]);
    if (l == 0) return 1.0 / std::sqrt(2.0 * M_PI);
    return (m >= 0 ? std::cos(l * th) : std::sin(l * th)) / std::sqrt(M_PI);
  }
  const double x = omega[2];
  const double st = std::hypot(omega[0], omega[1]);
  const double phi = (st == 0.0) ? 0.0 : std::atan2(omega[1], omega[0]);
  const int am = std::abs(m);
  // recurrence up the m-diagonal, then up in l
  double pmm = std::sqrt(1.0 / (4.0 * M_PI));
  for (int mm = 1; mm <= am; ++mm) {
    pmm *= std::sqrt((2.0 * mm + 1.0) / (2.0 * mm)) * st;
  }
  double val = pmm;
  if (l > am) {
    double pl2 = pmm;
    double pl = std::sqrt(2.0 * am + 3.0) * x * pmm;
    for (int ll = am + 2; ll <= l; ++ll) {
      const double a = std::sqrt((4.0 * ll * ll - 1.0) /
                                 (static_cast<double>(ll) * ll - static_cast<double>(am) * am));
      const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - static_cast<double>(am) * am) /
                                 (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
      const double pn = a * (x * pl - b * pl2);
      pl2 = pl;
      pl = pn;
    }
    val = pl;
  }
  if (m == 0) return val;
  const double r2 = std::sqrt(2.0);
  return m > 0 ? r2 * val * std::cos(am * phi) : r2 * val * std::sin(am * phi);
}

double HarmonicBasis::synth_at(const Vec& coeffs, Eigen::Ref<const Vec> omega) const {
  double acc = 0;
  for (int l = 0; l <= max_degree_; ++l) {
    if (dim() == 1) {
      for (int m : l == 0 ? std::vector<int>{0} : std::vector<int>{1, -1}) {
        const int idx = pack_index(l, m);
        if (idx < coeffs.size() && coeffs[idx] != 0.0) {
          acc += coeffs[idx] * eval_basis(l, m, omega);
        }
      }
    } else {
      for (int m = -l; m <= l; ++m) {
        const int idx = pack_index(l, m);
        if (idx < coeffs.size() && coeffs[idx] != 0.0) {
          acc += coeffs[idx] * eval_basis(l, m, omega);
        }
      }
    }
  }
  return acc;
}

std::vector<double> HarmonicBasis::band_energies(const Vec& coeffs) const {
  const int L = max_degree_;
  std::vector<double> out(L + 1, 0.0);
  for (int l = 0; l <= L; ++l) {
    double e = 0;
    if (dim() == 1) {
      if (l == 0) {
        e = coeffs[0] * coeffs[0];
      } else {
        e = coeffs[2 * l - 1] * coeffs[2 * l - 1] + coeffs[2 * l] * coeffs[2 * l];
      }
    } else {
      for (int m = -l; m <= l; ++m) {
        const double c = coeffs[pack_index(l, m)];
        e += c * c;
      }
    }
    out[l] = e;
  }
  return out;
}

namespace {

std::mutex g_registry_mutex;
std::map<std::pair<int, int>, Workspace> g_workspaces;
std::map<std::pair<int, int>, std::shared_ptr<const QuadratureGrid>> g_grids;

}  // namespace

int max_level(int n) { return n == 1 ? 2 : 3; }

int degree_for_level(int n, int level) {
  const int base = (n == 1) ? 64 : 48;
  return std::min(base << level, 256);
}

int level_for_degree(int n, int degree) {
  for (int lv = 0; lv <= max_level(n); ++lv) {
    if (degree_for_level(n, lv) >= degree) return lv;
  }
  return max_level(n);
}

Workspace workspace(int n, int level) {
  if (n != 1 && n != 2) throw InputError("workspace: only n = 1, 2 supported");
  level = std::min(std::max(level, 0), max_level(n));
  std::lock_guard<std::mutex> lock(g_registry_mutex);
  const auto key = std::make_pair(n, level);
  auto it = g_workspaces.find(key);
  if (it != g_workspaces.end()) return it->second;
  const int L = degree_for_level(n, level);
  const int res = (n == 1) ? 2 * L + 1 : L + 1;
  Workspace ws;
  ws.n = n;
  ws.level = level;
  ws.grid = QuadratureGrid::create(n, res);
  ws.basis = std::make_shared<const HarmonicBasis>(ws.grid, L);
  g_workspaces.emplace(key, ws);
  return ws;
}

std::shared_ptr<const QuadratureGrid> quadrature_grid(int n, int resolution) {
  std::lock_guard<std::mutex> lock(g_registry_mutex);
  const auto key = std::make_pair(n, resolution);
  auto it = g_grids.find(key);
  if (it != g_grids.end()) return it->second;
  auto g = QuadratureGrid::create(n, resolution);
  g_grids.emplace(key, g);
  return g;
}

}  // namespace sphstab
