#include "sphstab/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace sphstab {

namespace {

// Degree implied by a packed coefficient vector, or -1 if the size is not
// a valid packed length for this sphere dimension.
int degree_from_size(int dim, Eigen::Index size) {
  if (size <= 0) return -1;
  if (dim == 1) {
    if (size % 2 == 0) return -1;
    return static_cast<int>((size - 1) / 2);
  }
  const auto root = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(size))));
  if (root * root != size) return -1;
  return static_cast<int>(root - 1);
}

Vec pad_coeffs(const HarmonicBasis& basis, const Vec& packed) {
  Vec full = Vec::Zero(basis.coeff_count());
  full.head(packed.size()) = packed;
  return full;
}

std::string describe_node(const QuadratureGrid& grid, int index, double value) {
  std::ostringstream os;
  os << "node " << index << " at (";
  for (int k = 0; k <= grid.dim(); ++k) {
    if (k) os << ", ";
    os << grid.nodes()(index, k);
  }
  os << ") where the sample is " << value;
  return os.str();
}

void require_strictly_positive(const SphereField& u, const char* op,
                               const char* role) {
  if (u.min_sample() > kPositivityFloor) return;
  std::ostringstream os;
  os << op << ": field " << role << " must be strictly positive, but "
     << describe_node(u.grid(), u.min_sample_index(), u.min_sample());
  throw InputError(os.str());
}

// Orthonormal tangent frame at the unit vector omega; columns span the
// tangent space.
Mat tangent_frame(const Vec& omega) {
  const int d = static_cast<int>(omega.size());
  Mat frame(d, d - 1);
  if (d == 2) {
    frame(0, 0) = -omega(1);
    frame(1, 0) = omega(0);
    return frame;
  }
  int k = 0;
  for (int i = 1; i < d; ++i)
    if (std::abs(omega(i)) < std::abs(omega(k))) k = i;
  Vec t1 = Vec::Zero(d);
  t1(k) = 1.0;
  t1 -= omega(k) * omega;
  t1.normalize();
  frame.col(0) = t1;
  // d == 3: complete with the cross product.
  frame(0, 1) = omega(1) * t1(2) - omega(2) * t1(1);
  frame(1, 1) = omega(2) * t1(0) - omega(0) * t1(2);
  frame(2, 1) = omega(0) * t1(1) - omega(1) * t1(0);
  return frame;
}

}  // namespace

std::shared_ptr<const SphereField::State> SphereField::build(
    int dim, int level, Evaluator f, std::vector<double> samples, Vec born) {
  auto state = std::make_shared<State>();
  state->dim = dim;
  state->level = level;
  state->ws = ::sphstab::workspace(dim, level);
  state->eval = std::move(f);
  state->samples =
      samples.empty() ? state->ws.grid->sample(state->eval) : std::move(samples);
  const auto& s = state->samples;
  int min_index = 0;
  for (int i = 1; i < static_cast<int>(s.size()); ++i)
    if (s[i] < s[min_index]) min_index = i;
  state->min_index = min_index;
  state->min_sample = s[min_index];
  state->integral = state->ws.grid->integrate(s);
  state->coeffs = state->ws.basis->analyze(s);
  state->bands = state->ws.basis->band_energies(state->coeffs);
  state->born = std::move(born);
  return state;
}

SphereField::SphereField(int dim, Evaluator f, int level)
    : state_(build(dim, level, std::move(f), {}, Vec())) {}

SphereField SphereField::from_coeffs(int dim, const Vec& packed, int level) {
  const int degree = degree_from_size(dim, packed.size());
  if (degree < 0)
    throw InputError(
        "from_coeffs: coefficient vector length does not match any packed "
        "degree for this sphere dimension");
  if (degree > degree_for_level(dim, max_level(dim)))
    throw InputError("from_coeffs: degree exceeds the supported truncation");
  const int lvl = std::max(level, level_for_degree(dim, degree));
  Workspace ws = ::sphstab::workspace(dim, lvl);
  Vec full = pad_coeffs(*ws.basis, packed);
  std::vector<double> samples = ws.basis->synthesize(full);
  Evaluator eval = [basis = ws.basis, full](Eigen::Ref<const Vec> omega) {
    return basis->synth_at(full, omega);
  };
  return SphereField(build(dim, lvl, std::move(eval), std::move(samples),
                           std::move(full)));
}

SphereField SphereField::at_level(int new_level) const {
  if (new_level == level()) return *this;
  if (band_limited()) return from_coeffs(dim(), born_coeffs(), new_level);
  return SphereField(dim(), evaluator(), new_level);
}

SphereField SphereField::combine(double a, double b,
                                 const SphereField& other) const {
  if (dim() != other.dim())
    throw InputError("combine: fields live on spheres of different dimension");
  const int lvl = std::max(level(), other.level());
  const SphereField u = at_level(lvl);
  const SphereField v = other.at_level(lvl);
  Evaluator eval = [a, b, eu = u.evaluator(),
                    ev = v.evaluator()](Eigen::Ref<const Vec> omega) {
    return a * eu(omega) + b * ev(omega);
  };
  const auto& su = u.samples();
  const auto& sv = v.samples();
  std::vector<double> samples(su.size());
  for (size_t i = 0; i < samples.size(); ++i)
    samples[i] = a * su[i] + b * sv[i];
  Vec born;
  if (u.band_limited() && v.band_limited())
    born = a * u.born_coeffs() + b * v.born_coeffs();
  return SphereField(
      build(dim(), lvl, std::move(eval), std::move(samples), std::move(born)));
}

SphereField SphereField::scaled(double c) const {
  Evaluator eval = [c, e = evaluator()](Eigen::Ref<const Vec> omega) {
    return c * e(omega);
  };
  std::vector<double> s = samples();
  for (double& x : s) x *= c;
  Vec born = band_limited() ? Vec(c * born_coeffs()) : Vec();
  return SphereField(
      build(dim(), level(), std::move(eval), std::move(s), std::move(born)));
}

double pnorm(const SphereField& u, double q) {
  if (q == 0.0) throw InputError("pnorm: exponent must be nonzero");
  if (q < 1.0) {
    // Negative and fractional exponents both require strict positivity.
    if (u.min_sample() <= kPositivityFloor) {
      std::ostringstream os;
      os << "pnorm: exponent " << q
         << " requires a strictly positive field, but "
         << describe_node(u.grid(), u.min_sample_index(), u.min_sample());
      throw InputError(os.str());
    }
  }
  const auto& s = u.samples();
  std::vector<double> powed(s.size());
  for (size_t i = 0; i < s.size(); ++i) powed[i] = std::pow(s[i], q);
  const double moment = u.grid().integrate(powed);
  if (!(moment > 0.0) || !std::isfinite(moment))
    throw NumericsError("pnorm: power moment is not a positive finite number");
  return std::pow(moment, 1.0 / q);
}

double reverse_holder_gap(const SphereField& f, const SphereField& g,
                          double q) {
  if (!(q > 1.0))
    throw InputError("reverse_holder_gap: requires exponent q > 1");
  if (f.dim() != g.dim())
    throw InputError(
        "reverse_holder_gap: fields live on spheres of different dimension");
  const int lvl = std::max(f.level(), g.level());
  const SphereField ff = f.at_level(lvl);
  const SphereField gg = g.at_level(lvl);
  require_strictly_positive(ff, "reverse_holder_gap", "f");
  require_strictly_positive(gg, "reverse_holder_gap", "g");
  const auto& sf = ff.samples();
  const auto& sg = gg.samples();
  std::vector<double> prod(sf.size());
  for (size_t i = 0; i < prod.size(); ++i) prod[i] = sf[i] * sg[i];
  const double cross = ff.grid().integrate(prod);
  return cross - pnorm(ff, 1.0 / q) * pnorm(gg, -1.0 / (q - 1.0));
}

double min_on_sphere(const SphereField& u) {
  const auto& grid = u.grid();
  const Vec omega0 = grid.nodes().row(u.min_sample_index()).transpose();
  const Mat frame = tangent_frame(omega0);
  const int nv = static_cast<int>(frame.cols());
  const auto& eval = u.evaluator();

  auto chart = [&](const Vec& x) -> double {
    Vec p = omega0 + frame * x;
    p.normalize();
    return eval(p);
  };

  Vec x = Vec::Zero(nv);
  double fx = chart(x);
  const double grad_step = 1e-6;
  const double hess_step = 1e-4;
  const double max_step = 0.5;

  for (int iter = 0; iter < 60; ++iter) {
    Vec gradient(nv);
    for (int i = 0; i < nv; ++i) {
      Vec xp = x, xm = x;
      xp(i) += grad_step;
      xm(i) -= grad_step;
      gradient(i) = (chart(xp) - chart(xm)) / (2.0 * grad_step);
    }
    if (gradient.lpNorm<Eigen::Infinity>() <
        1e-12 * std::max(1.0, std::abs(fx)))
      break;

    Mat hessian(nv, nv);
    for (int i = 0; i < nv; ++i) {
      for (int j = i; j < nv; ++j) {
        Vec xpp = x, xpm = x, xmp = x, xmm = x;
        xpp(i) += hess_step;
        xpp(j) += hess_step;
        xpm(i) += hess_step;
        xpm(j) -= hess_step;
        xmp(i) -= hess_step;
        xmp(j) += hess_step;
        xmm(i) -= hess_step;
        xmm(j) -= hess_step;
        hessian(i, j) = hessian(j, i) =
            (chart(xpp) - chart(xpm) - chart(xmp) + chart(xmm)) /
            (4.0 * hess_step * hess_step);
      }
    }

    Vec direction;
    Eigen::LLT<Mat> llt(hessian);
    if (llt.info() == Eigen::Success)
      direction = llt.solve(-gradient);
    else
      direction = -gradient;
    if (direction.dot(gradient) >= 0.0) direction = -gradient;
    const double norm = direction.norm();
    if (norm > max_step) direction *= max_step / norm;

    double t = 1.0;
    bool improved = false;
    for (int half = 0; half < 45; ++half) {
      const double trial = chart(x + t * direction);
      if (trial < fx) {
        x += t * direction;
        fx = trial;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) break;
  }
  return std::min(fx, u.min_sample());
}

}  // namespace sphstab
