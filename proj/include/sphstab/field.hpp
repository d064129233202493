// Positive scalar fields on the sphere, the signed-exponent norms
// ||u||_q = (integral of u^q)^(1/q) for any nonzero q (including q < 0),
// the reverse Hoelder gap, and refined minimization over the sphere.
//
// A SphereField couples a pointwise evaluator with cached samples and a
// cached harmonic expansion on one of the shared registry workspaces, so
// downstream code can mix exact pointwise evaluation (for pullbacks) with
// fast spectral operations.  Copies are cheap (shared immutable state).
#pragma once

#include <vector>

#include "sphstab/sphere.hpp"

namespace sphstab {

// A field counts as strictly positive when its grid minimum exceeds this.
// Probes that deliberately push the minimum toward zero report the margin
// instead of erroring, so the floor only guards norm/power evaluations.
inline constexpr double kPositivityFloor = 1e-10;

class SphereField {
 public:
  // Samples `f` on the shared workspace for sphere dimension `dim` at
  // refinement `level`, and caches samples, harmonic coefficients,
  // per-degree energies, the grid minimum, and the integral.
  SphereField(int dim, Evaluator f, int level = 0);

  // Band-limited field from packed harmonic coefficients.  The degree is
  // inferred from the size ((L+1)^2 on S^2, 2L+1 on S^1); the level is
  // raised if needed so the workspace can represent degree L.
  static SphereField from_coeffs(int dim, const Vec& packed, int level = 0);

  // Same field, cached on the level-`new_level` workspace.  Band-limited
  // fields are re-synthesized exactly; others are re-sampled.
  SphereField at_level(int new_level) const;

  // a*(*this) + b*other; both fields must live on the same sphere.  The
  // result uses the finer of the two levels.
  SphereField combine(double a, double b, const SphereField& other) const;
  SphereField scaled(double c) const;

  int dim() const { return state_->dim; }
  int level() const { return state_->level; }
  const Workspace& workspace() const { return state_->ws; }
  const QuadratureGrid& grid() const { return *state_->ws.grid; }
  const HarmonicBasis& basis() const { return *state_->ws.basis; }
  const Evaluator& evaluator() const { return state_->eval; }

  const std::vector<double>& samples() const { return state_->samples; }
  // Minimum over grid nodes (the positivity record; see min_on_sphere for
  // the refined value).
  double min_sample() const { return state_->min_sample; }
  int min_sample_index() const { return state_->min_index; }
  bool positive() const { return state_->min_sample > kPositivityFloor; }
  double integral() const { return state_->integral; }

  // Packed harmonic coefficients up to the workspace degree, and the
  // per-degree energies ||P_l u||^2 they induce.
  const Vec& coeffs() const { return state_->coeffs; }
  const std::vector<double>& band_energies() const { return state_->bands; }

  // True when the field was constructed from coefficients (band-limited).
  bool band_limited() const { return state_->born.size() > 0; }
  // The defining coefficients for band-limited fields (empty otherwise).
  const Vec& born_coeffs() const { return state_->born; }

  double operator()(Eigen::Ref<const Vec> omega) const {
    return state_->eval(omega);
  }

 private:
  struct State {
    int dim = 0;
    int level = 0;
    Workspace ws;
    Evaluator eval;
    std::vector<double> samples;
    double min_sample = 0.0;
    int min_index = 0;
    double integral = 0.0;
    Vec coeffs;
    std::vector<double> bands;
    Vec born;  // packed defining coefficients when band-limited
  };
  explicit SphereField(std::shared_ptr<const State> s) : state_(std::move(s)) {}
  static std::shared_ptr<const State> build(int dim, int level, Evaluator f,
                                            std::vector<double> samples,
                                            Vec born);
  std::shared_ptr<const State> state_;
};

// (integral of u^q)^(1/q).  For q < 0 or q in (0,1) the field must be
// strictly positive on the grid; a violating sample raises InputError
// naming the offending node (index, coordinates, and value).
double pnorm(const SphereField& u, double q);

// integral(f*g) - ||f||_{1/q} * ||g||_{-1/(q-1)} for q > 1 and strictly
// positive f, g.  Nonnegative up to quadrature noise (about -1e-9); zero
// exactly when f is proportional to g^(-q/(q-1)).
double reverse_holder_gap(const SphereField& f, const SphereField& g,
                          double q);

// Minimum of u over the sphere: grid minimum refined by a damped Newton
// descent in a tangent chart around the best node.
double min_on_sphere(const SphereField& u);

}  // namespace sphstab
