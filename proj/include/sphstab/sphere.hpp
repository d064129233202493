// Quadrature grids and real orthonormal harmonic bases on S^1 and S^2.
//
// Grids are product rules: uniform angles on S^1, Gauss-Legendre in the
// polar variable times uniform azimuth on S^2, sized so that products of
// two basis functions up to the supported degree integrate exactly.
// Bases cache the associated-Legendre tables at the grid nodes, so a full
// forward transform is a handful of small matrix products.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "sphstab/specialfn.hpp"

namespace sphstab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Evaluator = std::function<double(Eigen::Ref<const Vec>)>;

// Deterministic pairwise reduction; used for every plain quadrature sum so
// results are reproducible and accurate to ~log2(N) ulps.
double pairwise_sum(std::span<const double> v);

class QuadratureGrid {
 public:
  // n = 1: `resolution` uniform angles on the circle.
  // n = 2: `resolution` Gauss-Legendre polar nodes x 2*resolution azimuths.
  // Requires resolution >= 8.
  static std::shared_ptr<const QuadratureGrid> create(int n, int resolution);

  int dim() const { return n_; }
  int resolution() const { return resolution_; }
  int node_count() const { return static_cast<int>(weights_.size()); }
  // Largest degree L such that products of two degree-<=L basis functions
  // are integrated exactly.
  int supported_degree() const;

  const RowMat& nodes() const { return nodes_; }     // node_count x (n+1)
  const Vec& weights() const { return weights_; }

  // product structure (n = 2): node index = i * azimuth_count + j
  int polar_count() const { return polar_count_; }
  int azimuth_count() const { return azimuth_count_; }
  const std::vector<double>& polar_x() const { return polar_x_; }  // cos(theta_i)
  const std::vector<double>& polar_w() const { return polar_w_; }
  const std::vector<double>& azimuth_phi() const { return azimuth_phi_; }

  std::vector<double> sample(const Evaluator& f) const;
  double integrate(std::span<const double> samples) const;
  double integrate(const Evaluator& f) const;

 private:
  QuadratureGrid() = default;
  int n_ = 0;
  int resolution_ = 0;
  int polar_count_ = 0;
  int azimuth_count_ = 0;
  std::vector<double> polar_x_, polar_w_, azimuth_phi_;
  RowMat nodes_;
  Vec weights_;
};

// Gauss-Legendre rule on [-1, 1] (Newton iteration on the Legendre
// polynomial); exposed for tests.
void gauss_legendre(int count, std::vector<double>& x, std::vector<double>& w);

// Adaptive tanh-sinh (double-exponential) quadrature on (a, b).  Robust to
// integrable endpoint singularities; the mesh is halved until two passes
// agree to `tol` (relative, floored at `tol` absolute).  Throws
// NumericsError when the refinement limit is reached without agreement.
double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12);
// Same rule for vector-valued integrands (convergence in the max norm).
Vec tanh_sinh_vec(const std::function<Vec(double)>& f, double a, double b,
                  double tol = 1e-12);

class HarmonicBasis {
 public:
  HarmonicBasis(std::shared_ptr<const QuadratureGrid> grid, int max_degree);

  int dim() const { return grid_->dim(); }
  int max_degree() const { return max_degree_; }
  int coeff_count() const;
  const QuadratureGrid& grid() const { return *grid_; }
  std::shared_ptr<const QuadratureGrid> grid_ptr() const { return grid_; }

  // packed coefficient index; n = 2: l*l + l + m with m in [-l, l],
  // n = 1: 0 for l = 0, 2l-1 (cos) and 2l (sin) for l >= 1.
  int pack_index(int l, int m) const;
  int multiplicity(int l) const;

  // forward transform: samples at grid nodes -> packed coefficients
  Vec analyze(std::span<const double> samples) const;
  // inverse transform: packed coefficients -> samples at grid nodes
  std::vector<double> synthesize(const Vec& coeffs) const;
  // pointwise basis evaluation and pointwise synthesis
  double eval_basis(int l, int m, Eigen::Ref<const Vec> omega) const;
  double synth_at(const Vec& coeffs, Eigen::Ref<const Vec> omega) const;

  // per-degree energies ||P_l f||^2 = sum of squared coefficients
  std::vector<double> band_energies(const Vec& coeffs) const;

 private:
  std::shared_ptr<const QuadratureGrid> grid_;
  int max_degree_ = 0;
  // n = 2 tables
  std::vector<Mat> plm_;        // per m: polar_count x (L+1-m), normalized
  Mat cos_t_, sin_t_;           // azimuth_count x (L+1), raw trig values
  // n = 1 tables
  Mat circ_t_;                  // resolution x (2L+1) basis values
};

struct Workspace {
  std::shared_ptr<const QuadratureGrid> grid;
  std::shared_ptr<const HarmonicBasis> basis;
  int n = 0;
  int level = 0;
};

// Shared grid/basis registry.  Level 0 is the default working size
// (L = 64 on S^1, L = 48 on S^2); each level doubles the degree, capped at
// the global truncation bound L = 256.
int max_level(int n);
int degree_for_level(int n, int level);
int level_for_degree(int n, int degree);  // smallest level covering `degree`
Workspace workspace(int n, int level);
// Grid without a basis, for pure quadrature refinement.
std::shared_ptr<const QuadratureGrid> quadrature_grid(int n, int resolution);

}  // namespace sphstab
