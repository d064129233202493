// Stability quotient of the reverse inequality and its probes: the quotient
// report (deficit over minimal remainder energy), local expansion probes
// along u = 1 + eps*rho, the sharpness scan in the upper parameter window,
// the strict-inequality slope probe, a two-peak concentration study, and a
// projected-descent explorer for minimizing sequences.
#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "sphstab/decompose.hpp"

namespace sphstab {

// Full audit of the quotient for one field: numerator (deficit),
// denominator (minimal remainder energy over the enumerated critical
// points), their ratio, and the diagnostics needed to trust both.
struct StabilityReport {
  SpectralParams params;
  double deficit = 0.0;
  double distance = 0.0;  // minimal remainder energy
  double quotient = 0.0;  // deficit / distance
  double min_u = 0.0;     // refined minimum of the input (positivity margin)
  // Relative drift of the quotient under a seeded random conformal map and
  // rescaling; the quotient is invariant under both, so this is a live
  // self-check carried in every report.
  double invariance_residual = 0.0;
  Bubble best;                     // profile of the distance-attaining point
  double best_residual_norm = 0.0;
  int n_critical = 0;              // number of enumerated critical points
  int d_multiplicity = 0;          // points tied at the minimal energy
  bool complete = false;           // multistart completeness flag
  SpectralDiagnostics diag;        // spectral scan behind the deficit
};

struct QuotientOptions {
  int budget = 16;                 // multistart budget for the enumeration
  std::uint64_t seed = 20260819ull;
  bool invariance_check = true;    // set false to skip the extra solve
};

StabilityReport quotient(const SphereField& u, const SpectralParams& par,
                         const QuotientOptions& opt = {});

inline constexpr double kNoEntry = std::numeric_limits<double>::quiet_NaN();

// One row of a probe table.  Fields that do not apply to the probe kind
// stay NaN (left blank in CSV output); n_critical and d_multiplicity are
// populated by the two-peak study only.
struct ProbeRow {
  double epsilon = kNoEntry;
  double ell = kNoEntry;
  double beta = kNoEntry;
  double quotient = kNoEntry;
  double predicted = kNoEntry;
  double deficit = kNoEntry;
  double distance = kNoEntry;
  double min_u = kNoEntry;
  double tail_ratio = kNoEntry;
  bool converged = false;
  int n_critical = -1;
  int d_multiplicity = -1;
};

// 1 - eigenvalue(1) * ||rho||_2^2 / a2s[rho]: the limit of the quotient
// along u = 1 + eps*rho as eps -> 0, for rho with no degree-0/1 content.
double local_prediction(const SpectralParams& par, const SphereField& rho);

// Quotient of 1 + eps*rho for every eps in the list, against the local
// prediction.  rho must be mean-free with no degree-1 content; every
// 1 + eps*rho must stay positive.
std::vector<ProbeRow> probe_local(const SpectralParams& par,
                                  const SphereField& rho,
                                  const std::vector<double>& eps_list,
                                  int budget = 8,
                                  std::uint64_t seed = 20260819ull);

// Quotient of 1 + eps*Y_ell (zonal harmonic) for each ell, in the upper
// parameter window sigma in (1,2) where the predicted values
// 1 - eigenvalue(1)/eigenvalue(ell) stay above 1 and decrease toward it.
std::vector<ProbeRow> probe_sharpness(const SpectralParams& par,
                                      const std::vector<int>& ell_list,
                                      double eps, int budget = 8,
                                      std::uint64_t seed = 20260819ull);

struct StrictProbe {
  std::vector<ProbeRow> rows;
  double slope_measured = 0.0;   // least-squares slope of quotient vs eps
  double slope_predicted = 0.0;  // cubic-correction formula
  double intercept = 0.0;        // fitted quotient at eps = 0
  double fit_residual = 0.0;     // max |measured - fit| over the grid
  double cubic_integral = 0.0;   // integral of rho^3 (strictly positive)
  double min_over_signs = 0.0;   // minimal measured quotient on the grid
};

// First-order probe of the quotient along u = 1 + eps*(w1 w2 + w2 w3 + w3 w1)
// on the 2-sphere, lower parameter window only.  The fitted slope is
// compared against -eigenvalue(0)*(p-1)(p-2)/3 * (integral rho^3)/a2s[rho],
// and the minimum over the signed eps grid dips below the local constant.
StrictProbe probe_strict(
    const SpectralParams& par,
    const std::vector<double>& eps_list = {-0.05, -0.02, 0.02, 0.05},
    int budget = 8, std::uint64_t seed = 20260819ull);

// (1 + beta*w_n)^((n-2s)/2) + (1 - beta*w_n)^((n-2s)/2): two antipodal
// peaks that sharpen as beta -> 1.  level < 0 picks the refinement from the
// field's spectral decay rate; the pick caps at the registry maximum, where
// the convergence flags take over.
SphereField two_peak_field(const SpectralParams& par, double beta,
                           int level = -1);

// Quotient, critical-point count, and attained-minimum multiplicity of the
// two-peak family over a beta grid.  A beta whose spectral tail cannot be
// resolved yields a flagged row (converged = false, no fabricated numbers).
std::vector<ProbeRow> bubble_study(const SpectralParams& par,
                                   const std::vector<double>& beta_list,
                                   int budget = 8,
                                   std::uint64_t seed = 20260819ull);

// Pairing of u against the conjugate profile power at t*nu, normalized by
// u(nu) * (1-t)^(n/(2p)); approaches the closed-form concentration constant
// as t -> 1.
double concentration_ratio(const SphereField& u, const SpectralParams& par,
                           const Vec& nu, double t);

struct ExplorerOptions {
  int max_band = 4;    // highest harmonic band in the descent space (<= 12)
  int iterations = 20;
  std::uint64_t seed = 20260819ull;
  double positivity_margin = 1e-3;  // reject steps with min u at or below
  int budget = 8;      // enumeration budget for the per-step audits
};

struct ExplorerStep {
  int iteration = 0;   // 0 is the initial point
  double quotient = 0.0;
  double deficit = 0.0;
  // Minimal remainder energy from a full critical-point enumeration; every
  // recorded step is audited this way (warm single-branch estimates are
  // used only inside line-search trials and finite differences).
  double distance = 0.0;
  double min_u = 0.0;
  double step_size = 0.0;  // accepted line-search step (0 at the ends)
  std::vector<double> band_energies;  // spectral profile of u - 1
};

struct ExplorerResult {
  std::vector<ExplorerStep> trajectory;
  bool stalled = false;             // line search found no downhill step
  bool reached_below_local = false; // some step dipped under local_prediction
  double final_quotient = 0.0;      // audited value at the final point
  double final_distance = 0.0;
  SphereField final_field;
};

// Projected descent on the quotient over harmonic coefficients of bands
// 2..max_band with u = 1 + rho kept positive; after each accepted step the
// field is pulled back so its best profile is the constant, and re-projected
// onto the descent bands.  A study tool: trajectories are diagnostics, not
// attainment claims.
ExplorerResult explore_min(const SpectralParams& par,
                           const SphereField& init_rho,
                           const ExplorerOptions& opt = {});
// Same, from the default seed direction 0.1*(w1 w2 + w2 w3 + w3 w1).
ExplorerResult explore_min(const SpectralParams& par,
                           const ExplorerOptions& opt = {});

}  // namespace sphstab
