#pragma once
// Orthogonal decomposition against the profile manifold: the critical-point
// residual system, a damped-Newton branch solver, multistart enumeration,
// and the modified distance (minimal remainder energy).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sphstab/conformal.hpp"
#include "sphstab/quadform.hpp"

namespace sphstab {

// One critical point of the decomposition system: u = c * v + rho, where v
// is the unit profile at zeta and rho pairs to zero against the manifold's
// tangent frame under the quadratic form.
struct Decomposition {
  Bubble bubble;               // (c, zeta)
  SphereField rho;             // remainder u - c * v
  double residual_norm = 0.0;  // max |F_i| at the accepted point
  double rho_energy = 0.0;     // quadratic form of the remainder
  std::string branch;          // which start produced this point
};

struct CriticalPointSet {
  // sorted canonically: descending c, ties by lexicographic zeta
  std::vector<Decomposition> points;
  bool complete = false;  // every multistart branch converged somewhere
};

struct DistanceResult {
  double value = 0.0;          // minimal remainder energy over the set
  int argmin = 0;              // index into set.points (canonically first)
  std::vector<int> attaining;  // every index tied at the minimum
  CriticalPointSet set;
};

// Residual of the critical-point system at (c, zeta): component 0 pairs
// u - c * v against v, components 1..n+1 against the zeta-derivatives of v.
// All pairings are spectral.
Vec residual_F(const SphereField& u, double c, Eigen::Ref<const Vec> zeta,
               const SpectralParams& par);

// Integral of u against the conjugate power of the unit profile at zeta;
// critical points satisfy c = profile_pairing / area.
double profile_pairing(const SphereField& u, Eigen::Ref<const Vec> zeta,
                       const SpectralParams& par);

// Damped Newton with finite-difference Jacobian from the given start.
// Returns nothing when the iteration fails; never fabricates a point.
std::optional<Decomposition> solve_branch(const SphereField& u, double c0,
                                          Eigen::Ref<const Vec> zeta0,
                                          const SpectralParams& par,
                                          const std::string& label = "custom");

// Multistart enumeration: center-of-mass start, a coarse direction/radius
// mesh, and up to `budget` seeded random restarts, deduplicated and sorted.
// An empty set is a hard error: existence theory guarantees at least one.
CriticalPointSet enumerate_critical_points(const SphereField& u,
                                           const SpectralParams& par,
                                           int budget = 16,
                                           std::uint64_t seed = 20260819ull);

// Modified distance: minimum remainder energy over the enumerated critical
// points, with the energy identity cross-checked at every point.  Rejects
// fields lying on the manifold within tolerance.
DistanceResult distance(const SphereField& u, const SpectralParams& par,
                        int budget = 16, std::uint64_t seed = 20260819ull);

}  // namespace sphstab
