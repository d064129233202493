#pragma once
// The indefinite spectral quadratic form, its bilinear polarization, and the
// inequality deficit, with adaptive control of the truncated tail.

#include <vector>

#include "sphstab/field.hpp"
#include "sphstab/specialfn.hpp"

namespace sphstab {

// Bookkeeping for the truncated spectral sum behind the quadratic form.
struct SpectralDiagnostics {
  int truncation_degree = 0;  // highest degree included in the sum
  // weighted per-degree contributions (eigenvalue times band energy)
  std::vector<double> band_contributions;
  double tail_ratio = 0.0;  // |last contribution| / |accumulated sum|
  bool converged = false;   // tail below 1e-8 and tail bands decaying
  double positive_part = 0.0;  // sum of the positive contributions
  double negative_part = 0.0;  // sum of the negative contributions (<= 0)
};

// Gross magnitude of the spectral sum, ignoring cancellation; the natural
// yardstick for tolerances on a 2-homogeneous indefinite form.
double diagnostics_scale(const SpectralDiagnostics& diag);

struct QuadFormResult {
  double value = 0.0;
  SpectralDiagnostics diag;
};

// Evaluates the quadratic form by summing weighted band energies, doubling
// the truncation degree until the tail converges or the registry cap is hit.
// A non-convergent tail is reported through the diagnostics flag, never
// silently dropped.
QuadFormResult a2s(const SphereField& u, const SpectralParams& par);

// Convenience accessor for the value alone.
double a2s_value(const SphereField& u, const SpectralParams& par);

// Bilinear polarization of the form; symmetric to the last bit.
double a2s_bilinear(const SphereField& u, const SphereField& v,
                    const SpectralParams& par);

// Quadratic-form value minus the sharp constant times the squared critical
// norm. Requires a strictly positive field and a converged spectral tail.
double deficit(const SphereField& u, const SpectralParams& par);

// Scale yardstick for a field: gross magnitude of its spectral sum.
double field_scale(const SphereField& u, const SpectralParams& par);

}  // namespace sphstab
