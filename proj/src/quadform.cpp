#include "sphstab/quadform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sphstab {

namespace {

// Convergence thresholds for the truncated spectral sum.
constexpr double kTailRatioTol = 1e-8;
// Contributions this far below the gross scale are treated as roundoff when
// judging whether the tail decays.
constexpr double kNoiseFloorRel = 1e-14;
// The tail must decay monotonically over this many trailing degrees.
constexpr int kDecayWindow = 8;

SpectralDiagnostics scan_bands(const std::vector<double>& bands,
                               const SpectralParams& par) {
  const int top = static_cast<int>(bands.size()) - 1;
  SpectralDiagnostics diag;
  diag.truncation_degree = top;
  diag.band_contributions.resize(top + 1);
  for (int l = 0; l <= top; ++l)
    diag.band_contributions[l] = eigenvalue(par, l) * bands[l];

  std::vector<double> pos, neg;
  for (double c : diag.band_contributions) (c >= 0.0 ? pos : neg).push_back(c);
  diag.positive_part = pairwise_sum(pos);
  diag.negative_part = pairwise_sum(neg);
  const double total = pairwise_sum(diag.band_contributions);
  const double gross = diag.positive_part - diag.negative_part;

  const double tail = std::abs(diag.band_contributions[top]);
  if (tail == 0.0) {
    diag.tail_ratio = 0.0;
  } else if (total == 0.0) {
    diag.tail_ratio = std::numeric_limits<double>::infinity();
  } else {
    diag.tail_ratio = tail / std::abs(total);
  }

  const double floor = kNoiseFloorRel * gross;
  bool decaying = true;
  for (int l = std::max(0, top - kDecayWindow + 1); l < top; ++l) {
    const double cur = std::max(std::abs(diag.band_contributions[l]), floor);
    const double nxt = std::max(std::abs(diag.band_contributions[l + 1]), floor);
    if (nxt > cur) {
      decaying = false;
      break;
    }
  }
  diag.converged = diag.tail_ratio < kTailRatioTol && decaying;
  return diag;
}

}  // namespace

double diagnostics_scale(const SpectralDiagnostics& diag) {
  return diag.positive_part - diag.negative_part;
}

QuadFormResult a2s(const SphereField& u, const SpectralParams& par) {
  if (u.dim() != par.dim)
    throw InputError("a2s: field dimension does not match the parameters");
  const int top_level = max_level(par.dim);
  for (int lvl = u.level();; ++lvl) {
    const SphereField w = (lvl == u.level()) ? u : u.at_level(lvl);
    SpectralDiagnostics diag = scan_bands(w.band_energies(), par);
    if (diag.converged || lvl >= top_level) {
      QuadFormResult res;
      res.diag = std::move(diag);
      res.value = pairwise_sum(res.diag.band_contributions);
      return res;
    }
  }
}

double a2s_value(const SphereField& u, const SpectralParams& par) {
  return a2s(u, par).value;
}

namespace {

// packed index range [begin, end) of the degree-l block
std::pair<int, int> degree_block(int n, int l) {
  if (n == 1) return l == 0 ? std::pair{0, 1} : std::pair{2 * l - 1, 2 * l + 1};
  return {l * l, (l + 1) * (l + 1)};
}

}  // namespace

double a2s_bilinear(const SphereField& u, const SphereField& v,
                    const SpectralParams& par) {
  if (u.dim() != v.dim() || u.dim() != par.dim)
    throw InputError("a2s_bilinear: dimension mismatch");
  const int top_level = max_level(par.dim);
  for (int lvl = std::max(u.level(), v.level());; ++lvl) {
    const SphereField a = u.at_level(lvl);
    const SphereField b = v.at_level(lvl);
    const auto& ea = a.band_energies();
    const auto& eb = b.band_energies();
    const int top = static_cast<int>(ea.size()) - 1;
    std::vector<double> cross(top + 1), bound(top + 1);
    std::vector<double> ga(top + 1), gb(top + 1);
    for (int l = 0; l <= top; ++l) {
      const auto [lo, hi] = degree_block(par.dim, l);
      const double alpha = eigenvalue(par, l);
      cross[l] =
          alpha * a.coeffs().segment(lo, hi - lo).dot(
                      b.coeffs().segment(lo, hi - lo));
      bound[l] = std::abs(alpha) * std::sqrt(ea[l] * eb[l]);
      ga[l] = std::abs(alpha) * ea[l];
      gb[l] = std::abs(alpha) * eb[l];
    }
    // Convergence is judged on the band-wise product bound, which dominates
    // the possibly oscillating cross terms; the yardstick pairs each field's
    // own gross scale so roundoff bands are clamped even when the two
    // spectra barely overlap.
    const double yard = std::sqrt(pairwise_sum(ga) * pairwise_sum(gb));
    const double floor = 1e-14 * yard;
    bool decaying = true;
    for (int l = std::max(0, top - 7); l < top; ++l)
      if (std::max(bound[l + 1], floor) > std::max(bound[l], floor)) {
        decaying = false;
        break;
      }
    const bool tail_ok = bound[top] <= std::max(1e-8 * yard, 0.0);
    if (tail_ok && decaying) return pairwise_sum(cross);
    if (lvl >= top_level)
      throw NumericsError(
          "a2s_bilinear: spectral tail did not converge by degree " +
          std::to_string(top));
  }
}

double deficit(const SphereField& u, const SpectralParams& par) {
  const double norm = pnorm(u, par.p);
  const QuadFormResult q = a2s(u, par);
  if (!q.diag.converged)
    throw NumericsError(
        "deficit: spectral tail did not converge by degree " +
        std::to_string(q.diag.truncation_degree) +
        " (tail ratio " + std::to_string(q.diag.tail_ratio) + ")");
  return q.value - sharp_constant(par) * norm * norm;
}

double field_scale(const SphereField& u, const SpectralParams& par) {
  return diagnostics_scale(a2s(u, par).diag);
}

}  // namespace sphstab
