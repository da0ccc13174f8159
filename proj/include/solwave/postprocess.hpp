#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "solwave/assumptions.hpp"
#include "solwave/errors.hpp"
#include "solwave/solver.hpp"
#include "solwave/spectral.hpp"

namespace solwave {

/// Map a rescaled profile back to physical variables: v(x) = eps^2 V(eps x),
/// realized exactly by reinterpreting the grid as (L/eps, N) and scaling the
/// samples by eps^2.
inline Field unscale(const Field& V, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw Error("unscale requires eps in (0, 1]");
  return reinterpret_grid(V, eps, eps * eps);
}

/// Surface elevation from the second traveling-wave equation:
/// eta = omega Kc^-1 Kd v - Kc^-1 v^2 / 2.
inline Field reconstruct_eta(const MultiplierSymbol& Kc,
                             const MultiplierSymbol& Kd, const Field& v,
                             double omega) {
  const Field linear =
      omega * apply_multiplier(product_of({reciprocal_of(Kc), Kd}), v);
  const Field quadratic =
      apply_multiplier(reciprocal_of(Kc), multiply_dealiased(v, v));
  return linear - 0.5 * quadratic;
}

/// H^s norms of the two traveling-system equations evaluated at (eta, v):
///   r1 = ||-omega Kb eta + Ka v + eta v||,
///   r2 = ||-omega Kd v + Kc eta + v^2/2||.
inline std::pair<double, double> system_residual(
    const MultiplierSymbol& Ka, const MultiplierSymbol& Kb,
    const MultiplierSymbol& Kc, const MultiplierSymbol& Kd, const Field& eta,
    const Field& v, double omega, double s) {
  const Field r1 = (-omega) * apply_multiplier(Kb, eta) +
                   apply_multiplier(Ka, v) + multiply_dealiased(eta, v);
  const Field r2 = (-omega) * apply_multiplier(Kd, v) +
                   apply_multiplier(Kc, eta) +
                   0.5 * multiply_dealiased(v, v);
  return {hs_norm(r1, s), hs_norm(r2, s)};
}

struct RateStudy {
  std::vector<double> eps;
  std::vector<double> deviations;
  double fitted_slope = 0.0;
  double fit_r2 = 0.0;
  double predicted_exponent = 0.0;
};

/// Least-squares fit of log(deviation) against log(eps) across a sweep.
inline RateStudy rate_fit(const std::vector<SolveResult>& results,
                          const Field& sigma, double s,
                          const AssumptionReport& report) {
  RateStudy study;
  for (const SolveResult& r : results) {
    study.eps.push_back(r.eps);
    study.deviations.push_back(hs_norm(r.V - sigma, s));
  }
  std::vector<double> distinct = study.eps;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  if (distinct.size() < 3) {
    throw InsufficientData("rate fit needs at least 3 distinct eps values");
  }

  const int n = static_cast<int>(study.eps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(study.eps[i]);
    const double y = std::log(study.deviations[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  const double cov = n * sxy - sx * sy;
  const double var_x = n * sxx - sx * sx;
  const double var_y = n * syy - sy * sy;
  study.fitted_slope = cov / var_x;
  study.fit_r2 = var_y == 0.0 ? 1.0 : (cov * cov) / (var_x * var_y);
  study.predicted_exponent = report.predicted_exponent;
  return study;
}

}  // namespace solwave
