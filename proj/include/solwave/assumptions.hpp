#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "solwave/errors.hpp"
#include "solwave/models.hpp"
#include "solwave/spectral.hpp"
#include "solwave/symbol.hpp"

namespace solwave {

struct ScanParams {
  double xi_max = 1e4;
  int samples = 4000;
};

/// Numeric verdict on the seven structural conditions a model must satisfy
/// for the small-amplitude theory to apply. Items (1-based, mirrored in
/// `passes`):
///   1  m1 = sup_{|xi| >= xi1} M < M(0)  and  m2 = sup_{|xi| <= xi1} M'' < 0
///   2  m3 = inf (M + M(0)) > 0
///   3  |M'|, |F'|, |G'|, |H'| grow no faster than <xi>^beta with beta < 1
///   4  F'', G'', H'' bounded near the origin
///   5  F bounded on the line
///   6  G smoothing H with order s_h >= 0
///   7  gamma != 0
struct AssumptionReport {
  double xi1 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double beta_est = 0.0;
  double s_h_est = 0.0;
  double gamma = 0.0;
  double predicted_exponent = 0.0;
  std::array<bool, 7> passes{};
  std::vector<std::string> notes;

  bool all_pass() const {
    for (bool p : passes)
      if (!p) return false;
    return true;
  }
};

/// Slope estimate for the derivative growth |sym'| ~ <xi>^beta, clamped at 0.
inline double estimate_growth(const MultiplierSymbol& sym) {
  return std::max(0.0, detail::derivative_growth_slope(sym));
}

/// Max over the four equation multipliers.
inline double estimate_growth(const SystemSpec& spec) {
  double beta = 0.0;
  for (const MultiplierSymbol* s : {&spec.M, &spec.F, &spec.G, &spec.H}) {
    beta = std::max(beta, estimate_growth(*s));
  }
  return beta;
}

/// Smoothing order: s_h from |H| ~ <xi>^{s_h}, with the paired requirement
/// that |G| decays at least like <xi>^{-s_h} (0.1 slack in the exponent).
inline double estimate_smoothing(const MultiplierSymbol& G,
                                 const MultiplierSymbol& H) {
  const double s_h = std::max(0.0, detail::value_growth_slope(H));
  const double g_slope = detail::value_growth_slope(G);
  if (g_slope > -s_h + 0.1) {
    throw SmoothingMismatch(
        "G decays like <xi>^" + std::to_string(g_slope) +
        " but H grows like <xi>^" + std::to_string(s_h));
  }
  return s_h;
}

namespace detail {

inline void check_scan_resolved(const std::vector<double>& v,
                                const char* what) {
  double lo = v[0], hi = v[0];
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  const double range = hi - lo;
  if (range == 0.0) return;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i] - v[i - 1]) > 0.01 * range) {
      throw ScanUnresolved(std::string(what) +
                           ": adjacent samples differ by more than 1% of the "
                           "sampled range");
    }
  }
}

/// 5-point central stencil for the second derivative.
inline double stencil_d2(const MultiplierSymbol& sym, double xi, double h) {
  return (-sym(xi - 2 * h) + 16.0 * sym(xi - h) - 30.0 * sym(xi) +
          16.0 * sym(xi + h) - sym(xi + 2 * h)) /
         (12.0 * h * h);
}

}  // namespace detail

inline AssumptionReport check_assumptions(const SystemSpec& spec, double xi1,
                                          const ScanParams& scan = {}) {
  if (!(xi1 > 0.0)) throw Error("xi1 must be positive");
  if (!(scan.xi_max > xi1)) throw Error("xi_max must exceed xi1");
  if (scan.samples < 1000) throw Error("need at least 1000 scan samples");

  AssumptionReport rep;
  rep.xi1 = xi1;
  const OriginData m_origin = spec.M.origin_data();
  const double m0 = m_origin.value;

  // m1: log-spaced scan of M over [xi1, xi_max]; linear spacing cannot
  // resolve the fast initial decay of the water-wave symbols at this count
  std::vector<double> m_scan(scan.samples);
  const double ratio = scan.xi_max / xi1;
  for (int i = 0; i < scan.samples; ++i) {
    const double t = static_cast<double>(i) / (scan.samples - 1);
    m_scan[i] = spec.M(xi1 * std::pow(ratio, t));
  }
  detail::check_scan_resolved(m_scan, "M tail scan");
  rep.m1 = *std::max_element(m_scan.begin(), m_scan.end());
  if (spec.M.growth_hint() && *spec.M.growth_hint() > 0.0) {
    rep.m1 = std::numeric_limits<double>::infinity();
    rep.notes.push_back("M carries a positive growth hint; m1 diverges");
  }

  // m2: stencil scan of M'' over [0, xi1]
  const double h = xi1 / 2000.0;
  const int d2_samples = std::max(1000, scan.samples / 4);
  std::vector<double> d2_scan(d2_samples);
  for (int i = 0; i < d2_samples; ++i) {
    const double xi = xi1 * i / (d2_samples - 1);
    d2_scan[i] = detail::stencil_d2(spec.M, xi, h);
  }
  detail::check_scan_resolved(d2_scan, "M'' scan");
  rep.m2 = *std::max_element(d2_scan.begin(), d2_scan.end());

  // m3: min of M + M(0), linear near the origin then the log tail
  double m_min = m0;
  for (int i = 0; i < d2_samples; ++i) {
    m_min = std::min(m_min, spec.M(xi1 * i / (d2_samples - 1)));
  }
  for (double v : m_scan) m_min = std::min(m_min, v);
  rep.m3 = m_min + m0;

  rep.passes[0] = rep.m1 < m0 && rep.m2 < 0.0;
  rep.passes[1] = rep.m3 > 0.0;

  rep.beta_est = estimate_growth(spec);
  rep.passes[2] = rep.beta_est < 1.0;

  // near-origin boundedness of F'', G'', H''
  double d2_max = 0.0;
  for (const MultiplierSymbol* s : {&spec.F, &spec.G, &spec.H}) {
    for (int i = 0; i < 200; ++i) {
      const double xi = xi1 * i / 199.0;
      d2_max = std::max(d2_max, std::abs(detail::stencil_d2(*s, xi, h)));
    }
  }
  rep.passes[3] = std::isfinite(d2_max) && d2_max < 1e12;

  // boundedness of F on the line
  double f_max = 0.0;
  for (int i = 0; i < scan.samples; ++i) {
    const double t = static_cast<double>(i) / (scan.samples - 1);
    f_max = std::max(f_max, std::abs(spec.F(xi1 * std::pow(ratio, t))));
  }
  const double f_slope = detail::value_growth_slope(spec.F);
  rep.passes[4] = std::isfinite(f_max) && f_slope <= 0.05;

  try {
    rep.s_h_est = estimate_smoothing(spec.G, spec.H);
    rep.passes[5] = true;
  } catch (const SmoothingMismatch& err) {
    rep.s_h_est = std::max(0.0, detail::value_growth_slope(spec.H));
    rep.passes[5] = false;
    rep.notes.push_back(err.what());
  }

  rep.gamma = spec.gamma;
  rep.passes[6] = std::abs(rep.gamma) > 1e-12;

  const double b = rep.beta_est;
  rep.predicted_exponent = std::min(
      (3.0 - 2.0 * b) / (2.0 - b),
      4.0 - 2.0 * std::max(rep.s_h_est, spec.s_t));
  return rep;
}

/// Supremum over the grid frequencies of the defect in the small-amplitude
/// resolvent expansion
///   eps^2 / (M(0) - M''(0) eps^2 / 2 - M(eps xi))  ~  -2 / (M''(0) (1+xi^2)),
/// which the theory bounds by C eps^2.
inline double verify_inverse_approx(const SystemSpec& spec, double eps,
                                    const Grid& grid) {
  if (eps == 0.0) throw Error("eps must be nonzero");
  const OriginData m = spec.M.origin_data();
  const double omega = m.value - 0.5 * m.d2 * eps * eps;
  double sup = 0.0;
  for (int k = 0; k <= grid.size() / 2; ++k) {
    const double xi = grid.freq(k);
    const double denom = omega - spec.M(eps * xi);
    if (denom <= 0.0) {
      throw SpectrumCollision(
          xi, "omega_eps - M(eps xi) is not positive on the grid");
    }
    const double val =
        eps * eps / denom + 2.0 / (m.d2 * (1.0 + xi * xi));
    sup = std::max(sup, std::abs(val));
  }
  return sup;
}

}  // namespace solwave
