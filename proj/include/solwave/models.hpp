#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "solwave/errors.hpp"
#include "solwave/symbol.hpp"

namespace solwave {

/// A complete traveling-wave model: the multipliers of the reduced single
/// equation (omega^2 - M^2) v = omega F v^2 + omega G(v H v) + T(v,v,v),
/// with the trilinear term factored through two multipliers as
///   T(f, g, h) = t_coeff * P( f * Q(g h) ).
///
/// Eliminating the surface elevation from the two-equation traveling system
/// forces t_coeff = -1/2 for every model built from kernels K_a..K_d; this is
/// what makes the reconstructed system residual vanish identically.
struct SystemSpec {
  std::string name;
  MultiplierSymbol M, F, G, H;
  MultiplierSymbol t_outer;  // P
  MultiplierSymbol t_inner;  // Q
  double t_coeff;
  double gamma;
  double beta;  // growth exponent of the symbol derivatives
  double s_h;   // smoothing order G gains / H loses
  double s_t;   // trilinear scaling order, ||T_eps|| ~ eps^{-s_t}
  double xi1;   // radius of the near-origin window for the M'' condition
  std::optional<std::array<MultiplierSymbol, 4>> kernels;  // K_a..K_d
};

/// gamma = -(F(0) + G(0) H(0)) / M''(0); the KdV coefficient.
inline double gamma_of(const MultiplierSymbol& M, const MultiplierSymbol& F,
                       const MultiplierSymbol& G, const MultiplierSymbol& H) {
  const OriginData m = M.origin_data();
  if (std::abs(m.d2) <= 1e-12 * std::max(1.0, std::abs(m.value))) {
    throw GammaZero("M''(0) vanishes, the KdV coefficient is undefined");
  }
  const double numer =
      F.origin_data().value + G.origin_data().value * H.origin_data().value;
  const double gamma = -numer / m.d2;
  if (std::abs(gamma) <= 1e-12) {
    throw GammaZero("computed gamma is zero");
  }
  return gamma;
}

namespace detail {

/// Largest safe near-origin window: 3/4 of the first sign change of M''
/// (5-point stencil scan), capped at 1. M'' typically turns positive once the
/// symbol's decaying tail takes over, and the window must stay clear of that.
inline double pick_xi1(const MultiplierSymbol& M) {
  const double h = 1e-3;
  auto d2 = [&](double xi) {
    return (-M(xi - 2 * h) + 16.0 * M(xi - h) - 30.0 * M(xi) +
            16.0 * M(xi + h) - M(xi + 2 * h)) /
           (12.0 * h * h);
  };
  for (double xi = 0.05; xi <= 4.0; xi += 0.005) {
    if (d2(xi) >= 0.0) {
      return xi <= 0.05 ? 1.0 : std::min(1.0, 0.75 * xi);
    }
  }
  return 1.0;
}

}  // namespace detail

/// Reduce a four-kernel system to the single-equation spec. Requires
/// K_b, K_c, K_d nonvanishing and K_a K_b^-1 K_c K_d^-1 >= 0 on the real
/// line; both are checked lazily at evaluation time.
inline SystemSpec reduce_system(const MultiplierSymbol& Ka,
                                const MultiplierSymbol& Kb,
                                const MultiplierSymbol& Kc,
                                const MultiplierSymbol& Kd,
                                std::string name = "reduced") {
  const MultiplierSymbol M =
      sqrt_of(product_of({Ka, reciprocal_of(Kb), Kc, reciprocal_of(Kd)}));
  const MultiplierSymbol F = affine_of(0.5, 0.0, reciprocal_of(Kd));
  const MultiplierSymbol G =
      product_of({reciprocal_of(Kb), Kc, reciprocal_of(Kd)});
  const MultiplierSymbol H = product_of({reciprocal_of(Kc), Kd});
  const MultiplierSymbol Q = reciprocal_of(Kc);

  const double gamma = gamma_of(M, F, G, H);
  double beta = 0.0;
  for (const MultiplierSymbol* sym : {&M, &F, &G, &H}) {
    beta = std::max(beta, detail::derivative_growth_slope(*sym));
  }
  const double s_h = std::max(0.0, detail::value_growth_slope(H));
  const double s_t = std::max(0.0, detail::value_growth_slope(Q)) +
                     std::max(0.0, detail::value_growth_slope(G));

  return SystemSpec{std::move(name),
                    M,
                    F,
                    G,
                    H,
                    /*t_outer=*/G,
                    /*t_inner=*/Q,
                    /*t_coeff=*/-0.5,
                    gamma,
                    std::max(beta, 0.0),
                    s_h,
                    s_t,
                    detail::pick_xi1(M),
                    std::array<MultiplierSymbol, 4>{Ka, Kb, Kc, Kd}};
}

/// The abcd family: K_a = 1 + a dxx, K_b = 1 - b dxx, K_c = 1 + c dxx,
/// K_d = 1 - d dxx. The four admissibility conditions are checked in order
/// and the first violation is reported.
inline SystemSpec make_abcd(double a, double b, double c, double d) {
  if (!(b >= 0.0 && d >= 0.0 && a <= 0.0 && c <= 0.0)) {
    throw AbcdConditionViolated(1, "need b, d >= 0 and a, c <= 0");
  }
  if (!(a + b + c + d > 0.0)) {
    throw AbcdConditionViolated(2, "need a + b + c + d > 0");
  }
  if (!(b * d > a * c || (b * d == 0.0 && a * c == 0.0))) {
    throw AbcdConditionViolated(3, "need bd > ac, or bd = ac = 0");
  }
  if (!(c < 0.0 || d == 0.0)) {
    throw AbcdConditionViolated(4, "need c < 0 or d = 0");
  }
  SystemSpec spec =
      reduce_system(quadratic_symbol(-a), quadratic_symbol(b),
                    quadratic_symbol(-c), quadratic_symbol(d), "abcd");
  // every admissible parameter set has bounded M', H and an eps-uniform T
  spec.beta = 0.0;
  spec.s_h = 0.0;
  spec.s_t = 0.0;
  return spec;
}

/// The three named water-wave models, all sharing M = sqrt(tanh D / D).
inline SystemSpec make_builtin(const std::string& name) {
  const MultiplierSymbol K = tanh_over_xi();
  const MultiplierSymbol sqrtK = sqrt_of(K);
  const MultiplierSymbol one = MultiplierSymbol::constant(1.0);
  const MultiplierSymbol half = MultiplierSymbol::constant(0.5);

  if (name == "asmp") {
    const double gamma = gamma_of(sqrtK, half, one, one);
    return SystemSpec{"asmp", sqrtK, half, one, one,
                      /*t_outer=*/one, /*t_inner=*/one, /*t_coeff=*/-0.5,
                      gamma, /*beta=*/0.0, /*s_h=*/0.0, /*s_t=*/0.0,
                      /*xi1=*/1.0,
                      std::array<MultiplierSymbol, 4>{K, one, one, one}};
  }
  if (name == "hp") {
    const MultiplierSymbol Kinv = reciprocal_of(K);
    const double gamma = gamma_of(sqrtK, half, K, Kinv);
    return SystemSpec{"hp", sqrtK, half, K, Kinv,
                      /*t_outer=*/K, /*t_inner=*/Kinv, /*t_coeff=*/-0.5,
                      gamma, /*beta=*/0.0, /*s_h=*/1.0, /*s_t=*/1.0,
                      /*xi1=*/1.0,
                      std::array<MultiplierSymbol, 4>{one, one, K, one}};
  }
  if (name == "ddk") {
    const MultiplierSymbol Kinv = reciprocal_of(K);
    const MultiplierSymbol K2 = product_of({K, K});
    const MultiplierSymbol KF = affine_of(0.5, 0.0, K);
    const double gamma = gamma_of(sqrtK, KF, K2, Kinv);
    return SystemSpec{"ddk", sqrtK, KF, K2, Kinv,
                      /*t_outer=*/K2, /*t_inner=*/one, /*t_coeff=*/-0.5,
                      gamma, /*beta=*/0.0, /*s_h=*/1.0, /*s_t=*/0.0,
                      /*xi1=*/1.0,
                      std::array<MultiplierSymbol, 4>{Kinv, Kinv, one, Kinv}};
  }
  throw UnknownModel("unknown model '" + name + "'");
}

}  // namespace solwave
