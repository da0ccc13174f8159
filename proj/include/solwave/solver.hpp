#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "solwave/errors.hpp"
#include "solwave/models.hpp"
#include "solwave/spectral.hpp"

namespace solwave {

struct SolveConfig {
  double s = 1.0;           // Sobolev index for residual norms
  double newton_tol = 1e-11;
  int max_iter = 25;
  double tail_tol = 1e-8;   // under-resolution guard on the update term
};

struct SolveResult {
  Field V;          // rescaled profile
  double eps;
  double omega;
  int iterations;
  double phi_norm;
  double deviation;           // ||V - sigma||_{H^s}
  double jacobian_condition;  // estimate from the last factorization
};

/// The KdV soliton sigma(x) = (3 / 2 gamma) sech^2(x/2), sampled even.
inline Field kdv_profile(double gamma, const Grid& grid) {
  if (gamma == 0.0) throw GammaZero("sigma requires gamma != 0");
  return Field::sample(
      grid,
      [gamma](double x) {
        const double c = 1.0 / std::cosh(0.5 * x);
        return 1.5 / gamma * c * c;
      },
      true);
}

/// Wave speed omega_eps = M(0) - M''(0) eps^2 / 2 (above M(0) when M'' < 0).
inline double omega_of(const SystemSpec& spec, double eps) {
  const OriginData m = spec.M.origin_data();
  return m.value - 0.5 * m.d2 * eps * eps;
}

namespace detail {

inline Field apply_table(const std::vector<double>& table, const Field& f) {
  const auto& s = f.spectrum();
  std::vector<std::complex<double>> out(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) out[k] = s[k] * table[k];
  return Field::from_spectrum(f.grid(), std::move(out), f.is_even());
}

/// Symbol tables for the fixed-point map at one (spec, grid, eps).
///
/// For eps != 0, inv_table holds eps^2 / (omega_eps^2 - M(eps xi_k)^2) and
/// the remaining tables sample the eps-scaled multipliers. For eps = 0 the
/// map degenerates to v - gamma J^-2 v^2 and only inv_table (then
/// gamma/(1+xi^2)) is used.
struct PhiContext {
  Grid grid;
  double eps;
  double omega;
  double t_weight;  // eps^2 * t_coeff
  double s;
  double tail_tol;
  bool limit;  // eps == 0
  std::vector<double> inv_table, f_t, g_t, h_t, q_t, p_t;

  static PhiContext build(const SystemSpec& spec, const Grid& grid, double eps,
                          double s, double tail_tol) {
    PhiContext ctx{grid, eps, 0.0, 0.0, s, tail_tol, eps == 0.0,
                   {}, {}, {}, {}, {}, {}};
    const int modes = grid.modes();
    ctx.inv_table.resize(modes);
    if (ctx.limit) {
      ctx.omega = spec.M.origin_data().value;
      for (int k = 0; k < modes; ++k) {
        const double xi = grid.freq(k);
        ctx.inv_table[k] = spec.gamma / (1.0 + xi * xi);
      }
      return ctx;
    }
    ctx.omega = omega_of(spec, eps);
    ctx.t_weight = eps * eps * spec.t_coeff;
    ctx.f_t.resize(modes);
    ctx.g_t.resize(modes);
    ctx.h_t.resize(modes);
    ctx.q_t.resize(modes);
    ctx.p_t.resize(modes);
    for (int k = 0; k < modes; ++k) {
      const double exi = eps * grid.freq(k);
      const double me = spec.M(exi);
      const double denom = ctx.omega * ctx.omega - me * me;
      if (denom <= 0.0) {
        throw SpectrumCollision(grid.freq(k),
                                "omega_eps^2 - M_eps^2 lost positivity");
      }
      ctx.inv_table[k] = eps * eps / denom;
      ctx.f_t[k] = spec.F(exi);
      ctx.g_t[k] = spec.G(exi);
      ctx.h_t[k] = spec.H(exi);
      ctx.q_t[k] = spec.t_inner(exi);
      ctx.p_t[k] = spec.t_outer(exi);
    }
    return ctx;
  }

  /// The update term u with Phi(v) = v - u.
  Field update_term(const Field& v) const {
    if (limit) {
      return apply_table(inv_table, multiply_dealiased(v, v));
    }
    const Field v2 = multiply_dealiased(v, v);
    const Field quad = omega * apply_table(f_t, v2);
    const Field bilin =
        omega *
        apply_table(g_t, multiply_dealiased(v, apply_table(h_t, v)));
    const Field tri =
        t_weight *
        apply_table(p_t, multiply_dealiased(v, apply_table(q_t, v2)));
    return apply_table(inv_table, quad + bilin + tri);
  }

  Field eval(const Field& v) const {
    const Field u = update_term(v);
    // the residual of a converged root is roundoff noise, so resolution is
    // judged on the update term (which tends to v itself at the root)
    const double tf = tail_fraction(u, s);
    if (tf > tail_tol) {
      throw GridUnderResolved(tf, "update term has spectral content beyond "
                                  "the dealiased band");
    }
    return v - u;
  }
};

/// Per-iterate cache for Jacobian actions: the fields that depend on v only.
struct JacobianCache {
  const PhiContext& ctx;
  Field v;
  std::optional<Field> h_v;   // H_eps v
  std::optional<Field> q_v2;  // Q_eps v^2

  JacobianCache(const PhiContext& context, const Field& v_in)
      : ctx(context), v(v_in) {
    if (!ctx.limit) {
      h_v = apply_table(ctx.h_t, v);
      q_v2 = apply_table(ctx.q_t, multiply_dealiased(v, v));
    }
  }

  Field apply(const Field& w) const {
    if (ctx.limit) {
      return w - apply_table(ctx.inv_table,
                             2.0 * multiply_dealiased(v, w));
    }
    const Field vw = multiply_dealiased(v, w);
    Field term = (2.0 * ctx.omega) * apply_table(ctx.f_t, vw);
    term = term + ctx.omega * apply_table(ctx.g_t,
                                          multiply_dealiased(w, *h_v));
    term = term +
           ctx.omega * apply_table(ctx.g_t,
                                   multiply_dealiased(
                                       v, apply_table(ctx.h_t, w)));
    // T(w,v,v) + T(v,w,v) + T(v,v,w) = P(w Q(v^2)) + 2 P(v Q(vw)), times c
    term = term + ctx.t_weight *
                      (apply_table(ctx.p_t, multiply_dealiased(w, *q_v2)) +
                       2.0 * apply_table(
                                 ctx.p_t,
                                 multiply_dealiased(
                                     v, apply_table(ctx.q_t, vw))));
    return w - apply_table(ctx.inv_table, term);
  }
};

inline Field basis_mode(const Grid& grid, int k) {
  std::vector<double> c(grid.modes(), 0.0);
  c[k] = 1.0;
  return Field::from_cosine_coeffs(grid, c);
}

inline Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<long>(v.size()));
}

}  // namespace detail

/// Phi(v, eps) for eps != 0; Phi(v, 0) = v - gamma J^-2 v^2 as the limit map.
inline Field phi_eval(const SystemSpec& spec, const Field& v, double eps,
                      double s = 1.0, double tail_tol = 1e-8) {
  return detail::PhiContext::build(spec, v.grid(), eps, s, tail_tol).eval(v);
}

/// Directional derivative of Phi at v applied to w.
inline Field phi_jacobian_apply(const SystemSpec& spec, const Field& v,
                                double eps, const Field& w) {
  const auto ctx =
      detail::PhiContext::build(spec, v.grid(), eps, 1.0, 1e300);
  return detail::JacobianCache(ctx, v).apply(w);
}

/// The limit linearization 1 - 2 gamma J^-2 (sigma .) applied to f.
inline Field calK_apply(double gamma, const Field& f) {
  if (gamma == 0.0) throw GammaZero("the operator requires gamma != 0");
  const Grid& grid = f.grid();
  const Field sigma = kdv_profile(gamma, grid);
  std::vector<double> jm2(grid.modes());
  for (int k = 0; k < grid.modes(); ++k) {
    const double xi = grid.freq(k);
    jm2[k] = 1.0 / (1.0 + xi * xi);
  }
  return f - 2.0 * gamma *
                 detail::apply_table(jm2, multiply_dealiased(sigma, f));
}

/// Smallest singular value of the limit linearization restricted to the even
/// cosine subspace (dense SVD of the assembled matrix).
inline double calK_min_singular(double gamma, const Grid& grid) {
  if (gamma == 0.0) throw GammaZero("the operator requires gamma != 0");
  const int modes = grid.modes();
  const Field sigma = kdv_profile(gamma, grid);
  std::vector<double> jm2(modes);
  for (int k = 0; k < modes; ++k) {
    const double xi = grid.freq(k);
    jm2[k] = 1.0 / (1.0 + xi * xi);
  }
  Eigen::MatrixXd K(modes, modes);
  for (int k = 0; k < modes; ++k) {
    const Field col = detail::basis_mode(grid, k) -
                      2.0 * gamma *
                          detail::apply_table(
                              jm2, multiply_dealiased(
                                       sigma, detail::basis_mode(grid, k)));
    K.col(k) = detail::to_vector(col.cosine_coeffs());
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(K);
  return svd.singularValues()(modes - 1);
}

/// Newton iteration on Phi(., eps) = 0 in the even cosine basis with a dense
/// Jacobian assembled column by column. One step halving is attempted when
/// the residual would grow; two consecutive growths abort.
inline SolveResult newton_solve(const SystemSpec& spec, double eps,
                                const Field& init,
                                const SolveConfig& config = {}) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw Error("newton_solve requires eps in (0, 1)");
  }
  const Grid grid = init.grid();
  const auto ctx =
      detail::PhiContext::build(spec, grid, eps, config.s, config.tail_tol);
  const Field sigma = kdv_profile(spec.gamma, grid);
  const int modes = grid.modes();

  Field V = project_even(init);
  Field residual = ctx.eval(V);
  double norm = hs_norm(residual, config.s);
  int iterations = 0;
  int growth_streak = 0;
  double condition = 0.0;

  while (norm > config.newton_tol) {
    if (iterations >= config.max_iter) {
      throw NewtonDiverged(iterations, norm);
    }
    const detail::JacobianCache cache(ctx, V);
    Eigen::MatrixXd J(modes, modes);
    for (int k = 0; k < modes; ++k) {
      J.col(k) =
          detail::to_vector(cache.apply(detail::basis_mode(grid, k))
                                .cosine_coeffs());
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    const double rcond = lu.rcond();
    if (!(rcond > 0.0) || !std::isfinite(rcond)) {
      throw JacobianSingular("assembled Jacobian is numerically singular");
    }
    condition = 1.0 / rcond;

    const Eigen::VectorXd delta =
        lu.solve(detail::to_vector(residual.cosine_coeffs()));
    if (!delta.allFinite()) {
      throw JacobianSingular("linear solve produced non-finite corrections");
    }
    const Eigen::VectorXd vc = detail::to_vector(V.cosine_coeffs());

    auto candidate = [&](double step) {
      const Eigen::VectorXd cc = vc - step * delta;
      return Field::from_cosine_coeffs(
          grid, std::vector<double>(cc.data(), cc.data() + modes));
    };
    Field V_next = candidate(1.0);
    Field r_next = ctx.eval(V_next);
    double n_next = hs_norm(r_next, config.s);
    if (n_next > norm) {
      Field V_half = candidate(0.5);
      Field r_half = ctx.eval(V_half);
      const double n_half = hs_norm(r_half, config.s);
      if (n_half < n_next) {
        V_next = std::move(V_half);
        r_next = std::move(r_half);
        n_next = n_half;
      }
    }
    growth_streak = n_next > norm ? growth_streak + 1 : 0;
    ++iterations;
    if (growth_streak >= 2) throw NewtonDiverged(iterations, n_next);

    V = std::move(V_next);
    residual = std::move(r_next);
    norm = n_next;
  }

  return SolveResult{V,     eps,  ctx.omega, iterations,
                     norm,  hs_norm(V - sigma, config.s), condition};
}

struct SweepFailure {
  double eps;
  std::string message;
};

struct SweepOutcome {
  std::vector<SolveResult> results;
  std::optional<SweepFailure> failure;
  bool ok() const { return !failure.has_value(); }
};

/// Solve a descending list of eps values, warm-starting each solve from the
/// previous profile. The first (largest) eps starts from sigma; if it
/// diverges, one bisection step toward the KdV limit is attempted before
/// giving up. Failures abort the sweep and are reported in the outcome.
inline SweepOutcome continuation_sweep(const SystemSpec& spec,
                                       const std::vector<double>& eps_list,
                                       const Grid& grid,
                                       const SolveConfig& config = {}) {
  SweepOutcome out;
  if (eps_list.empty()) return out;
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0 && eps_list[i] < 1.0)) {
      throw Error("sweep eps values must lie in (0, 1)");
    }
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) {
      throw Error("sweep eps values must be strictly descending");
    }
  }

  Field init = kdv_profile(spec.gamma, grid);
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    const double eps = eps_list[i];
    try {
      out.results.push_back(newton_solve(spec, eps, init, config));
    } catch (const NewtonDiverged&) {
      if (i != 0) {
        out.failure = SweepFailure{eps, "Newton diverged on warm start"};
        return out;
      }
      try {
        const SolveResult half = newton_solve(
            spec, eps / 2.0, kdv_profile(spec.gamma, grid), config);
        out.results.push_back(newton_solve(spec, eps, half.V, config));
      } catch (const Error& err) {
        out.failure = SweepFailure{eps, err.what()};
        return out;
      }
    } catch (const Error& err) {
      out.failure = SweepFailure{eps, err.what()};
      return out;
    }
    init = out.results.back().V;
  }
  return out;
}

}  // namespace solwave
