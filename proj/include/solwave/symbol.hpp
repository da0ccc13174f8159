#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "solwave/errors.hpp"

namespace solwave {

struct OriginData {
  double value;  ///< symbol value at xi = 0
  double d2;     ///< second derivative at xi = 0
};

namespace detail {

/// Second derivative at 0 of an even function given by f(|x|).
///
/// Central differences in h^2 with Richardson extrapolation over the step
/// sequence h0, h0/2, h0/4, ...; the diagonal of the Neville tableau is
/// accepted once two successive entries agree to 1e-8 relative.
inline double second_derivative_at_zero(const std::function<double(double)>& f,
                                        double h0 = 1e-2) {
  constexpr int kLevels = 5;
  constexpr double kTol = 1e-8;
  const double f0 = f(0.0);
  double tableau[kLevels][kLevels];
  double prev_diag = 0.0;
  double h = h0;
  for (int i = 0; i < kLevels; ++i, h *= 0.5) {
    // evenness makes f(-h) == f(h), so the stencil reduces to two points
    tableau[i][0] = 2.0 * (f(h) - f0) / (h * h);
    for (int j = 1; j <= i; ++j) {
      const double w = std::pow(4.0, j);
      tableau[i][j] = (w * tableau[i][j - 1] - tableau[i - 1][j - 1]) / (w - 1.0);
    }
    const double diag = tableau[i][i];
    if (i > 0) {
      const double scale = std::max({std::abs(diag), std::abs(prev_diag), 1.0});
      if (std::abs(diag - prev_diag) <= kTol * scale) return diag;
    }
    prev_diag = diag;
  }
  throw DerivativeUnstable(
      "second derivative at 0 did not converge under Richardson refinement");
}

struct SymbolState {
  std::function<double(double)> fn;  // evaluated at |xi| >= 0
  std::optional<double> value0;      // analytic override
  std::optional<double> d20;         // analytic override
  std::optional<double> growth_hint; // asymptotic log-log slope, if known

  mutable std::once_flag origin_once;
  mutable std::optional<OriginData> origin;
  mutable std::exception_ptr origin_error;
};

}  // namespace detail

/// An even real-valued Fourier-multiplier symbol.
///
/// The evaluator is called with |xi|, which imposes evenness structurally.
/// Values are immutable after construction and safe to share across threads;
/// origin data is computed lazily (analytic overrides win over numerics).
class MultiplierSymbol {
 public:
  using Fn = std::function<double(double)>;

  explicit MultiplierSymbol(Fn fn) {
    auto st = std::make_shared<detail::SymbolState>();
    st->fn = std::move(fn);
    state_ = std::move(st);
  }

  MultiplierSymbol(Fn fn, double value_at_zero, double d2_at_zero,
                   std::optional<double> growth_hint = std::nullopt) {
    auto st = std::make_shared<detail::SymbolState>();
    st->fn = std::move(fn);
    st->value0 = value_at_zero;
    st->d20 = d2_at_zero;
    st->growth_hint = growth_hint;
    state_ = std::move(st);
  }

  static MultiplierSymbol constant(double c) {
    return MultiplierSymbol([c](double) { return c; }, c, 0.0, 0.0);
  }

  /// Evaluate at xi (even extension; throws SymbolSingular on non-finite).
  double operator()(double xi) const {
    const double v = state_->fn(std::abs(xi));
    if (!std::isfinite(v)) {
      throw SymbolSingular(xi, "evaluator returned a non-finite value");
    }
    return v;
  }

  bool has_analytic_origin() const {
    return state_->value0.has_value() && state_->d20.has_value();
  }

  std::optional<double> growth_hint() const { return state_->growth_hint; }

  /// (value, second derivative) at the origin; lazy and cached.
  OriginData origin_data() const {
    if (has_analytic_origin()) return {*state_->value0, *state_->d20};
    const detail::SymbolState& st = *state_;
    std::call_once(st.origin_once, [this, &st] {
      try {
        const double v0 = (*this)(0.0);
        const double d2 =
            st.d20 ? *st.d20 : detail::second_derivative_at_zero(st.fn);
        st.origin = OriginData{st.value0.value_or(v0), d2};
      } catch (...) {
        st.origin_error = std::current_exception();
      }
    });
    if (st.origin_error) std::rethrow_exception(st.origin_error);
    return *st.origin;
  }

 private:
  std::shared_ptr<const detail::SymbolState> state_;
};

inline double eval_symbol(const MultiplierSymbol& sym, double xi) {
  return sym(xi);
}

inline OriginData origin_data(const MultiplierSymbol& sym) {
  return sym.origin_data();
}

/// Symbol xi -> sym(eps * xi). With eps = 0 the result is the constant sym(0).
inline MultiplierSymbol scale_symbol(const MultiplierSymbol& sym, double eps) {
  if (eps == 0.0) return MultiplierSymbol::constant(sym(0.0));
  const double a = std::abs(eps);
  if (sym.has_analytic_origin()) {
    const OriginData o = sym.origin_data();
    return MultiplierSymbol([sym, a](double xi) { return sym(a * xi); },
                            o.value, a * a * o.d2, sym.growth_hint());
  }
  return MultiplierSymbol([sym, a](double xi) { return sym(a * xi); });
}

/// Pointwise product of one or more symbols.
inline MultiplierSymbol product_of(const std::vector<MultiplierSymbol>& syms) {
  if (syms.empty()) return MultiplierSymbol::constant(1.0);
  auto fn = [syms](double xi) {
    double p = 1.0;
    for (const auto& s : syms) p *= s(xi);
    return p;
  };
  bool analytic = true;
  for (const auto& s : syms) analytic = analytic && s.has_analytic_origin();
  if (analytic) {
    // evenness kills first derivatives at 0, so the product rule collapses
    double value = 1.0, d2 = 0.0, hint = 0.0;
    bool have_hint = true;
    for (const auto& s : syms) {
      const OriginData o = s.origin_data();
      d2 = d2 * o.value + value * o.d2;
      value *= o.value;
      if (s.growth_hint()) hint += *s.growth_hint();
      else have_hint = false;
    }
    return MultiplierSymbol(std::move(fn), value, d2,
                            have_hint ? std::optional<double>(hint)
                                      : std::nullopt);
  }
  return MultiplierSymbol(std::move(fn));
}

inline MultiplierSymbol quotient_of(const MultiplierSymbol& num,
                                    const MultiplierSymbol& den) {
  auto fn = [num, den](double xi) {
    const double d = den(xi);
    if (d == 0.0) {
      throw SymbolSingular(xi, "quotient denominator vanished");
    }
    return num(xi) / d;
  };
  if (num.has_analytic_origin() && den.has_analytic_origin()) {
    const OriginData n = num.origin_data();
    const OriginData d = den.origin_data();
    if (d.value != 0.0) {
      std::optional<double> hint;
      if (num.growth_hint() && den.growth_hint())
        hint = *num.growth_hint() - *den.growth_hint();
      return MultiplierSymbol(std::move(fn), n.value / d.value,
                              (n.d2 * d.value - n.value * d.d2) /
                                  (d.value * d.value),
                              hint);
    }
  }
  return MultiplierSymbol(std::move(fn));
}

inline MultiplierSymbol sqrt_of(const MultiplierSymbol& sym) {
  auto fn = [sym](double xi) {
    const double v = sym(xi);
    if (v < 0.0) throw SymbolSingular(xi, "sqrt of a negative symbol value");
    return std::sqrt(v);
  };
  if (sym.has_analytic_origin()) {
    const OriginData o = sym.origin_data();
    if (o.value > 0.0) {
      std::optional<double> hint;
      if (sym.growth_hint()) hint = *sym.growth_hint() / 2.0;
      return MultiplierSymbol(std::move(fn), std::sqrt(o.value),
                              o.d2 / (2.0 * std::sqrt(o.value)), hint);
    }
  }
  return MultiplierSymbol(std::move(fn));
}

inline MultiplierSymbol reciprocal_of(const MultiplierSymbol& sym) {
  auto fn = [sym](double xi) {
    const double v = sym(xi);
    if (v == 0.0) throw SymbolSingular(xi, "reciprocal of a vanishing symbol");
    return 1.0 / v;
  };
  if (sym.has_analytic_origin()) {
    const OriginData o = sym.origin_data();
    if (o.value != 0.0) {
      std::optional<double> hint;
      if (sym.growth_hint()) hint = -*sym.growth_hint();
      return MultiplierSymbol(std::move(fn), 1.0 / o.value,
                              -o.d2 / (o.value * o.value), hint);
    }
  }
  return MultiplierSymbol(std::move(fn));
}

/// a * sym + b.
inline MultiplierSymbol affine_of(double a, double b,
                                  const MultiplierSymbol& sym) {
  auto fn = [a, b, sym](double xi) { return a * sym(xi) + b; };
  if (sym.has_analytic_origin()) {
    const OriginData o = sym.origin_data();
    std::optional<double> hint;
    if (sym.growth_hint()) {
      hint = (b != 0.0 && a != 0.0) ? std::max(*sym.growth_hint(), 0.0)
                                    : (a == 0.0 ? 0.0 : *sym.growth_hint());
    }
    return MultiplierSymbol(std::move(fn), a * o.value + b, a * o.d2, hint);
  }
  return MultiplierSymbol(std::move(fn));
}

/// tanh(xi)/xi with its removable singularity patched by the Taylor stub
/// 1 - xi^2/3 + 2 xi^4/15 - 17 xi^6/315 below |xi| = 1e-3.
inline MultiplierSymbol tanh_over_xi() {
  auto fn = [](double x) {
    if (x < 1e-3) {
      const double x2 = x * x;
      return 1.0 + x2 * (-1.0 / 3.0 + x2 * (2.0 / 15.0 - x2 * 17.0 / 315.0));
    }
    return std::tanh(x) / x;
  };
  return MultiplierSymbol(std::move(fn), 1.0, -2.0 / 3.0, -1.0);
}

/// 1 + c2 * xi^2 (building block of the abcd family).
inline MultiplierSymbol quadratic_symbol(double c2) {
  return MultiplierSymbol([c2](double xi) { return 1.0 + c2 * xi * xi; }, 1.0,
                          2.0 * c2, c2 == 0.0 ? 0.0 : 2.0);
}

namespace detail {

/// Least-squares slope of log|f| against log<xi> over a log-spaced window.
/// Points where |f| underflows are skipped; all-negligible data yields 0.
constexpr double kGrowthWindowLo = 10.0;
constexpr double kGrowthWindowHi = 1e4;

inline double log_log_slope(const std::function<double(double)>& f,
                            double lo, double hi, int n) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    const double xi = lo * std::pow(hi / lo, t);
    const double v = std::abs(f(xi));
    if (v < 1e-13) continue;
    const double x = 0.5 * std::log1p(xi * xi);  // log<xi>
    const double y = std::log(v);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++m;
  }
  if (m < 2) return 0.0;
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) return 0.0;
  return (m * sxy - sx * sy) / denom;
}

/// Asymptotic slope of log|sym| over the standard growth window.
inline double value_growth_slope(const MultiplierSymbol& sym, int n = 48) {
  return log_log_slope([&sym](double xi) { return sym(xi); }, kGrowthWindowLo,
                       kGrowthWindowHi, n);
}

/// Asymptotic slope of log|sym'| (central differences, relative step).
inline double derivative_growth_slope(const MultiplierSymbol& sym, int n = 48) {
  return log_log_slope(
      [&sym](double xi) {
        const double h = 1e-3 * xi;
        return (sym(xi + h) - sym(xi - h)) / (2.0 * h);
      },
      kGrowthWindowLo, kGrowthWindowHi, n);
}

}  // namespace detail

}  // namespace solwave
