#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "solwave/errors.hpp"
#include "solwave/fft.hpp"
#include "solwave/symbol.hpp"

namespace solwave {

/// Periodic symmetric domain [-L, L) with N equispaced nodes.
///
/// Nodes are x_j = -L + 2Lj/N; representable frequencies are xi_k = pi k / L
/// for k = 0 .. N/2. N must be a power of two, at least 16.
class Grid {
 public:
  Grid(double half_length, int size) : half_length_(half_length), size_(size) {
    if (!(half_length > 0.0)) throw BadGrid("domain half-length must be > 0");
    if (size < 16) throw BadGrid("grid needs at least 16 nodes");
    if ((size & (size - 1)) != 0) throw BadGrid("node count must be a power of two");
  }

  double half_length() const { return half_length_; }
  int size() const { return size_; }
  int modes() const { return size_ / 2 + 1; }
  double node(int j) const {
    return -half_length_ + 2.0 * half_length_ * j / size_;
  }
  double freq(int k) const { return std::numbers::pi * k / half_length_; }
  double max_freq() const { return freq(size_ / 2); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double half_length_;
  int size_;
};

inline Grid make_grid(double half_length, int size) {
  return Grid(half_length, size);
}

/// A real grid function with a lazily synchronized half-spectrum.
///
/// The spectrum convention is the unnormalized forward DFT
///   s_k = sum_j f_j e^{-2 pi i jk/N},  k = 0 .. N/2.
/// For an even field f = sum_k c_k cos(xi_k x) the cosine amplitudes are
///   c_0 = Re s_0 / N,  c_k = 2 (-1)^k Re s_k / N (0 < k < N/2),
///   c_{N/2} = (-1)^{N/2} Re s_{N/2} / N,
/// the (-1)^k coming from the -L offset of node 0.
class Field {
 public:
  static Field zeros(const Grid& grid) {
    Field f(grid);
    f.values_ = std::vector<double>(grid.size(), 0.0);
    f.even_ = true;
    return f;
  }

  static Field from_values(const Grid& grid, std::vector<double> values,
                           bool even = false) {
    Field f(grid);
    f.values_ = std::move(values);
    f.even_ = even;
    return f;
  }

  static Field sample(const Grid& grid,
                      const std::function<double(double)>& fn,
                      bool even = false) {
    std::vector<double> v(grid.size());
    for (int j = 0; j < grid.size(); ++j) v[j] = fn(grid.node(j));
    return from_values(grid, std::move(v), even);
  }

  static Field from_spectrum(const Grid& grid,
                             std::vector<std::complex<double>> spectrum,
                             bool even = false) {
    Field f(grid);
    f.spectrum_ = std::move(spectrum);
    f.even_ = even;
    return f;
  }

  /// Even field from cosine amplitudes c_k, k = 0 .. N/2.
  static Field from_cosine_coeffs(const Grid& grid,
                                  const std::vector<double>& c) {
    const int n = grid.size();
    if (static_cast<int>(c.size()) != grid.modes()) {
      throw BadGrid("cosine coefficient count must be N/2 + 1");
    }
    std::vector<std::complex<double>> s(grid.modes());
    s[0] = {n * c[0], 0.0};
    for (int k = 1; k < n / 2; ++k) {
      s[k] = {(k % 2 ? -1.0 : 1.0) * 0.5 * n * c[k], 0.0};
    }
    s[n / 2] = {(n / 2 % 2 ? -1.0 : 1.0) * n * c[n / 2], 0.0};
    return from_spectrum(grid, std::move(s), true);
  }

  const Grid& grid() const { return grid_; }
  bool is_even() const { return even_; }

  const std::vector<double>& values() const {
    if (!values_) {
      std::vector<double> v;
      detail::FftEngine::instance().inverse(*spectrum_, grid_.size(), v);
      const double inv_n = 1.0 / grid_.size();
      for (double& x : v) x *= inv_n;
      values_ = std::move(v);
    }
    return *values_;
  }

  const std::vector<std::complex<double>>& spectrum() const {
    if (!spectrum_) {
      std::vector<std::complex<double>> s;
      detail::FftEngine::instance().forward(*values_, s);
      spectrum_ = std::move(s);
    }
    return *spectrum_;
  }

  std::vector<double> cosine_coeffs() const {
    const auto& s = spectrum();
    const int n = grid_.size();
    std::vector<double> c(grid_.modes());
    c[0] = s[0].real() / n;
    for (int k = 1; k < n / 2; ++k) {
      c[k] = (k % 2 ? -1.0 : 1.0) * 2.0 * s[k].real() / n;
    }
    c[n / 2] = (n / 2 % 2 ? -1.0 : 1.0) * s[n / 2].real() / n;
    return c;
  }

 private:
  explicit Field(const Grid& grid) : grid_(grid) {}

  Grid grid_;
  mutable std::optional<std::vector<double>> values_;
  mutable std::optional<std::vector<std::complex<double>>> spectrum_;
  bool even_ = false;
};

// ---------------------------------------------------------------------------
// arithmetic (same-grid, value space)

namespace detail {
inline void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw BadGrid("fields live on different grids");
}
}  // namespace detail

inline Field operator+(const Field& a, const Field& b) {
  detail::require_same_grid(a, b);
  std::vector<double> v = a.values();
  const auto& w = b.values();
  for (std::size_t j = 0; j < v.size(); ++j) v[j] += w[j];
  return Field::from_values(a.grid(), std::move(v), a.is_even() && b.is_even());
}

inline Field operator-(const Field& a, const Field& b) {
  detail::require_same_grid(a, b);
  std::vector<double> v = a.values();
  const auto& w = b.values();
  for (std::size_t j = 0; j < v.size(); ++j) v[j] -= w[j];
  return Field::from_values(a.grid(), std::move(v), a.is_even() && b.is_even());
}

inline Field operator*(double c, const Field& a) {
  std::vector<double> v = a.values();
  for (double& x : v) x *= c;
  return Field::from_values(a.grid(), std::move(v), a.is_even());
}

// ---------------------------------------------------------------------------
// core spectral operations

/// Apply a Fourier multiplier: each spectral bin is scaled by sym(xi_k).
inline Field apply_multiplier(const MultiplierSymbol& sym, const Field& f) {
  const auto& s = f.spectrum();
  std::vector<std::complex<double>> out(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    out[k] = s[k] * sym(f.grid().freq(static_cast<int>(k)));
  }
  return Field::from_spectrum(f.grid(), std::move(out), f.is_even());
}

namespace detail {

/// Weighted spectral sums underlying the H^s norms: returns
/// sum over modes of (1 + xi_k^2)^s |amplitude|^2 with the trapezoid
/// normalization that matches int_{-L}^{L} |J^s f|^2 dx.
inline double weighted_energy(const Field& f, double s, int k_from, int k_to) {
  const auto& sp = f.spectrum();
  const Grid& g = f.grid();
  const int n = g.size();
  const double base = 2.0 * g.half_length() / (static_cast<double>(n) * n);
  double total = 0.0;
  for (int k = k_from; k <= k_to; ++k) {
    const double xi = g.freq(k);
    const double w = std::pow(1.0 + xi * xi, s);
    const double mag2 = std::norm(sp[k]);
    const double mult = (k == 0 || k == n / 2) ? 1.0 : 2.0;
    total += base * mult * w * mag2;
  }
  return total;
}

}  // namespace detail

/// Sobolev norm ||J^s f||_{L^2} on the periodic box; s = 0 is the L^2 norm.
inline double hs_norm(const Field& f, double s) {
  return std::sqrt(
      detail::weighted_energy(f, s, 0, f.grid().size() / 2));
}

inline double l2_norm(const Field& f) { return hs_norm(f, 0.0); }

/// (f(x) + f(-x)) / 2 on the grid; idempotent.
inline Field project_even(const Field& f) {
  const auto& v = f.values();
  const int n = f.grid().size();
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) {
    out[j] = 0.5 * (v[j] + v[(n - j) % n]);
  }
  return Field::from_values(f.grid(), std::move(out), true);
}

/// Fraction of the squared H^s norm carried by modes k > N/3.
inline double tail_fraction(const Field& f, double s) {
  const int n = f.grid().size();
  const double total = detail::weighted_energy(f, s, 0, n / 2);
  if (total == 0.0) return 0.0;
  const double tail = detail::weighted_energy(f, s, n / 3 + 1, n / 2);
  return tail / total;
}

/// Pointwise product evaluated on a 2x-padded grid and truncated back, so
/// quadratic interactions of retained modes never alias.
inline Field multiply_dealiased(const Field& a, const Field& b) {
  detail::require_same_grid(a, b);
  const Grid& g = a.grid();
  const int n = g.size();
  auto& engine = detail::FftEngine::instance();

  auto pad = [n](const std::vector<std::complex<double>>& s) {
    std::vector<std::complex<double>> p(n + 1, {0.0, 0.0});
    for (int k = 0; k < n / 2; ++k) p[k] = 2.0 * s[k];
    p[n / 2] = s[n / 2];
    return p;
  };

  std::vector<double> va, vb;
  engine.inverse(pad(a.spectrum()), 2 * n, va);
  engine.inverse(pad(b.spectrum()), 2 * n, vb);
  const double inv = 1.0 / (2.0 * n);
  for (int j = 0; j < 2 * n; ++j) va[j] = (va[j] * inv) * (vb[j] * inv);

  std::vector<std::complex<double>> prod;
  engine.forward(va, prod);
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (int k = 0; k < n / 2; ++k) out[k] = 0.5 * prod[k];
  out[n / 2] = {prod[n / 2].real(), 0.0};  // coarse Nyquist keeps cosine part
  return Field::from_spectrum(g, std::move(out), a.is_even() && b.is_even());
}

// ---------------------------------------------------------------------------
// grid transfer used by the rescaling x -> x/eps

/// Reinterpret a field on the grid (L/eps, N), scaling values by `amplitude`.
/// Node j keeps its sample; frequencies map xi_k -> eps xi_k. Exact.
inline Field reinterpret_grid(const Field& f, double eps, double amplitude) {
  const Grid stretched(f.grid().half_length() / eps, f.grid().size());
  std::vector<double> v = f.values();
  for (double& x : v) x *= amplitude;
  return Field::from_values(stretched, std::move(v), f.is_even());
}

}  // namespace solwave
