#include "solwave/spectral.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>
#include <random>

using namespace solwave;
using Catch::Approx;

namespace {

// random even band-limited field: modes up to k_max with decaying amplitudes
Field random_even_field(const Grid& grid, std::mt19937& rng, int k_max) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(grid.modes(), 0.0);
  for (int k = 0; k <= k_max && k < grid.modes(); ++k) {
    c[k] = u(rng) / (1.0 + k);
  }
  return Field::from_cosine_coeffs(grid, c);
}

}  // namespace

TEST_CASE("make_grid validation and layout", "[spectral]") {
  REQUIRE_THROWS_AS(make_grid(50.0, 8), BadGrid);
  REQUIRE_THROWS_AS(make_grid(50.0, 1000), BadGrid);
  REQUIRE_THROWS_AS(make_grid(0.0, 64), BadGrid);

  const Grid gpi(std::numbers::pi, 16);
  REQUIRE(gpi.freq(1) == 1.0);

  const Grid g(50.0, 1024);
  REQUIRE(g.max_freq() == Approx(std::numbers::pi * 512 / 50.0));
  REQUIRE(g.node(0) == -50.0);
  REQUIRE(g.node(512) == 0.0);
}

TEST_CASE("transform round trip", "[spectral]") {
  const Grid grid(30.0, 128);
  std::mt19937 rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    const Field f = random_even_field(grid, rng, 40);
    const auto v0 = f.values();
    const Field g = Field::from_spectrum(grid, f.spectrum(), true);
    const auto& v1 = g.values();
    double scale = 0.0, err = 0.0;
    for (int j = 0; j < grid.size(); ++j) {
      scale = std::max(scale, std::abs(v0[j]));
      err = std::max(err, std::abs(v0[j] - v1[j]));
    }
    REQUIRE(err <= 1e-13 * scale);
  }
}

TEST_CASE("apply_multiplier", "[spectral]") {
  const Grid grid(std::numbers::pi, 64);

  SECTION("identity symbol is bit-exact in coefficient space") {
    std::mt19937 rng(3);
    const Field f = random_even_field(grid, rng, 20);
    const Field g = apply_multiplier(MultiplierSymbol::constant(1.0), f);
    const auto &sf = f.spectrum(), &sg = g.spectrum();
    for (std::size_t k = 0; k < sf.size(); ++k) REQUIRE(sf[k] == sg[k]);
  }
  SECTION("single cosine mode is an eigenfunction") {
    const double xi3 = grid.freq(3);
    const Field f =
        Field::sample(grid, [xi3](double x) { return std::cos(xi3 * x); }, true);
    const MultiplierSymbol xi2([](double x) { return x * x; }, 0.0, 2.0);
    const Field g = apply_multiplier(xi2, f);
    const auto &fv = f.values(), &gv = g.values();
    for (int j = 0; j < grid.size(); ++j) {
      REQUIRE(gv[j] == Approx(xi3 * xi3 * fv[j]).margin(1e-12));
    }
  }
  SECTION("J^-2 on cos(2x), L = pi") {
    const Field f =
        Field::sample(grid, [](double x) { return std::cos(2.0 * x); }, true);
    const MultiplierSymbol jm2(
        [](double x) { return 1.0 / (1.0 + x * x); }, 1.0, -2.0);
    const Field g = apply_multiplier(jm2, f);
    const auto& gv = g.values();
    for (int j = 0; j < grid.size(); ++j) {
      REQUIRE(gv[j] == Approx(0.2 * std::cos(2.0 * grid.node(j))).margin(1e-13));
    }
  }
  SECTION("composition matches the product symbol") {
    std::mt19937 rng(17);
    const Grid g50(50.0, 256);
    const Field f = random_even_field(g50, rng, 60);
    const auto a = tanh_over_xi();
    const auto b = sqrt_of(tanh_over_xi());
    const Field lhs = apply_multiplier(a, apply_multiplier(b, f));
    const Field rhs = apply_multiplier(product_of({a, b}), f);
    REQUIRE(hs_norm(lhs - rhs, 0.0) <= 1e-12 * hs_norm(f, 0.0));
  }
}

TEST_CASE("hs_norm", "[spectral]") {
  const Grid grid(std::numbers::pi, 64);

  REQUIRE(hs_norm(Field::zeros(grid), 1.0) == 0.0);

  SECTION("constant field: |c| sqrt(2L) for every s") {
    const Field f = Field::sample(grid, [](double) { return -2.5; }, true);
    for (double s : {0.0, 1.0, 2.5}) {
      REQUIRE(hs_norm(f, s) ==
              Approx(2.5 * std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-13));
    }
  }
  SECTION("cos(x) with s = 1: sqrt(2 pi)") {
    const Field f =
        Field::sample(grid, [](double x) { return std::cos(x); }, true);
    REQUIRE(hs_norm(f, 1.0) == Approx(2.506628274631).epsilon(1e-12));
  }
  SECTION("monotone in s") {
    std::mt19937 rng(5);
    const Field f = random_even_field(grid, rng, 25);
    REQUIRE(hs_norm(f, 0.0) <= hs_norm(f, 0.5));
    REQUIRE(hs_norm(f, 0.5) <= hs_norm(f, 2.0));
  }
  SECTION("Parseval: value-space L2 equals spectral L2") {
    std::mt19937 rng(29);
    const Field f = random_even_field(grid, rng, 30);
    const auto& v = f.values();
    double sum = 0.0;
    for (double x : v) sum += x * x;
    const double direct =
        std::sqrt(2.0 * grid.half_length() / grid.size() * sum);
    REQUIRE(l2_norm(f) == Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("project_even", "[spectral]") {
  const Grid grid(50.0, 256);

  SECTION("even fields pass through") {
    const Field f = Field::sample(
        grid, [](double x) { return 1.0 / std::cosh(0.5 * x); }, true);
    const Field p = project_even(f);
    REQUIRE(hs_norm(f - p, 0.0) <= 1e-14);
    const Field pp = project_even(p);
    const auto &a = p.values(), &b = pp.values();
    for (int j = 0; j < grid.size(); ++j) REQUIRE(a[j] == b[j]);
  }
  SECTION("sawtooth projects to zero away from the unpaired node") {
    const Field f = Field::sample(grid, [](double x) { return x; });
    const Field p = project_even(f);
    const auto& pv = p.values();
    // node 0 sits at x = -L and is its own reflection
    for (int j = 1; j < grid.size(); ++j) REQUIRE(pv[j] == Approx(0.0).margin(1e-13));
  }
  SECTION("strips an odd perturbation from sigma") {
    const double xi1 = grid.freq(1);
    const Field noisy = Field::sample(grid, [xi1](double x) {
      return 1.0 / std::pow(std::cosh(0.5 * x), 2) + 0.1 * std::sin(xi1 * x);
    });
    const Field clean = Field::sample(
        grid, [](double x) { return 1.0 / std::pow(std::cosh(0.5 * x), 2); },
        true);
    REQUIRE(hs_norm(project_even(noisy) - clean, 0.0) <= 1e-14);
  }
}

TEST_CASE("tail_fraction", "[spectral]") {
  const Grid grid(50.0, 1024);
  const double xi1 = grid.freq(1);
  const Field low =
      Field::sample(grid, [xi1](double x) { return std::cos(xi1 * x); }, true);
  REQUIRE(tail_fraction(low, 1.0) < 1e-25);

  const double xitop = grid.freq(512);
  const Field top = Field::sample(
      grid, [xitop](double x) { return std::cos(xitop * x); }, true);
  REQUIRE(tail_fraction(top, 1.0) == Approx(1.0));

  const Field sigma = Field::sample(
      grid, [](double x) { return std::pow(1.0 / std::cosh(0.5 * x), 2) / 3.0; },
      true);
  REQUIRE(tail_fraction(sigma, 1.0) < 1e-12);

  REQUIRE(tail_fraction(Field::zeros(grid), 1.0) == 0.0);
}

TEST_CASE("multiply_dealiased", "[spectral]") {
  const Grid grid(std::numbers::pi, 64);

  SECTION("product of two cosine modes") {
    const Field a =
        Field::sample(grid, [](double x) { return std::cos(3.0 * x); }, true);
    const Field b =
        Field::sample(grid, [](double x) { return std::cos(5.0 * x); }, true);
    const Field p = multiply_dealiased(a, b);
    const auto& pv = p.values();
    for (int j = 0; j < grid.size(); ++j) {
      const double x = grid.node(j);
      REQUIRE(pv[j] ==
              Approx(0.5 * (std::cos(2.0 * x) + std::cos(8.0 * x))).margin(1e-13));
    }
  }
  SECTION("high modes alias nowhere: k1 + k2 beyond N/2 is dropped") {
    const double xa = grid.freq(20), xb = grid.freq(25);
    const Field a =
        Field::sample(grid, [xa](double x) { return std::cos(xa * x); }, true);
    const Field b =
        Field::sample(grid, [xb](double x) { return std::cos(xb * x); }, true);
    const Field p = multiply_dealiased(a, b);
    // only the difference frequency |20-25| = 5 survives truncation
    const auto c = p.cosine_coeffs();
    for (int k = 0; k < grid.modes(); ++k) {
      REQUIRE(c[k] == Approx(k == 5 ? 0.5 : 0.0).margin(1e-13));
    }
  }
  SECTION("general (odd) fields multiply correctly") {
    const Field a = Field::sample(grid, [](double x) { return std::sin(x); });
    const Field b = Field::sample(grid, [](double x) { return std::sin(2.0 * x); });
    const Field p = multiply_dealiased(a, b);
    const auto& pv = p.values();
    for (int j = 0; j < grid.size(); ++j) {
      const double x = grid.node(j);
      REQUIRE(pv[j] == Approx(std::sin(x) * std::sin(2.0 * x)).margin(1e-13));
    }
  }
}

TEST_CASE("rescaling identity on single cosine modes", "[spectral]") {
  const double eps = 0.5;
  const Grid grid(50.0, 128);
  const Grid stretched(50.0 / eps, 128);
  const auto sym = sqrt_of(tanh_over_xi());
  for (int k : {0, 1, 7, 40, 64}) {
    const double xik = grid.freq(k);
    const Field f =
        Field::sample(grid, [xik](double x) { return std::cos(xik * x); }, true);
    // same sample array interpreted on the stretched grid is f(eps x)
    const Field feps = Field::from_values(stretched, f.values(), true);

    const Field lhs = apply_multiplier(scale_symbol(sym, eps), f);
    const Field rhs = apply_multiplier(sym, feps);
    const auto &lv = lhs.values(), &rv = rhs.values();
    for (int j = 0; j < grid.size(); ++j) {
      REQUIRE(lv[j] == Approx(rv[j]).margin(1e-13));
    }
  }
}
