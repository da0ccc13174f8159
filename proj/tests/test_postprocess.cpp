#include "solwave/postprocess.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "solwave/models.hpp"
#include "solwave/solver.hpp"

using namespace solwave;
using Catch::Approx;

TEST_CASE("unscale", "[postprocess]") {
  const Grid grid(50.0, 256);
  const Field V = kdv_profile(4.5, grid);

  SECTION("eps = 1 is the identity") {
    const Field v = unscale(V, 1.0);
    REQUIRE(v.grid() == grid);
    const auto &a = V.values(), &b = v.values();
    for (int j = 0; j < grid.size(); ++j) REQUIRE(a[j] == b[j]);
  }
  SECTION("amplitude scales by eps^2 and the grid stretches by 1/eps") {
    const Field v = unscale(V, 0.1);
    REQUIRE(v.grid().half_length() == Approx(500.0));
    REQUIRE(v.grid().size() == 256);
    double sup_V = 0.0, sup_v = 0.0;
    for (double x : V.values()) sup_V = std::max(sup_V, std::abs(x));
    for (double x : v.values()) sup_v = std::max(sup_v, std::abs(x));
    REQUIRE(sup_v == Approx(0.01 * sup_V).epsilon(1e-15));
    // sigma(0) = 1/3 for gamma = 9/2
    REQUIRE(v.values()[128] == Approx(0.01 / 3.0).epsilon(1e-14));
  }
  SECTION("round trip is the identity to machine precision") {
    const Field v = unscale(V, 0.05);
    const Field back = reinterpret_grid(v, 1.0 / 0.05, 1.0 / (0.05 * 0.05));
    REQUIRE(back.grid().half_length() == Approx(50.0).epsilon(1e-15));
    const auto &a = V.values(), &b = back.values();
    for (int j = 0; j < grid.size(); ++j) {
      REQUIRE(b[j] == Approx(a[j]).epsilon(1e-15).margin(1e-300));
    }
  }
  SECTION("domain") {
    REQUIRE_THROWS_AS(unscale(V, 0.0), Error);
    REQUIRE_THROWS_AS(unscale(V, 1.5), Error);
  }
}

TEST_CASE("reconstruct_eta", "[postprocess]") {
  const Grid grid(50.0, 256);
  const MultiplierSymbol one = MultiplierSymbol::constant(1.0);

  SECTION("zero input, zero elevation") {
    const Field eta = reconstruct_eta(one, one, Field::zeros(grid), 1.2);
    REQUIRE(hs_norm(eta, 1.0) == 0.0);
  }
  SECTION("identity kernels reduce to omega v - v^2/2 pointwise") {
    const double xi3 = grid.freq(3);
    const Field v = Field::sample(
        grid, [xi3](double x) { return 0.3 * std::cos(xi3 * x) + 0.1; }, true);
    const double omega = 1.25;
    const Field eta = reconstruct_eta(one, one, v, omega);
    const auto &vv = v.values(), &ev = eta.values();
    for (int j = 0; j < grid.size(); ++j) {
      REQUIRE(ev[j] ==
              Approx(omega * vv[j] - 0.5 * vv[j] * vv[j]).margin(1e-13));
    }
  }
  SECTION("the second traveling equation vanishes by construction") {
    const SystemSpec ddk = make_builtin("ddk");
    const auto& K = *ddk.kernels;
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    std::vector<double> c(grid.modes(), 0.0);
    for (int k = 0; k < 40; ++k) c[k] = u(rng) / (1.0 + k);
    const Field v = Field::from_cosine_coeffs(grid, c);
    const Field eta = reconstruct_eta(K[2], K[3], v, 1.1);
    const auto [r1, r2] =
        system_residual(K[0], K[1], K[2], K[3], eta, v, 1.1, 1.0);
    REQUIRE(r2 <= 1e-12);
    REQUIRE(r1 > 1e-6);  // arbitrary v does not satisfy the first equation
  }
}

TEST_CASE("system_residual on the zero state", "[postprocess]") {
  const Grid grid(50.0, 256);
  const MultiplierSymbol one = MultiplierSymbol::constant(1.0);
  const auto [r1, r2] = system_residual(one, one, one, one,
                                        Field::zeros(grid),
                                        Field::zeros(grid), 1.0, 1.0);
  REQUIRE(r1 == 0.0);
  REQUIRE(r2 == 0.0);
}

TEST_CASE("converged solves satisfy the physical system", "[postprocess]") {
  const Grid grid(50.0, 512);
  const SystemSpec ddk = make_builtin("ddk");
  const SolveConfig config{};
  const SolveResult sol =
      newton_solve(ddk, 0.05, kdv_profile(ddk.gamma, grid), config);
  const Field v = unscale(sol.V, sol.eps);
  const auto& K = *ddk.kernels;
  const Field eta = reconstruct_eta(K[2], K[3], v, sol.omega);
  const auto [r1, r2] =
      system_residual(K[0], K[1], K[2], K[3], eta, v, sol.omega, 1.0);
  REQUIRE(r1 <= 1e-8);
  REQUIRE(r2 <= 1e-8);
  REQUIRE(std::max(r1, r2) <= 100.0 * config.newton_tol);
}

TEST_CASE("rate_fit", "[postprocess]") {
  const Grid grid(50.0, 256);
  const double gamma = 4.5;
  const Field sigma = kdv_profile(gamma, grid);
  const AssumptionReport report;  // predicted exponent not under test here

  auto synthetic = [&](const std::vector<double>& eps,
                       const std::vector<double>& dev) {
    // V = sigma + (dev/||delta||) delta gives ||V - sigma|| = dev exactly
    const double xi2 = grid.freq(2);
    const Field delta = Field::sample(
        grid, [xi2](double x) { return std::cos(xi2 * x); }, true);
    const double nd = hs_norm(delta, 1.0);
    std::vector<SolveResult> results;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      results.push_back(SolveResult{sigma + (dev[i] / nd) * delta, eps[i],
                                    1.0, 1, 0.0, dev[i], 1.0});
    }
    return results;
  };

  SECTION("exact power law is recovered to roundoff") {
    const std::vector<double> eps = {0.2, 0.1, 0.05, 0.025};
    std::vector<double> dev;
    for (double e : eps) dev.push_back(3.7 * e * e);
    const RateStudy study = rate_fit(synthetic(eps, dev), sigma, 1.0, report);
    REQUIRE(study.fitted_slope == Approx(2.0).margin(1e-10));
    REQUIRE(study.fit_r2 == Approx(1.0).margin(1e-12));
  }
  SECTION("noisy 1.5 power law lands near 1.5") {
    const std::vector<double> eps = {0.2, 0.1, 0.05, 0.025};
    std::vector<double> dev;
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> noise(-0.01, 0.01);
    for (double e : eps) dev.push_back(std::pow(e, 1.5) * (1.0 + noise(rng)));
    const RateStudy study = rate_fit(synthetic(eps, dev), sigma, 1.0, report);
    REQUIRE(study.fitted_slope >= 1.45);
    REQUIRE(study.fitted_slope <= 1.55);
  }
  SECTION("slope is invariant under scaling the deviations") {
    const std::vector<double> eps = {0.2, 0.1, 0.05};
    std::vector<double> dev = {0.04, 0.012, 0.003}, dev7 = dev;
    for (double& d : dev7) d *= 7.0;
    const double s1 =
        rate_fit(synthetic(eps, dev), sigma, 1.0, report).fitted_slope;
    const double s2 =
        rate_fit(synthetic(eps, dev7), sigma, 1.0, report).fitted_slope;
    REQUIRE(s1 == Approx(s2).margin(1e-9));
  }
  SECTION("fewer than three distinct eps values is an error") {
    REQUIRE_THROWS_AS(
        rate_fit(synthetic({0.1, 0.05}, {0.01, 0.003}), sigma, 1.0, report),
        InsufficientData);
  }
  SECTION("pipeline sweep fits above the pass bar") {
    const SystemSpec ddk = make_builtin("ddk");
    const Grid g512(50.0, 512);
    const SweepOutcome sweep =
        continuation_sweep(ddk, {0.2, 0.1, 0.05, 0.025}, g512, {});
    REQUIRE(sweep.ok());
    const AssumptionReport rep = check_assumptions(ddk, ddk.xi1);
    const RateStudy study =
        rate_fit(sweep.results, kdv_profile(ddk.gamma, g512), 1.0, rep);
    REQUIRE(study.fitted_slope >= 1.0);
    REQUIRE(study.predicted_exponent == Approx(1.5).margin(0.05));
    for (std::size_t i = 1; i < study.deviations.size(); ++i) {
      REQUIRE(study.deviations[i] < study.deviations[i - 1]);
    }

    // asymptotic envelope: one constant C fitted at the largest eps bounds
    // deviation(eps) <= C (eps^{(3-2b)/(2-b)} + eps^{4-2 max(s_h, s_t)})
    // across the whole sweep
    auto envelope = [&](double eps) {
      return std::pow(eps, (3.0 - 2.0 * ddk.beta) / (2.0 - ddk.beta)) +
             std::pow(eps, 4.0 - 2.0 * std::max(ddk.s_h, ddk.s_t));
    };
    const double C = study.deviations[0] / envelope(study.eps[0]);
    for (std::size_t i = 0; i < study.eps.size(); ++i) {
      REQUIRE(study.deviations[i] <= C * envelope(study.eps[i]) * 1.0001);
    }
  }
}
