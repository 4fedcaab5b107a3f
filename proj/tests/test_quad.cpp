// SPDX-License-Identifier: Apache-2.0

#include "hpfas/errors.hpp"
#include "hpfas/model.hpp"
#include "hpfas/outage_analytic.hpp"
#include "hpfas/quad.hpp"
#include "hpfas/rng.hpp"
#include "hpfas/specfun.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace hpfas;
using namespace hpfas::quad;

TEST_SUITE("quad")
{
  TEST_CASE("integrate_finite is exact on polynomials and converges on sin")
  {
    QuadSpec spec;
    spec.rel_tol = 1e-13;
    spec.abs_tol = 1e-15;
    const QuadResult sq = integrate_finite([](double x) { return x * x; }, 0.0, 1.0, spec);
    CHECK(std::abs(sq.value - 1.0 / 3.0) < 1e-12);
    CHECK(sq.converged);
    const QuadResult s = integrate_finite([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, spec);
    CHECK(std::abs(s.value - 2.0) < 1e-12);
    CHECK(s.error < 1e-12);
  }

  TEST_CASE("integrate_finite reports non-convergence and rejects non-finite values")
  {
    QuadSpec spec;
    spec.max_subdivisions = 3;
    spec.rel_tol = 1e-14;
    const QuadResult r = integrate_finite([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, spec);
    CHECK_FALSE(r.converged);
    CHECK_THROWS_AS(integrate_finite([](double) { return NAN; }, 0.0, 1.0, QuadSpec{}), DomainError);
  }

  TEST_CASE("integrate_semiinf_ncchi2: normalisation and mean")
  {
    QuadSpec spec;
    for (double s : {0.0, 3.0, 14.43}) {
      const QuadResult one = integrate_semiinf_ncchi2([](double) { return 1.0; }, s, spec);
      CHECK(std::abs(one.value - 1.0) <= spec.tail_mass + 1e-12);
      const QuadResult mean = integrate_semiinf_ncchi2([](double r) { return r; }, s, spec, 1e3);
      CHECK(mean.value == doctest::Approx(2.0 + s).epsilon(1e-7));
    }
  }

  TEST_CASE("integrate_semiinf_ncchi2 against a dense grid for the single-port bracket")
  {
    // Fig. 2 configuration, phi_y = 5 m, gamma_th = 10 dB.
    const SystemParams p = SystemParams::single_user_sweep_preset();
    const double C = threshold_C(p, 5.0);
    const double mu2 = p.mu2();
    const double s = 2.0 * p.rician_factor / mu2;
    auto g = [&](double r) { return specfun::marcum_q1_complement(std::sqrt(mu2 * r / (1.0 - mu2)), std::sqrt(C)); };
    const QuadResult q = integrate_semiinf_ncchi2(g, s, QuadSpec{});

    // Composite Simpson on [0, 200] with 200000 panels.
    const int n = 200000;
    const double h = 200.0 / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double r = i * h;
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      sum += w * specfun::ncchi2_pdf(r, s) * g(r);
    }
    const double grid = sum * h / 3.0;
    CHECK(q.value == doctest::Approx(grid).epsilon(1e-8));
  }

  TEST_CASE("gauss_legendre nodes and weights")
  {
    for (int n : {1, 2, 5, 32, 72}) {
      const GaussLegendreRule rule = gauss_legendre(n);
      CHECK(rule.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
      // Exact for x^(2n-2).
      const double moment = (rule.weights.array() * rule.nodes.array().pow(2 * n - 2)).sum();
      CHECK(moment == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-12));
    }
  }

  TEST_CASE("integrate_spatial: constants and separable polynomials")
  {
    const std::vector<Interval> box{{0.0, 2.0}, {-1.0, 3.0}, {1.0, 1.5}};
    const QuadResult vol = integrate_spatial([](const Eigen::VectorXd&) { return 1.0; }, box, 8);
    CHECK(vol.value == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(vol.converged);

    auto poly = [](const Eigen::VectorXd& x) { return (x[0] * x[0] + 1.0) * (x[1] - 2.0 * x[1] * x[1] * x[1]) * x[2]; };
    auto fx = [](double a, double b, auto F) { return F(b) - F(a); };
    const double ix = fx(0.0, 2.0, [](double x) { return x * x * x / 3.0 + x; });
    const double iy = fx(-1.0, 3.0, [](double y) { return 0.5 * y * y - 0.5 * y * y * y * y; });
    const double iz = fx(1.0, 1.5, [](double z) { return 0.5 * z * z; });
    const QuadResult r = integrate_spatial(poly, box, 6);
    CHECK(std::abs(r.value - ix * iy * iz) < 1e-12 * std::abs(ix * iy * iz));
    CHECK_THROWS(integrate_spatial(poly, {}, 6));
  }

  TEST_CASE("spatial average of the single-user kernel matches a Monte Carlo average")
  {
    const SystemParams p = SystemParams::single_user_sweep_preset();
    const BlockStructure blocks;
    QuadSpec spec;
    spec.rel_tol = 1e-7;
    auto kernel = [&](double phi_y) {
      const double C = threshold_C(p, phi_y);
      double prod = 1.0;
      for (int L : blocks.block_sizes)
        prod *= block_outage(C, L, p.rician_factor, p.correlation, spec).value;
      return prod;
    };
    const double half = 0.5 * p.region_y;
    const QuadResult q = integrate_spatial([&](const Eigen::VectorXd& x) { return kernel(x[0]) / half; },
                                           {{0.0, half}}, 64);
    RngStream rng(99, 0);
    const int n = 4000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = kernel(half * rng.uniform());
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    CHECK(std::abs(q.value - mean) < 3.0 * se);
  }

  TEST_CASE("two-user exact outage: 32 vs 48 points per axis")
  {
    const ScenarioTwoUser s{SystemParams::two_user_preset(), BlockStructure{}, 0.0, 0.0};
    AnalyticOptions coarse;
    AnalyticOptions fine;
    fine.spec.spatial_points_3d = 48;
    KernelCache cache;
    coarse.cache = &cache;
    fine.cache = &cache;
    const double a = outage_mu_hpfas_exact(s, coarse).value;
    const double b = outage_mu_hpfas_exact(s, fine).value;
    CHECK(std::abs(a - b) < 1e-4);
  }

  TEST_CASE("LogChebyshevTable reproduces a smooth positive function")
  {
    auto f = [](double x) { return std::exp(-x) / (1.0 + x * x); };
    LogChebyshevTable table(f, {1e-11, 64, 4});
    for (double x : {1e-3, 0.01, 0.37, 1.0, 2.5, 13.0, 99.0}) {
      CHECK(table(x) == doctest::Approx(f(x)).epsilon(1e-9));
    }
    CHECK(table.all_converged());
    const std::size_t evals = table.function_evaluations();
    (void)table(0.5);
    CHECK(table.function_evaluations() == evals);
  }
}
