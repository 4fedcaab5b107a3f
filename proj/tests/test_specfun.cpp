// SPDX-License-Identifier: Apache-2.0

#include "hpfas/errors.hpp"
#include "hpfas/specfun.hpp"

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <numbers>

using namespace hpfas;
using namespace hpfas::specfun;

namespace {

// exp(-x) I0(x): Boost below 700, the large-argument expansion above.
double i0e_reference(double x)
{
  if (x < 700.0)
    return boost::math::cyl_bessel_i(0, x) * std::exp(-x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 12; ++k) {
    term *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * x * k);
    sum += term;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

double q1_by_quadrature(double a, double b)
{
  auto f = [a](double t) { return t * std::exp(-0.5 * (t - a) * (t - a)) * i0e_reference(a * t); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, b, std::max(a, b) + 40.0, 25, 1e-14);
}

// I0(x) = sum_k (x/2)^(2k) / (k!)^2
double i0_series(double x)
{
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= (0.25 * x * x) / (static_cast<double>(k) * k);
    sum += term;
  }
  return sum;
}

// Poisson(s/2) mixture of central chi-square densities with 2 + 2j degrees of freedom.
double ncchi2_pdf_series(double x, double s)
{
  double sum = 0.0;
  double poisson = std::exp(-0.5 * s);
  double chi = 0.5 * std::exp(-0.5 * x); // density of chi2 with 2 dof
  for (int j = 0; j < 400; ++j) {
    sum += poisson * chi;
    poisson *= 0.5 * s / (j + 1);
    chi *= 0.5 * x / (j + 1); // chi2_{2j+4}(x) = chi2_{2j+2}(x) x / (2 (j + 1))
  }
  return sum;
}

} // namespace

TEST_SUITE("specfun")
{
  TEST_CASE("marcum_q1 boundary values")
  {
    CHECK(marcum_q1(3.0, 0.0) == 1.0);
    CHECK(marcum_q1(0.0, 1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    CHECK(marcum_q1(0.0, 1.0) == doctest::Approx(0.6065306597).epsilon(1e-10));
  }

  TEST_CASE("marcum_q1(1, 1) against quadrature of the defining integral")
  {
    const double oracle = q1_by_quadrature(1.0, 1.0);
    CHECK(std::abs(marcum_q1(1.0, 1.0) - oracle) < 1e-12);
    CHECK(oracle == doctest::Approx(0.733).epsilon(1e-3));
  }

  TEST_CASE("marcum_q1 and its complement sum to one, including far tails")
  {
    for (double a : {0.0, 0.3, 2.0, 10.0, 45.0})
      for (double b : {0.1, 1.5, 9.0, 45.0, 60.0})
        CHECK(marcum_q1(a, b) + marcum_q1_complement(a, b) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(marcum_q1(45.0, 45.0) == doctest::Approx(q1_by_quadrature(45.0, 45.0)).epsilon(1e-12));
    CHECK(marcum_q1(1.0, 30.0) > 0.0);
    CHECK(marcum_q1(1.0, 30.0) < 1e-150);
    CHECK(marcum_q1(1.0, 40.0) == 0.0); // ~1e-348, below the double range
    CHECK(marcum_q1_complement(40.0, 1.0) < 1e-200);
  }

  TEST_CASE("marcum_q1 rejects negative or non-finite arguments")
  {
    CHECK_THROWS_AS(marcum_q1(-1.0, 1.0), DomainError);
    CHECK_THROWS_AS(marcum_q1(1.0, NAN), DomainError);
  }

  TEST_CASE("bessel_i0_scaled")
  {
    CHECK(bessel_i0_scaled(0.0) == 1.0);
    CHECK(bessel_i0_scaled(1.0) == doctest::Approx(std::exp(-1.0) * i0_series(1.0)).epsilon(1e-14));
    CHECK(bessel_i0_scaled(12.5) == doctest::Approx(std::exp(-12.5) * i0_series(12.5)).epsilon(1e-13));
    const double asymptotic = 1.0 / std::sqrt(2.0 * std::numbers::pi * 700.0);
    CHECK(std::abs(bessel_i0_scaled(700.0) / asymptotic - 1.0) < 1e-3);
    CHECK(std::isfinite(bessel_i0_scaled(1e6)));
    CHECK_THROWS_AS(bessel_i0_scaled(-0.5), DomainError);
  }

  TEST_CASE("ncchi2_pdf")
  {
    CHECK(ncchi2_pdf(0.0, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ncchi2_pdf(2.0, 0.0) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(ncchi2_pdf(2.0, 0.0) == doctest::Approx(0.1839397).epsilon(1e-7));
    CHECK(ncchi2_pdf(5.0, 10.0) == doctest::Approx(ncchi2_pdf_series(5.0, 10.0)).epsilon(1e-13));
    CHECK(ncchi2_pdf(40.0, 30.0) == doctest::Approx(ncchi2_pdf_series(40.0, 30.0)).epsilon(1e-12));
    CHECK(std::log(ncchi2_pdf(5.0, 10.0)) == doctest::Approx(ncchi2_log_pdf(5.0, 10.0)).epsilon(1e-13));
  }

  TEST_CASE("ncchi2_cdf")
  {
    CHECK(ncchi2_cdf(0.0, 4.0) == 0.0);
    CHECK(ncchi2_cdf(1e4, 4.0) == doctest::Approx(1.0).epsilon(1e-15));
    const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [](double t) { return ncchi2_pdf(t, 2.0); }, 0.0, 3.0, 20, 1e-14);
    CHECK(std::abs(ncchi2_cdf(3.0, 2.0) - integral) < 1e-9);
    CHECK(ncchi2_cdf(3.0, 2.0) + ncchi2_sf(3.0, 2.0) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("ncchi2_quantile")
  {
    CHECK(ncchi2_quantile(0.5, 0.0) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(ncchi2_quantile(0.5, 0.0) == doctest::Approx(1.386294).epsilon(1e-6));
    const double p = 0.99;
    CHECK(std::abs(ncchi2_cdf(ncchi2_quantile(p, 10.0), 10.0) - p) < 1e-12);

    const double s = 2.0 * 7.0 / 0.97;
    const double x = ncchi2_quantile(1.0 - 1e-10, s);
    CHECK(x > s);
    CHECK(ncchi2_sf(x, s) == doctest::Approx(1e-10).epsilon(1e-6));
    CHECK(std::abs(ncchi2_cdf(x, s) - (1.0 - 1e-10)) < 1e-15);
    CHECK_THROWS_AS(ncchi2_quantile(1.0, 2.0), DomainError);
  }
}
