// SPDX-License-Identifier: Apache-2.0

#include "hpfas/specfun.hpp"

#include "hpfas/errors.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hpfas::specfun {

namespace {

using NoPromote = boost::math::policies::policy<boost::math::policies::promote_double<false>>;

// exp(-745) is the smallest positive double; beyond this separation of a and b
// the Chernoff bound exp(-(b-a)^2/2) on the smaller tail underflows.
constexpr double kTailSeparation = 38.6;

void require_nonnegative_finite(double v, const char* what)
{
  if (!std::isfinite(v) || v < 0.0)
    throw DomainError(std::string(what) + " must be finite and nonnegative");
}

double log_factorial(long k)
{
  return boost::math::lgamma(static_cast<double>(k) + 1.0, NoPromote());
}

// Boost's gamma_p_derivative and gamma_q are accurate to a few ulps; the
// explicit log forms are only used once those underflow.
constexpr double kLogFallback = 1e-280;

double log_poisson_pmf(double lambda, long k)
{
  const double v = boost::math::gamma_p_derivative(static_cast<double>(k) + 1.0, lambda, NoPromote());
  if (v > kLogFallback)
    return std::log(v);
  return -lambda + static_cast<double>(k) * std::log(lambda) - log_factorial(k);
}

// log P(Y <= m) for Y ~ Poi(lambda), m >= 0, lambda > 0.
double log_poisson_cdf(double lambda, long m)
{
  const double v = boost::math::gamma_q(static_cast<double>(m) + 1.0, lambda, NoPromote());
  if (v > kLogFallback)
    return std::log(v);
  const double lp = log_poisson_pmf(lambda, m);
  if (static_cast<double>(m) < lambda) {
    // F(m) / p(m) = sum_i m! / ((m-i)! lambda^i), ratio of successive terms < 1
    double term = 1.0;
    double sum = 1.0;
    for (long i = 1; i <= m; ++i) {
      term *= static_cast<double>(m - i + 1) / lambda;
      sum += term;
      if (term < 1e-17 * sum)
        break;
    }
    return lp + std::log(sum);
  }
  // P(Y > m) / p(m) = sum_{i>=1} lambda^i m! / (m+i)!
  double term = 1.0;
  double sum = 0.0;
  for (long i = 1; i < 1'000'000; ++i) {
    term *= lambda / static_cast<double>(m + i);
    sum += term;
    if (term < 1e-17 * sum)
      break;
  }
  return std::log1p(-std::exp(lp) * sum);
}

// S = sum_{k >= shift} p_A(k) F_B(k - shift) with A ~ Poi(lam_a), B ~ Poi(lam_b),
// lam_a <= lam_b, both > 0. Q1 = S(a^2/2, b^2/2, 0) and
// 1 - Q1 = S(b^2/2, a^2/2, 1) with the roles of the arguments swapped.
//
// The terms peak near sqrt(lam_a lam_b) with spread O(sqrt(k)). Summation starts
// ten spreads below the peak and runs upward, carrying q = p_B(m) / F_B(m) so
// that F_B is only ever accumulated, never differenced.
double poisson_pair_sum(double lam_a, double lam_b, long shift)
{
  const double peak = std::sqrt(lam_a * lam_b);
  const double spread = 10.0 * std::sqrt(peak + 1.0) + 10.0;
  long k = std::max<long>(shift, static_cast<long>(std::floor(peak - spread)));
  long m = k - shift;

  const double log_cdf_b = log_poisson_cdf(lam_b, m);
  const double log_t0 = log_poisson_pmf(lam_a, k) + log_cdf_b;
  double q = std::exp(log_poisson_pmf(lam_b, m) - log_cdf_b);

  double t = 1.0;
  double sum = 1.0;
  double log_scale = 0.0;
  const long k_max = static_cast<long>(peak + 40.0 * std::sqrt(peak + 1.0) + 400.0);
  while (k < k_max) {
    const double u = q * lam_b / static_cast<double>(m + 1);
    t *= lam_a / static_cast<double>(k + 1) * (1.0 + u);
    q = u / (1.0 + u);
    sum += t;
    ++k;
    ++m;
    if (static_cast<double>(k) > peak && t < 1e-17 * sum)
      break;
    if (sum > 1e280) {
      sum *= 1e-280;
      t *= 1e-280;
      log_scale += 280.0 * std::numbers::ln10;
    }
  }
  return std::exp(log_t0 + log_scale + std::log(sum));
}

} // namespace

double marcum_q1(double a, double b)
{
  require_nonnegative_finite(a, "marcum_q1: a");
  require_nonnegative_finite(b, "marcum_q1: b");
  if (b == 0.0)
    return 1.0;
  if (a == 0.0)
    return std::exp(-0.5 * b * b);
  if (b - a > kTailSeparation)
    return 0.0;
  if (a - b > kTailSeparation)
    return 1.0;
  const double lam_a = 0.5 * a * a;
  const double lam_b = 0.5 * b * b;
  const double q = lam_b >= lam_a ? poisson_pair_sum(lam_a, lam_b, 0)
                                  : 1.0 - poisson_pair_sum(lam_b, lam_a, 1);
  return std::clamp(q, 0.0, 1.0);
}

double marcum_q1_complement(double a, double b)
{
  require_nonnegative_finite(a, "marcum_q1: a");
  require_nonnegative_finite(b, "marcum_q1: b");
  if (b == 0.0)
    return 0.0;
  if (a == 0.0)
    return -std::expm1(-0.5 * b * b);
  if (b - a > kTailSeparation)
    return 1.0;
  if (a - b > kTailSeparation)
    return 0.0;
  const double lam_a = 0.5 * a * a;
  const double lam_b = 0.5 * b * b;
  const double p = lam_b >= lam_a ? 1.0 - poisson_pair_sum(lam_a, lam_b, 0)
                                  : poisson_pair_sum(lam_b, lam_a, 1);
  return std::clamp(p, 0.0, 1.0);
}

double bessel_i0_scaled(double x)
{
  require_nonnegative_finite(x, "bessel_i0_scaled: x");
  if (x < 700.0)
    return std::exp(-x) * boost::math::cyl_bessel_i(0, x, NoPromote());
  // Hankel asymptotic series; the terms are below 1e-20 by k = 6 for x >= 700.
  const double t = 1.0 / (8.0 * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 8; ++k) {
    term *= (2.0 * k - 1.0) * (2.0 * k - 1.0) * t / k;
    sum += term;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

double ncchi2_log_pdf(double x, double s)
{
  require_nonnegative_finite(x, "ncchi2_pdf: x");
  require_nonnegative_finite(s, "ncchi2_pdf: noncentrality");
  const double d = std::sqrt(x) - std::sqrt(s);
  return -std::numbers::ln2 - 0.5 * d * d + std::log(bessel_i0_scaled(std::sqrt(s * x)));
}

double ncchi2_pdf(double x, double s)
{
  require_nonnegative_finite(x, "ncchi2_pdf: x");
  require_nonnegative_finite(s, "ncchi2_pdf: noncentrality");
  const double d = std::sqrt(x) - std::sqrt(s);
  return 0.5 * std::exp(-0.5 * d * d) * bessel_i0_scaled(std::sqrt(s * x));
}

double ncchi2_cdf(double x, double s)
{
  if (std::isinf(x) && x > 0.0 && std::isfinite(s) && s >= 0.0)
    return 1.0;
  require_nonnegative_finite(x, "ncchi2_cdf: x");
  require_nonnegative_finite(s, "ncchi2_cdf: noncentrality");
  return marcum_q1_complement(std::sqrt(s), std::sqrt(x));
}

double ncchi2_sf(double x, double s)
{
  if (std::isinf(x) && x > 0.0 && std::isfinite(s) && s >= 0.0)
    return 0.0;
  require_nonnegative_finite(x, "ncchi2_sf: x");
  require_nonnegative_finite(s, "ncchi2_sf: noncentrality");
  return marcum_q1(std::sqrt(s), std::sqrt(x));
}

double ncchi2_quantile(double p, double s)
{
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("ncchi2_quantile: p must lie in (0, 1)");
  require_nonnegative_finite(s, "ncchi2_quantile: noncentrality");
  if (s == 0.0)
    return -2.0 * std::log1p(-p);

  // Residual cdf(x) - p, taken through the survival function in the upper half
  // so that p close to 1 keeps its digits.
  const bool upper = p > 0.5;
  const double target = upper ? 1.0 - p : p;
  auto residual = [&](double x) {
    return upper ? target - ncchi2_sf(x, s) : ncchi2_cdf(x, s) - target;
  };

  double lo = 0.0;
  double hi = std::max(1.0, s + 2.0);
  while (residual(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300)
      throw DomainError("ncchi2_quantile: failed to bracket");
  }

  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = residual(x);
    if (f == 0.0)
      return x;
    if (f < 0.0)
      lo = x;
    else
      hi = x;
    if (std::abs(f) <= 1e-15 * target || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
      break;
    const double density = ncchi2_pdf(x, s);
    double next = density > 0.0 ? x - f / density : 0.5 * (lo + hi);
    if (!(next > lo && next < hi))
      next = 0.5 * (lo + hi);
    x = next;
  }
  return x;
}

void NcChi2Params::validate() const
{
  if (!std::isfinite(noncentrality) || noncentrality < 0.0)
    throw ValidationError("NcChi2Params: noncentrality must be >= 0");
  if (!std::isfinite(scale) || scale <= 0.0)
    throw ValidationError("NcChi2Params: scale must be > 0");
}

double NcChi2Params::pdf(double x) const { return ncchi2_pdf(x / scale, noncentrality) / scale; }
double NcChi2Params::cdf(double x) const { return ncchi2_cdf(x / scale, noncentrality); }
double NcChi2Params::sf(double x) const { return ncchi2_sf(x / scale, noncentrality); }
double NcChi2Params::quantile(double p) const { return scale * ncchi2_quantile(p, noncentrality); }

} // namespace hpfas::specfun
