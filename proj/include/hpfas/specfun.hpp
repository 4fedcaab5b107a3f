// SPDX-License-Identifier: Apache-2.0

#ifndef HPFAS_SPECFUN_HPP
#define HPFAS_SPECFUN_HPP

namespace hpfas::specfun {

/// First-order Marcum Q-function
///
///   Q1(a, b) = int_b^inf t exp(-(t^2 + a^2)/2) I0(a t) dt,   a, b >= 0.
///
/// Evaluated as P(Y <= X) for independent Poisson variates X ~ Poi(a^2/2),
/// Y ~ Poi(b^2/2). Whichever of Q1 and 1 - Q1 is the smaller tail is summed
/// directly so both stay accurate in relative terms. Throws DomainError on
/// negative or non-finite input.
double marcum_q1(double a, double b);

/// 1 - Q1(a, b), computed without cancellation.
double marcum_q1_complement(double a, double b);

/// exp(-x) I0(x) for x >= 0.
double bessel_i0_scaled(double x);

/// Density of the 2-degree-of-freedom noncentral chi-square with
/// noncentrality s, evaluated through the scaled Bessel function.
double ncchi2_pdf(double x, double s);
double ncchi2_log_pdf(double x, double s);

/// CDF of the 2-dof noncentral chi-square: 1 - Q1(sqrt(s), sqrt(x)).
double ncchi2_cdf(double x, double s);

/// Survival function Q1(sqrt(s), sqrt(x)).
double ncchi2_sf(double x, double s);

/// Inverse CDF on 0 < p < 1, solved by safeguarded Newton iteration.
double ncchi2_quantile(double p, double s);

/// Noncentral chi-square (2 dof) of a scaled variate X = scale * chi2.
struct NcChi2Params {
  double noncentrality = 0.0;
  double scale = 1.0;

  void validate() const;
  double pdf(double x) const;
  double cdf(double x) const;
  double sf(double x) const;
  double quantile(double p) const;
  double mean() const { return scale * (2.0 + noncentrality); }
};

} // namespace hpfas::specfun

#endif // HPFAS_SPECFUN_HPP
