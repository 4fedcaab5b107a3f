// SPDX-License-Identifier: Apache-2.0

#include "hpfas/quad.hpp"

#include "hpfas/errors.hpp"
#include "hpfas/parallel.hpp"
#include "hpfas/specfun.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

namespace hpfas::quad {

namespace {

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
};

struct WorseFirst {
  bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

double checked(double v)
{
  if (!std::isfinite(v))
    throw DomainError("quadrature: integrand returned a non-finite value");
  return v;
}

// One 21-point Kronrod panel with the embedded 10-point Gauss rule and the
// QUADPACK error heuristic.
Panel gk21(const Integrand& f, double a, double b)
{
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
  using Gauss = boost::math::quadrature::gauss<double, 10>;
  const auto& x = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double fv_minus[11];
  double fv_plus[11];
  const double fc = checked(f(center));
  double kronrod = wk[0] * fc;
  double gauss = 0.0;
  double abs_sum = wk[0] * std::abs(fc);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double dx = half * x[i];
    fv_minus[i] = checked(f(center - dx));
    fv_plus[i] = checked(f(center + dx));
    const double pair = fv_minus[i] + fv_plus[i];
    kronrod += wk[i] * pair;
    abs_sum += wk[i] * (std::abs(fv_minus[i]) + std::abs(fv_plus[i]));
    if (i % 2 == 1)
      gauss += wg[i / 2] * pair;
  }

  const double mean = 0.5 * kronrod;
  double asc = wk[0] * std::abs(fc - mean);
  for (std::size_t i = 1; i < x.size(); ++i)
    asc += wk[i] * (std::abs(fv_minus[i] - mean) + std::abs(fv_plus[i] - mean));

  const double result_abs = abs_sum * std::abs(half);
  const double result_asc = asc * std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  if (result_asc != 0.0 && err != 0.0)
    err = result_asc * std::min(1.0, std::pow(200.0 * err / result_asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (result_abs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * result_abs, err);
  return {a, b, kronrod * half, err};
}

} // namespace

void QuadSpec::validate() const
{
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw ValidationError("QuadSpec: tolerances must be positive");
  if (max_subdivisions < 1)
    throw ValidationError("QuadSpec: max_subdivisions must be >= 1");
  if (spatial_points_per_axis < 2 || spatial_points_3d < 2)
    throw ValidationError("QuadSpec: spatial rules need at least 2 points per axis");
  if (!(tail_mass > 0.0 && tail_mass <= 1e-6))
    throw ValidationError("QuadSpec: tail_mass must lie in (0, 1e-6]");
}

QuadResult integrate_finite(const Integrand& f, double a, double b, const QuadSpec& spec,
                            int initial_pieces)
{
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw DomainError("integrate_finite: need finite a < b");
  initial_pieces = std::max(1, initial_pieces);

  std::priority_queue<Panel, std::vector<Panel>, WorseFirst> heap;
  QuadResult out;
  for (int i = 0; i < initial_pieces; ++i) {
    const double lo = a + (b - a) * i / initial_pieces;
    const double hi = i + 1 == initial_pieces ? b : a + (b - a) * (i + 1) / initial_pieces;
    heap.push(gk21(f, lo, hi));
    out.evaluations += 21;
  }

  auto totals = [&heap]() {
    auto copy = heap;
    double value = 0.0;
    double error = 0.0;
    while (!copy.empty()) {
      value += copy.top().value;
      error += copy.top().error;
      copy.pop();
    }
    return std::pair{value, error};
  };

  double value = 0.0;
  double error = 0.0;
  std::tie(value, error) = totals();
  int panels = initial_pieces;
  while (error > std::max(spec.abs_tol, spec.rel_tol * std::abs(value))) {
    if (panels >= spec.max_subdivisions) {
      out.converged = false;
      break;
    }
    const Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      out.converged = false;
      break;
    }
    heap.pop();
    const Panel left = gk21(f, worst.a, mid);
    const Panel right = gk21(f, mid, worst.b);
    heap.push(left);
    heap.push(right);
    out.evaluations += 42;
    ++panels;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    // Refresh the running sums now and then so drift cannot stall the loop.
    if (panels % 64 == 0)
      std::tie(value, error) = totals();
  }
  std::tie(out.value, out.error) = totals();
  return out;
}

double ncchi2_truncation(double s, const QuadSpec& spec)
{
  return specfun::ncchi2_quantile(1.0 - spec.tail_mass, s);
}

QuadResult integrate_semiinf_ncchi2(const Integrand& g, double s, const QuadSpec& spec,
                                    double g_bound)
{
  return integrate_semiinf_ncchi2(g, s, ncchi2_truncation(s, spec), spec, g_bound);
}

QuadResult integrate_semiinf_ncchi2(const Integrand& g, double s, double upper,
                                    const QuadSpec& spec, double g_bound)
{
  auto weighted = [&](double r) {
    const double w = specfun::ncchi2_pdf(r, s);
    return w == 0.0 ? 0.0 : w * g(r);
  };
  QuadResult res = integrate_finite(weighted, 0.0, upper, spec, 4);
  res.error += spec.tail_mass * std::abs(g_bound);
  return res;
}

GaussLegendreRule gauss_legendre(int n)
{
  if (n < 1)
    throw DomainError("gauss_legendre: n must be >= 1");
  GaussLegendreRule rule{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1)
    rule.nodes[n / 2] = 0.0;
  return rule;
}

namespace {

double tensor_rule(const SpatialIntegrand& f, const std::vector<Interval>& box, int n)
{
  const GaussLegendreRule rule = gauss_legendre(n);
  const std::size_t dim = box.size();
  std::size_t total = 1;
  for (std::size_t d = 0; d < dim; ++d)
    total *= static_cast<std::size_t>(n);

  std::vector<double> slot(total, 0.0);
  parallel::parallel_for(total, [&](std::size_t idx) {
    Eigen::VectorXd p(static_cast<Eigen::Index>(dim));
    double w = 1.0;
    std::size_t rest = idx;
    for (std::size_t d = 0; d < dim; ++d) {
      const auto j = static_cast<Eigen::Index>(rest % n);
      rest /= n;
      const double half = 0.5 * (box[d].hi - box[d].lo);
      p[static_cast<Eigen::Index>(d)] = box[d].lo + half * (rule.nodes[j] + 1.0);
      w *= half * rule.weights[j];
    }
    slot[idx] = w * checked(f(p));
  });

  double sum = 0.0;
  for (double v : slot)
    sum += v;
  return sum;
}

} // namespace

QuadResult integrate_spatial(const SpatialIntegrand& f, const std::vector<Interval>& box,
                             int points_per_axis, double abs_tol, double rel_tol)
{
  if (box.empty() || box.size() > 3)
    throw DomainError("integrate_spatial: dimension must be 1, 2 or 3");
  for (const auto& iv : box)
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi))
      throw DomainError("integrate_spatial: bounds must be finite with lo < hi");
  if (points_per_axis < 1)
    throw DomainError("integrate_spatial: points_per_axis must be >= 1");

  const double coarse = tensor_rule(f, box, points_per_axis);
  const double fine = tensor_rule(f, box, points_per_axis + 8);
  QuadResult out;
  out.value = fine;
  out.error = std::abs(fine - coarse);
  std::size_t per_rule_a = 1;
  std::size_t per_rule_b = 1;
  for (std::size_t d = 0; d < box.size(); ++d) {
    per_rule_a *= static_cast<std::size_t>(points_per_axis);
    per_rule_b *= static_cast<std::size_t>(points_per_axis + 8);
  }
  out.evaluations = static_cast<long>(per_rule_a + per_rule_b);
  out.converged = out.error <= std::max(abs_tol, rel_tol * std::abs(fine));
  return out;
}

LogChebyshevTable::LogChebyshevTable(std::function<double(double)> f)
    : LogChebyshevTable(std::move(f), Options{})
{
}

LogChebyshevTable::LogChebyshevTable(std::function<double(double)> f, Options options)
    : f_(std::move(f)), options_(options)
{
}

namespace {

double lobatto_node(double t0, double t1, int n, int j)
{
  return 0.5 * (t0 + t1) - 0.5 * (t1 - t0) * std::cos(std::numbers::pi * j / n);
}

double barycentric(const std::vector<double>& values, double t0, double t1, double t)
{
  const int n = static_cast<int>(values.size()) - 1;
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double tj = lobatto_node(t0, t1, n, j);
    const double diff = t - tj;
    if (diff == 0.0)
      return values[static_cast<std::size_t>(j)];
    double w = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == n)
      w *= 0.5;
    w /= diff;
    num += w * values[static_cast<std::size_t>(j)];
    den += w;
  }
  return num / den;
}

struct Underflow {};

} // namespace

void LogChebyshevTable::build_segment(double t0, double t1, int depth, Decade& out,
                                      std::size_t& evals) const
{
  auto log_f = [&](double t) {
    ++evals;
    const double v = f_(std::pow(10.0, t));
    if (!(v > 0.0) || !std::isfinite(v))
      throw Underflow{};
    return std::log(v);
  };

  int n = 8;
  std::vector<double> values(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j)
    values[static_cast<std::size_t>(j)] = log_f(lobatto_node(t0, t1, n, j));

  for (;;) {
    const int n2 = 2 * n;
    std::vector<double> refined(static_cast<std::size_t>(n2) + 1);
    double worst = 0.0;
    for (int j = 0; j <= n2; ++j) {
      if (j % 2 == 0) {
        refined[static_cast<std::size_t>(j)] = values[static_cast<std::size_t>(j / 2)];
        continue;
      }
      const double t = lobatto_node(t0, t1, n2, j);
      const double v = log_f(t);
      refined[static_cast<std::size_t>(j)] = v;
      worst = std::max(worst, std::abs(v - barycentric(values, t0, t1, t)));
    }
    if (worst <= options_.log_tol) {
      out.segments.push_back({t0, t1, std::move(refined)});
      return;
    }
    if (n2 < options_.max_degree) {
      n = n2;
      values = std::move(refined);
      continue;
    }
    if (depth < options_.max_split_depth) {
      const double mid = 0.5 * (t0 + t1);
      build_segment(t0, mid, depth + 1, out, evals);
      build_segment(mid, t1, depth + 1, out, evals);
      return;
    }
    out.converged = false;
    out.segments.push_back({t0, t1, std::move(refined)});
    return;
  }
}

const LogChebyshevTable::Decade& LogChebyshevTable::decade(int k) const
{
  std::lock_guard lock(mutex_);
  auto it = decades_.find(k);
  if (it != decades_.end())
    return *it->second;

  auto built = std::make_unique<Decade>();
  std::size_t evals = 0;
  try {
    build_segment(static_cast<double>(k), static_cast<double>(k + 1), 0, *built, evals);
  } catch (const Underflow&) {
    built = std::make_unique<Decade>();
    built->direct = true;
  }
  evaluations_ += evals;
  return *decades_.emplace(k, std::move(built)).first->second;
}

double LogChebyshevTable::operator()(double x) const
{
  if (!(x > 0.0) || !std::isfinite(x))
    return f_(x);
  const double t = std::log10(x);
  const Decade& d = decade(static_cast<int>(std::floor(t)));
  if (d.direct)
    return f_(x);
  for (const Segment& s : d.segments)
    if (t <= s.t1 || &s == &d.segments.back())
      return std::exp(barycentric(s.values, s.t0, s.t1, std::clamp(t, s.t0, s.t1)));
  return f_(x);
}

std::size_t LogChebyshevTable::function_evaluations() const
{
  std::lock_guard lock(mutex_);
  return evaluations_;
}

bool LogChebyshevTable::all_converged() const
{
  std::lock_guard lock(mutex_);
  return std::all_of(decades_.begin(), decades_.end(),
                     [](const auto& kv) { return kv.second->converged; });
}

} // namespace hpfas::quad
