// SPDX-License-Identifier: Apache-2.0

#include "hpfas/outage_analytic.hpp"

#include "hpfas/errors.hpp"
#include "hpfas/specfun.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace hpfas {

using quad::QuadResult;
using quad::QuadSpec;
using specfun::bessel_i0_scaled;
using specfun::marcum_q1;
using specfun::marcum_q1_complement;

namespace {

constexpr const char* kMethodNames[] = {
    "hpfas_exact",   "hpfas_sfa",      "pa_only",           "fa_only_exact",    "fa_only_sfa",
    "mu_hpfas_exact", "mu_hpfas_sfa", "mu_pa_only_closed", "mu_fa_only_exact",
};

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double noncentrality(double kappa, double mu) { return 2.0 * kappa / (mu * mu); }

// Tolerances for integrals nested inside another integral or a table: ten
// times tighter than the outer level and purely relative, so that small
// kernels keep their digits.
QuadSpec inner_spec(const QuadSpec& spec)
{
  QuadSpec inner = spec;
  inner.rel_tol = spec.rel_tol * 0.1;
  inner.abs_tol = 1e-300;
  return inner;
}

QuadResult block_outage_upper(double C, int L, double kappa, double mu, double upper,
                              const QuadSpec& spec)
{
  if (C == 0.0)
    return {};
  const double ratio = mu * mu / (1.0 - mu * mu);
  const double b = std::sqrt(C);
  auto bracket = [&](double r) { return std::pow(clamp01(marcum_q1_complement(std::sqrt(ratio * r), b)), L); };
  return quad::integrate_semiinf_ncchi2(bracket, noncentrality(kappa, mu), upper, spec);
}

void check_inputs(double x, int L, double kappa, double mu, const char* what)
{
  if (!(x >= 0.0) || !std::isfinite(x))
    throw DomainError(std::string(what) + ": argument must be finite and >= 0");
  if (L < 1)
    throw DomainError(std::string(what) + ": block size must be >= 1");
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw DomainError(std::string(what) + ": kappa must be >= 0");
  if (!(mu > 0.0 && mu < 1.0))
    throw DomainError(std::string(what) + ": mu must lie in (0, 1)");
}

struct Tally {
  double inner_error = 0.0; // largest per-abscissa error of the inner integrals
  long evaluations = 0;
  bool converged = true;
  bool degenerate = false;

  void add(const QuadResult& r)
  {
    evaluations += r.evaluations;
    converged = converged && r.converged;
  }
};

OutageEstimate finish(EstimateMethod method, double value, double error, const Tally& t,
                      bool outer_converged)
{
  OutageEstimate e;
  e.method = method;
  e.value = clamp01(value);
  e.error = std::max(0.0, error);
  e.evaluations = t.evaluations;
  e.converged = outer_converged && t.converged;
  e.sfa_degenerate = t.degenerate;
  return e;
}

OutageEstimate zero_outage(EstimateMethod method)
{
  OutageEstimate e;
  e.method = method;
  return e;
}

void validate_options(const AnalyticOptions& opt)
{
  opt.spec.validate();
  if (opt.user != 1 && opt.user != 2)
    throw ValidationError("user must be 1 or 2");
}

} // namespace

std::string to_string(AnalyticMethod m) { return kMethodNames[static_cast<int>(m)]; }

std::optional<AnalyticMethod> parse_analytic_method(const std::string& name)
{
  for (int i = 0; i < static_cast<int>(std::size(kMethodNames)); ++i)
    if (name == kMethodNames[i])
      return static_cast<AnalyticMethod>(i);
  return std::nullopt;
}

bool is_two_user(AnalyticMethod m) { return static_cast<int>(m) >= static_cast<int>(AnalyticMethod::mu_hpfas_exact); }

std::string to_string(PaOnlyThreshold t)
{
  return t == PaOnlyThreshold::port_marginal ? "port_marginal" : "block_scaled";
}

std::optional<PaOnlyThreshold> parse_pa_only_threshold(const std::string& name)
{
  if (name == "port_marginal")
    return PaOnlyThreshold::port_marginal;
  if (name == "block_scaled")
    return PaOnlyThreshold::block_scaled;
  return std::nullopt;
}

QuadResult block_outage(double C, int L, double kappa, double mu, const QuadSpec& spec)
{
  check_inputs(C, L, kappa, mu, "block_outage");
  return block_outage_upper(C, L, kappa, mu, quad::ncchi2_truncation(noncentrality(kappa, mu), spec), spec);
}

double sir_port_outage(double r, double r_tilde, double gamma_tilde, double mu)
{
  if (gamma_tilde == 0.0)
    return 0.0;
  const double m = mu * mu / ((1.0 - mu * mu) * (gamma_tilde + 1.0));
  const double a = std::sqrt(m * gamma_tilde * r_tilde);
  const double b = std::sqrt(m * r);
  const double d = a - b;
  const double second = std::exp(-0.5 * d * d) * bessel_i0_scaled(a * b) / (gamma_tilde + 1.0);
  return clamp01(marcum_q1(a, b) - second);
}

QuadResult sir_block_outage(double gamma_tilde, int L, double kappa, double mu, const QuadSpec& spec)
{
  check_inputs(gamma_tilde, L, kappa, mu, "sir_block_outage");
  if (gamma_tilde == 0.0)
    return {};
  const double s = noncentrality(kappa, mu);
  const double upper = quad::ncchi2_truncation(s, spec);
  const QuadSpec inner = inner_spec(spec);
  Tally tally;
  auto over_desired = [&](double r_tilde) {
    auto bracket = [&](double r) { return std::pow(sir_port_outage(r, r_tilde, gamma_tilde, mu), L); };
    const QuadResult in = quad::integrate_semiinf_ncchi2(bracket, s, upper, inner, 0.0);
    tally.add(in);
    tally.inner_error = std::max(tally.inner_error, in.error);
    return in.value;
  };
  QuadResult out = quad::integrate_semiinf_ncchi2(over_desired, s, upper, spec);
  out.error += tally.inner_error + spec.tail_mass;
  out.evaluations += tally.evaluations;
  out.converged = out.converged && tally.converged;
  return out;
}

QuadResult sir_sfa_block_outage(double gamma_tilde, int L, double kappa, double mu, const QuadSpec& spec)
{
  check_inputs(gamma_tilde, L, kappa, mu, "sir_sfa_block_outage");
  if (gamma_tilde == 0.0)
    return {};
  const double s = noncentrality(kappa, mu);
  const double a = std::sqrt(s);
  auto step = [&](double r) { return marcum_q1(a, std::sqrt(sfa_delta_mu(r, L, gamma_tilde, mu))); };
  return quad::integrate_semiinf_ncchi2(step, s, spec);
}

double pa_only_mu_kernel(double gamma_tilde, double kappa)
{
  if (!(gamma_tilde >= 0.0) || !(kappa >= 0.0))
    throw DomainError("pa_only_mu_kernel: arguments must be >= 0");
  if (gamma_tilde == 0.0)
    return 0.0;
  if (std::isinf(gamma_tilde))
    return 1.0;
  const double g1 = 1.0 + gamma_tilde;
  const double a = std::sqrt(2.0 * kappa * gamma_tilde / g1);
  const double b = std::sqrt(2.0 * kappa / g1);
  const double d = a - b;
  const double second = std::exp(-0.5 * d * d) * bessel_i0_scaled(a * b) / g1;
  return clamp01(marcum_q1(a, b) - second);
}

const quad::LogChebyshevTable& KernelCache::table(Kind kind, double kappa, double mu, int L,
                                                  const QuadSpec& spec)
{
  const Key key{static_cast<int>(kind), kappa, mu, L, spec.rel_tol, spec.abs_tol, spec.tail_mass,
                spec.max_subdivisions};
  std::lock_guard lock(mutex_);
  auto it = tables_.find(key);
  if (it != tables_.end())
    return *it->second;

  const QuadSpec inner = inner_spec(spec);
  std::function<double(double)> f;
  switch (kind) {
  case Kind::block_outage:
    f = [=](double C) { return block_outage(C, L, kappa, mu, inner).value; };
    break;
  case Kind::sir_block:
    f = [=](double g) { return sir_block_outage(g, L, kappa, mu, inner).value; };
    break;
  case Kind::sir_sfa_block:
    f = [=](double g) { return sir_sfa_block_outage(g, L, kappa, mu, inner).value; };
    break;
  }
  quad::LogChebyshevTable::Options options;
  options.log_tol = 10.0 * spec.rel_tol;
  auto table = std::make_unique<quad::LogChebyshevTable>(std::move(f), options);
  return *tables_.emplace(key, std::move(table)).first->second;
}

std::size_t KernelCache::size() const
{
  std::lock_guard lock(mutex_);
  return tables_.size();
}

namespace {

// Product over blocks of a tabulated per-block kernel, one table per distinct size.
class BlockProduct {
public:
  BlockProduct(KernelCache& cache, KernelCache::Kind kind, const SystemParams& p,
               const BlockStructure& blocks, const QuadSpec& spec)
  {
    for (const auto& [L, count] : blocks.multiplicities())
      factors_.push_back({&cache.table(kind, p.rician_factor, p.correlation, L, spec), count});
  }

  double operator()(double x) const
  {
    double prod = 1.0;
    for (const auto& f : factors_)
      prod *= std::pow(clamp01((*f.table)(x)), f.count);
    return prod;
  }

  bool converged() const
  {
    return std::all_of(factors_.begin(), factors_.end(), [](const Factor& f) { return f.table->all_converged(); });
  }

  long evaluations() const
  {
    long n = 0;
    for (const auto& f : factors_)
      n += static_cast<long>(f.table->function_evaluations());
    return n;
  }

private:
  struct Factor {
    const quad::LogChebyshevTable* table;
    int count;
  };
  std::vector<Factor> factors_;
};

// Relative interpolation error of a product of tabulated kernels, per block.
double table_error(const QuadSpec& spec, const BlockStructure& blocks, double value)
{
  return blocks.num_blocks() * (10.0 * spec.rel_tol * value + spec.tail_mass);
}

KernelCache& cache_or(const AnalyticOptions& opt, std::unique_ptr<KernelCache>& local)
{
  if (opt.cache != nullptr)
    return *opt.cache;
  local = std::make_unique<KernelCache>();
  return *local;
}

} // namespace

OutageEstimate outage_hpfas_exact(const ScenarioSingleUser& s, const AnalyticOptions& opt)
{
  s.validate();
  validate_options(opt);
  const SystemParams& p = s.params;
  if (p.snr_threshold == 0.0)
    return zero_outage(EstimateMethod::exact);

  const double upper = quad::ncchi2_truncation(noncentrality(p.rician_factor, p.correlation), opt.spec);
  const QuadSpec inner = inner_spec(opt.spec);
  const auto mult = s.blocks.multiplicities();
  Tally tally;
  auto kernel = [&](double phi_y) {
    const double C = threshold_C(p, phi_y);
    double prod = 1.0;
    double err = 0.0;
    for (const auto& [L, count] : mult) {
      const QuadResult r = block_outage_upper(C, L, p.rician_factor, p.correlation, upper, inner);
      tally.add(r);
      err += count * r.error;
      prod *= std::pow(clamp01(r.value), count);
    }
    tally.inner_error = std::max(tally.inner_error, err);
    return prod;
  };
  const double half = 0.5 * p.region_y;
  const QuadResult outer = quad::integrate_finite(kernel, 0.0, half, opt.spec);
  return finish(EstimateMethod::exact, outer.value / half, outer.error / half + tally.inner_error, tally,
                outer.converged);
}

OutageEstimate outage_hpfas_sfa(const ScenarioSingleUser& s, const AnalyticOptions& opt)
{
  s.validate();
  validate_options(opt);
  const SystemParams& p = s.params;
  if (p.snr_threshold == 0.0)
    return zero_outage(EstimateMethod::sfa);

  const double a = std::sqrt(noncentrality(p.rician_factor, p.correlation));
  const auto mult = s.blocks.multiplicities();
  Tally tally;
  auto kernel = [&](double phi_y) {
    double prod = 1.0;
    for (const auto& [L, count] : mult) {
      const SfaThreshold d = sfa_delta(phi_y, L, p);
      tally.degenerate = tally.degenerate || d.degenerate;
      ++tally.evaluations;
      prod *= std::pow(clamp01(marcum_q1_complement(a, d.value)), count);
    }
    return prod;
  };
  const double half = 0.5 * p.region_y;
  const QuadResult outer = quad::integrate_finite(kernel, 0.0, half, opt.spec);
  return finish(EstimateMethod::sfa, outer.value / half, outer.error / half, tally, outer.converged);
}

OutageEstimate outage_pa_only(const ScenarioSingleUser& s, const AnalyticOptions& opt)
{
  s.validate();
  validate_options(opt);
  const SystemParams& p = s.params;
  if (p.snr_threshold == 0.0)
    return zero_outage(EstimateMethod::closed_form);

  const double a = std::sqrt(2.0 * p.rician_factor);
  const double factor = opt.pa_only_threshold == PaOnlyThreshold::port_marginal ? 1.0 - p.mu2() : 1.0;
  Tally tally;
  auto kernel = [&](double phi_y) {
    ++tally.evaluations;
    return marcum_q1_complement(a, std::sqrt(factor * threshold_C(p, phi_y)));
  };
  const double half = 0.5 * p.region_y;
  const QuadResult outer = quad::integrate_finite(kernel, 0.0, half, opt.spec);
  return finish(EstimateMethod::closed_form, outer.value / half, outer.error / half, tally, outer.converged);
}

OutageEstimate outage_fa_only_exact(const ScenarioSingleUser& s, const AnalyticOptions& opt)
{
  s.validate();
  validate_options(opt);
  const SystemParams& p = s.params;
  if (p.snr_threshold == 0.0)
    return zero_outage(EstimateMethod::exact);

  std::unique_ptr<KernelCache> local;
  const BlockProduct product(cache_or(opt, local), KernelCache::Kind::block_outage, p, s.blocks, opt.spec);
  auto kernel = [&](const Eigen::VectorXd& v) { return product(threshold_C_tilde(p, v[0], v[1])); };
  const double area = p.region_x * p.region_y;
  const QuadResult r = quad::integrate_spatial(
      kernel, {{0.0, p.region_x}, {-0.5 * p.region_y, 0.5 * p.region_y}}, opt.spec.spatial_points_per_axis);
  Tally tally;
  tally.evaluations = r.evaluations + product.evaluations();
  tally.converged = product.converged();
  const double value = r.value / area;
  return finish(EstimateMethod::exact, value, r.error / area + table_error(opt.spec, s.blocks, value), tally,
                r.converged);
}

OutageEstimate outage_fa_only_sfa(const ScenarioSingleUser& s, const AnalyticOptions& opt)
{
  s.validate();
  validate_options(opt);
  const SystemParams& p = s.params;
  if (p.snr_threshold == 0.0)
    return zero_outage(EstimateMethod::sfa);

  const double a = std::sqrt(noncentrality(p.rician_factor, p.correlation));
  const auto mult = s.blocks.multiplicities();
  std::atomic<bool> degenerate{false};
  auto kernel = [&](const Eigen::VectorXd& v) {
    const double C = threshold_C_tilde(p, v[0], v[1]);
    double prod = 1.0;
    for (const auto& [L, count] : mult) {
      const SfaThreshold d = sfa_delta_from_C(C, L, p.correlation);
      if (d.degenerate)
        degenerate.store(true, std::memory_order_relaxed);
      prod *= std::pow(clamp01(marcum_q1_complement(a, d.value)), count);
    }
    return prod;
  };
  const double area = p.region_x * p.region_y;
  const QuadResult r = quad::integrate_spatial(
      kernel, {{0.0, p.region_x}, {-0.5 * p.region_y, 0.5 * p.region_y}}, opt.spec.spatial_points_per_axis);
  Tally tally;
  tally.evaluations = r.evaluations * static_cast<long>(mult.size());
  tally.degenerate = degenerate.load();
  return finish(EstimateMethod::sfa, r.value / area, r.error / area, tally, r.converged);
}

namespace {

// Region of the evaluated user and the SIR threshold at a spatial node.
struct TwoUserGeometry {
  const ScenarioTwoUser& s;
  int user;

  quad::Interval y_range() const
  {
    const double half = 0.5 * s.params.region_y;
    return user == 1 ? quad::Interval{-half, 0.0} : quad::Interval{0.0, half};
  }

  // Pinching antennas aligned with their users; x_self is the evaluated user.
  double aligned(double x_self, double x_other, double y) const
  {
    const double h = s.params.waveguide_height;
    const double own_y = user == 1 ? s.pa1_y() : s.pa2_y();
    const double other_y = user == 1 ? s.pa2_y() : s.pa1_y();
    return gamma_tilde_mu(s, {x_self, y, 0.0}, {x_self, own_y, h}, {x_other, other_y, h});
  }

  double fixed(double x, double y) const
  {
    const Eigen::Vector3d own = user == 1 ? s.bs_center_1() : s.bs_center_2();
    const Eigen::Vector3d other = user == 1 ? s.bs_center_2() : s.bs_center_1();
    return gamma_tilde_mu(s, {x, y, 0.0}, own, other);
  }
};

OutageEstimate two_user_aligned(const ScenarioTwoUser& s, const AnalyticOptions& opt, EstimateMethod method,
                                const std::function<double(double)>& kernel_of_gamma,
                                const std::function<long()>& extra_evaluations,
                                const std::function<bool()>& kernel_converged, bool tabulated)
{
  const SystemParams& p = s.params;
  const TwoUserGeometry geo{s, opt.user};
  auto kernel = [&](const Eigen::VectorXd& v) { return kernel_of_gamma(geo.aligned(v[0], v[1], v[2])); };
  const double volume = p.region_x * p.region_x * 0.5 * p.region_y;
  const QuadResult r = quad::integrate_spatial(kernel, {{0.0, p.region_x}, {0.0, p.region_x}, geo.y_range()},
                                               opt.spec.spatial_points_3d);
  Tally tally;
  tally.evaluations = r.evaluations + extra_evaluations();
  tally.converged = kernel_converged();
  const double value = r.value / volume;
  const double err = r.error / volume + (tabulated ? table_error(opt.spec, s.blocks, value) : 0.0);
  return finish(method, value, err, tally, r.converged);
}

} // namespace

OutageEstimate outage_mu_hpfas_exact(const ScenarioTwoUser& s, const AnalyticOptions& opt)
{
  s.validate();
  validate_options(opt);
  if (s.params.snr_threshold == 0.0)
    return zero_outage(EstimateMethod::exact);
  std::unique_ptr<KernelCache> local;
  const BlockProduct product(cache_or(opt, local), KernelCache::Kind::sir_block, s.params, s.blocks, opt.spec);
  return two_user_aligned(
      s, opt, EstimateMethod::exact, [&](double g) { return product(g); },
      [&] { return product.evaluations(); }, [&] { return product.converged(); }, true);
}

OutageEstimate outage_mu_hpfas_sfa(const ScenarioTwoUser& s, const AnalyticOptions& opt)
{
  s.validate();
  validate_options(opt);
  if (s.params.snr_threshold == 0.0)
    return zero_outage(EstimateMethod::sfa);
  std::unique_ptr<KernelCache> local;
  const BlockProduct product(cache_or(opt, local), KernelCache::Kind::sir_sfa_block, s.params, s.blocks, opt.spec);
  return two_user_aligned(
      s, opt, EstimateMethod::sfa, [&](double g) { return product(g); },
      [&] { return product.evaluations(); }, [&] { return product.converged(); }, true);
}

OutageEstimate outage_mu_pa_only_closed(const ScenarioTwoUser& s, const AnalyticOptions& opt)
{
  s.validate();
  validate_options(opt);
  if (s.params.snr_threshold == 0.0)
    return zero_outage(EstimateMethod::closed_form);
  const double kappa = s.params.rician_factor;
  return two_user_aligned(
      s, opt, EstimateMethod::closed_form, [&](double g) { return pa_only_mu_kernel(g, kappa); },
      [] { return 0L; }, [] { return true; }, false);
}

OutageEstimate outage_mu_fa_only_exact(const ScenarioTwoUser& s, const AnalyticOptions& opt)
{
  s.validate();
  validate_options(opt);
  const SystemParams& p = s.params;
  if (p.snr_threshold == 0.0)
    return zero_outage(EstimateMethod::exact);
  std::unique_ptr<KernelCache> local;
  const BlockProduct product(cache_or(opt, local), KernelCache::Kind::sir_block, p, s.blocks, opt.spec);
  const TwoUserGeometry geo{s, opt.user};
  auto kernel = [&](const Eigen::VectorXd& v) { return product(geo.fixed(v[0], v[1])); };
  const double area = p.region_x * 0.5 * p.region_y;
  const QuadResult r = quad::integrate_spatial(kernel, {{0.0, p.region_x}, geo.y_range()},
                                               opt.spec.spatial_points_per_axis);
  Tally tally;
  tally.evaluations = r.evaluations + product.evaluations();
  tally.converged = product.converged();
  const double value = r.value / area;
  return finish(EstimateMethod::exact, value, r.error / area + table_error(opt.spec, s.blocks, value), tally,
                r.converged);
}

OutageEstimate evaluate(AnalyticMethod m, const ScenarioSingleUser& s, const AnalyticOptions& opt)
{
  switch (m) {
  case AnalyticMethod::hpfas_exact:
    return outage_hpfas_exact(s, opt);
  case AnalyticMethod::hpfas_sfa:
    return outage_hpfas_sfa(s, opt);
  case AnalyticMethod::pa_only:
    return outage_pa_only(s, opt);
  case AnalyticMethod::fa_only_exact:
    return outage_fa_only_exact(s, opt);
  case AnalyticMethod::fa_only_sfa:
    return outage_fa_only_sfa(s, opt);
  default:
    throw ValidationError("method " + to_string(m) + " needs a two-user scenario");
  }
}

OutageEstimate evaluate(AnalyticMethod m, const ScenarioTwoUser& s, const AnalyticOptions& opt)
{
  switch (m) {
  case AnalyticMethod::mu_hpfas_exact:
    return outage_mu_hpfas_exact(s, opt);
  case AnalyticMethod::mu_hpfas_sfa:
    return outage_mu_hpfas_sfa(s, opt);
  case AnalyticMethod::mu_pa_only_closed:
    return outage_mu_pa_only_closed(s, opt);
  case AnalyticMethod::mu_fa_only_exact:
    return outage_mu_fa_only_exact(s, opt);
  default:
    throw ValidationError("method " + to_string(m) + " needs a single-user scenario");
  }
}

} // namespace hpfas
