// SPDX-License-Identifier: Apache-2.0

#include "hpfas/acceptance.hpp"

#include "hpfas/outage_analytic.hpp"
#include "hpfas/outage_mc.hpp"
#include "hpfas/parallel.hpp"
#include "hpfas/runner.hpp"
#include "hpfas/specfun.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

namespace hpfas {

namespace {

using Clock = std::chrono::steady_clock;
using GK61 = boost::math::quadrature::gauss_kronrod<double, 61>;

std::string fmt(const char* f, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> linspace(double a, double b, int n)
{
  std::vector<double> out;
  for (int i = 0; i < n; ++i)
    out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  return out;
}

ScenarioSingleUser fig2_scenario() { return figure_config("fig2").single_user(); }
ScenarioSingleUser fig3_scenario() { return figure_config("fig3").single_user(); }
ScenarioTwoUser fig4_scenario() { return figure_config("fig4").two_user(); }

template <class S>
S at_gamma_db(S s, double db)
{
  s.params.snr_threshold = units::db_to_linear(db);
  return s;
}

ScenarioSingleUser at_power_dbm(ScenarioSingleUser s, double dbm)
{
  s.params.tx_power = units::dbm_to_watts(dbm);
  return s;
}

// Standard error used to compare an analytic value with a Monte Carlo estimate:
// the larger of the sample SE and the SE a binomial with the analytic mean would have.
double comparison_se(double analytic, const McResult& m)
{
  const double p = std::clamp(analytic, 0.0, 1.0);
  return std::max(m.standard_error, std::sqrt(p * (1.0 - p) / static_cast<double>(m.trials)));
}

struct Context {
  AcceptanceLevel level;
  long trials;
  KernelCache cache;

  AnalyticOptions options(PaOnlyThreshold t = PaOnlyThreshold::port_marginal)
  {
    AnalyticOptions opt;
    opt.cache = &cache;
    opt.pa_only_threshold = t;
    return opt;
  }

  McConfig mc(std::uint64_t seed) const
  {
    McConfig cfg;
    cfg.trials = trials;
    cfg.seed = seed;
    return cfg;
  }
};

// Q1(a, b) as the tail integral of t exp(-(t^2 + a^2)/2) I0(a t), with Boost's I0.
double marcum_by_quadrature(double a, double b)
{
  auto f = [a](double t) {
    const double x = a * t;
    return t * std::exp(-0.5 * (t - a) * (t - a)) * boost::math::cyl_bessel_i(0, x) * std::exp(-x);
  };
  return GK61::integrate(f, b, std::max(a, b) + 40.0, 20, 1e-14);
}

CriterionResult check_marcum(Context&)
{
  CriterionResult r{1, "marcum_q1 vs quadrature of its defining integral", false, "", "", "1e-09 abs", 0, 5};
  const double grid[] = {0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
  double worst = 0.0;
  for (double a : grid)
    for (double b : grid)
      worst = std::max(worst, std::abs(specfun::marcum_q1(a, b) - marcum_by_quadrature(a, b)));
  r.pass = worst <= 1e-9;
  r.measured = fmt("%.3g", worst);
  return r;
}

CriterionResult check_ncchi2(Context&)
{
  CriterionResult r{2, "ncchi2 cdf vs integrated pdf; quantile round trip", false, "", "", "cdf 1e-08, round trip 1e-09",
                    0, 10};
  std::mt19937_64 gen(20251016);
  std::uniform_real_distribution<double> ux(0.01, 60.0), us(0.0, 40.0), up(0.001, 0.999);
  double worst_cdf = 0.0;
  double worst_trip = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double x = ux(gen);
    const double s = us(gen);
    const double integral = GK61::integrate([s](double t) { return specfun::ncchi2_pdf(t, s); }, 0.0, x, 20, 1e-14);
    worst_cdf = std::max(worst_cdf, std::abs(specfun::ncchi2_cdf(x, s) - integral));
  }
  for (int i = 0; i < 50; ++i) {
    const double p = up(gen);
    const double s = us(gen);
    worst_trip = std::max(worst_trip, std::abs(specfun::ncchi2_cdf(specfun::ncchi2_quantile(p, s), s) - p));
  }
  r.pass = worst_cdf <= 1e-8 && worst_trip <= 1e-9;
  r.measured = "cdf " + fmt("%.3g", worst_cdf) + ", round trip " + fmt("%.3g", worst_trip);
  return r;
}

struct McComparison {
  double worst_z = 0.0;
  double worst_abs = 0.0;
  bool ok = true;
};

void compare(McComparison& c, double analytic, const McResult& m, double abs_limit)
{
  const double diff = std::abs(analytic - m.outage);
  const double se = comparison_se(analytic, m);
  const double z = se > 0.0 ? diff / se : (diff > 0.0 ? HUGE_VAL : 0.0);
  c.worst_z = std::max(c.worst_z, z);
  c.worst_abs = std::max(c.worst_abs, diff);
  if (!(z <= 3.0 && diff <= abs_limit))
    c.ok = false;
}

CriterionResult check_single_user_mc(Context& ctx)
{
  CriterionResult r{3, "exact HPFAS outage vs Monte Carlo, single user", false, "", "", "3 SE and 0.01 abs", 0, 300};
  McComparison c;
  for (double db : {0.0, 5.0, 10.0, 15.0, 20.0}) {
    const ScenarioSingleUser s = at_gamma_db(fig2_scenario(), db);
    const OutageEstimate e = outage_hpfas_exact(s, ctx.options());
    compare(c, e.value, mc_outage_single(s, McMode::hpfas, ctx.mc(1)), 0.01);
    c.ok = c.ok && e.converged;
  }
  r.pass = c.ok;
  r.measured = "max " + fmt("%.2f", c.worst_z) + " SE, max |diff| " + fmt("%.3g", c.worst_abs);
  return r;
}

CriterionResult check_reduction(Context& ctx)
{
  CriterionResult r{4, "N = 1 reduction to the PA-only form; threshold mode vs Monte Carlo", false, "", "",
                    "1e-06 abs; default mode within 3 SE", 0, 120};
  double worst = 0.0;
  bool converged = true;
  for (double db : linspace(0.0, 20.0, 10)) {
    ScenarioSingleUser s = at_gamma_db(fig2_scenario(), db);
    s.blocks = BlockStructure::single_port();
    const OutageEstimate exact = outage_hpfas_exact(s, ctx.options());
    const OutageEstimate pa = outage_pa_only(s, ctx.options());
    converged = converged && exact.converged && pa.converged;
    worst = std::max(worst, std::abs(exact.value - pa.value));
  }
  McComparison marginal;
  McComparison scaled;
  for (double db : {5.0, 10.0, 15.0}) {
    const ScenarioSingleUser s = at_gamma_db(fig2_scenario(), db);
    const McResult m = mc_outage_single(s, McMode::pa_only, ctx.mc(2));
    compare(marginal, outage_pa_only(s, ctx.options(PaOnlyThreshold::port_marginal)).value, m, 1.0);
    compare(scaled, outage_pa_only(s, ctx.options(PaOnlyThreshold::block_scaled)).value, m, 1.0);
  }
  r.pass = converged && worst <= 1e-6 && marginal.ok;
  r.measured = "reduction " + fmt("%.3g", worst) + "; port_marginal max " + fmt("%.2f", marginal.worst_z) +
               " SE, block_scaled max " + fmt("%.3g", scaled.worst_z) + " SE";
  return r;
}

// 1 - int_0^inf exp(-kappa - r) Q1(sqrt(2 kappa), sqrt(2 g r)) I0(2 sqrt(kappa r)) dr.
double pa_only_mu_by_quadrature(double g, double kappa)
{
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [g, kappa](double r) {
    const double d = std::sqrt(r) - std::sqrt(kappa);
    if (d * d > 700.0)
      return 0.0;
    const double x = 2.0 * std::sqrt(kappa * r);
    return std::exp(-d * d) * boost::math::cyl_bessel_i(0, x) * std::exp(-x) *
           specfun::marcum_q1(std::sqrt(2.0 * kappa), std::sqrt(2.0 * g * r));
  };
  return 1.0 - integrator.integrate(f, 1e-14);
}

CriterionResult check_closed_form_sir(Context&)
{
  CriterionResult r{5, "closed-form two-user PA-only integrand vs direct quadrature", false, "", "", "1e-06 abs", 0, 30};
  std::mt19937_64 gen(5);
  const ScenarioTwoUser base = fig4_scenario();
  const double D1 = base.params.region_x;
  const double D2 = base.params.region_y;
  std::uniform_real_distribution<double> ux(0.0, D1), uy(-0.5 * D2, 0.0), uk(0.5, 12.0), ug(-10.0, 20.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double x1 = ux(gen);
    const double x2 = ux(gen);
    const double y1 = uy(gen);
    const double kappa = uk(gen);
    const ScenarioTwoUser s = at_gamma_db(base, ug(gen));
    const double g = gamma_tilde_aligned(s, x1, x2, y1);
    worst = std::max(worst, std::abs(pa_only_mu_kernel(g, kappa) - pa_only_mu_by_quadrature(g, kappa)));
  }
  r.pass = worst <= 1e-6;
  r.measured = fmt("%.3g", worst);
  return r;
}

CriterionResult check_two_user_mc(Context& ctx)
{
  CriterionResult r{6, "exact two-user SIR outage vs Monte Carlo", false, "", "", "3 SE", 0, 900};
  McComparison c;
  for (double db : {0.0, 10.0, 20.0}) {
    const ScenarioTwoUser s = at_gamma_db(fig4_scenario(), db);
    const OutageEstimate e = outage_mu_hpfas_exact(s, ctx.options());
    compare(c, e.value, mc_outage_multiuser(s, McMode::hpfas, ctx.mc(3)).front(), 1.0);
    c.ok = c.ok && e.converged;
  }
  r.pass = c.ok;
  r.measured = "max " + fmt("%.2f", c.worst_z) + " SE, max |diff| " + fmt("%.3g", c.worst_abs);
  return r;
}

CriterionResult check_sfa_bands(Context& ctx)
{
  CriterionResult r{7, "step-function approximation accuracy bands", false, "", "",
                    "single-user 0.03; two-user 0.05 at >= 10 dB; low-SIR rel. dev > high-SIR", 0, 300};
  double hpfas_dev = 0.0;
  for (double db : figure_config("fig2").sweep->points()) {
    const ScenarioSingleUser s = at_gamma_db(fig2_scenario(), db);
    hpfas_dev = std::max(hpfas_dev, std::abs(outage_hpfas_sfa(s, ctx.options()).value -
                                             outage_hpfas_exact(s, ctx.options()).value));
  }
  double fa_dev = 0.0;
  for (double dbm : figure_config("fig3").sweep->points()) {
    const ScenarioSingleUser s = at_power_dbm(fig3_scenario(), dbm);
    fa_dev = std::max(fa_dev, std::abs(outage_fa_only_sfa(s, ctx.options()).value -
                                       outage_fa_only_exact(s, ctx.options()).value));
  }
  const std::vector<double> sir = figure_config("fig4").sweep->points();
  double mu_dev = 0.0;
  double low_rel = 0.0;
  double high_rel = 0.0;
  for (double db : sir) {
    const ScenarioTwoUser s = at_gamma_db(fig4_scenario(), db);
    const double exact = outage_mu_hpfas_exact(s, ctx.options()).value;
    const double sfa = outage_mu_hpfas_sfa(s, ctx.options()).value;
    if (db >= 10.0)
      mu_dev = std::max(mu_dev, std::abs(sfa - exact));
    if (db == sir.front())
      low_rel = std::abs(sfa - exact) / exact;
    if (db == sir.back())
      high_rel = std::abs(sfa - exact) / exact;
  }
  const bool single_ok = hpfas_dev <= 0.03 && fa_dev <= 0.03;
  const bool mu_band_ok = mu_dev <= 0.05;
  const bool trend_ok = low_rel > high_rel;
  r.pass = single_ok && mu_band_ok && trend_ok;
  if (single_ok && trend_ok && !mu_band_ok)
    r.known_limitation = "two-user step threshold undershoots the exact outage by more than 0.05 above ~11 dB";
  r.measured = "hpfas " + fmt("%.3g", hpfas_dev) + ", fa_only " + fmt("%.3g", fa_dev) + ", two-user " +
               fmt("%.3g", mu_dev) + ", rel. dev " + fmt("%.3g", low_rel) + " (low) vs " + fmt("%.3g", high_rel) +
               " (high)";
  return r;
}

CriterionResult check_ordering(Context& ctx)
{
  CriterionResult r{8, "HPFAS outage below PA-only and FA-only", false, "", "",
                    "analytic within error; paired HPFAS-only outages 0", 0, 300};
  double worst_margin = -HUGE_VAL;
  bool analytic_ok = true;
  for (double db : figure_config("fig2").sweep->points()) {
    const ScenarioSingleUser s = at_gamma_db(fig2_scenario(), db);
    const OutageEstimate h = outage_hpfas_exact(s, ctx.options());
    const OutageEstimate pa = outage_pa_only(s, ctx.options());
    const OutageEstimate fa = outage_fa_only_exact(s, ctx.options());
    const double bound = std::min(pa.value, fa.value);
    const double err = h.error + std::max(pa.error, fa.error);
    worst_margin = std::max(worst_margin, h.value - bound);
    if (h.value > bound + err)
      analytic_ok = false;
  }
  long hpfas_only = 0;
  double worst_pa_diff = -HUGE_VAL;
  for (double db : {5.0, 10.0, 15.0}) {
    const ScenarioSingleUser s = at_gamma_db(fig2_scenario(), db);
    const PairedResult pr = mc_paired_compare(s, McMode::hpfas, s, McMode::pa_only, ctx.mc(4));
    hpfas_only += pr.a_only;
    worst_pa_diff = std::max(worst_pa_diff, pr.mean_difference);
  }
  const ScenarioSingleUser s15 = at_gamma_db(fig2_scenario(), 15.0);
  const PairedResult fa = mc_paired_compare(s15, McMode::hpfas, s15, McMode::fa_only, ctx.mc(5));
  r.pass = analytic_ok && hpfas_only == 0 && worst_pa_diff <= 0.0 && fa.ci_high < 0.0;
  r.measured = "max(hpfas - min) " + fmt("%.3g", worst_margin) + "; hpfas-only outages " +
               std::to_string(hpfas_only) + "; vs FA-only at 15 dB CI upper " + fmt("%.3g", fa.ci_high);
  return r;
}

bool nondecreasing(const std::vector<OutageEstimate>& v)
{
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i].value < v[i - 1].value - (v[i].error + v[i - 1].error))
      return false;
  return true;
}

CriterionResult check_monotonicity(Context& ctx)
{
  CriterionResult r{9, "monotonicity in threshold, power and port count", false, "", "", "within numeric error", 0, 300};
  std::vector<std::string> failed;
  const auto single_grid = linspace(0.0, 20.0, 10);
  const auto two_grid = linspace(-10.0, 20.0, 10);
  for (AnalyticMethod m : {AnalyticMethod::hpfas_exact, AnalyticMethod::hpfas_sfa, AnalyticMethod::pa_only,
                           AnalyticMethod::fa_only_exact, AnalyticMethod::fa_only_sfa}) {
    std::vector<OutageEstimate> v;
    for (double db : single_grid)
      v.push_back(evaluate(m, at_gamma_db(fig2_scenario(), db), ctx.options()));
    if (!nondecreasing(v))
      failed.push_back(to_string(m));
  }
  for (AnalyticMethod m : {AnalyticMethod::mu_hpfas_exact, AnalyticMethod::mu_hpfas_sfa,
                           AnalyticMethod::mu_pa_only_closed, AnalyticMethod::mu_fa_only_exact}) {
    std::vector<OutageEstimate> v;
    for (double db : two_grid)
      v.push_back(evaluate(m, at_gamma_db(fig4_scenario(), db), ctx.options()));
    if (!nondecreasing(v))
      failed.push_back(to_string(m));
  }

  // Decreasing power is the same as increasing threshold for these checks.
  std::vector<OutageEstimate> by_power;
  auto powers = figure_config("fig3").sweep->points();
  std::reverse(powers.begin(), powers.end());
  for (double dbm : powers)
    by_power.push_back(outage_hpfas_exact(at_power_dbm(fig3_scenario(), dbm), ctx.options()));
  if (!nondecreasing(by_power))
    failed.push_back("hpfas_exact in tx power");

  bool ports_ok = true;
  auto check_ports = [&](ScenarioSingleUser s) {
    const OutageEstimate many = outage_hpfas_exact(s, ctx.options());
    s.blocks = BlockStructure::single_port();
    const OutageEstimate one = outage_hpfas_exact(s, ctx.options());
    if (many.value > one.value + many.error + one.error)
      ports_ok = false;
  };
  for (double db : single_grid)
    check_ports(at_gamma_db(fig2_scenario(), db));
  for (double dbm : powers)
    check_ports(at_power_dbm(fig3_scenario(), dbm));
  if (!ports_ok)
    failed.push_back("hpfas_exact N = 20 vs N = 1");

  r.pass = failed.empty();
  if (failed.empty()) {
    r.measured = "all monotone";
  } else {
    r.measured = "violations:";
    for (const auto& f : failed)
      r.measured += " " + f;
  }
  return r;
}

CriterionResult check_determinism(Context& ctx)
{
  CriterionResult r{10, "fig2 CSV byte-identical across runs and thread counts", false, "", "", "identical", 0, 600};
  RunConfig cfg = figure_config("fig2");
  cfg.mc.trials = ctx.trials;
  cfg.mc.seed = 7;
  std::vector<std::string> outputs;
  for (int workers : {1, 3}) {
    parallel::set_default_workers(workers);
    outputs.push_back(format_csv(run_config(cfg)));
  }
  parallel::set_default_workers(0);
  r.pass = outputs[0] == outputs[1];
  r.measured = r.pass ? "identical (1 vs 3 workers)" : "differs between 1 and 3 workers";
  return r;
}

} // namespace

long acceptance_trials(AcceptanceLevel level) { return level == AcceptanceLevel::full ? 1'000'000 : 100'000; }

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt)
{
  using Check = std::function<CriterionResult(Context&)>;
  const std::vector<Check> checks{check_marcum,    check_ncchi2,           check_single_user_mc, check_reduction,
                                  check_closed_form_sir, check_two_user_mc, check_sfa_bands,      check_ordering,
                                  check_monotonicity,    check_determinism};
  Context ctx{opt.level, acceptance_trials(opt.level), {}};
  std::vector<CriterionResult> results;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end())
      continue;
    const auto start = Clock::now();
    CriterionResult r;
    try {
      r = checks[i](ctx);
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "criterion " + std::to_string(id);
      r.pass = false;
      r.measured = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (r.budget_seconds > 0.0 && r.seconds > r.budget_seconds) {
      r.pass = false;
      r.known_limitation.clear();
      r.measured += "; over runtime budget";
    }
    results.push_back(r);
  }
  return results;
}

std::string format_report(const std::vector<CriterionResult>& results)
{
  std::ostringstream out;
  for (const CriterionResult& r : results) {
    char head[160];
    std::snprintf(head, sizeof head, "[%2d] %s  %-66s", r.id, r.pass ? "PASS" : "FAIL", r.name.c_str());
    out << head << " | measured " << r.measured << " | allowed " << r.allowed << " | "
        << fmt("%.1f", r.seconds) << " s (budget " << fmt("%g", r.budget_seconds) << " s)";
    if (!r.known_limitation.empty())
      out << " | known limitation: " << r.known_limitation;
    out << '\n';
  }
  return out.str();
}

} // namespace hpfas
