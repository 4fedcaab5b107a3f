// SPDX-License-Identifier: Apache-2.0

#include "hpfas/runner.hpp"

#include "hpfas/errors.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace hpfas {

bool RunOutput::any_nonconverged() const
{
  for (const Row& r : rows)
    for (const std::string& f : r.flags)
      if (f == "nonconverged")
        return true;
  return false;
}

namespace {

Row analytic_row(double x, const std::string& name, const OutageEstimate& e)
{
  Row r{x, name, e.value, e.error, 0, {}};
  if (!e.converged)
    r.flags.push_back("nonconverged");
  if (e.sfa_degenerate)
    r.flags.push_back("sfa_degenerate");
  return r;
}

Row mc_row(double x, const std::string& name, const McResult& m)
{
  return {x, name, m.outage, m.standard_error, m.trials, {}};
}

McMode mc_mode_of(const std::string& method)
{
  if (method == "mc_pa_only")
    return McMode::pa_only;
  if (method == "mc_fa_only")
    return McMode::fa_only;
  return McMode::hpfas;
}

} // namespace

RunOutput run_config(const RunConfig& cfg, RunMode mode)
{
  cfg.validate();
  RunOutput out;
  std::vector<double> points;
  if (cfg.sweep) {
    out.sweep_variable = cfg.sweep->variable;
    points = cfg.sweep->points();
  } else {
    out.sweep_variable = "gamma_th_db";
    points = {get_param(cfg.params, out.sweep_variable)};
  }

  KernelCache cache;
  AnalyticOptions opt;
  opt.spec = cfg.quad;
  opt.pa_only_threshold = cfg.pa_only_threshold;
  opt.cache = &cache;

  for (double x : points) {
    RunConfig point = cfg;
    set_param(point.params, out.sweep_variable, x);
    try {
      point.params.validate();
    } catch (const ValidationError& e) {
      throw ConfigError(std::string("sweep point ") + std::to_string(x) + ": " + e.what());
    }
    for (const std::string& method : cfg.methods) {
      const bool mc = is_mc_method(method);
      if ((mc && mode == RunMode::analytic_only) || (!mc && mode == RunMode::mc_only))
        continue;
      if (!mc) {
        const AnalyticMethod am = *parse_analytic_method(method);
        const OutageEstimate e = is_two_user(am) ? evaluate(am, point.two_user(), opt)
                                                 : evaluate(am, point.single_user(), opt);
        out.rows.push_back(analytic_row(x, method, e));
        continue;
      }
      const McMode mm = mc_mode_of(method);
      switch (cfg.scenario) {
      case ScenarioKind::single_user:
        out.rows.push_back(mc_row(x, method, mc_outage_single(point.single_user(), mm, cfg.mc)));
        break;
      case ScenarioKind::two_user:
        out.rows.push_back(mc_row(x, method, mc_outage_multiuser(point.two_user(), mm, cfg.mc).front()));
        break;
      case ScenarioKind::general_multiuser: {
        const auto results = mc_outage_multiuser(point.multi_user(), mm, cfg.mc);
        for (std::size_t k = 0; k < results.size(); ++k)
          out.rows.push_back(mc_row(x, method + ":user" + std::to_string(k + 1), results[k]));
        break;
      }
      }
    }
  }
  return out;
}

std::string format_csv(const RunOutput& out)
{
  std::string text = "sweep_var,method,value,error,trials,flags\n";
  char buf[64];
  for (const Row& r : out.rows) {
    std::snprintf(buf, sizeof buf, "%.17g", r.sweep_value);
    text += buf;
    text += ',';
    text += r.method;
    std::snprintf(buf, sizeof buf, ",%.17g", r.value);
    text += buf;
    std::snprintf(buf, sizeof buf, ",%.17g", r.error);
    text += buf;
    text += ',' + std::to_string(r.trials) + ',';
    for (std::size_t i = 0; i < r.flags.size(); ++i)
      text += (i ? ";" : "") + r.flags[i];
    text += '\n';
  }
  return text;
}

std::string gnuplot_script(const RunOutput& out, const std::string& csv_path)
{
  std::vector<std::string> methods;
  std::set<std::string> seen;
  for (const Row& r : out.rows)
    if (seen.insert(r.method).second)
      methods.push_back(r.method);

  std::ostringstream gp;
  gp << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set logscale y\n"
     << "set xlabel '" << out.sweep_variable << "'\n"
     << "set ylabel 'outage probability'\n"
     << "set key bottom right\n"
     << "plot \\\n";
  for (std::size_t i = 0; i < methods.size(); ++i) {
    gp << "  '" << csv_path << "' using 1:(strcol(2) eq '" << methods[i] << "' ? $3 : NaN) with linespoints title '"
       << methods[i] << "'" << (i + 1 < methods.size() ? ", \\\n" : "\n");
  }
  return gp.str();
}

RunConfig figure_config(const std::string& preset)
{
  RunConfig cfg;
  if (preset == "fig2") {
    cfg.scenario = ScenarioKind::single_user;
    cfg.params = SystemParams::single_user_sweep_preset();
    cfg.methods = {"hpfas_exact", "hpfas_sfa", "monte_carlo", "pa_only", "fa_only_exact"};
    cfg.sweep = SweepSpec{"gamma_th_db", 0.0, 20.0, 9, "linear"};
  } else if (preset == "fig3") {
    cfg.scenario = ScenarioKind::single_user;
    cfg.params = SystemParams::power_sweep_preset();
    cfg.methods = {"hpfas_exact", "hpfas_sfa", "monte_carlo", "pa_only", "fa_only_exact", "fa_only_sfa"};
    cfg.sweep = SweepSpec{"tx_power_dbm", 0.0, 30.0, 7, "linear"};
  } else if (preset == "fig4") {
    cfg.scenario = ScenarioKind::two_user;
    cfg.params = SystemParams::two_user_preset();
    cfg.methods = {"mu_hpfas_exact", "mu_hpfas_sfa", "monte_carlo", "mu_pa_only_closed", "mu_fa_only_exact"};
    cfg.sweep = SweepSpec{"gamma_th_db", -5.0, 20.0, 6, "linear"};
  } else {
    throw ConfigError("unknown figure preset '" + preset + "' (expected fig2, fig3 or fig4)");
  }
  return cfg;
}

void write_text_file(const std::string& path, const std::string& text)
{
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f)
    throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f)
    throw std::runtime_error("failed writing '" + path + "'");
}

} // namespace hpfas
