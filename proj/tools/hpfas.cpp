// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: run, mc, analytic, figure and validate.

#include "hpfas/acceptance.hpp"
#include "hpfas/errors.hpp"
#include "hpfas/parallel.hpp"
#include "hpfas/runner.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNonconverged = 3;

struct Overrides {
  std::string out;
  std::string trials;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

long parse_trials(const std::string& text)
{
  double v = 0.0;
  try {
    std::size_t used = 0;
    v = std::stod(text, &used);
    if (used != text.size())
      throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw hpfas::ConfigError("--trials expects a number, got '" + text + "'");
  }
  if (!(v >= 1.0) || v > 1e15 || std::floor(v) != v)
    throw hpfas::ConfigError("--trials must be a positive integer, got '" + text + "'");
  return static_cast<long>(v);
}

std::optional<std::uint64_t> env_seed()
{
  const char* env = std::getenv("HPFAS_SEED");
  if (env == nullptr || *env == '\0')
    return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (used != std::string(env).size())
      throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw hpfas::ConfigError(std::string("HPFAS_SEED is not an unsigned integer: '") + env + "'");
  }
}

// Flag, then HPFAS_SEED, then the config file, then 0.
void apply_overrides(hpfas::RunConfig& cfg, const Overrides& o)
{
  if (o.seed)
    cfg.mc.seed = *o.seed;
  else if (const auto s = env_seed())
    cfg.mc.seed = *s;
  else if (!cfg.mc_seed_set)
    cfg.mc.seed = 0;
  if (!o.trials.empty())
    cfg.mc.trials = parse_trials(o.trials);
  if (!o.out.empty())
    cfg.output = o.out;
  if (o.threads > 0)
    hpfas::parallel::set_default_workers(o.threads);
}

std::string script_path(const std::string& csv)
{
  const auto dot = csv.find_last_of('.');
  const auto slash = csv.find_last_of('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
    return csv.substr(0, dot) + ".gp";
  return csv + ".gp";
}

int execute(const hpfas::RunConfig& cfg, hpfas::RunMode mode)
{
  const hpfas::RunOutput out = hpfas::run_config(cfg, mode);
  const std::string csv = hpfas::format_csv(out);
  if (cfg.output.empty()) {
    std::cout << csv;
  } else {
    hpfas::write_text_file(cfg.output, csv);
    const std::string gp = script_path(cfg.output);
    const auto slash = cfg.output.find_last_of('/');
    hpfas::write_text_file(gp, hpfas::gnuplot_script(out, slash == std::string::npos ? cfg.output
                                                                                      : cfg.output.substr(slash + 1)));
    std::cerr << "wrote " << cfg.output << " and " << gp << "\n";
  }
  if (out.any_nonconverged()) {
    std::cerr << "error: at least one row did not converge (see the flags column)\n";
    return kExitNonconverged;
  }
  return kExitOk;
}

void add_overrides(CLI::App* cmd, Overrides& o, bool with_out)
{
  if (with_out)
    cmd->add_option("--out", o.out, "CSV output path; a .gp script is written next to it");
  cmd->add_option("--trials", o.trials, "Monte Carlo trials per estimate (accepts 1e5)");
  cmd->add_option("--seed", o.seed, "Monte Carlo seed (overrides HPFAS_SEED and the config)");
  cmd->add_option("--threads", o.threads, "worker threads (default: HPFAS_THREADS or all cores)")->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Outage probability of hybrid pinching-fluid antenna systems"};
  app.require_subcommand(1);

  Overrides o;
  std::string config_path;
  std::string preset;
  std::string level = "quick";
  std::vector<int> only;

  auto* run = app.add_subcommand("run", "evaluate every method of a config at every sweep point");
  run->add_option("config", config_path, "JSON config file")->required();
  add_overrides(run, o, true);

  auto* mc = app.add_subcommand("mc", "as run, Monte Carlo methods only");
  mc->add_option("config", config_path, "JSON config file")->required();
  add_overrides(mc, o, true);

  auto* analytic = app.add_subcommand("analytic", "as run, analytic methods only");
  analytic->add_option("config", config_path, "JSON config file")->required();
  add_overrides(analytic, o, true);

  auto* figure = app.add_subcommand("figure", "reproduce a preset comparison");
  figure->add_option("preset", preset, "fig2, fig3 or fig4")->required()->check(CLI::IsMember({"fig2", "fig3", "fig4"}));
  add_overrides(figure, o, true);

  auto* validate = app.add_subcommand("validate", "run the acceptance suite");
  validate->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  validate->add_option("--only", only, "criterion numbers to run");
  validate->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (validate->parsed()) {
      if (o.threads > 0)
        hpfas::parallel::set_default_workers(o.threads);
      hpfas::AcceptanceOptions opt;
      opt.level = level == "full" ? hpfas::AcceptanceLevel::full : hpfas::AcceptanceLevel::quick;
      opt.only = only;
      const auto results = hpfas::run_acceptance(opt);
      std::cout << hpfas::format_report(results);
      bool ok = true;
      for (const auto& r : results)
        ok = ok && r.pass;
      return ok ? kExitOk : kExitValidation;
    }
    hpfas::RunConfig cfg = figure->parsed() ? hpfas::figure_config(preset) : hpfas::load_config(config_path);
    apply_overrides(cfg, o);
    cfg.validate();
    const hpfas::RunMode mode = mc->parsed()         ? hpfas::RunMode::mc_only
                                : analytic->parsed() ? hpfas::RunMode::analytic_only
                                                     : hpfas::RunMode::all;
    return execute(cfg, mode);
  } catch (const hpfas::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
