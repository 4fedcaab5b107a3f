// SPDX-License-Identifier: Apache-2.0

#include "hpfas/config.hpp"
#include "hpfas/errors.hpp"
#include "hpfas/runner.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace hpfas;

namespace {

std::vector<std::vector<std::string>> split_csv(const std::string& text)
{
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ','))
      cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
      cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

RunConfig small_config()
{
  return parse_config(R"({
    "methods": ["hpfas_exact", "monte_carlo"],
    "sweep": {"variable": "gamma_th_db", "start": 0, "stop": 20, "count": 5},
    "mc": {"trials": 20000, "seed": 3}
  })");
}

} // namespace

TEST_SUITE("runner")
{
  TEST_CASE("one row per method per sweep point, deterministic")
  {
    const RunConfig cfg = small_config();
    const RunOutput out = run_config(cfg);
    CHECK(out.rows.size() == 10);
    CHECK(out.rows[0].method == "hpfas_exact");
    CHECK(out.rows[1].method == "monte_carlo");
    CHECK(out.rows[1].trials == 20000);
    CHECK(format_csv(out) == format_csv(run_config(cfg)));
  }

  TEST_CASE("CSV format")
  {
    RunOutput out;
    out.sweep_variable = "gamma_th_db";
    out.rows.push_back({2.5, "hpfas_exact", 0.1, 1e-12, 0, {}});
    out.rows.push_back({2.5, "hpfas_sfa", 1.0 / 3.0, 0.0, 0, {"nonconverged", "sfa_degenerate"}});
    const std::string csv = format_csv(out);
    CHECK(csv ==
          "sweep_var,method,value,error,trials,flags\n"
          "2.5,hpfas_exact,0.10000000000000001,9.9999999999999998e-13,0,\n"
          "2.5,hpfas_sfa,0.33333333333333331,0,0,nonconverged;sfa_degenerate\n");
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(out.any_nonconverged());
    const auto rows = split_csv(csv);
    for (const auto& r : rows)
      CHECK(r.size() == 6);
  }

  TEST_CASE("analytic and Monte Carlo subsets")
  {
    const RunConfig cfg = small_config();
    for (const Row& r : run_config(cfg, RunMode::analytic_only).rows)
      CHECK(r.method == "hpfas_exact");
    for (const Row& r : run_config(cfg, RunMode::mc_only).rows)
      CHECK(r.method == "monte_carlo");
  }

  TEST_CASE("SFA column within 0.03 of the exact column at the fig2 configuration")
  {
    RunConfig cfg = figure_config("fig2");
    cfg.methods = {"hpfas_exact", "hpfas_sfa"};
    const RunOutput out = run_config(cfg);
    REQUIRE(out.rows.size() == 18);
    for (std::size_t i = 0; i < out.rows.size(); i += 2)
      CHECK(std::abs(out.rows[i].value - out.rows[i + 1].value) <= 0.03);
  }

  TEST_CASE("figure presets")
  {
    const RunConfig fig2 = figure_config("fig2");
    CHECK(fig2.methods.size() == 5);
    CHECK(fig2.sweep->variable == "gamma_th_db");
    CHECK(fig2.params.region_x == 20.0);
    CHECK(fig2.params.rician_factor == 7.0);

    const RunConfig fig3 = figure_config("fig3");
    CHECK(fig3.sweep->variable == "tx_power_dbm");
    CHECK(fig3.params.waveguide_height == 4.0);
    CHECK(fig3.params.region_x == 30.0);
    CHECK(fig3.params.region_y == 25.0);

    const RunConfig fig4 = figure_config("fig4");
    CHECK(fig4.scenario == ScenarioKind::two_user);
    for (const std::string& m : fig4.methods) {
      if (is_mc_method(m))
        continue;
      CHECK(is_two_user(*parse_analytic_method(m)));
    }
    CHECK_THROWS_AS(figure_config("fig5"), ConfigError);
  }

  TEST_CASE("fig2 output holds five curves on one sweep axis")
  {
    RunConfig cfg = figure_config("fig2");
    cfg.mc.trials = 2000;
    const RunOutput out = run_config(cfg);
    std::set<std::string> methods;
    std::set<double> axis;
    for (const Row& r : out.rows) {
      methods.insert(r.method);
      axis.insert(r.sweep_value);
    }
    CHECK(methods.size() == 5);
    CHECK(axis.size() == 9);
    CHECK(out.rows.size() == 45);
  }

  TEST_CASE("fig3: changing the trial count leaves analytic rows untouched")
  {
    RunConfig a = figure_config("fig3");
    a.mc.trials = 100000;
    RunConfig b = a;
    b.mc.trials = 20000;
    const RunOutput ra = run_config(a);
    const RunOutput rb = run_config(b);
    REQUIRE(ra.rows.size() == rb.rows.size());
    for (std::size_t i = 0; i < ra.rows.size(); ++i) {
      if (ra.rows[i].method == "monte_carlo") {
        CHECK(ra.rows[i].trials == 100000);
        continue;
      }
      CHECK(ra.rows[i].value == rb.rows[i].value);
      CHECK(ra.rows[i].error == rb.rows[i].error);
    }
  }

  TEST_CASE("gnuplot companion names every curve")
  {
    RunConfig cfg = small_config();
    const RunOutput out = run_config(cfg, RunMode::analytic_only);
    const std::string gp = gnuplot_script(out, "out.csv");
    CHECK(gp.find("'out.csv'") != std::string::npos);
    CHECK(gp.find("hpfas_exact") != std::string::npos);
  }
}
