// SPDX-License-Identifier: Apache-2.0

#include "hpfas/config.hpp"
#include "hpfas/errors.hpp"

#include <doctest.h>

#include <json.hpp>

#include <cmath>

using namespace hpfas;

namespace {

const char* kSample = R"({
  "scenario": "single_user",
  "params": {"tx_power_dbm": 20, "gamma_th_db": 5, "rician_factor": 6, "height_m": 3.5, "mu_squared": 0.9},
  "blocks": {"num_ports": 12, "block_sizes": [4, 4, 4]},
  "geometry": {"pa_alignment": true, "feed_offset_m": 1.5},
  "methods": ["hpfas_exact", "monte_carlo", "mc_fa_only"],
  "sweep": {"variable": "gamma_th_db", "start": 0, "stop": 20, "count": 5, "scale": "linear"},
  "quad": {"rel_tol": 1e-7},
  "mc": {"trials": 1e4, "seed": 17},
  "pa_only_threshold": "block_scaled",
  "output": "out.csv"
})";

} // namespace

TEST_SUITE("config")
{
  TEST_CASE("parse reads every block in its units")
  {
    const RunConfig c = parse_config(kSample);
    CHECK(c.scenario == ScenarioKind::single_user);
    CHECK(c.params.tx_power == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(c.params.snr_threshold == doctest::Approx(std::sqrt(10.0)).epsilon(1e-14));
    CHECK(c.params.mu2() == doctest::Approx(0.9).epsilon(1e-14));
    CHECK(c.params.waveguide_height == 3.5);
    CHECK(c.blocks.block_sizes == std::vector<int>{4, 4, 4});
    CHECK(c.feed_offset == 1.5);
    CHECK(c.methods.size() == 3);
    CHECK(c.sweep->points() == std::vector<double>{0.0, 5.0, 10.0, 15.0, 20.0});
    CHECK(c.quad.rel_tol == 1e-7);
    CHECK(c.mc.trials == 10000);
    CHECK(c.mc.seed == 17);
    CHECK(c.mc_seed_set);
    CHECK(c.pa_only_threshold == PaOnlyThreshold::block_scaled);
    CHECK(c.output == "out.csv");
  }

  TEST_CASE("round trip is semantically identical")
  {
    const RunConfig c = parse_config(kSample);
    const std::string once = serialize_config(c);
    const std::string twice = serialize_config(parse_config(once));
    CHECK(once == twice);
    const auto a = nlohmann::json::parse(once);
    const auto b = nlohmann::json::parse(twice);
    CHECK(a == b);
    CHECK(a["params"]["tx_power_dbm"].get<double>() == doctest::Approx(20.0).epsilon(1e-14));
  }

  TEST_CASE("defaults fill in omitted blocks")
  {
    const RunConfig c = parse_config(R"({"methods": ["mu_hpfas_exact"], "scenario": "two_user"})");
    CHECK(c.params.rician_factor == 5.0);
    CHECK(c.params.region_x == 25.0);
    CHECK_FALSE(c.mc_seed_set);
    CHECK_FALSE(c.sweep.has_value());
  }

  TEST_CASE("errors")
  {
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"colour": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"params": {"tx_power_w": 1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"methods": ["nope"]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"methods": ["mu_hpfas_exact"]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"scenario": "general_multiuser", "methods": ["hpfas_exact"]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"sweep": {"variable": "colour", "start": 0, "stop": 1, "count": 2}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"params": {"height_m": -1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"params": {"height_m": "tall"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"blocks": {"num_ports": 5, "block_sizes": [2, 2]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"pa_only_threshold": "maybe"})"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  }

  TEST_CASE("sweep scales")
  {
    const SweepSpec lin{"height_m", 1.0, 4.0, 4, "linear"};
    CHECK(lin.points() == std::vector<double>{1.0, 2.0, 3.0, 4.0});
    const SweepSpec db{"height_m", 1.0, 100.0, 3, "db"};
    const auto p = db.points();
    CHECK(p[0] == 1.0);
    CHECK(p[1] == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(p[2] == 100.0);
    CHECK_THROWS_AS((SweepSpec{"height_m", 0.0, 10.0, 3, "db"}.points()), ConfigError);
    CHECK_THROWS_AS((SweepSpec{"height_m", 1.0, 10.0, 0, "linear"}.points()), ConfigError);
  }

  TEST_CASE("parameter accessors round-trip")
  {
    SystemParams p;
    for (const std::string& key : param_keys()) {
      const double v = get_param(p, key);
      set_param(p, key, v);
      CHECK(get_param(p, key) == doctest::Approx(v).epsilon(1e-14));
    }
    CHECK_THROWS_AS(get_param(p, "colour"), ConfigError);
  }
}
