// SPDX-License-Identifier: Apache-2.0

#include "hpfas/config.hpp"

#include "hpfas/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hpfas {

using nlohmann::json;

std::string to_string(ScenarioKind k)
{
  switch (k) {
  case ScenarioKind::single_user:
    return "single_user";
  case ScenarioKind::two_user:
    return "two_user";
  case ScenarioKind::general_multiuser:
    return "general_multiuser";
  }
  return "unknown";
}

std::vector<double> SweepSpec::points() const
{
  if (count < 1)
    throw ConfigError("sweep count must be >= 1");
  if (scale != "linear" && scale != "db")
    throw ConfigError("sweep scale must be linear or db");
  if (scale == "db" && !(start > 0.0 && stop > 0.0))
    throw ConfigError("a db-scaled sweep needs positive start and stop");
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    if (scale == "linear")
      out.push_back(i + 1 == count && count > 1 ? stop : start + f * (stop - start));
    else
      out.push_back(i + 1 == count && count > 1 ? stop : start * std::pow(stop / start, f));
  }
  return out;
}

const std::vector<std::string>& param_keys()
{
  static const std::vector<std::string> keys{
      "fc_ghz",      "n_eff",        "pathloss_exponent", "rician_factor", "mu_squared", "tx_power_dbm",
      "noise_dbm",   "gamma_th_db",  "height_m",          "region_x_m",    "region_y_m", "fa_length_m",
  };
  return keys;
}

double get_param(const SystemParams& p, const std::string& key)
{
  if (key == "fc_ghz")
    return p.carrier_frequency / 1e9;
  if (key == "n_eff")
    return p.effective_refractive_index;
  if (key == "pathloss_exponent")
    return p.pathloss_exponent;
  if (key == "rician_factor")
    return p.rician_factor;
  if (key == "mu_squared")
    return p.mu2();
  if (key == "tx_power_dbm")
    return units::watts_to_dbm(p.tx_power);
  if (key == "noise_dbm")
    return units::watts_to_dbm(p.noise_power);
  if (key == "gamma_th_db")
    return p.snr_threshold > 0.0 ? units::linear_to_db(p.snr_threshold) : -HUGE_VAL;
  if (key == "height_m")
    return p.waveguide_height;
  if (key == "region_x_m")
    return p.region_x;
  if (key == "region_y_m")
    return p.region_y;
  if (key == "fa_length_m")
    return p.fa_length;
  throw ConfigError("unknown parameter '" + key + "'");
}

void set_param(SystemParams& p, const std::string& key, double value)
{
  if (!std::isfinite(value) && !(key == "gamma_th_db" && value == -HUGE_VAL))
    throw ConfigError("parameter '" + key + "' must be finite");
  if (key == "fc_ghz")
    p.carrier_frequency = value * 1e9;
  else if (key == "n_eff")
    p.effective_refractive_index = value;
  else if (key == "pathloss_exponent")
    p.pathloss_exponent = value;
  else if (key == "rician_factor")
    p.rician_factor = value;
  else if (key == "mu_squared")
    p.correlation = value > 0.0 ? std::sqrt(value) : -1.0;
  else if (key == "tx_power_dbm")
    p.tx_power = units::dbm_to_watts(value);
  else if (key == "noise_dbm")
    p.noise_power = units::dbm_to_watts(value);
  else if (key == "gamma_th_db")
    p.snr_threshold = units::db_to_linear(value);
  else if (key == "height_m")
    p.waveguide_height = value;
  else if (key == "region_x_m")
    p.region_x = value;
  else if (key == "region_y_m")
    p.region_y = value;
  else if (key == "fa_length_m")
    p.fa_length = value;
  else
    throw ConfigError("unknown parameter '" + key + "'");
}

bool is_mc_method(const std::string& name)
{
  const auto& names = mc_method_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

void RunConfig::validate() const
{
  if (methods.empty())
    throw ConfigError("methods must not be empty");
  for (const std::string& m : methods) {
    if (is_mc_method(m))
      continue;
    const auto am = parse_analytic_method(m);
    if (!am)
      throw ConfigError("unknown method '" + m + "'");
    if (scenario == ScenarioKind::general_multiuser)
      throw ConfigError("method '" + m + "' has no analytic form for the general multi-user layout");
    if (is_two_user(*am) != (scenario == ScenarioKind::two_user))
      throw ConfigError("method '" + m + "' does not apply to scenario " + to_string(scenario));
  }
  if (sweep) {
    const auto& keys = param_keys();
    if (std::find(keys.begin(), keys.end(), sweep->variable) == keys.end())
      throw ConfigError("sweep variable '" + sweep->variable + "' names no parameter");
    (void)sweep->points();
  }
  try {
    params.validate();
    blocks.validate();
    quad.validate();
    mc.validate();
    if (scenario == ScenarioKind::general_multiuser)
      multi_user().validate();
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
}

ScenarioSingleUser RunConfig::single_user() const { return {params, blocks, pa_alignment, feed_offset}; }

ScenarioTwoUser RunConfig::two_user() const { return {params, blocks, feed_offset_1, feed_offset_2}; }

MultiUserScenario RunConfig::multi_user() const
{
  return {params, blocks, num_users, antennas_per_waveguide, {}};
}

namespace {

template <class T>
T take(const json& obj, const char* key, T fallback)
{
  if (!obj.contains(key))
    return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where)
{
  if (!obj.is_object())
    throw ConfigError(where + " must be an object");
  for (const auto& item : obj.items())
    if (!known.count(item.key()))
      throw ConfigError("unknown field '" + item.key() + "' in " + where);
}

} // namespace

RunConfig parse_config(const std::string& text)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(doc, {"scenario", "params", "blocks", "geometry", "methods", "sweep", "quad", "mc", "pa_only_threshold", "output"},
                 "config");

  RunConfig cfg;
  const std::string scenario = take<std::string>(doc, "scenario", "single_user");
  if (scenario == "single_user")
    cfg.scenario = ScenarioKind::single_user;
  else if (scenario == "two_user")
    cfg.scenario = ScenarioKind::two_user;
  else if (scenario == "general_multiuser")
    cfg.scenario = ScenarioKind::general_multiuser;
  else
    throw ConfigError("unknown scenario '" + scenario + "'");

  if (cfg.scenario == ScenarioKind::single_user)
    cfg.params = SystemParams::single_user_sweep_preset();
  else
    cfg.params = SystemParams::two_user_preset();

  if (doc.contains("params")) {
    const json& p = doc["params"];
    const auto& keys = param_keys();
    reject_unknown(p, {keys.begin(), keys.end()}, "params");
    for (const auto& item : p.items()) {
      if (!item.value().is_number())
        throw ConfigError("params." + item.key() + " must be a number");
      set_param(cfg.params, item.key(), item.value().get<double>());
    }
  }

  if (doc.contains("blocks")) {
    const json& b = doc["blocks"];
    reject_unknown(b, {"num_ports", "block_sizes", "num_blocks"}, "blocks");
    const int n = take<int>(b, "num_ports", cfg.blocks.num_ports);
    if (b.contains("block_sizes"))
      cfg.blocks = {n, take<std::vector<int>>(b, "block_sizes", {})};
    else if (b.contains("num_blocks"))
      cfg.blocks = BlockStructure::uniform(n, take<int>(b, "num_blocks", 1));
    else
      cfg.blocks = BlockStructure::uniform(n, n % 4 == 0 ? 4 : 1);
  }

  if (doc.contains("geometry")) {
    const json& g = doc["geometry"];
    reject_unknown(g, {"pa_alignment", "feed_offset_m", "feed_offset_1_m", "feed_offset_2_m", "num_users",
                       "antennas_per_waveguide"},
                   "geometry");
    cfg.pa_alignment = take<bool>(g, "pa_alignment", cfg.pa_alignment);
    cfg.feed_offset = take<double>(g, "feed_offset_m", cfg.feed_offset);
    cfg.feed_offset_1 = take<double>(g, "feed_offset_1_m", cfg.feed_offset_1);
    cfg.feed_offset_2 = take<double>(g, "feed_offset_2_m", cfg.feed_offset_2);
    cfg.num_users = take<int>(g, "num_users", cfg.num_users);
    cfg.antennas_per_waveguide = take<int>(g, "antennas_per_waveguide", cfg.antennas_per_waveguide);
  }

  if (doc.contains("methods"))
    cfg.methods = take<std::vector<std::string>>(doc, "methods", {});

  if (doc.contains("sweep")) {
    const json& s = doc["sweep"];
    reject_unknown(s, {"variable", "start", "stop", "count", "scale"}, "sweep");
    SweepSpec sw;
    sw.variable = take<std::string>(s, "variable", sw.variable);
    sw.start = take<double>(s, "start", sw.start);
    sw.stop = take<double>(s, "stop", sw.start);
    sw.count = take<int>(s, "count", sw.count);
    sw.scale = take<std::string>(s, "scale", sw.scale);
    cfg.sweep = sw;
  }

  if (doc.contains("quad")) {
    const json& q = doc["quad"];
    reject_unknown(q, {"rel_tol", "abs_tol", "max_subdivisions", "spatial_points_per_axis", "spatial_points_3d", "tail_mass"},
                   "quad");
    cfg.quad.rel_tol = take<double>(q, "rel_tol", cfg.quad.rel_tol);
    cfg.quad.abs_tol = take<double>(q, "abs_tol", cfg.quad.abs_tol);
    cfg.quad.max_subdivisions = take<int>(q, "max_subdivisions", cfg.quad.max_subdivisions);
    cfg.quad.spatial_points_per_axis = take<int>(q, "spatial_points_per_axis", cfg.quad.spatial_points_per_axis);
    cfg.quad.spatial_points_3d = take<int>(q, "spatial_points_3d", cfg.quad.spatial_points_3d);
    cfg.quad.tail_mass = take<double>(q, "tail_mass", cfg.quad.tail_mass);
  }

  if (doc.contains("mc")) {
    const json& m = doc["mc"];
    reject_unknown(m, {"trials", "seed", "batch_size", "confidence_level"}, "mc");
    cfg.mc.trials = static_cast<long>(take<double>(m, "trials", static_cast<double>(cfg.mc.trials)));
    cfg.mc_seed_set = m.contains("seed");
    cfg.mc.seed = take<std::uint64_t>(m, "seed", cfg.mc.seed);
    cfg.mc.batch_size = take<long>(m, "batch_size", cfg.mc.batch_size);
    cfg.mc.confidence_level = take<double>(m, "confidence_level", cfg.mc.confidence_level);
  }

  const auto threshold = parse_pa_only_threshold(take<std::string>(doc, "pa_only_threshold", "port_marginal"));
  if (!threshold)
    throw ConfigError("pa_only_threshold must be port_marginal or block_scaled");
  cfg.pa_only_threshold = *threshold;

  cfg.output = take<std::string>(doc, "output", "");
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const RunConfig& cfg)
{
  json doc;
  doc["scenario"] = to_string(cfg.scenario);
  json params = json::object();
  for (const std::string& key : param_keys())
    params[key] = get_param(cfg.params, key);
  doc["params"] = params;
  doc["blocks"] = {{"num_ports", cfg.blocks.num_ports}, {"block_sizes", cfg.blocks.block_sizes}};
  doc["geometry"] = {{"pa_alignment", cfg.pa_alignment},
                     {"feed_offset_m", cfg.feed_offset},
                     {"feed_offset_1_m", cfg.feed_offset_1},
                     {"feed_offset_2_m", cfg.feed_offset_2},
                     {"num_users", cfg.num_users},
                     {"antennas_per_waveguide", cfg.antennas_per_waveguide}};
  doc["methods"] = cfg.methods;
  if (cfg.sweep)
    doc["sweep"] = {{"variable", cfg.sweep->variable},
                    {"start", cfg.sweep->start},
                    {"stop", cfg.sweep->stop},
                    {"count", cfg.sweep->count},
                    {"scale", cfg.sweep->scale}};
  doc["quad"] = {{"rel_tol", cfg.quad.rel_tol},
                 {"abs_tol", cfg.quad.abs_tol},
                 {"max_subdivisions", cfg.quad.max_subdivisions},
                 {"spatial_points_per_axis", cfg.quad.spatial_points_per_axis},
                 {"spatial_points_3d", cfg.quad.spatial_points_3d},
                 {"tail_mass", cfg.quad.tail_mass}};
  json mc = {{"trials", cfg.mc.trials}, {"batch_size", cfg.mc.batch_size}, {"confidence_level", cfg.mc.confidence_level}};
  if (cfg.mc_seed_set)
    mc["seed"] = cfg.mc.seed;
  doc["mc"] = mc;
  doc["pa_only_threshold"] = to_string(cfg.pa_only_threshold);
  if (!cfg.output.empty())
    doc["output"] = cfg.output;
  return doc.dump(2) + "\n";
}

} // namespace hpfas
