// SPDX-License-Identifier: Apache-2.0

#ifndef HPFAS_CONFIG_HPP
#define HPFAS_CONFIG_HPP

#include "hpfas/model.hpp"
#include "hpfas/outage_analytic.hpp"
#include "hpfas/outage_mc.hpp"
#include "hpfas/quad.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hpfas {

enum class ScenarioKind { single_user, two_user, general_multiuser };

std::string to_string(ScenarioKind k);

struct SweepSpec {
  std::string variable = "gamma_th_db"; // any key of the params block
  double start = 0.0;
  double stop = 0.0;
  int count = 1;
  std::string scale = "linear"; // linear: even steps; db: even steps of 10 log10(value)

  std::vector<double> points() const;
};

/// Everything one `run` needs. Physical quantities travel through the text
/// format under unit-suffixed names (tx_power_dbm, fc_ghz, height_m, ...).
struct RunConfig {
  ScenarioKind scenario = ScenarioKind::single_user;
  SystemParams params;
  BlockStructure blocks;
  bool pa_alignment = true;
  double feed_offset = 0.0;
  double feed_offset_1 = 0.0;
  double feed_offset_2 = 0.0;
  int num_users = 2;
  int antennas_per_waveguide = 1;
  std::vector<std::string> methods{"hpfas_exact"};
  std::optional<SweepSpec> sweep;
  quad::QuadSpec quad;
  McConfig mc;
  bool mc_seed_set = false; // the text named a seed explicitly
  PaOnlyThreshold pa_only_threshold = PaOnlyThreshold::port_marginal;
  std::string output;

  /// Throws ConfigError on an unknown method, a method that does not fit the
  /// scenario, or a sweep variable that names no parameter.
  void validate() const;

  ScenarioSingleUser single_user() const;
  ScenarioTwoUser two_user() const;
  MultiUserScenario multi_user() const;
};

/// Names accepted in the `methods` list besides the analytic ones.
inline const std::vector<std::string>& mc_method_names()
{
  static const std::vector<std::string> names{"monte_carlo", "mc_pa_only", "mc_fa_only"};
  return names;
}

bool is_mc_method(const std::string& name);

/// Reads a parameter by its unit-suffixed key, in the units the key names.
double get_param(const SystemParams& p, const std::string& key);
/// Sets a parameter by its unit-suffixed key. Throws ConfigError on an unknown key.
void set_param(SystemParams& p, const std::string& key, double value);
const std::vector<std::string>& param_keys();

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

} // namespace hpfas

#endif // HPFAS_CONFIG_HPP
