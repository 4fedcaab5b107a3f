// SPDX-License-Identifier: Apache-2.0

#ifndef HPFAS_OUTAGE_MC_HPP
#define HPFAS_OUTAGE_MC_HPP

#include "hpfas/channel.hpp"
#include "hpfas/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hpfas {

struct McConfig {
  long trials = 1'000'000;
  std::uint64_t seed = 0;
  long batch_size = 1 << 14;
  double confidence_level = 0.95;
  int workers = 0; // 0: parallel::default_workers()

  void validate() const;
};

struct McResult {
  double outage = 0.0;
  double standard_error = 0.0; // sqrt(p (1 - p) / trials)
  double ci_low = 0.0;
  double ci_high = 0.0;
  long trials = 0;
  long outages = 0;
};

/// hpfas: pinching antenna above the user, best of N ports.
/// pa_only: same antenna, port 1 only (its draw is shared with hpfas).
/// fa_only: fixed antenna at the region center, best of N ports.
enum class McMode { hpfas, pa_only, fa_only };

std::string to_string(McMode m);
std::optional<McMode> parse_mc_mode(const std::string& name);

/// Wald interval, or the Wilson interval when fewer than 10 outages are observed.
McResult make_result(long outages, long trials, double confidence_level);

/// Outage indicator of one single-user trial; trial t always uses stream (seed, t).
/// Every mode consumes the same draws: two uniforms for the position, then the
/// full block structure. `draws`, when given, receives the number of words used.
bool single_user_trial(const ScenarioSingleUser& s, McMode mode, std::uint64_t seed, std::uint64_t trial,
                       std::uint64_t* draws = nullptr);

McResult mc_outage_single(const ScenarioSingleUser& s, McMode mode, const McConfig& cfg);

/// General downlink layout: K waveguides across the y extent, each serving the
/// user of its own strip with M pinching antennas and uniform weights 1/sqrt(M).
/// Waveguide k runs along x at the centre of strip k; its antennas sit at the
/// user's x (hpfas, pa_only) or at x = D1/2 (fa_only), spread by half a
/// wavelength when M > 1.
struct MultiUserScenario {
  SystemParams params;
  BlockStructure blocks;
  int num_users = 2;
  int antennas_per_waveguide = 1;
  std::vector<double> feed_offsets; // m per waveguide; empty means all zero

  void validate() const;
  static MultiUserScenario from_two_user(const ScenarioTwoUser& s);
};

/// Layout of one trial: antennas and weights for the given user positions.
MultiUserLayout make_layout(const MultiUserScenario& s, McMode mode, const std::vector<Eigen::Vector3d>& users);

/// Per-user outage indicators of one trial under the SIR criterion (noise ignored).
std::vector<bool> multiuser_trial(const MultiUserScenario& s, McMode mode, std::uint64_t seed,
                                  std::uint64_t trial);

/// One result per user.
std::vector<McResult> mc_outage_multiuser(const MultiUserScenario& s, McMode mode, const McConfig& cfg);
std::vector<McResult> mc_outage_multiuser(const ScenarioTwoUser& s, McMode mode, const McConfig& cfg);

/// Mean of indicator(A) - indicator(B) over shared draws.
struct PairedResult {
  double mean_difference = 0.0;
  double standard_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  long trials = 0;
  long a_only = 0; // trials in outage under A but not B
  long b_only = 0; // trials in outage under B but not A
};

/// Runs both configurations on identical per-trial streams. Throws
/// ValidationError when the two consume different numbers of draws in a trial.
PairedResult mc_paired_compare(const ScenarioSingleUser& a, McMode mode_a, const ScenarioSingleUser& b,
                               McMode mode_b, const McConfig& cfg);

} // namespace hpfas

#endif // HPFAS_OUTAGE_MC_HPP
