// SPDX-License-Identifier: Apache-2.0

#ifndef HPFAS_MODEL_HPP
#define HPFAS_MODEL_HPP

#include <Eigen/Core>

#include <map>
#include <string>
#include <vector>

namespace hpfas {

constexpr double kSpeedOfLight = 299792458.0;

namespace units {
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);
double linear_to_db(double linear);
} // namespace units

/// Physical and statistical constants of a link, in SI units throughout.
struct SystemParams {
  double carrier_frequency = 28e9;        // Hz
  double effective_refractive_index = 1.4;
  double pathloss_exponent = 2.5;
  double rician_factor = 7.0;
  double correlation = 0.98488578017961; // mu, with mu^2 = 0.97
  double tx_power = 0.031622776601683794; // W (15 dBm)
  double noise_power = 1e-11;             // W (-80 dBm)
  double snr_threshold = 10.0;            // linear (10 dB)
  double waveguide_height = 3.0;          // m
  double region_x = 20.0;                 // m (D1)
  double region_y = 20.0;                 // m (D2)
  double fa_length = 2.0;                 // recorded only; the block model sets correlation

  void validate() const;

  double wavelength() const { return kSpeedOfLight / carrier_frequency; }
  double guided_wavelength() const { return wavelength() / effective_refractive_index; }
  /// lambda^2 / (4 pi)^2
  double eta0() const;
  double mu2() const { return correlation * correlation; }
  /// Large-scale gain eta0 / d^eps.
  double pathloss(double distance) const;

  static SystemParams single_user_sweep_preset();
  static SystemParams power_sweep_preset();
  static SystemParams two_user_preset();
};

/// Partition of the N fluid-antenna ports into correlation blocks.
struct BlockStructure {
  int num_ports = 20;
  std::vector<int> block_sizes{5, 5, 5, 5};

  void validate() const;
  int num_blocks() const { return static_cast<int>(block_sizes.size()); }
  /// Block size -> number of blocks of that size.
  std::map<int, int> multiplicities() const;
  /// Block index of every port, ports numbered block by block.
  std::vector<int> port_to_block() const;

  static BlockStructure uniform(int num_ports, int num_blocks);
  static BlockStructure single_port() { return {1, {1}}; }
};

struct ScenarioSingleUser {
  SystemParams params;
  BlockStructure blocks;
  bool pa_alignment = true;
  double feed_offset = 0.0; // m, feed point behind x = 0; enters phases only

  void validate() const;
  /// Fixed conventional antenna of the FA-only baseline, at the region center.
  Eigen::Vector3d center_antenna() const;
};

struct ScenarioTwoUser {
  SystemParams params;
  BlockStructure blocks;
  double feed_offset_1 = 0.0; // m, phases only
  double feed_offset_2 = 0.0;

  void validate() const;
  double pa1_y() const { return -0.25 * params.region_y; }
  double pa2_y() const { return 0.25 * params.region_y; }
  /// Fixed conventional antennas of the FA-only baseline, at the two region centers.
  Eigen::Vector3d bs_center_1() const;
  Eigen::Vector3d bs_center_2() const;
};

enum class EstimateMethod { exact, sfa, closed_form, monte_carlo };

std::string to_string(EstimateMethod m);

struct OutageEstimate {
  double value = 0.0;
  EstimateMethod method = EstimateMethod::exact;
  double error = 0.0;
  long trials = 0;
  long evaluations = 0; // kernel evaluations (analytic) or draws (Monte Carlo)
  bool converged = true;
  bool sfa_degenerate = false; // an SFA threshold hit the pole of its denominator
};

/// 2 (kappa + 1) gamma_th sigma^2 d^eps / (P_t eta0 (1 - mu^2)) for a given squared distance.
double threshold_from_distance2(const SystemParams& p, double distance2);

/// Threshold with the pinching antenna aligned above the user: d^2 = phi_y^2 + h^2.
double threshold_C(const SystemParams& p, double phi_y);

/// Threshold for a fixed antenna at the region center: d^2 = (phi_x - D1/2)^2 + phi_y^2 + h^2.
double threshold_C_tilde(const SystemParams& p, double phi_x, double phi_y);

/// Distance-ratio SIR threshold |u - a1|^eps / |u - a2|^eps * gamma_th for desired
/// antenna a1 and interfering antenna a2.
double gamma_tilde_mu(const ScenarioTwoUser& s, const Eigen::Vector3d& user1,
                      const Eigen::Vector3d& pa1, const Eigen::Vector3d& pa2);

/// Same, with both pinching antennas aligned in x with their users.
double gamma_tilde_aligned(const ScenarioTwoUser& s, double phi_x1, double phi_x2, double phi_y1);

/// Same, with the fixed antennas at the two region centers.
double gamma_tilde_fixed(const ScenarioTwoUser& s, double phi_x1, double phi_y1);

struct SfaThreshold {
  double value = 0.0;
  bool degenerate = false; // denominator within 1e-9 of zero; C was nudged
  bool clamped = false;    // raw value was negative and has been set to zero
};

/// Step-function threshold for a block of L ports at threshold constant C:
/// sqrt((1 - mu^2)/mu^2) [sqrt C + ((L-1)/sqrt(2 pi) sqrt C + 1/2) /
///                        ((L-1)/(2 sqrt(2 pi)) + 1/(2 sqrt C) - sqrt C)].
SfaThreshold sfa_delta_from_C(double C, int L, double mu);

SfaThreshold sfa_delta(double phi_y, int L, const SystemParams& p);

/// Squared step threshold for one block of the two-user SIR outage, as a
/// function of the block variable r of the desired link.
double sfa_delta_mu(double r, int L, double gamma_tilde, double mu);

} // namespace hpfas

#endif // HPFAS_MODEL_HPP
