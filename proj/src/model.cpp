// SPDX-License-Identifier: Apache-2.0

#include "hpfas/model.hpp"

#include "hpfas/errors.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace hpfas {

namespace units {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

} // namespace units

namespace {

void require(bool ok, const char* msg)
{
  if (!ok)
    throw ValidationError(msg);
}

} // namespace

void SystemParams::validate() const
{
  require(std::isfinite(carrier_frequency) && carrier_frequency > 0.0,
          "carrier_frequency must be > 0");
  require(std::isfinite(effective_refractive_index) && effective_refractive_index > 0.0,
          "effective_refractive_index must be > 0");
  require(std::isfinite(pathloss_exponent) && pathloss_exponent >= 2.0,
          "pathloss_exponent must be >= 2");
  require(std::isfinite(rician_factor) && rician_factor >= 0.0, "rician_factor must be >= 0");
  require(correlation > 0.0 && correlation < 1.0, "correlation must lie in (0, 1)");
  require(std::isfinite(tx_power) && tx_power > 0.0, "tx_power must be > 0");
  require(std::isfinite(noise_power) && noise_power > 0.0, "noise_power must be > 0");
  require(std::isfinite(snr_threshold) && snr_threshold >= 0.0, "snr_threshold must be >= 0");
  require(std::isfinite(waveguide_height) && waveguide_height > 0.0,
          "waveguide_height must be > 0");
  require(std::isfinite(region_x) && region_x > 0.0, "region_x must be > 0");
  require(std::isfinite(region_y) && region_y > 0.0, "region_y must be > 0");
  require(std::isfinite(fa_length) && fa_length >= 0.0, "fa_length must be >= 0");
}

double SystemParams::eta0() const
{
  const double k = wavelength() / (4.0 * std::numbers::pi);
  return k * k;
}

double SystemParams::pathloss(double distance) const
{
  return eta0() * std::pow(distance, -pathloss_exponent);
}

SystemParams SystemParams::single_user_sweep_preset()
{
  SystemParams p;
  p.rician_factor = 7.0;
  p.tx_power = units::dbm_to_watts(15.0);
  p.waveguide_height = 3.0;
  p.region_x = 20.0;
  p.region_y = 20.0;
  return p;
}

SystemParams SystemParams::power_sweep_preset()
{
  SystemParams p;
  p.rician_factor = 5.0;
  p.snr_threshold = units::db_to_linear(10.0);
  p.waveguide_height = 4.0;
  p.region_x = 30.0;
  p.region_y = 25.0;
  return p;
}

SystemParams SystemParams::two_user_preset()
{
  SystemParams p;
  p.rician_factor = 5.0;
  p.waveguide_height = 3.0;
  p.region_x = 25.0;
  p.region_y = 25.0;
  return p;
}

void BlockStructure::validate() const
{
  require(num_ports >= 1, "num_ports must be >= 1");
  require(!block_sizes.empty(), "block_sizes must not be empty");
  for (int L : block_sizes)
    require(L >= 1, "every block size must be >= 1");
  require(std::accumulate(block_sizes.begin(), block_sizes.end(), 0) == num_ports,
          "block sizes must sum to num_ports");
}

std::map<int, int> BlockStructure::multiplicities() const
{
  std::map<int, int> m;
  for (int L : block_sizes)
    ++m[L];
  return m;
}

std::vector<int> BlockStructure::port_to_block() const
{
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(num_ports));
  for (int b = 0; b < num_blocks(); ++b)
    out.insert(out.end(), static_cast<std::size_t>(block_sizes[static_cast<std::size_t>(b)]), b);
  return out;
}

BlockStructure BlockStructure::uniform(int num_ports, int num_blocks)
{
  if (num_blocks < 1 || num_ports < num_blocks)
    throw ValidationError("uniform blocks need 1 <= num_blocks <= num_ports");
  BlockStructure bs{num_ports, {}};
  for (int b = 0; b < num_blocks; ++b)
    bs.block_sizes.push_back(num_ports / num_blocks + (b < num_ports % num_blocks ? 1 : 0));
  return bs;
}

void ScenarioSingleUser::validate() const
{
  params.validate();
  blocks.validate();
  require(std::isfinite(feed_offset) && feed_offset >= 0.0, "feed_offset must be >= 0");
}

Eigen::Vector3d ScenarioSingleUser::center_antenna() const
{
  return {0.5 * params.region_x, 0.0, params.waveguide_height};
}

void ScenarioTwoUser::validate() const
{
  params.validate();
  blocks.validate();
  require(std::isfinite(feed_offset_1) && feed_offset_1 >= 0.0, "feed_offset_1 must be >= 0");
  require(std::isfinite(feed_offset_2) && feed_offset_2 >= 0.0, "feed_offset_2 must be >= 0");
}

Eigen::Vector3d ScenarioTwoUser::bs_center_1() const
{
  return {0.5 * params.region_x, pa1_y(), params.waveguide_height};
}

Eigen::Vector3d ScenarioTwoUser::bs_center_2() const
{
  return {0.5 * params.region_x, pa2_y(), params.waveguide_height};
}

std::string to_string(EstimateMethod m)
{
  switch (m) {
  case EstimateMethod::exact:
    return "exact";
  case EstimateMethod::sfa:
    return "sfa";
  case EstimateMethod::closed_form:
    return "closed_form";
  case EstimateMethod::monte_carlo:
    return "monte_carlo";
  }
  return "unknown";
}

double threshold_from_distance2(const SystemParams& p, double distance2)
{
  const double mu2 = p.mu2();
  return 2.0 * (p.rician_factor + 1.0) * p.snr_threshold * p.noise_power *
         std::pow(distance2, 0.5 * p.pathloss_exponent) / (p.tx_power * p.eta0() * (1.0 - mu2));
}

double threshold_C(const SystemParams& p, double phi_y)
{
  const double h = p.waveguide_height;
  return threshold_from_distance2(p, phi_y * phi_y + h * h);
}

double threshold_C_tilde(const SystemParams& p, double phi_x, double phi_y)
{
  const double h = p.waveguide_height;
  const double dx = phi_x - 0.5 * p.region_x;
  return threshold_from_distance2(p, dx * dx + phi_y * phi_y + h * h);
}

double gamma_tilde_mu(const ScenarioTwoUser& s, const Eigen::Vector3d& user1,
                      const Eigen::Vector3d& pa1, const Eigen::Vector3d& pa2)
{
  const double d1 = (user1 - pa1).squaredNorm();
  const double d2 = (user1 - pa2).squaredNorm();
  return std::pow(d1 / d2, 0.5 * s.params.pathloss_exponent) * s.params.snr_threshold;
}

double gamma_tilde_aligned(const ScenarioTwoUser& s, double phi_x1, double phi_x2, double phi_y1)
{
  const double h = s.params.waveguide_height;
  const Eigen::Vector3d user(phi_x1, phi_y1, 0.0);
  return gamma_tilde_mu(s, user, {phi_x1, s.pa1_y(), h}, {phi_x2, s.pa2_y(), h});
}

double gamma_tilde_fixed(const ScenarioTwoUser& s, double phi_x1, double phi_y1)
{
  const Eigen::Vector3d user(phi_x1, phi_y1, 0.0);
  return gamma_tilde_mu(s, user, s.bs_center_1(), s.bs_center_2());
}

namespace {

double sfa_denominator(double sqrt_c, double a)
{
  return 0.5 * a + 0.5 / sqrt_c - sqrt_c;
}

double sfa_raw(double C, double a, double scale)
{
  const double sc = std::sqrt(C);
  return scale * (sc + (a * sc + 0.5) / sfa_denominator(sc, a));
}

} // namespace

SfaThreshold sfa_delta_from_C(double C, int L, double mu)
{
  if (!(C >= 0.0) || !std::isfinite(C))
    throw DomainError("sfa_delta: C must be finite and >= 0");
  if (L < 1)
    throw DomainError("sfa_delta: L must be >= 1");
  if (!(mu > 0.0 && mu < 1.0))
    throw DomainError("sfa_delta: mu must lie in (0, 1)");
  SfaThreshold out;
  if (C == 0.0)
    return out;

  const double a = (L - 1) / std::sqrt(2.0 * std::numbers::pi);
  const double scale = std::sqrt((1.0 - mu * mu) / (mu * mu));
  double raw = 0.0;
  if (std::abs(sfa_denominator(std::sqrt(C), a)) < 1e-9) {
    // Continue from below the pole, where delta grows with C.
    out.degenerate = true;
    raw = sfa_raw(C * (1.0 - 1e-6), a, scale);
  } else {
    raw = sfa_raw(C, a, scale);
  }
  if (raw < 0.0) {
    out.clamped = true;
    raw = 0.0;
  }
  out.value = raw;
  return out;
}

SfaThreshold sfa_delta(double phi_y, int L, const SystemParams& p)
{
  return sfa_delta_from_C(threshold_C(p, phi_y), L, p.correlation);
}

double sfa_delta_mu(double r, int L, double gamma_tilde, double mu)
{
  if (!(r >= 0.0) || !std::isfinite(r))
    throw DomainError("sfa_delta_mu: r must be finite and >= 0");
  if (!(gamma_tilde > 0.0) || !std::isfinite(gamma_tilde))
    throw DomainError("sfa_delta_mu: gamma_tilde must be > 0");
  if (L < 1)
    throw DomainError("sfa_delta_mu: L must be >= 1");
  const double mu2 = mu * mu;
  const double u = mu2 * r / (2.0 * (1.0 - mu2) * gamma_tilde);
  const double d = std::sqrt(u) + std::sqrt(u + 0.5 / gamma_tilde);
  const double a = (L - 1) / std::sqrt(2.0 * std::numbers::pi);
  const double inner = d + (a + 0.5 / d) / (a * 0.5 / d + 2.0);
  return (1.0 - mu2) / mu2 * inner * inner;
}

} // namespace hpfas
