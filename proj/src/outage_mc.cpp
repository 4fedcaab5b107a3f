// SPDX-License-Identifier: Apache-2.0

#include "hpfas/outage_mc.hpp"

#include "hpfas/errors.hpp"
#include "hpfas/parallel.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>

namespace hpfas {

void McConfig::validate() const
{
  if (trials < 1)
    throw ValidationError("McConfig: trials must be >= 1");
  if (batch_size < 1)
    throw ValidationError("McConfig: batch_size must be >= 1");
  if (!(confidence_level > 0.0 && confidence_level < 1.0))
    throw ValidationError("McConfig: confidence_level must lie in (0, 1)");
}

std::string to_string(McMode m)
{
  switch (m) {
  case McMode::hpfas:
    return "hpfas";
  case McMode::pa_only:
    return "pa_only";
  case McMode::fa_only:
    return "fa_only";
  }
  return "unknown";
}

std::optional<McMode> parse_mc_mode(const std::string& name)
{
  for (McMode m : {McMode::hpfas, McMode::pa_only, McMode::fa_only})
    if (name == to_string(m))
      return m;
  return std::nullopt;
}

namespace {

double z_value(double confidence_level)
{
  return boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * confidence_level);
}

// Counts per batch, reduced in batch order.
template <class TrialFn>
std::vector<long> count_batches(long trials, const McConfig& cfg, int width, TrialFn&& trial_fn)
{
  const long batches = (trials + cfg.batch_size - 1) / cfg.batch_size;
  std::vector<long> slots(static_cast<std::size_t>(batches * width), 0);
  parallel::parallel_for(
      static_cast<std::size_t>(batches),
      [&](std::size_t b) {
        const long begin = static_cast<long>(b) * cfg.batch_size;
        const long end = std::min(trials, begin + cfg.batch_size);
        long* out = &slots[b * static_cast<std::size_t>(width)];
        for (long t = begin; t < end; ++t)
          trial_fn(static_cast<std::uint64_t>(t), out);
      },
      cfg.workers);
  std::vector<long> totals(static_cast<std::size_t>(width), 0);
  for (long b = 0; b < batches; ++b)
    for (int w = 0; w < width; ++w)
      totals[static_cast<std::size_t>(w)] += slots[static_cast<std::size_t>(b * width + w)];
  return totals;
}

} // namespace

McResult make_result(long outages, long trials, double confidence_level)
{
  McResult r;
  r.trials = trials;
  r.outages = outages;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(outages) / n;
  r.outage = p;
  r.standard_error = std::sqrt(p * (1.0 - p) / n);
  const double z = z_value(confidence_level);
  if (static_cast<double>(outages) < 10.0) {
    const double z2n = z * z / n;
    const double center = (p + 0.5 * z2n) / (1.0 + z2n);
    const double half = z / (1.0 + z2n) * std::sqrt(p * (1.0 - p) / n + 0.25 * z2n / n);
    r.ci_low = std::max(0.0, std::min(p, center - half));
    r.ci_high = std::min(1.0, std::max(p, center + half));
  } else {
    r.ci_low = std::max(0.0, p - z * r.standard_error);
    r.ci_high = std::min(1.0, p + z * r.standard_error);
  }
  return r;
}

bool single_user_trial(const ScenarioSingleUser& s, McMode mode, std::uint64_t seed, std::uint64_t trial,
                       std::uint64_t* draws)
{
  const SystemParams& p = s.params;
  RngStream rng(seed, trial);
  const double x = p.region_x * rng.uniform();
  const double y = p.region_y * (rng.uniform() - 0.5);
  const NlosDraw draw = draw_nlos(s.blocks, rng);
  if (draws != nullptr)
    *draws = rng.draws();

  const Eigen::Vector3d user(x, y, 0.0);
  Eigen::Vector3d tx;
  double d0 = 0.0;
  if (mode == McMode::fa_only) {
    tx = s.center_antenna();
  } else {
    tx = {s.pa_alignment ? x : 0.5 * p.region_x, 0.0, p.waveguide_height};
    d0 = s.feed_offset + tx.x();
  }

  Eigen::VectorXcd nlos = compose_nlos(s.blocks, p.correlation, draw);
  if (mode == McMode::pa_only)
    nlos.conservativeResize(1);
  const ChannelRealization ch = compose_channel(user, tx, d0, p, nlos);
  const double best = ch.port_gains.cwiseAbs2().maxCoeff();
  return p.tx_power * best / p.noise_power < p.snr_threshold;
}

McResult mc_outage_single(const ScenarioSingleUser& s, McMode mode, const McConfig& cfg)
{
  s.validate();
  cfg.validate();
  const auto totals = count_batches(cfg.trials, cfg, 1, [&](std::uint64_t t, long* out) {
    if (single_user_trial(s, mode, cfg.seed, t))
      ++out[0];
  });
  return make_result(totals[0], cfg.trials, cfg.confidence_level);
}

void MultiUserScenario::validate() const
{
  params.validate();
  blocks.validate();
  if (num_users < 2)
    throw ValidationError("multi-user scenario needs at least two users");
  if (antennas_per_waveguide < 1)
    throw ValidationError("multi-user scenario needs at least one antenna per waveguide");
  if (!feed_offsets.empty() && feed_offsets.size() != static_cast<std::size_t>(num_users))
    throw ValidationError("multi-user scenario: one feed offset per waveguide");
}

MultiUserScenario MultiUserScenario::from_two_user(const ScenarioTwoUser& s)
{
  return {s.params, s.blocks, 2, 1, {s.feed_offset_1, s.feed_offset_2}};
}

namespace {

double strip_center(const MultiUserScenario& s, int k)
{
  const double width = s.params.region_y / s.num_users;
  return -0.5 * s.params.region_y + (k + 0.5) * width;
}

} // namespace

MultiUserLayout make_layout(const MultiUserScenario& s, McMode mode, const std::vector<Eigen::Vector3d>& users)
{
  const SystemParams& p = s.params;
  const int M = s.antennas_per_waveguide;
  const double spacing = 0.5 * p.wavelength();
  MultiUserLayout layout;
  for (int k = 0; k < s.num_users; ++k) {
    const double x0 = mode == McMode::fa_only ? 0.5 * p.region_x : users[static_cast<std::size_t>(k)].x();
    std::vector<Eigen::Vector3d> antennas;
    for (int m = 0; m < M; ++m) {
      const double x = std::clamp(x0 + (m - 0.5 * (M - 1)) * spacing, 0.0, p.region_x);
      antennas.emplace_back(x, strip_center(s, k), p.waveguide_height);
    }
    layout.antennas.push_back(std::move(antennas));
    layout.weights.emplace_back(static_cast<std::size_t>(M), std::complex<double>(1.0 / std::sqrt(M), 0.0));
    layout.feed_offsets.push_back(s.feed_offsets.empty() ? 0.0 : s.feed_offsets[static_cast<std::size_t>(k)]);
  }
  return layout;
}

std::vector<bool> multiuser_trial(const MultiUserScenario& s, McMode mode, std::uint64_t seed, std::uint64_t trial)
{
  const SystemParams& p = s.params;
  const int K = s.num_users;
  RngStream rng(seed, trial);
  std::vector<Eigen::Vector3d> users;
  const double width = p.region_y / K;
  for (int k = 0; k < K; ++k) {
    const double x = p.region_x * rng.uniform();
    const double y = -0.5 * p.region_y + (k + rng.uniform()) * width;
    users.emplace_back(x, y, 0.0);
  }
  const MultiUserLayout layout = make_layout(s, mode, users);
  const auto ch = sample_multiuser_channels(layout, users, p, s.blocks, rng);
  const Eigen::Index ports = mode == McMode::pa_only ? 1 : s.blocks.num_ports;

  std::vector<bool> outage(static_cast<std::size_t>(K));
  for (int u = 0; u < K; ++u) {
    Eigen::VectorXd signal = Eigen::VectorXd::Zero(ports);
    Eigen::VectorXd interference = Eigen::VectorXd::Zero(ports);
    for (int k = 0; k < K; ++k) {
      Eigen::VectorXcd combined = Eigen::VectorXcd::Zero(ports);
      for (std::size_t m = 0; m < layout.antennas[static_cast<std::size_t>(k)].size(); ++m)
        combined += layout.weights[static_cast<std::size_t>(k)][m] *
                    ch[static_cast<std::size_t>(u)][static_cast<std::size_t>(k)][m].port_gains.head(ports);
      if (k == u)
        signal = combined.cwiseAbs2();
      else
        interference += combined.cwiseAbs2();
    }
    const double best = (signal.array() / interference.array()).maxCoeff();
    outage[static_cast<std::size_t>(u)] = best < p.snr_threshold;
  }
  return outage;
}

std::vector<McResult> mc_outage_multiuser(const MultiUserScenario& s, McMode mode, const McConfig& cfg)
{
  s.validate();
  cfg.validate();
  const int K = s.num_users;
  const auto totals = count_batches(cfg.trials, cfg, K, [&](std::uint64_t t, long* out) {
    const std::vector<bool> o = multiuser_trial(s, mode, cfg.seed, t);
    for (int k = 0; k < K; ++k)
      if (o[static_cast<std::size_t>(k)])
        ++out[k];
  });
  std::vector<McResult> results;
  for (int k = 0; k < K; ++k)
    results.push_back(make_result(totals[static_cast<std::size_t>(k)], cfg.trials, cfg.confidence_level));
  return results;
}

std::vector<McResult> mc_outage_multiuser(const ScenarioTwoUser& s, McMode mode, const McConfig& cfg)
{
  s.validate();
  return mc_outage_multiuser(MultiUserScenario::from_two_user(s), mode, cfg);
}

PairedResult mc_paired_compare(const ScenarioSingleUser& a, McMode mode_a, const ScenarioSingleUser& b,
                               McMode mode_b, const McConfig& cfg)
{
  a.validate();
  b.validate();
  cfg.validate();
  // Slots: outage under A only, outage under B only, draw-count mismatches.
  const auto totals = count_batches(cfg.trials, cfg, 3, [&](std::uint64_t t, long* out) {
    std::uint64_t draws_a = 0;
    std::uint64_t draws_b = 0;
    const bool oa = single_user_trial(a, mode_a, cfg.seed, t, &draws_a);
    const bool ob = single_user_trial(b, mode_b, cfg.seed, t, &draws_b);
    if (draws_a != draws_b)
      ++out[2];
    if (oa && !ob)
      ++out[0];
    if (ob && !oa)
      ++out[1];
  });
  if (totals[2] != 0)
    throw ValidationError("paired comparison: the two configurations consume different numbers of draws");

  PairedResult r;
  r.trials = cfg.trials;
  r.a_only = totals[0];
  r.b_only = totals[1];
  const double n = static_cast<double>(cfg.trials);
  r.mean_difference = static_cast<double>(r.a_only - r.b_only) / n;
  const double second_moment = static_cast<double>(r.a_only + r.b_only) / n;
  r.standard_error = std::sqrt(std::max(0.0, second_moment - r.mean_difference * r.mean_difference) / n);
  const double z = z_value(cfg.confidence_level);
  r.ci_low = r.mean_difference - z * r.standard_error;
  r.ci_high = r.mean_difference + z * r.standard_error;
  return r;
}

} // namespace hpfas
