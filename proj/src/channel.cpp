// SPDX-License-Identifier: Apache-2.0

#include "hpfas/channel.hpp"

#include "hpfas/errors.hpp"

#include <cmath>
#include <numbers>

namespace hpfas {

std::complex<double> los_gain(double d, double d0, const SystemParams& p)
{
  if (!(d > 0.0) || !std::isfinite(d))
    throw DomainError("los_gain: distance must be > 0");
  if (!(d0 >= 0.0) || !std::isfinite(d0))
    throw DomainError("los_gain: feed distance must be >= 0");
  const double phase = 2.0 * std::numbers::pi * (d / p.wavelength() + d0 / p.guided_wavelength());
  return std::sqrt(p.pathloss(d)) * std::polar(1.0, -phase);
}

NlosDraw draw_nlos(const BlockStructure& blocks, RngStream& rng)
{
  NlosDraw draw{Eigen::VectorXcd(blocks.num_blocks()), Eigen::VectorXcd(blocks.num_ports)};
  Eigen::Index port = 0;
  for (int b = 0; b < blocks.num_blocks(); ++b) {
    draw.block_common[b] = rng.normal_pair();
    for (int i = 0; i < blocks.block_sizes[static_cast<std::size_t>(b)]; ++i)
      draw.port_local[port++] = rng.normal_pair();
  }
  return draw;
}

Eigen::VectorXcd compose_nlos(const BlockStructure& blocks, double mu, const NlosDraw& draw)
{
  const double local = std::sqrt(1.0 - mu * mu);
  Eigen::VectorXcd out(blocks.num_ports);
  Eigen::Index port = 0;
  for (int b = 0; b < blocks.num_blocks(); ++b) {
    const int L = blocks.block_sizes[static_cast<std::size_t>(b)];
    out.segment(port, L) = local * draw.port_local.segment(port, L).array() + mu * draw.block_common[b];
    port += L;
  }
  return out;
}

Eigen::VectorXcd sample_nlos_block(const BlockStructure& blocks, double mu, RngStream& rng)
{
  return compose_nlos(blocks, mu, draw_nlos(blocks, rng));
}

ChannelRealization compose_channel(const Eigen::Vector3d& rx, const Eigen::Vector3d& tx, double d0,
                                   const SystemParams& p, const Eigen::VectorXcd& nlos)
{
  ChannelRealization out;
  out.distance = (rx - tx).norm();
  out.los_phase = 2.0 * std::numbers::pi * (out.distance / p.wavelength() + d0 / p.guided_wavelength());
  const double kappa = p.rician_factor;
  const double amplitude = std::sqrt(p.pathloss(out.distance));
  const std::complex<double> los = std::sqrt(kappa / (kappa + 1.0)) * std::polar(1.0, -out.los_phase);
  const double nlos_scale = std::sqrt(1.0 / (2.0 * (kappa + 1.0)));
  out.port_gains = amplitude * (los + nlos_scale * nlos.array());
  return out;
}

ChannelRealization sample_channel(const Eigen::Vector3d& rx, const Eigen::Vector3d& tx, double d0,
                                  const SystemParams& p, const BlockStructure& blocks,
                                  RngStream& rng)
{
  return compose_channel(rx, tx, d0, p, sample_nlos_block(blocks, p.correlation, rng));
}

void MultiUserLayout::validate() const
{
  const std::size_t k = antennas.size();
  if (k == 0)
    throw ValidationError("multi-user layout needs at least one waveguide");
  if (weights.size() != k || feed_offsets.size() != k)
    throw ValidationError("multi-user layout: weights and feed offsets must match the waveguide count");
  for (std::size_t i = 0; i < k; ++i) {
    if (antennas[i].empty() || weights[i].size() != antennas[i].size())
      throw ValidationError("multi-user layout: one weight per antenna is required");
    double norm = 0.0;
    for (const auto& w : weights[i])
      norm += std::norm(w);
    if (std::abs(norm - 1.0) > 1e-9)
      throw ValidationError("multi-user layout: beamforming weights must have unit norm");
    if (!(feed_offsets[i] >= 0.0))
      throw ValidationError("multi-user layout: feed offsets must be >= 0");
  }
}

std::vector<std::vector<std::vector<ChannelRealization>>>
sample_multiuser_channels(const MultiUserLayout& layout, const std::vector<Eigen::Vector3d>& users,
                          const SystemParams& p, const BlockStructure& blocks, RngStream& rng)
{
  layout.validate();
  if (users.size() != layout.antennas.size())
    throw ValidationError("multi-user layout: one user per waveguide is required");
  std::vector<std::vector<std::vector<ChannelRealization>>> out(users.size());
  for (std::size_t u = 0; u < users.size(); ++u) {
    out[u].resize(layout.antennas.size());
    for (std::size_t k = 0; k < layout.antennas.size(); ++k)
      for (const Eigen::Vector3d& a : layout.antennas[k]) {
        const double d0 = layout.feed_offsets[k] + a.x();
        out[u][k].push_back(sample_channel(users[u], a, d0, p, blocks, rng));
      }
  }
  return out;
}

} // namespace hpfas
